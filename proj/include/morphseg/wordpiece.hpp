#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "morphseg/error.hpp"
#include "morphseg/vocab.hpp"

namespace morphseg {

inline constexpr std::string_view unknown_token = "[UNK]";
inline constexpr std::size_t default_max_chars = 100;

struct WordPieceSegmentation {
    std::vector<std::string> tokens;
    bool is_unknown = false;

    friend bool operator==(const WordPieceSegmentation&, const WordPieceSegmentation&) = default;
};

/// Greedy longest-match-first segmentation of a single word, as done by the
/// BERT reference tokenizer after basic tokenization.
inline WordPieceSegmentation segment_wordpiece(std::string_view word, const Vocabulary& vocab,
                                               std::size_t max_chars = default_max_chars)
{
    if (word.empty()) throw argument_error("segment_wordpiece: empty word");
    const WordPieceSegmentation unknown{{std::string(unknown_token)}, true};
    if (word.size() > max_chars) return unknown;

    WordPieceSegmentation out;
    std::string candidate;
    std::size_t start = 0;
    while (start < word.size()) {
        std::size_t end = std::min(word.size(), start + vocab.max_piece_length());
        bool matched = false;
        for (; end > start; --end) {
            candidate.clear();
            if (start > 0) candidate += Vocabulary::continuation_prefix;
            candidate += word.substr(start, end - start);
            if (vocab.contains(candidate)) {
                matched = true;
                break;
            }
        }
        if (!matched) return unknown;
        out.tokens.push_back(candidate);
        start = end;
    }
    return out;
}

}  // namespace morphseg
