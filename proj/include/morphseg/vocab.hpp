#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "morphseg/error.hpp"
#include "morphseg/text.hpp"

namespace morphseg {

enum class TokenId : std::uint32_t {};

constexpr std::size_t index_of(TokenId id) { return static_cast<std::size_t>(id); }

namespace detail {

struct string_hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
};

inline bool is_special_token(std::string_view t)
{
    return t.size() > 2 && t.front() == '[' && t.back() == ']';
}

}  // namespace detail

/// Fixed WordPiece token inventory. Ids are dense and follow file order.
/// Word-initial tokens are stored bare; continuation tokens carry "##".
class Vocabulary {
public:
    static constexpr std::string_view continuation_prefix = "##";

    Vocabulary() = default;

    /// Throws format_error on an empty inventory or a duplicate token.
    explicit Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens))
    {
        if (tokens_.empty()) throw format_error("vocabulary is empty");
        index_.reserve(tokens_.size());
        for (std::size_t i = 0; i < tokens_.size(); ++i) {
            if (tokens_[i].empty()) throw format_error("empty token at line " + std::to_string(i + 1));
            auto [it, inserted] = index_.emplace(tokens_[i], static_cast<TokenId>(i));
            if (!inserted) {
                throw format_error("duplicate token '" + tokens_[i] + "' at line " + std::to_string(i + 1) +
                                   " (first seen at line " + std::to_string(index_of(it->second) + 1) + ")");
            }
            max_piece_length_ = std::max(max_piece_length_, piece_of(tokens_[i]).size());
        }
    }

    std::size_t size() const { return tokens_.size(); }

    std::optional<TokenId> find(std::string_view token) const
    {
        const auto it = index_.find(token);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    bool contains(std::string_view token) const { return index_.find(token) != index_.end(); }

    /// Bare `piece` present as a word-initial token.
    bool contains_word_initial(std::string_view piece) const
    {
        return !is_continuation(piece) && contains(piece);
    }

    /// `piece` present as the continuation token "##piece".
    bool contains_continuation(std::string_view piece) const
    {
        return contains(std::string(continuation_prefix) + std::string(piece));
    }

    const std::string& token(TokenId id) const { return tokens_.at(index_of(id)); }

    const std::vector<std::string>& tokens() const { return tokens_; }

    static bool is_continuation(std::string_view token)
    {
        return token.size() > continuation_prefix.size() && token.starts_with(continuation_prefix);
    }

    /// Token text with any continuation prefix removed.
    static std::string_view piece_of(std::string_view token)
    {
        return is_continuation(token) ? token.substr(continuation_prefix.size()) : token;
    }

    /// Length of the longest de-prefixed piece, bounds greedy matching.
    std::size_t max_piece_length() const { return max_piece_length_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, TokenId, detail::string_hash, std::equal_to<>> index_;
    std::size_t max_piece_length_ = 0;
};

/// Loads a `vocab.txt`: one token per line, line index = id. Tokens are
/// lowercased, except bracketed special tokens such as [UNK].
inline Vocabulary load_vocabulary(const std::filesystem::path& path)
{
    auto lines = read_lines(path);
    // A single trailing newline produces no extra line with getline; a blank
    // last line would, and is tolerated.
    while (!lines.empty() && lines.back().text.empty()) lines.pop_back();
    if (lines.empty()) throw format_error(path.string() + ": vocabulary file is empty");
    std::vector<std::string> tokens;
    tokens.reserve(lines.size());
    for (auto& line : lines) {
        if (line.text.empty())
            throw format_error(path.string() + ": empty token at line " + std::to_string(line.line_number));
        tokens.push_back(detail::is_special_token(line.text) ? line.text : to_lower(line.text));
    }
    try {
        return Vocabulary(std::move(tokens));
    } catch (const format_error& e) {
        throw format_error(path.string() + ": " + e.what());
    }
}

/// The derivational affix inventory. Prefixes are matched against
/// word-initial vocabulary tokens, suffixes against "##" tokens.
class AffixInventory {
public:
    AffixInventory() = default;

    /// Validates spelling (lowercase a-z) and vocabulary membership.
    AffixInventory(std::set<std::string> prefixes, std::set<std::string> suffixes, const Vocabulary& vocab)
        : prefixes_(std::move(prefixes)), suffixes_(std::move(suffixes))
    {
        for (const auto& p : prefixes_) {
            if (!is_lower_alpha_word(p)) throw format_error("prefix '" + p + "' is not lowercase alphabetic");
            if (!vocab.contains_word_initial(p))
                throw validation_error("prefix '" + p + "' is not a word-initial vocabulary token");
        }
        for (const auto& s : suffixes_) {
            if (!is_lower_alpha_word(s)) throw format_error("suffix '" + s + "' is not lowercase alphabetic");
            if (!vocab.contains_continuation(s))
                throw validation_error("suffix '" + s + "' is missing from the vocabulary as '##" + s + "'");
        }
    }

    const std::set<std::string>& prefixes() const { return prefixes_; }
    const std::set<std::string>& suffixes() const { return suffixes_; }

    bool is_prefix(std::string_view a) const { return prefixes_.find(std::string(a)) != prefixes_.end(); }
    bool is_suffix(std::string_view a) const { return suffixes_.find(std::string(a)) != suffixes_.end(); }
    bool contains(std::string_view a) const { return is_prefix(a) || is_suffix(a); }

private:
    std::set<std::string> prefixes_;
    std::set<std::string> suffixes_;
};

namespace detail {

inline std::set<std::string> read_affix_file(const std::filesystem::path& path, std::string_view role)
{
    std::set<std::string> out;
    for (auto& entry : read_list_file(path)) {
        if (!is_lower_alpha_word(entry.text)) {
            throw format_error(path.string() + ":" + std::to_string(entry.line_number) + ": " + std::string(role) +
                               " '" + entry.text + "' is not alphabetic");
        }
        out.insert(std::move(entry.text));
    }
    return out;
}

}  // namespace detail

inline AffixInventory load_affix_inventory(const std::filesystem::path& prefix_file,
                                           const std::filesystem::path& suffix_file, const Vocabulary& vocab)
{
    return AffixInventory(detail::read_affix_file(prefix_file, "prefix"),
                          detail::read_affix_file(suffix_file, "suffix"), vocab);
}

inline std::set<std::string> load_stopwords(const std::filesystem::path& path)
{
    std::set<std::string> out;
    for (auto& entry : read_list_file(path)) out.insert(std::move(entry.text));
    return out;
}

/// Words that may terminate affix removal.
class StemSet {
public:
    StemSet() = default;

    const std::set<std::string>& stems() const { return stems_; }
    std::size_t size() const { return stems_.size(); }
    bool contains(std::string_view w) const { return stems_.find(std::string(w)) != stems_.end(); }

    friend StemSet build_stem_set(const Vocabulary&, const AffixInventory&, const std::set<std::string>&);

private:
    std::set<std::string> stems_;
};

/// Word-initial, ASCII-alphabetic tokens longer than three characters that are
/// neither stopwords nor affix strings.
inline StemSet build_stem_set(const Vocabulary& vocab, const AffixInventory& affixes,
                              const std::set<std::string>& stopwords)
{
    StemSet out;
    for (const auto& token : vocab.tokens()) {
        if (token.size() <= 3 || !is_lower_alpha_word(token)) continue;
        if (stopwords.contains(token) || affixes.contains(token)) continue;
        out.stems_.insert(token);
    }
    return out;
}

}  // namespace morphseg
