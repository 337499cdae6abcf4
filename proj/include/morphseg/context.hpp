#pragma once

#include <optional>
#include <string_view>

#include "morphseg/derivational.hpp"
#include "morphseg/vocab.hpp"
#include "morphseg/wordpiece.hpp"

namespace morphseg {

/// Read-only bundle of the resources both segmenters need. The referenced
/// objects must outlive the context.
struct SegmentationContext {
    const Vocabulary& vocab;
    const AffixInventory& affixes;
    const StemSet& stems;
    int max_depth = default_max_depth;
    std::size_t max_chars = default_max_chars;

    std::optional<DerivationalSegmentation> derivational(std::string_view word) const
    {
        return segment_derivational(word, affixes, stems, max_depth);
    }

    WordPieceSegmentation wordpiece(std::string_view word) const { return segment_wordpiece(word, vocab, max_chars); }

    /// Derivable words have a derivational segmentation and a known WordPiece one.
    bool is_derivable(std::string_view word) const
    {
        return !word.empty() && derivational(word).has_value() && !wordpiece(word).is_unknown;
    }
};

}  // namespace morphseg
