#pragma once

#include <filesystem>
#include <set>
#include <string>

#include "morphseg/context.hpp"
#include "morphseg/vocab.hpp"

namespace morphseg {

/// Loaded vocabulary, affix inventory, stopwords and stem set. Pinned in
/// place because segmentation contexts refer into it.
class Resources {
public:
    Resources(const std::filesystem::path& vocab_file, const std::filesystem::path& prefix_file,
              const std::filesystem::path& suffix_file, const std::filesystem::path& stopword_file)
        : vocab_(load_vocabulary(vocab_file)),
          affixes_(load_affix_inventory(prefix_file, suffix_file, vocab_)),
          stopwords_(load_stopwords(stopword_file)),
          stems_(build_stem_set(vocab_, affixes_, stopwords_))
    {
    }

    Resources(const Resources&) = delete;
    Resources& operator=(const Resources&) = delete;

    const Vocabulary& vocab() const { return vocab_; }
    const AffixInventory& affixes() const { return affixes_; }
    const std::set<std::string>& stopwords() const { return stopwords_; }
    const StemSet& stems() const { return stems_; }

    SegmentationContext context(int max_depth = default_max_depth, std::size_t max_chars = default_max_chars) const
    {
        return {vocab_, affixes_, stems_, max_depth, max_chars};
    }

private:
    Vocabulary vocab_;
    AffixInventory affixes_;
    std::set<std::string> stopwords_;
    StemSet stems_;
};

}  // namespace morphseg
