#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "morphseg/error.hpp"
#include "morphseg/text.hpp"
#include "morphseg/vocab.hpp"

namespace morphseg {

inline constexpr int default_max_depth = 4;
inline constexpr std::string_view hyphen_token = "-";

/// Spelling change applied to a base when a suffix is attached.
enum class Spelling : std::uint8_t {
    unchanged,          // lock + able -> lockable
    e_deleted,          // isotope + ize -> isotopize
    consonant_doubled,  // crap + y -> crappy
    y_to_i,             // happy + ness -> happiness
};

inline std::string_view to_string(Spelling s)
{
    switch (s) {
    case Spelling::unchanged: return "unchanged";
    case Spelling::e_deleted: return "e_deleted";
    case Spelling::consonant_doubled: return "consonant_doubled";
    case Spelling::y_to_i: return "y_to_i";
    }
    return "?";
}

struct SuffixStep {
    std::string suffix;
    Spelling spelling = Spelling::unchanged;

    friend auto operator<=>(const SuffixStep&, const SuffixStep&) = default;
};

/// prefixes (outermost first) + stem + suffixes (innermost first).
struct DerivationalSegmentation {
    std::vector<std::string> prefixes;
    std::string stem;
    std::vector<SuffixStep> suffixes;

    std::size_t depth() const { return prefixes.size() + suffixes.size(); }

    friend auto operator<=>(const DerivationalSegmentation&, const DerivationalSegmentation&) = default;
};

/// Whether a base ending in `remainder` + "e" drops its "e" before a
/// vowel-initial suffix. The final letter must be a consonant other than
/// w/x/y (or a 'u', as in continue -> continuous), and not the digraph "ck".
inline bool allows_e_deletion(std::string_view remainder)
{
    if (remainder.empty()) return false;
    const char last = remainder.back();
    if (last == 'u') return true;
    if (!is_ascii_lower(last) || is_vowel(last) || last == 'w' || last == 'x' || last == 'y') return false;
    return !remainder.ends_with("ck");
}

/// Vowel-initial for spelling purposes; 'y' counts (stone + y -> stony).
inline bool is_vowel_initial(std::string_view suffix)
{
    return !suffix.empty() && (is_vowel(suffix.front()) || suffix.front() == 'y');
}

/// Attaches `step` to `base`, applying its recorded spelling change.
/// Throws argument_error when the spelling change does not fit the base.
inline std::string attach_suffix(std::string_view base, const SuffixStep& step)
{
    std::string out(base);
    switch (step.spelling) {
    case Spelling::unchanged: break;
    case Spelling::e_deleted:
        if (!out.ends_with('e')) throw argument_error("e-deletion on '" + out + "' which does not end in e");
        out.pop_back();
        break;
    case Spelling::consonant_doubled:
        if (out.empty() || is_vowel(out.back()))
            throw argument_error("consonant doubling on '" + out + "' which does not end in a consonant");
        out.push_back(out.back());
        break;
    case Spelling::y_to_i:
        if (!out.ends_with('y')) throw argument_error("y-to-i on '" + out + "' which does not end in y");
        out.back() = 'i';
        break;
    }
    return out + step.suffix;
}

/// Forward composition: suffixes innermost-out, then prefixes.
inline std::string compose(const DerivationalSegmentation& seg)
{
    std::string word = seg.stem;
    for (const auto& step : seg.suffixes) word = attach_suffix(word, step);
    for (auto it = seg.prefixes.rbegin(); it != seg.prefixes.rend(); ++it) word = *it + word;
    return word;
}

/// Text of the stem as it appears in the surface word, after the spelling
/// change of the innermost suffix (template -> templat in templatize).
inline std::string surface_stem(const DerivationalSegmentation& seg)
{
    std::string s = seg.stem;
    if (seg.suffixes.empty()) return s;
    switch (seg.suffixes.front().spelling) {
    case Spelling::e_deleted:
        if (s.ends_with('e')) s.pop_back();
        break;
    case Spelling::y_to_i:
        if (s.ends_with('y')) s.back() = 'i';
        break;
    default: break;
    }
    return s;
}

inline constexpr std::size_t min_remainder_length = 2;

inline std::optional<std::string> strip_prefix(std::string_view word, std::string_view prefix)
{
    if (!word.starts_with(prefix) || word.size() < prefix.size() + min_remainder_length) return std::nullopt;
    return std::string(word.substr(prefix.size()));
}

/// One way of undoing a suffix: the recovered base and the spelling change
/// that maps it back onto the surface form.
struct SuffixCandidate {
    std::string base;
    Spelling spelling;

    friend auto operator<=>(const SuffixCandidate&, const SuffixCandidate&) = default;
};

/// All bases that `suffix` could have been attached to in order to spell `word`.
inline std::vector<SuffixCandidate> strip_suffix(std::string_view word, std::string_view suffix)
{
    std::vector<SuffixCandidate> out;
    if (suffix.empty() || !word.ends_with(suffix) || word.size() == suffix.size()) return out;
    const std::string r(word.substr(0, word.size() - suffix.size()));
    const auto add = [&](std::string base, Spelling s) {
        if (base.size() >= min_remainder_length) out.push_back({std::move(base), s});
    };
    add(r, Spelling::unchanged);
    if (is_vowel_initial(suffix) && allows_e_deletion(r)) add(r + "e", Spelling::e_deleted);
    const std::size_t n = r.size();
    if (n >= 2 && r[n - 1] == r[n - 2] && is_ascii_lower(r[n - 1]) && !is_vowel(r[n - 1]))
        add(r.substr(0, n - 1), Spelling::consonant_doubled);
    if (r.ends_with('i')) add(r.substr(0, n - 1) + "y", Spelling::y_to_i);
    return out;
}

/// Affixes removed so far, in removal order.
struct RemovalHistory {
    std::vector<std::string> prefixes;  // outermost first
    std::vector<SuffixStep> suffixes;   // outermost first

    std::size_t suffix_count() const { return suffixes.size(); }

    friend auto operator<=>(const RemovalHistory&, const RemovalHistory&) = default;
};

/// Words reachable after removing the same number of affixes, keyed by word.
/// When several histories reach one word only the one with fewest suffixes
/// (then the smallest history) is kept; continuations from a word do not
/// depend on how it was reached.
class Frontier {
public:
    Frontier() = default;

    static Frontier initial(std::string word)
    {
        Frontier f;
        f.members_.emplace(std::move(word), RemovalHistory{});
        return f;
    }

    void add(std::string word, RemovalHistory history)
    {
        auto it = members_.find(word);
        if (it == members_.end()) {
            members_.emplace(std::move(word), std::move(history));
            return;
        }
        const auto key = [](const RemovalHistory& h) { return std::tie(h.suffixes, h.prefixes); };
        const bool fewer = history.suffix_count() < it->second.suffix_count();
        const bool tie_smaller = history.suffix_count() == it->second.suffix_count() && key(history) < key(it->second);
        if (fewer || tie_smaller) it->second = std::move(history);
    }

    bool empty() const { return members_.empty(); }
    std::size_t size() const { return members_.size(); }
    bool contains(std::string_view w) const { return members_.find(std::string(w)) != members_.end(); }
    const std::map<std::string, RemovalHistory>& members() const { return members_; }

private:
    std::map<std::string, RemovalHistory> members_;
};

/// Removes one more affix from every member in every possible way.
inline Frontier frontier_step(const Frontier& frontier, const AffixInventory& affixes)
{
    Frontier next;
    for (const auto& [word, history] : frontier.members()) {
        for (const auto& prefix : affixes.prefixes()) {
            if (auto rest = strip_prefix(word, prefix)) {
                RemovalHistory h = history;
                h.prefixes.push_back(prefix);
                next.add(std::move(*rest), std::move(h));
            }
        }
        for (const auto& suffix : affixes.suffixes()) {
            for (auto& cand : strip_suffix(word, suffix)) {
                RemovalHistory h = history;
                h.suffixes.push_back({suffix, cand.spelling});
                next.add(std::move(cand.base), std::move(h));
            }
        }
    }
    return next;
}

inline DerivationalSegmentation to_segmentation(const std::string& stem, const RemovalHistory& history)
{
    DerivationalSegmentation seg;
    seg.prefixes = history.prefixes;
    seg.stem = stem;
    seg.suffixes.assign(history.suffixes.rbegin(), history.suffixes.rend());
    return seg;
}

/// Iterative affix removal. Stops at the first depth whose frontier meets the
/// stem set; among those matches the fewest suffixes wins, then the
/// lexicographically smallest stem. Returns nullopt for words with no
/// derivation within `max_depth` affixes (stems themselves included).
inline std::optional<DerivationalSegmentation> segment_derivational(std::string_view word,
                                                                    const AffixInventory& affixes,
                                                                    const StemSet& stems,
                                                                    int max_depth = default_max_depth)
{
    if (word.empty()) return std::nullopt;
    Frontier frontier = Frontier::initial(std::string(word));
    for (int depth = 1; depth <= max_depth; ++depth) {
        frontier = frontier_step(frontier, affixes);
        if (frontier.empty()) return std::nullopt;

        const auto better = [](const DerivationalSegmentation& a, const DerivationalSegmentation& b) {
            if (a.suffixes.size() != b.suffixes.size()) return a.suffixes.size() < b.suffixes.size();
            if (a.stem != b.stem) return a.stem < b.stem;
            return a < b;
        };
        std::optional<DerivationalSegmentation> best;
        for (const auto& [candidate, history] : frontier.members()) {
            if (!stems.contains(candidate)) continue;
            auto seg = to_segmentation(candidate, history);
            if (compose(seg) != word) continue;
            if (!best || better(seg, *best)) best = std::move(seg);
        }
        if (best) return best;
    }
    return std::nullopt;
}

/// DelBERT input: each prefix followed by a hyphen, the stem as a word-initial
/// token, each suffix as a continuation token.
inline std::vector<std::string> serialize_delbert(const DerivationalSegmentation& seg, const Vocabulary& vocab)
{
    std::vector<std::string> out;
    const auto emit = [&](std::string token) {
        if (!vocab.contains(token)) throw serialization_error("token '" + token + "' is not in the vocabulary");
        out.push_back(std::move(token));
    };
    for (const auto& p : seg.prefixes) {
        emit(p);
        emit(std::string(hyphen_token));
    }
    emit(seg.stem);
    for (const auto& s : seg.suffixes) emit(std::string(Vocabulary::continuation_prefix) + s.suffix);
    return out;
}

}  // namespace morphseg
