#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "morphseg/context.hpp"
#include "morphseg/error.hpp"
#include "morphseg/parallel.hpp"
#include "morphseg/random.hpp"
#include "morphseg/text.hpp"

namespace morphseg {

struct Document {
    std::string text;
    std::string label;
};

enum class SemanticClass : std::uint8_t { class1, class2 };

enum class Split : std::uint8_t { train, dev, test };

inline std::string_view to_string(Split s)
{
    switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
    }
    return "?";
}

inline std::optional<Split> parse_split(std::string_view s)
{
    if (s == "train") return Split::train;
    if (s == "dev") return Split::dev;
    if (s == "test") return Split::test;
    return std::nullopt;
}

/// Two named classes, each defined by a set of corpus labels.
struct LabelScheme {
    std::string class1_name;
    std::string class2_name;
    std::set<std::string> class1_labels;
    std::set<std::string> class2_labels;

    void validate() const
    {
        if (class1_name.empty() || class2_name.empty()) throw config_error("label scheme: class names must be set");
        if (class1_name == class2_name) throw config_error("label scheme: class names must differ");
        for (const auto* n : {&class1_name, &class2_name}) {
            if (n->find_first_of(",\t\n\r") != std::string::npos)
                throw config_error("label scheme: class name '" + *n + "' contains a separator character");
        }
        if (class1_labels.empty() || class2_labels.empty())
            throw config_error("label scheme: both label sets must be non-empty");
        for (const auto& l : class1_labels) {
            if (class2_labels.contains(l))
                throw config_error("label scheme: label '" + l + "' is assigned to both classes");
        }
    }

    std::optional<SemanticClass> classify(std::string_view label) const
    {
        const std::string l(label);
        if (class1_labels.contains(l)) return SemanticClass::class1;
        if (class2_labels.contains(l)) return SemanticClass::class2;
        return std::nullopt;
    }

    const std::string& name_of(SemanticClass c) const { return c == SemanticClass::class1 ? class1_name : class2_name; }

    std::optional<SemanticClass> class_named(std::string_view name) const
    {
        if (name == class1_name) return SemanticClass::class1;
        if (name == class2_name) return SemanticClass::class2;
        return std::nullopt;
    }
};

struct WordStats {
    std::string word;
    std::uint64_t count_class1 = 0;  // texts, not occurrences
    std::uint64_t count_class2 = 0;
    std::uint64_t total_frequency = 0;  // occurrences

    WordStats& operator+=(const WordStats& o)
    {
        count_class1 += o.count_class1;
        count_class2 += o.count_class2;
        total_frequency += o.total_frequency;
        return *this;
    }
};

using WordStatsMap = std::map<std::string, WordStats>;

namespace detail {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

inline bool is_hyperlink(std::string_view lowered)
{
    return lowered.starts_with("http://") || lowered.starts_with("https://") || lowered.starts_with("www.");
}

inline void flush_word(std::string& word, std::vector<std::string>& out)
{
    if (word.empty()) return;
    std::string squeezed;
    squeezed.reserve(word.size());
    std::size_t run = 0;
    for (std::size_t i = 0; i < word.size(); ++i) {
        run = (i > 0 && word[i] == word[i - 1]) ? run + 1 : 1;
        if (run <= 3) squeezed.push_back(word[i]);
    }
    out.push_back(std::move(squeezed));
    word.clear();
}

}  // namespace detail

/// Hyperlinks and digit-bearing tokens are dropped, text is lowercased,
/// letter runs longer than three are cut to three, and words are split on
/// anything that is not ASCII a-z.
inline std::vector<std::string> preprocess(std::string_view text)
{
    std::vector<std::string> out;
    std::string word;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && detail::is_space(text[i])) ++i;
        const std::size_t start = i;
        while (i < text.size() && !detail::is_space(text[i])) ++i;
        if (start == i) break;
        const std::string token = to_lower(text.substr(start, i - start));
        if (detail::is_hyperlink(token)) continue;
        if (std::any_of(token.begin(), token.end(), is_ascii_digit)) continue;
        for (const char c : token) {
            if (is_ascii_lower(c))
                word.push_back(c);
            else
                detail::flush_word(word, out);
        }
        detail::flush_word(word, out);
    }
    return out;
}

using DocumentFilter = std::function<bool(const Document&)>;

inline bool accept_all_documents(const Document&) { return true; }

/// Accumulates per-word text counts for derivable words over a stream of
/// document batches. Counting is a commutative merge, so results do not
/// depend on batch boundaries or worker count.
class ComplexWordExtractor {
public:
    ComplexWordExtractor(LabelScheme scheme, const SegmentationContext& ctx,
                         DocumentFilter filter = accept_all_documents)
        : scheme_(std::move(scheme)), ctx_(ctx), filter_(std::move(filter))
    {
    }

    void add(std::span<const Document> docs, std::size_t workers = worker_count())
    {
        const std::size_t chunk = 256;
        const std::size_t n_chunks = (docs.size() + chunk - 1) / chunk;
        std::vector<WordStatsMap> partial(n_chunks);
        parallel_for(
            n_chunks,
            [&](std::size_t c) {
                const auto begin = c * chunk;
                const auto end = std::min(docs.size(), begin + chunk);
                for (std::size_t d = begin; d < end; ++d) count_document(docs[d], partial[c]);
            },
            workers);

        WordStatsMap batch;
        for (auto& p : partial) merge_into(batch, std::move(p));

        std::vector<std::string> unseen;
        for (const auto& [word, _] : batch) {
            if (!derivable_.contains(word)) unseen.push_back(word);
        }
        std::vector<char> verdict(unseen.size(), 0);
        parallel_for(
            unseen.size(), [&](std::size_t i) { verdict[i] = ctx_.is_derivable(unseen[i]) ? 1 : 0; }, workers);
        for (std::size_t i = 0; i < unseen.size(); ++i) derivable_.emplace(unseen[i], verdict[i] != 0);

        for (auto& [word, st] : batch) {
            if (!derivable_.at(word)) continue;
            auto [it, inserted] = stats_.try_emplace(word, WordStats{word});
            it->second += st;
        }
    }

    const WordStatsMap& stats() const { return stats_; }
    std::uint64_t documents_used() const { return used_; }
    std::uint64_t documents_skipped() const { return skipped_; }

private:
    void count_document(const Document& doc, WordStatsMap& out)
    {
        const auto cls = scheme_.classify(doc.label);
        if (!cls || !filter_(doc)) {
            skipped_.fetch_add(1, std::memory_order_relaxed);
            return;
        }
        used_.fetch_add(1, std::memory_order_relaxed);
        std::unordered_set<std::string> seen;
        for (auto& w : preprocess(doc.text)) {
            auto [it, inserted] = out.try_emplace(w, WordStats{w});
            ++it->second.total_frequency;
            if (seen.insert(w).second) {
                if (*cls == SemanticClass::class1)
                    ++it->second.count_class1;
                else
                    ++it->second.count_class2;
            }
        }
    }

    static void merge_into(WordStatsMap& into, WordStatsMap&& from)
    {
        for (auto& [word, st] : from) {
            auto [it, inserted] = into.try_emplace(word, WordStats{word});
            it->second += st;
        }
    }

    LabelScheme scheme_;
    const SegmentationContext& ctx_;
    DocumentFilter filter_;
    WordStatsMap stats_;
    std::unordered_map<std::string, bool> derivable_;
    std::atomic<std::uint64_t> used_{0};
    std::atomic<std::uint64_t> skipped_{0};
};

/// Counts, for every derivable word, the class1 and class2 texts containing it
/// and its total occurrence frequency. Documents outside both label sets are skipped.
inline WordStatsMap extract_complex_words(std::span<const Document> docs, const LabelScheme& scheme,
                                          const SegmentationContext& ctx,
                                          DocumentFilter filter = accept_all_documents)
{
    ComplexWordExtractor ex(scheme, ctx, std::move(filter));
    ex.add(docs);
    return ex.stats();
}

namespace detail {

inline std::string json_label(const nlohmann::json& v)
{
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d == static_cast<double>(static_cast<long long>(d))) return std::to_string(static_cast<long long>(d));
        return v.dump();
    }
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    throw format_error("label must be a string or number");
}

}  // namespace detail

/// Field names used to read documents from JSON Lines input.
struct CorpusFormat {
    std::string text_field = "text";
    std::string label_field = "label";
};

/// Streams a JSON Lines corpus, one document per line, in batches.
/// Blank lines are skipped; malformed lines raise format_error with the line number.
inline void read_jsonl_corpus(const std::filesystem::path& path, const CorpusFormat& format,
                              const std::function<void(std::span<const Document>)>& sink,
                              std::size_t batch_size = 8192)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open corpus " + path.string());
    std::vector<Document> batch;
    batch.reserve(batch_size);
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        const auto where = [&] { return path.string() + ":" + std::to_string(line_number) + ": "; };
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw format_error(where() + "invalid JSON: " + e.what());
        }
        if (!j.is_object() || !j.contains(format.text_field) || !j.contains(format.label_field))
            throw format_error(where() + "record lacks '" + format.text_field + "' or '" + format.label_field + "'");
        if (!j[format.text_field].is_string()) throw format_error(where() + "text field is not a string");
        Document doc;
        doc.text = j[format.text_field].get<std::string>();
        try {
            doc.label = detail::json_label(j[format.label_field]);
        } catch (const format_error& e) {
            throw format_error(where() + e.what());
        }
        if (doc.label.empty()) throw format_error(where() + "empty label");
        batch.push_back(std::move(doc));
        if (batch.size() == batch_size) {
            sink(batch);
            batch.clear();
        }
    }
    if (!batch.empty()) sink(batch);
}

struct ClassAssignment {
    std::string word;
    SemanticClass cls;
    std::uint64_t frequency;
};

/// Ranks words by class1 text fraction (descending, ties by word) and keeps
/// the first tertile as class1 and the last as class2. Both tertiles hold
/// floor(n/3) words; the middle is discarded.
inline std::vector<ClassAssignment> assign_classes(const WordStatsMap& stats)
{
    if (stats.size() < 3)
        throw data_shape_error("dataset too small: " + std::to_string(stats.size()) + " words, need at least 3");
    std::vector<const WordStats*> ranked;
    ranked.reserve(stats.size());
    for (const auto& [_, st] : stats) {
        if (st.count_class1 + st.count_class2 == 0) throw data_shape_error("word '" + st.word + "' has no texts");
        ranked.push_back(&st);
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const WordStats* a, const WordStats* b) {
        // a1/(a1+a2) > b1/(b1+b2), compared exactly in integers.
        const auto lhs = static_cast<unsigned __int128>(a->count_class1) * (b->count_class1 + b->count_class2);
        const auto rhs = static_cast<unsigned __int128>(b->count_class1) * (a->count_class1 + a->count_class2);
        if (lhs != rhs) return lhs > rhs;
        return a->word < b->word;
    });
    const std::size_t n = ranked.size();
    const std::size_t k = n / 3;
    std::vector<ClassAssignment> out;
    out.reserve(2 * k);
    for (std::size_t i = 0; i < k; ++i)
        out.push_back({ranked[i]->word, SemanticClass::class1, ranked[i]->total_frequency});
    for (std::size_t i = n - k; i < n; ++i)
        out.push_back({ranked[i]->word, SemanticClass::class2, ranked[i]->total_frequency});
    return out;
}

struct DatasetEntry {
    std::string word;
    SemanticClass cls;
    std::uint64_t frequency;
    Split split;
};

struct LabeledDataset {
    std::vector<DatasetEntry> entries;
    LabelScheme scheme;

    std::vector<DatasetEntry> in_split(Split s) const
    {
        std::vector<DatasetEntry> out;
        for (const auto& e : entries) {
            if (e.split == s) out.push_back(e);
        }
        return out;
    }
};

/// Sizes of the three splits for n items: round(0.6 n), round(0.2 n), rest.
struct SplitSizes {
    std::size_t train, dev, test;
};

inline SplitSizes split_sizes(std::size_t n)
{
    const std::size_t train = (6 * n + 5) / 10;
    const std::size_t dev = std::min(n - train, (2 * n + 5) / 10);
    return {train, dev, n - train - dev};
}

/// Seeded uniform permutation; the first 60% go to train, the next 20% to dev,
/// the remainder to test.
inline LabeledDataset split_dataset(std::vector<ClassAssignment> entries, std::uint64_t seed, LabelScheme scheme)
{
    Rng rng(seed);
    shuffle(std::span(entries), rng);
    const auto sizes = split_sizes(entries.size());
    LabeledDataset ds;
    ds.scheme = std::move(scheme);
    ds.entries.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const Split s = i < sizes.train ? Split::train : (i < sizes.train + sizes.dev ? Split::dev : Split::test);
        ds.entries.push_back({std::move(entries[i].word), entries[i].cls, entries[i].frequency, s});
    }
    return ds;
}

inline constexpr std::string_view dataset_header = "word\tclass\tfrequency\tsplit";

inline std::string dataset_to_tsv(const LabeledDataset& ds)
{
    std::string out(dataset_header);
    out += '\n';
    for (const auto& e : ds.entries) {
        out += e.word;
        out += '\t';
        out += ds.scheme.name_of(e.cls);
        out += '\t';
        out += std::to_string(e.frequency);
        out += '\t';
        out += to_string(e.split);
        out += '\n';
    }
    return out;
}

/// Reads a dataset TSV; class names are resolved against `scheme`.
inline LabeledDataset read_dataset_tsv(const std::filesystem::path& path, const LabelScheme& scheme)
{
    const auto lines = read_lines(path);
    if (lines.empty() || lines.front().text != dataset_header)
        throw format_error(path.string() + ": missing header '" + std::string(dataset_header) + "'");
    LabeledDataset ds;
    ds.scheme = scheme;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& line = lines[i];
        if (line.text.empty()) continue;
        const auto where = path.string() + ":" + std::to_string(line.line_number) + ": ";
        const auto cols = split(line.text, '\t');
        if (cols.size() != 4) throw format_error(where + "expected 4 tab-separated columns");
        const auto cls = scheme.class_named(cols[1]);
        if (!cls) throw format_error(where + "unknown class '" + cols[1] + "'");
        const auto sp = parse_split(cols[3]);
        if (!sp) throw format_error(where + "unknown split '" + cols[3] + "'");
        std::uint64_t freq = 0;
        try {
            std::size_t used = 0;
            freq = std::stoull(cols[2], &used);
            if (used != cols[2].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw format_error(where + "bad frequency '" + cols[2] + "'");
        }
        if (!seen.insert(cols[0]).second) throw format_error(where + "duplicate word '" + cols[0] + "'");
        ds.entries.push_back({cols[0], *cls, freq, *sp});
    }
    return ds;
}

}  // namespace morphseg
