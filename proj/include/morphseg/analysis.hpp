#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "morphseg/context.hpp"
#include "morphseg/corpus.hpp"
#include "morphseg/error.hpp"
#include "morphseg/io.hpp"
#include "morphseg/probe.hpp"
#include "morphseg/stats.hpp"
#include "morphseg/text.hpp"

namespace morphseg {

/// A WordPiece segmentation is valid when the stem survives as a single token
/// whose boundaries coincide with the stem's position in the surface word.
/// The stem is located after its spelling change (templat in templatize).
inline bool check_validity(std::string_view word, const WordPieceSegmentation& wp, const DerivationalSegmentation& ds)
{
    if (wp.is_unknown) return false;
    std::size_t stem_begin = 0;
    for (const auto& p : ds.prefixes) stem_begin += p.size();
    const std::size_t stem_len = surface_stem(ds).size();
    if (stem_begin + stem_len > word.size()) return false;
    std::size_t offset = 0;
    for (const auto& t : wp.tokens) {
        const auto piece = Vocabulary::piece_of(t);
        if (offset == stem_begin) return piece.size() == stem_len;
        if (offset > stem_begin) return false;
        offset += piece.size();
    }
    return false;
}

enum class AffixRole : std::uint8_t { prefix, suffix };

inline std::string_view to_string(AffixRole r) { return r == AffixRole::prefix ? "prefix" : "suffix"; }

struct AffixKey {
    AffixRole role;
    std::string affix;

    auto operator<=>(const AffixKey&) const = default;
};

/// Outermost prefix if there is one, else the outermost suffix.
inline std::optional<AffixKey> outermost_affix(const DerivationalSegmentation& ds)
{
    if (!ds.prefixes.empty()) return AffixKey{AffixRole::prefix, ds.prefixes.front()};
    if (!ds.suffixes.empty()) return AffixKey{AffixRole::suffix, ds.suffixes.back().suffix};
    return std::nullopt;
}

struct AffixValidity {
    std::size_t n_words = 0;
    std::size_t n_invalid = 0;
    double error_rate() const { return n_words == 0 ? 0.0 : static_cast<double>(n_invalid) / static_cast<double>(n_words); }
};

struct MeanSd {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
};

inline std::optional<MeanSd> summarize(std::span<const double> xs)
{
    if (xs.empty()) return std::nullopt;
    return MeanSd{xs.size(), stats::mean(xs), stats::sample_sd(xs)};
}

struct ValidityReport {
    std::map<AffixKey, AffixValidity> per_affix;
    std::optional<MeanSd> prefix;  // unweighted over affixes
    std::optional<MeanSd> suffix;
};

/// Groups words by outermost affix and measures how often WordPiece splits the
/// stem. Words without both segmentations are ignored.
inline ValidityReport validity_report(std::span<const std::string> words, const SegmentationContext& ctx)
{
    ValidityReport r;
    for (const auto& w : words) {
        const auto ds = ctx.derivational(w);
        if (!ds) continue;
        const auto key = outermost_affix(*ds);
        if (!key) continue;
        const auto wp = ctx.wordpiece(w);
        if (wp.is_unknown) continue;
        auto& v = r.per_affix[*key];
        ++v.n_words;
        if (!check_validity(w, wp, *ds)) ++v.n_invalid;
    }
    std::vector<double> pre, suf;
    for (const auto& [k, v] : r.per_affix) (k.role == AffixRole::prefix ? pre : suf).push_back(v.error_rate());
    r.prefix = summarize(pre);
    r.suffix = summarize(suf);
    return r;
}

/// Seed-level outcomes of one model for one word.
struct WordOutcome {
    Split split = Split::dev;
    std::vector<double> likelihoods;  // one per seed
    std::size_t correct = 0;

    double mean_likelihood() const { return stats::mean(likelihoods); }
    std::size_t runs() const { return likelihoods.size(); }
};

struct ModelPredictions {
    std::string name;
    SegmentationKind kind = SegmentationKind::derivational;
    AblationMode mode = AblationMode::full;
    std::map<std::string, WordOutcome> words;
};

/// Reads a predictions CSV written by the probe command. Only dev and test
/// rows are used, since analyses run on the merged held-out words.
inline ModelPredictions read_predictions_csv(const std::filesystem::path& path, std::string name,
                                             SegmentationKind kind, AblationMode mode)
{
    const auto lines = read_lines(path);
    if (lines.empty() || lines.front().text != predictions_header)
        throw format_error(path.string() + ": missing header '" + std::string(predictions_header) + "'");
    ModelPredictions m{std::move(name), kind, mode, {}};
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].text.empty()) continue;
        const auto where = path.string() + ":" + std::to_string(lines[i].line_number) + ": ";
        const auto cols = split(lines[i].text, ',');
        if (cols.size() != 6) throw format_error(where + "expected 6 columns");
        const auto sp = parse_split(cols[1]);
        if (!sp) throw format_error(where + "unknown split '" + cols[1] + "'");
        char* end = nullptr;
        const double p = std::strtod(cols[4].c_str(), &end);
        if (end == cols[4].c_str() || *end != '\0' || !(p >= 0.0 && p <= 1.0))
            throw format_error(where + "bad likelihood '" + cols[4] + "'");
        if (cols[5] != "0" && cols[5] != "1") throw format_error(where + "bad correctness flag '" + cols[5] + "'");
        auto& o = m.words[cols[2]];
        o.split = *sp;
        o.likelihoods.push_back(p);
        if (cols[5] == "1") ++o.correct;
    }
    return m;
}

enum class FrequencyBin : std::uint8_t { low, mid, high };

inline std::string_view to_string(FrequencyBin b)
{
    switch (b) {
    case FrequencyBin::low: return "low";
    case FrequencyBin::mid: return "mid";
    case FrequencyBin::high: return "high";
    }
    return "?";
}

/// low: f <= 5, mid: 5 < f <= 500, high: f > 500.
inline FrequencyBin frequency_bin(std::uint64_t f)
{
    if (f <= 5) return FrequencyBin::low;
    if (f <= 500) return FrequencyBin::mid;
    return FrequencyBin::high;
}

struct BinAccuracy {
    std::string model;
    FrequencyBin bin;
    std::size_t n_words = 0;
    double accuracy = 0.0;
};

struct FrequencyBinReport {
    std::vector<BinAccuracy> rows;  // empty bins are absent
};

/// Accuracy per frequency bin over the held-out words each model predicted,
/// pooled across seeds.
inline FrequencyBinReport frequency_bins(const LabeledDataset& ds, std::span<const ModelPredictions> models)
{
    std::map<std::string, std::uint64_t> freq;
    for (const auto& e : ds.entries) freq.emplace(e.word, e.frequency);
    FrequencyBinReport r;
    for (const auto& m : models) {
        std::map<FrequencyBin, std::array<std::size_t, 3>> acc;  // words, correct, runs
        for (const auto& [word, o] : m.words) {
            const auto it = freq.find(word);
            if (it == freq.end()) throw data_shape_error("model " + m.name + " predicts '" + word + "' which is not in the dataset");
            auto& a = acc[frequency_bin(it->second)];
            ++a[0];
            a[1] += o.correct;
            a[2] += o.runs();
        }
        for (const auto& [bin, a] : acc) {
            r.rows.push_back({m.name, bin, a[0], static_cast<double>(a[1]) / static_cast<double>(a[2])});
        }
    }
    return r;
}

struct AffixDelta {
    AffixKey key;
    std::size_t n_words = 0;
    double accuracy_a = 0.0;
    double accuracy_b = 0.0;
    double delta() const { return accuracy_a - accuracy_b; }
};

/// Per-affix accuracy of model a minus model b over words both models predicted.
inline std::vector<AffixDelta> affix_deltas(const ModelPredictions& a, const ModelPredictions& b,
                                            const SegmentationContext& ctx)
{
    struct Acc {
        std::size_t words = 0, correct_a = 0, runs_a = 0, correct_b = 0, runs_b = 0;
    };
    std::map<AffixKey, Acc> groups;
    for (const auto& [word, oa] : a.words) {
        const auto it = b.words.find(word);
        if (it == b.words.end()) continue;
        const auto ds = ctx.derivational(word);
        if (!ds) continue;
        const auto key = outermost_affix(*ds);
        if (!key) continue;
        auto& g = groups[*key];
        ++g.words;
        g.correct_a += oa.correct;
        g.runs_a += oa.runs();
        g.correct_b += it->second.correct;
        g.runs_b += it->second.runs();
    }
    std::vector<AffixDelta> out;
    for (const auto& [key, g] : groups) {
        out.push_back({key, g.words, static_cast<double>(g.correct_a) / static_cast<double>(g.runs_a),
                       static_cast<double>(g.correct_b) / static_cast<double>(g.runs_b)});
    }
    return out;
}

struct DeltaTest {
    std::size_t n_prefixes = 0;
    std::size_t n_suffixes = 0;
    std::optional<double> mean_prefix;
    std::optional<double> mean_suffix;
    std::optional<stats::StatTestResult> result;
    std::string notice;  // set when the test is degenerate or undefined
};

/// Welch's t-test of prefix deltas against suffix deltas. Two samples without
/// any variance are reported as t = 0, p = 1 when their means agree.
inline DeltaTest prefix_suffix_test(std::span<const AffixDelta> deltas)
{
    std::vector<double> pre, suf;
    for (const auto& d : deltas) (d.key.role == AffixRole::prefix ? pre : suf).push_back(d.delta());
    DeltaTest t;
    t.n_prefixes = pre.size();
    t.n_suffixes = suf.size();
    if (!pre.empty()) t.mean_prefix = stats::mean(pre);
    if (!suf.empty()) t.mean_suffix = stats::mean(suf);
    if (pre.size() < 2 || suf.size() < 2) {
        t.notice = "t-test skipped: need at least 2 prefix and 2 suffix groups";
        return t;
    }
    if (stats::sample_variance(pre) == 0.0 && stats::sample_variance(suf) == 0.0) {
        constexpr double nan = std::numeric_limits<double>::quiet_NaN();
        if (*t.mean_prefix == *t.mean_suffix) {
            t.result = stats::StatTestResult{0.0, nan, 1.0, 0.0};
            t.notice = "both delta samples are constant and equal; reported t = 0, p = 1";
        } else {
            t.notice = "t-test skipped: both delta samples are constant but differ";
        }
        return t;
    }
    t.result = stats::welch_t_test(pre, suf);
    return t;
}

struct DeltaRegression {
    std::size_t n_prefixes = 0;
    std::optional<stats::RegressionResult> result;
    std::string notice;
};

/// Regresses per-prefix accuracy deltas on per-prefix WordPiece error rates.
inline DeltaRegression prefix_regression(const ValidityReport& validity, std::span<const AffixDelta> deltas)
{
    std::vector<double> x, y;
    for (const auto& d : deltas) {
        if (d.key.role != AffixRole::prefix) continue;
        const auto it = validity.per_affix.find(d.key);
        if (it == validity.per_affix.end()) continue;
        x.push_back(it->second.error_rate());
        y.push_back(d.delta());
    }
    DeltaRegression r;
    r.n_prefixes = x.size();
    if (x.size() < 3) {
        r.notice = "regression skipped: need at least 3 prefix groups";
        return r;
    }
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) {
        r.notice = "regression skipped: prefix error rates are constant";
        return r;
    }
    r.result = stats::ols_regression(x, y);
    return r;
}

struct RankedWord {
    std::string word;
    double mu_a = 0.0;
    double mu_b = 0.0;
    double difference() const { return mu_a - mu_b; }
};

/// Words by descending mu_a - mu_b, ties by word. Both mappings must cover the
/// same words.
inline std::vector<RankedWord> rank_error_examples(const std::map<std::string, double>& a,
                                                   const std::map<std::string, double>& b)
{
    std::vector<std::string> only_a, only_b;
    for (const auto& [w, _] : a) {
        if (!b.contains(w)) only_a.push_back(w);
    }
    for (const auto& [w, _] : b) {
        if (!a.contains(w)) only_b.push_back(w);
    }
    if (!only_a.empty() || !only_b.empty()) {
        std::string msg = "likelihood mappings cover different words;";
        if (!only_a.empty()) msg += " only in first: " + join(only_a, " ") + ";";
        if (!only_b.empty()) msg += " only in second: " + join(only_b, " ") + ";";
        msg.pop_back();
        throw data_shape_error(msg);
    }
    std::vector<RankedWord> out;
    out.reserve(a.size());
    for (const auto& [w, p] : a) out.push_back({w, p, b.at(w)});
    std::stable_sort(out.begin(), out.end(),
                     [](const RankedWord& x, const RankedWord& y) { return x.difference() > y.difference(); });
    return out;
}

inline std::map<std::string, double> mean_likelihoods(const ModelPredictions& m)
{
    std::map<std::string, double> out;
    for (const auto& [w, o] : m.words) out.emplace(w, o.mean_likelihood());
    return out;
}

/// Tokens the model saw for `word`, space separated.
inline std::string model_tokens(std::string_view word, SegmentationKind kind, const SegmentationContext& ctx)
{
    if (kind == SegmentationKind::wordpiece) return join(ctx.wordpiece(word).tokens, " ");
    const auto ds = ctx.derivational(word);
    return ds ? join(serialize_delbert(*ds, ctx.vocab), " ") : std::string("<none>");
}

inline constexpr std::string_view validity_header = "role,affix,n_words,n_invalid,error_rate";
inline constexpr std::string_view frequency_bins_header = "model,bin,n_words,accuracy";
inline constexpr std::string_view affix_delta_header = "model_a,model_b,role,affix,n_words,accuracy_a,accuracy_b,delta";
inline constexpr std::string_view ttest_header =
    "model_a,model_b,n_prefixes,n_suffixes,mean_prefix_delta,mean_suffix_delta,t,df,p_value,cohens_d";
inline constexpr std::string_view regression_header =
    "model_a,model_b,n_prefixes,slope,intercept,r_squared,f_statistic,df_residual,p_value";
inline constexpr std::string_view error_ranking_header =
    "model_a,model_b,rank,word,class,tokens_a,mu_a,tokens_b,mu_b,difference";

/// Report files keyed by file name, plus notices for skipped analyses.
struct AnalysisOutput {
    std::map<std::string, std::string> files;
    std::vector<std::string> notices;
};

namespace detail {

inline std::string num(const std::optional<double>& v) { return v && !std::isnan(*v) ? format_double(*v) : "nan"; }

}  // namespace detail

/// Runs the full battery. The first model is compared against every other one.
inline AnalysisOutput run_analysis(const LabeledDataset& ds, const SegmentationContext& ctx,
                                   std::span<const ModelPredictions> models)
{
    using detail::num;
    AnalysisOutput out;

    std::vector<std::string> words;
    for (const auto& e : ds.entries) words.push_back(e.word);
    const auto validity = validity_report(words, ctx);
    {
        std::string csv(validity_header);
        csv += '\n';
        for (const auto& [k, v] : validity.per_affix) {
            csv += std::string(to_string(k.role)) + "," + k.affix + "," + std::to_string(v.n_words) + "," +
                   std::to_string(v.n_invalid) + "," + format_double(v.error_rate()) + "\n";
        }
        out.files["validity.csv"] = csv;
    }

    const auto bins = frequency_bins(ds, models);
    {
        std::string csv(frequency_bins_header);
        csv += '\n';
        for (const auto& b : bins.rows) {
            csv += b.model + "," + std::string(to_string(b.bin)) + "," + std::to_string(b.n_words) + "," +
                   format_double(b.accuracy) + "\n";
        }
        out.files["frequency_bins.csv"] = csv;
    }

    std::string summary = "dataset words: " + std::to_string(ds.entries.size()) + "\n";
    const auto line = [](std::string_view label, const std::optional<MeanSd>& s) {
        return std::string(label) + (s ? "mean " + format_fixed(s->mean, 3) + ", sd " + format_fixed(s->sd, 3) +
                                             " over " + std::to_string(s->n) + " affixes"
                                       : std::string("no groups")) +
               "\n";
    };
    summary += line("wordpiece stem error rate, prefixes: ", validity.prefix);
    summary += line("wordpiece stem error rate, suffixes: ", validity.suffix);
    for (const auto& b : bins.rows) {
        summary += "accuracy " + b.model + " " + std::string(to_string(b.bin)) + " (" + std::to_string(b.n_words) +
                   " words): " + format_fixed(b.accuracy, 3) + "\n";
    }

    if (models.size() < 2) {
        out.notices.push_back("only one model given: affix deltas, t-test, regression and error ranking skipped");
    } else {
        std::map<std::string, SemanticClass> cls;
        for (const auto& e : ds.entries) cls.emplace(e.word, e.cls);
        std::string delta_csv(affix_delta_header), ttest_csv(ttest_header), reg_csv(regression_header),
            rank_csv(error_ranking_header);
        delta_csv += '\n';
        ttest_csv += '\n';
        reg_csv += '\n';
        rank_csv += '\n';
        const auto& a = models[0];
        for (std::size_t i = 1; i < models.size(); ++i) {
            const auto& b = models[i];
            const std::string pair = a.name + "," + b.name;
            const auto deltas = affix_deltas(a, b, ctx);
            for (const auto& d : deltas) {
                delta_csv += pair + "," + std::string(to_string(d.key.role)) + "," + d.key.affix + "," +
                             std::to_string(d.n_words) + "," + format_double(d.accuracy_a) + "," +
                             format_double(d.accuracy_b) + "," + format_double(d.delta()) + "\n";
            }

            const auto t = prefix_suffix_test(deltas);
            ttest_csv += pair + "," + std::to_string(t.n_prefixes) + "," + std::to_string(t.n_suffixes) + "," +
                         num(t.mean_prefix) + "," + num(t.mean_suffix) + ",";
            if (t.result) {
                ttest_csv += num(t.result->statistic) + "," + num(t.result->degrees_of_freedom) + "," +
                             num(t.result->p_value) + "," + num(t.result->effect_size) + "\n";
                summary += "welch t-test " + a.name + " vs " + b.name + ": t(" +
                           format_fixed(t.result->degrees_of_freedom, 2) + ") = " +
                           format_fixed(t.result->statistic, 3) + ", p = " + format_fixed(t.result->p_value, 4) +
                           ", d = " + format_fixed(t.result->effect_size, 3) + "\n";
            } else {
                ttest_csv += "nan,nan,nan,nan\n";
            }
            if (!t.notice.empty()) out.notices.push_back(a.name + " vs " + b.name + ": " + t.notice);

            const auto r = prefix_regression(validity, deltas);
            reg_csv += pair + "," + std::to_string(r.n_prefixes) + ",";
            if (r.result) {
                reg_csv += num(r.result->slope) + "," + num(r.result->intercept) + "," + num(r.result->r_squared) + "," +
                           num(r.result->f_statistic) + "," + num(r.result->df_residual) + "," +
                           num(r.result->p_value) + "\n";
                summary += "prefix regression " + a.name + " vs " + b.name + ": R2 = " +
                           format_fixed(r.result->r_squared, 3) + ", F(1, " + format_fixed(r.result->df_residual, 0) +
                           ") = " + format_fixed(r.result->f_statistic, 2) + ", p = " +
                           format_fixed(r.result->p_value, 4) + "\n";
            } else {
                reg_csv += "nan,nan,nan,nan,nan,nan\n";
            }
            if (!r.notice.empty()) out.notices.push_back(a.name + " vs " + b.name + ": " + r.notice);

            const auto ranked = rank_error_examples(mean_likelihoods(a), mean_likelihoods(b));
            for (std::size_t k = 0; k < ranked.size(); ++k) {
                const auto& w = ranked[k];
                const auto c = cls.find(w.word);
                rank_csv += pair + "," + std::to_string(k + 1) + "," + w.word + "," +
                            (c == cls.end() ? std::string("?") : ds.scheme.name_of(c->second)) + "," +
                            model_tokens(w.word, a.kind, ctx) + "," + format_double(w.mu_a) + "," +
                            model_tokens(w.word, b.kind, ctx) + "," + format_double(w.mu_b) + "," +
                            format_double(w.difference()) + "\n";
            }
        }
        out.files["affix_delta.csv"] = delta_csv;
        out.files["ttest.csv"] = ttest_csv;
        out.files["regression.csv"] = reg_csv;
        out.files["error_ranking.csv"] = rank_csv;
    }

    for (const auto& n : out.notices) summary += "notice: " + n + "\n";
    out.files["summary.txt"] = summary;
    return out;
}

}  // namespace morphseg
