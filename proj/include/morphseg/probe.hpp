#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "morphseg/context.hpp"
#include "morphseg/corpus.hpp"
#include "morphseg/error.hpp"
#include "morphseg/io.hpp"
#include "morphseg/parallel.hpp"
#include "morphseg/random.hpp"
#include "morphseg/stats.hpp"
#include "morphseg/text.hpp"

namespace morphseg {

enum class SegmentationKind : std::uint8_t { wordpiece, derivational };
enum class AblationMode : std::uint8_t { full, stem_ablated, affix_ablated };

inline std::string_view to_string(SegmentationKind k) { return k == SegmentationKind::wordpiece ? "wordpiece" : "derivational"; }

inline std::string_view to_string(AblationMode m)
{
    switch (m) {
    case AblationMode::full: return "full";
    case AblationMode::stem_ablated: return "stem_ablated";
    case AblationMode::affix_ablated: return "affix_ablated";
    }
    return "?";
}

inline std::optional<SegmentationKind> parse_kind(std::string_view s)
{
    if (s == "wordpiece") return SegmentationKind::wordpiece;
    if (s == "derivational") return SegmentationKind::derivational;
    return std::nullopt;
}

inline std::optional<AblationMode> parse_mode(std::string_view s)
{
    if (s == "full") return AblationMode::full;
    if (s == "stem_ablated") return AblationMode::stem_ablated;
    if (s == "affix_ablated") return AblationMode::affix_ablated;
    return std::nullopt;
}

/// Ablation modes only make sense where tokens have morphological roles.
inline void check_combination(SegmentationKind kind, AblationMode mode)
{
    if (kind == SegmentationKind::wordpiece && mode != AblationMode::full)
        throw config_error("mode " + std::string(to_string(mode)) + " is undefined for wordpiece features");
}

/// Token ids of the vocabulary followed by three shared ids.
struct FeatureSpace {
    std::size_t vocab_size = 0;

    std::uint32_t shared_stem() const { return static_cast<std::uint32_t>(vocab_size); }
    std::uint32_t shared_prefix() const { return static_cast<std::uint32_t>(vocab_size + 1); }
    std::uint32_t shared_suffix() const { return static_cast<std::uint32_t>(vocab_size + 2); }
    std::size_t size() const { return vocab_size + 3; }
};

/// Sparse counts sorted by feature id.
struct FeatureVector {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;

    void add(std::uint32_t id, std::uint32_t count = 1)
    {
        auto it = std::lower_bound(entries.begin(), entries.end(), id,
                                   [](const auto& e, std::uint32_t v) { return e.first < v; });
        if (it != entries.end() && it->first == id)
            it->second += count;
        else
            entries.insert(it, {id, count});
    }

    std::uint32_t count(std::uint32_t id) const
    {
        auto it = std::lower_bound(entries.begin(), entries.end(), id,
                                   [](const auto& e, std::uint32_t v) { return e.first < v; });
        return (it != entries.end() && it->first == id) ? it->second : 0;
    }

    bool operator==(const FeatureVector&) const = default;
};

struct FeatureOptions {
    bool include_hyphen = true;
};

/// Bag-of-token features for `word`; nullopt when the word cannot be
/// segmented under `kind`.
inline std::optional<FeatureVector> featurize(std::string_view word, SegmentationKind kind, AblationMode mode,
                                              const SegmentationContext& ctx, FeatureOptions options = {})
{
    check_combination(kind, mode);
    const FeatureSpace space{ctx.vocab.size()};
    const auto id_of = [&](std::string_view token) {
        const auto id = ctx.vocab.find(token);
        if (!id) throw serialization_error("token '" + std::string(token) + "' is not in the vocabulary");
        return static_cast<std::uint32_t>(index_of(*id));
    };

    FeatureVector fv;
    if (kind == SegmentationKind::wordpiece) {
        if (word.empty()) return std::nullopt;
        const auto wp = ctx.wordpiece(word);
        if (wp.is_unknown) return std::nullopt;
        for (const auto& t : wp.tokens) fv.add(id_of(t));
        return fv;
    }

    if (word.empty()) return std::nullopt;
    const auto seg = ctx.derivational(word);
    if (!seg) return std::nullopt;
    for (const auto& p : seg->prefixes) {
        fv.add(mode == AblationMode::affix_ablated ? space.shared_prefix() : id_of(p));
        if (options.include_hyphen) fv.add(id_of(hyphen_token));
    }
    fv.add(mode == AblationMode::stem_ablated ? space.shared_stem() : id_of(seg->stem));
    for (const auto& s : seg->suffixes) {
        fv.add(mode == AblationMode::affix_ablated
                   ? space.shared_suffix()
                   : id_of(std::string(Vocabulary::continuation_prefix) + s.suffix));
    }
    return fv;
}

/// One training or evaluation instance; y = 1 for class1.
struct Example {
    std::string word;
    FeatureVector x;
    double y = 0.0;
};

/// Featurizes dataset entries; unsegmentable words are dropped.
inline std::vector<Example> make_examples(std::span<const DatasetEntry> entries, SegmentationKind kind,
                                          AblationMode mode, const SegmentationContext& ctx,
                                          FeatureOptions options = {})
{
    std::vector<std::optional<FeatureVector>> feats(entries.size());
    parallel_for(entries.size(), [&](std::size_t i) { feats[i] = featurize(entries[i].word, kind, mode, ctx, options); });
    std::vector<Example> out;
    out.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!feats[i]) continue;
        out.push_back({entries[i].word, std::move(*feats[i]), entries[i].cls == SemanticClass::class1 ? 1.0 : 0.0});
    }
    return out;
}

inline double sigmoid(double z)
{
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + e^z) without overflow.
inline double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

struct ProbeModel {
    std::vector<double> weights;
    double bias = 0.0;
    AblationMode mode = AblationMode::full;
    SegmentationKind kind = SegmentationKind::derivational;

    double logit(const FeatureVector& x) const
    {
        double z = bias;
        for (const auto& [id, c] : x.entries) {
            if (id < weights.size()) z += weights[id] * c;
        }
        return z;
    }

    /// P(class1 | x).
    double predict(const FeatureVector& x) const { return sigmoid(logit(x)); }

    bool operator==(const ProbeModel&) const = default;
};

struct LossGradient {
    double loss = 0.0;
    std::vector<double> weights;
    double bias = 0.0;
};

/// Mean binary cross-entropy over `batch` and its gradient.
inline LossGradient loss_and_gradient(const ProbeModel& model, std::span<const Example> batch)
{
    LossGradient g;
    g.weights.assign(model.weights.size(), 0.0);
    if (batch.empty()) return g;
    for (const auto& ex : batch) {
        const double z = model.logit(ex.x);
        g.loss += softplus(z) - ex.y * z;
        const double r = sigmoid(z) - ex.y;
        for (const auto& [id, c] : ex.x.entries) {
            if (id < g.weights.size()) g.weights[id] += r * c;
        }
        g.bias += r;
    }
    const double n = static_cast<double>(batch.size());
    g.loss /= n;
    for (auto& w : g.weights) w /= n;
    g.bias /= n;
    return g;
}

inline double mean_loss(const ProbeModel& model, std::span<const Example> data)
{
    if (data.empty()) return 0.0;
    double total = 0.0;
    for (const auto& ex : data) {
        const double z = model.logit(ex.x);
        total += softplus(z) - ex.y * z;
    }
    return total / static_cast<double>(data.size());
}

/// Search grids plus the fixed batch size and base seed.
struct Hyperparams {
    std::vector<int> epochs{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
    std::vector<double> learning_rates{0.01, 0.03, 0.1, 0.3};
    int batch_size = 64;
    std::uint64_t seed = 0;

    void validate() const
    {
        if (epochs.empty() || learning_rates.empty()) throw config_error("hyperparameter grids must be non-empty");
        for (const int e : epochs) {
            if (e <= 0) throw config_error("epoch counts must be positive");
        }
        for (const double r : learning_rates) {
            if (!(r > 0.0) || !std::isfinite(r)) throw config_error("learning rates must be positive");
        }
        if (batch_size <= 0) throw config_error("batch size must be positive");
    }
};

/// A single point of the grid.
struct TrainingConfig {
    int epochs = 1;
    double learning_rate = 0.1;
    int batch_size = 64;
    std::uint64_t seed = 0;
};

inline std::string config_label(int epochs, double learning_rate)
{
    return "epochs=" + std::to_string(epochs) + ";lr=" + format_double(learning_rate);
}

using EpochCallback = std::function<void(int epoch, const ProbeModel&)>;

/// Mini-batch gradient descent on mean binary cross-entropy from all-zero
/// weights. The seed only drives the per-epoch shuffle.
inline ProbeModel train_probe(std::span<const Example> train, std::size_t feature_space, SegmentationKind kind,
                              AblationMode mode, const TrainingConfig& cfg, const EpochCallback& on_epoch = {})
{
    if (train.empty()) throw data_shape_error("training split is empty");
    const bool has_pos = std::any_of(train.begin(), train.end(), [](const Example& e) { return e.y == 1.0; });
    const bool has_neg = std::any_of(train.begin(), train.end(), [](const Example& e) { return e.y == 0.0; });
    if (!has_pos || !has_neg) throw data_shape_error("training split contains a single class");
    if (cfg.epochs <= 0 || cfg.batch_size <= 0 || !(cfg.learning_rate > 0.0))
        throw config_error("epochs, batch size and learning rate must be positive");
    for (const auto& ex : train) {
        for (const auto& [id, c] : ex.x.entries) {
            if (id >= feature_space) throw data_shape_error("feature id outside the feature space");
        }
    }

    ProbeModel model;
    model.weights.assign(feature_space, 0.0);
    model.kind = kind;
    model.mode = mode;

    Rng rng(cfg.seed);
    std::vector<std::size_t> order(train.size());
    std::vector<double> grad(feature_space, 0.0);
    std::vector<std::uint32_t> touched;
    const auto batch = static_cast<std::size_t>(cfg.batch_size);
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        shuffle(std::span(order), rng);
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t end = std::min(order.size(), start + batch);
            double grad_bias = 0.0;
            touched.clear();
            for (std::size_t k = start; k < end; ++k) {
                const auto& ex = train[order[k]];
                const double r = model.predict(ex.x) - ex.y;
                for (const auto& [id, c] : ex.x.entries) {
                    if (grad[id] == 0.0) touched.push_back(id);
                    grad[id] += r * c;
                }
                grad_bias += r;
            }
            const double step = cfg.learning_rate / static_cast<double>(end - start);
            std::sort(touched.begin(), touched.end());
            touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
            for (const auto id : touched) {
                model.weights[id] -= step * grad[id];
                grad[id] = 0.0;
            }
            model.bias -= step * grad_bias;
        }
        if (on_epoch) on_epoch(epoch, model);
    }
    return model;
}

struct Metrics {
    double f1 = 0.0;
    double accuracy = 0.0;
    std::size_t true_positive = 0, false_positive = 0, false_negative = 0, true_negative = 0;
    std::map<std::string, double> per_word_likelihood;  // of the true class
    std::map<std::string, bool> per_word_correct;
};

/// F1 with class1 as the positive class; 0 when there are no true positives.
inline double f1_score(std::size_t tp, std::size_t fp, std::size_t fn)
{
    if (tp == 0) return 0.0;
    const double t = static_cast<double>(tp);
    return 2.0 * t / (2.0 * t + static_cast<double>(fp) + static_cast<double>(fn));
}

/// Predicts class1 when P(class1) >= 0.5.
inline Metrics evaluate(const ProbeModel& model, std::span<const Example> data)
{
    if (data.empty()) throw data_shape_error("cannot evaluate on an empty split");
    Metrics m;
    for (const auto& ex : data) {
        const double p = model.predict(ex.x);
        const bool predicted_pos = p >= 0.5;
        const bool actual_pos = ex.y == 1.0;
        if (predicted_pos && actual_pos) ++m.true_positive;
        else if (predicted_pos) ++m.false_positive;
        else if (actual_pos) ++m.false_negative;
        else ++m.true_negative;
        m.per_word_likelihood[ex.word] = actual_pos ? p : 1.0 - p;
        m.per_word_correct[ex.word] = predicted_pos == actual_pos;
    }
    m.f1 = f1_score(m.true_positive, m.false_positive, m.false_negative);
    m.accuracy = static_cast<double>(m.true_positive + m.true_negative) / static_cast<double>(data.size());
    return m;
}

struct SplitScore {
    double f1 = 0.0;
    double accuracy = 0.0;
};

struct ConfigResult {
    int epochs = 0;
    double learning_rate = 0.0;
    std::vector<SplitScore> dev;   // one per seed
    std::vector<SplitScore> test;  // one per seed; empty when there is no test split
    double mean_dev_f1 = 0.0;
    double sd_dev_f1 = 0.0;
};

/// Per-seed outcome of the selected configuration.
struct SeedRun {
    std::uint64_t seed = 0;
    ProbeModel model;
    Metrics dev;
    std::optional<Metrics> test;
};

struct GridSearchResult {
    std::vector<ConfigResult> configs;  // epochs ascending within each learning rate, rates in grid order
    std::size_t best = 0;
    TrainingConfig best_config;
    std::vector<SeedRun> runs;  // best configuration, seed order
};

/// Trains every (learning rate, seed) pair once up to the largest epoch count
/// and scores snapshots at each grid epoch. The configuration with the highest
/// mean dev F1 wins; ties go to fewer epochs, then the smaller rate.
inline GridSearchResult grid_search(std::span<const Example> train, std::span<const Example> dev,
                                    std::span<const Example> test, std::size_t feature_space, SegmentationKind kind,
                                    AblationMode mode, const Hyperparams& hp, std::span<const std::uint64_t> seeds,
                                    std::size_t workers = worker_count())
{
    hp.validate();
    if (seeds.empty()) throw config_error("seed list must be non-empty");
    if (dev.empty()) throw data_shape_error("dev split is empty");

    std::vector<int> epochs = hp.epochs;
    std::sort(epochs.begin(), epochs.end());
    epochs.erase(std::unique(epochs.begin(), epochs.end()), epochs.end());
    const int max_epochs = epochs.back();
    const std::size_t n_rates = hp.learning_rates.size();
    const std::size_t n_epochs = epochs.size();
    const std::size_t n_seeds = seeds.size();

    // scores[(rate * n_seeds + seed) * n_epochs + epoch_index]
    std::vector<SplitScore> dev_scores(n_rates * n_seeds * n_epochs);
    std::vector<SplitScore> test_scores(test.empty() ? 0 : dev_scores.size());
    parallel_for(
        n_rates * n_seeds,
        [&](std::size_t job) {
            const std::size_t r = job / n_seeds, s = job % n_seeds;
            const TrainingConfig cfg{max_epochs, hp.learning_rates[r], hp.batch_size, seeds[s]};
            std::size_t next = 0;
            train_probe(train, feature_space, kind, mode, cfg, [&](int epoch, const ProbeModel& m) {
                if (next < n_epochs && epochs[next] == epoch) {
                    const auto d = evaluate(m, dev);
                    dev_scores[job * n_epochs + next] = {d.f1, d.accuracy};
                    if (!test.empty()) {
                        const auto t = evaluate(m, test);
                        test_scores[job * n_epochs + next] = {t.f1, t.accuracy};
                    }
                    ++next;
                }
            });
        },
        workers);

    GridSearchResult result;
    for (std::size_t r = 0; r < n_rates; ++r) {
        for (std::size_t e = 0; e < n_epochs; ++e) {
            ConfigResult c;
            c.epochs = epochs[e];
            c.learning_rate = hp.learning_rates[r];
            std::vector<double> f1s;
            for (std::size_t s = 0; s < n_seeds; ++s) {
                const std::size_t idx = (r * n_seeds + s) * n_epochs + e;
                c.dev.push_back(dev_scores[idx]);
                if (!test.empty()) c.test.push_back(test_scores[idx]);
                f1s.push_back(dev_scores[idx].f1);
            }
            c.mean_dev_f1 = stats::mean(f1s);
            c.sd_dev_f1 = stats::sample_sd(f1s);
            result.configs.push_back(std::move(c));
        }
    }

    const auto before = [](const ConfigResult& a, const ConfigResult& b) {
        if (a.mean_dev_f1 != b.mean_dev_f1) return a.mean_dev_f1 > b.mean_dev_f1;
        if (a.epochs != b.epochs) return a.epochs < b.epochs;
        return a.learning_rate < b.learning_rate;
    };
    for (std::size_t i = 1; i < result.configs.size(); ++i) {
        if (before(result.configs[i], result.configs[result.best])) result.best = i;
    }
    const auto& best = result.configs[result.best];
    result.best_config = {best.epochs, best.learning_rate, hp.batch_size, seeds.front()};

    // Retraining is deterministic, so these match the grid snapshots exactly.
    result.runs.resize(n_seeds);
    parallel_for(
        n_seeds,
        [&](std::size_t s) {
            const TrainingConfig cfg{best.epochs, best.learning_rate, hp.batch_size, seeds[s]};
            SeedRun run;
            run.seed = seeds[s];
            run.model = train_probe(train, feature_space, kind, mode, cfg);
            run.dev = evaluate(run.model, dev);
            if (!test.empty()) run.test = evaluate(run.model, test);
            result.runs[s] = std::move(run);
        },
        workers);
    return result;
}

/// Convenience overload over a labeled dataset.
inline GridSearchResult grid_search(const LabeledDataset& ds, SegmentationKind kind, AblationMode mode,
                                    const SegmentationContext& ctx, const Hyperparams& hp,
                                    std::span<const std::uint64_t> seeds, FeatureOptions options = {})
{
    check_combination(kind, mode);
    const auto tr = ds.in_split(Split::train), dv = ds.in_split(Split::dev), te = ds.in_split(Split::test);
    const auto train = make_examples(tr, kind, mode, ctx, options);
    const auto dev = make_examples(dv, kind, mode, ctx, options);
    const auto test = make_examples(te, kind, mode, ctx, options);
    return grid_search(train, dev, test, FeatureSpace{ctx.vocab.size()}.size(), kind, mode, hp, seeds);
}

inline constexpr std::string_view model_magic = "morphseg-probe-model 1";

inline std::string model_to_text(const ProbeModel& m)
{
    std::string out(model_magic);
    out += "\nkind ";
    out += to_string(m.kind);
    out += "\nmode ";
    out += to_string(m.mode);
    out += "\nfeatures " + std::to_string(m.weights.size()) + "\n";
    for (const double w : m.weights) out += format_double(w) + "\n";
    out += format_double(m.bias) + "\n";
    return out;
}

inline ProbeModel read_model(const std::filesystem::path& path)
{
    const auto lines = read_lines(path);
    const auto fail = [&](const std::string& why) { return format_error(path.string() + ": " + why); };
    if (lines.size() < 4 || lines[0].text != model_magic) throw fail("not a probe model file");
    const auto field = [&](std::size_t i, std::string_view key) {
        const auto& t = lines[i].text;
        if (!t.starts_with(std::string(key) + " ")) throw fail("expected '" + std::string(key) + "' on line " + std::to_string(i + 1));
        return t.substr(key.size() + 1);
    };
    ProbeModel m;
    const auto kind = parse_kind(field(1, "kind"));
    const auto mode = parse_mode(field(2, "mode"));
    if (!kind || !mode) throw fail("bad kind or mode");
    m.kind = *kind;
    m.mode = *mode;
    std::size_t n = 0;
    try {
        n = std::stoull(field(3, "features"));
    } catch (const std::exception&) {
        throw fail("bad feature count");
    }
    std::vector<double> values;
    for (std::size_t i = 4; i < lines.size(); ++i) {
        if (lines[i].text.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(lines[i].text.c_str(), &end);
        if (end == lines[i].text.c_str() || *end != '\0' || !std::isfinite(v))
            throw fail("bad value on line " + std::to_string(lines[i].line_number));
        values.push_back(v);
    }
    if (values.size() != n + 1) throw fail("expected " + std::to_string(n + 1) + " values");
    m.bias = values.back();
    values.pop_back();
    m.weights = std::move(values);
    return m;
}

inline constexpr std::string_view metrics_header = "config,seed,split,f1,accuracy";
inline constexpr std::string_view predictions_header = "seed,split,word,class,likelihood,correct";
inline constexpr std::string_view grid_header = "epochs,learning_rate,mean_dev_f1,sd_dev_f1";

/// One row per configuration, seed and split.
inline std::string metrics_to_csv(const GridSearchResult& r, std::span<const std::uint64_t> seeds)
{
    std::string out(metrics_header);
    out += '\n';
    for (const auto& c : r.configs) {
        const auto label = config_label(c.epochs, c.learning_rate);
        const auto emit = [&](std::string_view split, const std::vector<SplitScore>& scores) {
            for (std::size_t s = 0; s < scores.size(); ++s) {
                out += label + "," + std::to_string(seeds[s]) + "," + std::string(split) + "," +
                       format_double(scores[s].f1) + "," + format_double(scores[s].accuracy) + "\n";
            }
        };
        emit("dev", c.dev);
        emit("test", c.test);
    }
    return out;
}

inline std::string grid_to_csv(const GridSearchResult& r)
{
    std::string out(grid_header);
    out += '\n';
    for (const auto& c : r.configs) {
        out += std::to_string(c.epochs) + "," + format_double(c.learning_rate) + "," + format_double(c.mean_dev_f1) +
               "," + format_double(c.sd_dev_f1) + "\n";
    }
    return out;
}

/// Per-word outputs of the selected configuration for every seed.
inline std::string predictions_to_csv(const GridSearchResult& r, const LabeledDataset& ds)
{
    std::map<std::string, SemanticClass> cls;
    for (const auto& e : ds.entries) cls.emplace(e.word, e.cls);
    std::string out(predictions_header);
    out += '\n';
    for (const auto& run : r.runs) {
        const auto emit = [&](std::string_view split, const Metrics& m) {
            for (const auto& [word, p] : m.per_word_likelihood) {
                out += std::to_string(run.seed) + "," + std::string(split) + "," + word + "," +
                       ds.scheme.name_of(cls.at(word)) + "," + format_double(p) + "," +
                       (m.per_word_correct.at(word) ? "1" : "0") + "\n";
            }
        };
        emit("dev", run.dev);
        if (run.test) emit("test", *run.test);
    }
    return out;
}

}  // namespace morphseg
