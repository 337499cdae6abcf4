// morphseg command-line entry point.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "morphseg/morphseg.hpp"

#ifndef MORPHSEG_DATA_DIR
#define MORPHSEG_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace morphseg;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_input = 2;
constexpr int exit_shape = 3;

struct CommonOptions {
    std::string config;
    std::vector<std::string> assignments;
    std::string data_dir = MORPHSEG_DATA_DIR;
    std::string vocab, prefixes, suffixes, stopwords;
};

void add_common(CLI::App& cmd, CommonOptions& o)
{
    cmd.add_option("-c,--config", o.config, "key = value config file");
    cmd.add_option("--set", o.assignments, "override a config key (key=value)");
    cmd.add_option("--data-dir", o.data_dir, "directory holding the default resource files");
    cmd.add_option("--vocab", o.vocab, "WordPiece vocabulary file");
    cmd.add_option("--prefixes", o.prefixes, "prefix list");
    cmd.add_option("--suffixes", o.suffixes, "suffix list");
    cmd.add_option("--stopwords", o.stopwords, "stopword list");
}

// Config file first, then flags; flags win.
ConfigValues collect(const CommonOptions& o, const std::vector<std::pair<std::string, std::string>>& flags)
{
    ConfigValues cfg;
    if (!o.config.empty()) {
        if (!fs::exists(o.config)) throw io_error("config file not found: " + o.config);
        cfg.load_file(o.config);
    }
    const auto cwd = fs::current_path();
    for (const auto& a : o.assignments) cfg.set_assignment(a, cwd);
    const std::pair<const char*, const std::string*> resources[] = {
        {"vocab", &o.vocab}, {"prefixes", &o.prefixes}, {"suffixes", &o.suffixes}, {"stopwords", &o.stopwords}};
    for (const auto& [key, value] : resources) {
        if (!value->empty()) cfg.set(key, *value, cwd, "flag");
    }
    for (const auto& [key, value] : flags) {
        if (!value.empty()) cfg.set(key, value, cwd, "flag");
    }
    return cfg;
}

std::unique_ptr<Resources> load_resources(const ConfigValues& cfg, const CommonOptions& o)
{
    const auto p = resource_paths(cfg, o.data_dir);
    for (const auto& f : {p.vocab, p.prefixes, p.suffixes, p.stopwords}) {
        if (!fs::exists(f)) throw io_error("resource file not found: " + f.string());
    }
    return std::make_unique<Resources>(p.vocab, p.prefixes, p.suffixes, p.stopwords);
}

SegmentationContext context_of(const Resources& r, const ConfigValues& cfg)
{
    const auto depth = cfg.integer("max_depth", default_max_depth);
    const auto chars = cfg.integer("max_chars", static_cast<std::int64_t>(default_max_chars));
    if (depth < 1 || chars < 1) throw config_error("max_depth and max_chars must be positive");
    return r.context(static_cast<int>(depth), static_cast<std::size_t>(chars));
}

nlohmann::json file_record(const fs::path& p)
{
    return {{"file", p.filename().string()}, {"sha256", sha256_file(p)}};
}

nlohmann::json resource_record(const ConfigValues& cfg, const CommonOptions& o)
{
    const auto p = resource_paths(cfg, o.data_dir);
    return {{"vocab", file_record(p.vocab)},
            {"prefixes", file_record(p.prefixes)},
            {"suffixes", file_record(p.suffixes)},
            {"stopwords", file_record(p.stopwords)}};
}

fs::path output_dir(const ConfigValues& cfg, const std::string& flag)
{
    if (!flag.empty()) return flag;
    return cfg.require_path("output_dir");
}

fs::path dataset_path(const ConfigValues& cfg)
{
    if (auto p = cfg.path("dataset")) return *p;
    return cfg.require_path("output_dir") / "dataset.tsv";
}

// segment ---------------------------------------------------------------

struct SegmentOptions {
    CommonOptions common;
    std::string mode = "derivational";
    std::string file;
    std::vector<std::string> words;
};

int run_segment(const SegmentOptions& o)
{
    const auto cfg = collect(o.common, {});
    const auto kind = parse_kind(o.mode);
    if (!kind) throw config_error("--mode must be derivational or wordpiece");
    std::vector<std::string> words = o.words;
    if (!o.file.empty()) {
        for (const auto& line : read_lines(o.file)) {
            const auto w = trim(line.text);
            if (!w.empty()) words.emplace_back(w);
        }
    }
    const auto res = load_resources(cfg, o.common);
    const auto ctx = context_of(*res, cfg);
    std::string out;
    for (const auto& raw : words) {
        const auto word = to_lower(raw);
        out += word + '\t';
        if (*kind == SegmentationKind::wordpiece) {
            out += join(ctx.wordpiece(word).tokens, " ");
        } else {
            const auto seg = ctx.derivational(word);
            out += seg ? join(serialize_delbert(*seg, ctx.vocab), " ") : std::string("<none>");
        }
        out += '\n';
    }
    std::cout << out;
    return exit_ok;
}

// build-vocab -----------------------------------------------------------

struct BuildVocabOptions {
    CommonOptions common;
    std::string out;
};

int run_build_vocab(const BuildVocabOptions& o)
{
    const auto cfg = collect(o.common, {});
    const auto dir = output_dir(cfg, o.out);
    const auto res = load_resources(cfg, o.common);
    std::string stems;
    for (const auto& s : res->stems().stems()) stems += s + '\n';
    write_file_atomic(dir / "stems.txt", stems);
    nlohmann::json prov = {{"inputs", resource_record(cfg, o.common)},
                           {"stems", res->stems().size()},
                           {"prefixes", res->affixes().prefixes().size()},
                           {"suffixes", res->affixes().suffixes().size()},
                           {"stopwords", res->stopwords().size()},
                           {"sha256", sha256_hex(stems)}};
    write_file_atomic(dir / "stems.provenance.json", prov.dump(2) + "\n");
    std::cerr << "stem set: " << res->stems().size() << " stems written to " << (dir / "stems.txt").string() << "\n";
    return exit_ok;
}

// build-dataset ---------------------------------------------------------

struct BuildDatasetOptions {
    CommonOptions common;
    std::string corpus, out, seed;
};

int run_build_dataset(const BuildDatasetOptions& o)
{
    const auto cfg = collect(o.common, {{"corpus", o.corpus}, {"seed", o.seed}});
    const auto scheme = label_scheme(cfg);
    const auto corpus = cfg.require_path("corpus");
    if (!fs::is_regular_file(corpus)) throw io_error("corpus not readable: " + corpus.string());
    const auto dir = output_dir(cfg, o.out);
    const auto seed = split_seed(cfg);
    const auto res = load_resources(cfg, o.common);
    const auto ctx = context_of(*res, cfg);

    ComplexWordExtractor extractor(scheme, ctx);
    read_jsonl_corpus(corpus, corpus_format(cfg), [&](std::span<const Document> batch) { extractor.add(batch); });
    const auto assigned = assign_classes(extractor.stats());
    const auto ds = split_dataset(assigned, seed, scheme);
    const auto tsv = dataset_to_tsv(ds);
    const auto sizes = split_sizes(ds.entries.size());

    nlohmann::json prov = {
        {"corpus", file_record(corpus)},
        {"resources", resource_record(cfg, o.common)},
        {"seed", seed},
        {"scheme",
         {{"class1", {{"name", scheme.class1_name}, {"labels", scheme.class1_labels}}},
          {"class2", {{"name", scheme.class2_name}, {"labels", scheme.class2_labels}}}}},
        {"documents_used", extractor.documents_used()},
        {"documents_skipped", extractor.documents_skipped()},
        {"complex_words", extractor.stats().size()},
        {"labeled_words", ds.entries.size()},
        {"splits", {{"train", sizes.train}, {"dev", sizes.dev}, {"test", sizes.test}}},
        {"dataset_sha256", sha256_hex(tsv)}};
    write_file_atomic(dir / "dataset.tsv", tsv);
    write_file_atomic(dir / "dataset.provenance.json", prov.dump(2) + "\n");
    std::cerr << "dataset: " << ds.entries.size() << " labeled words (" << sizes.train << " train, " << sizes.dev
              << " dev, " << sizes.test << " test) from " << extractor.stats().size() << " complex words\n";
    return exit_ok;
}

// probe -----------------------------------------------------------------

struct ProbeOptions {
    CommonOptions common;
    std::string dataset, out, kind, mode, seeds, epochs, learning_rates, batch_size;
};

int run_probe(const ProbeOptions& o)
{
    const auto cfg = collect(o.common, {{"dataset", o.dataset},
                                        {"kind", o.kind},
                                        {"mode", o.mode},
                                        {"seeds", o.seeds},
                                        {"epochs", o.epochs},
                                        {"learning_rates", o.learning_rates},
                                        {"batch_size", o.batch_size}});
    const auto kind = segmentation_kind(cfg);
    const auto mode = ablation_mode(cfg);
    check_combination(kind, mode);
    const auto hp = hyperparams(cfg);
    const auto seeds = probe_seeds(cfg);
    const auto scheme = label_scheme(cfg);
    const FeatureOptions features{cfg.boolean("include_hyphen", true)};
    const auto data = dataset_path(cfg);
    if (!fs::is_regular_file(data)) throw io_error("dataset not found: " + data.string());
    const fs::path dir = !o.out.empty() ? fs::path(o.out)
                                        : cfg.require_path("output_dir") /
                                              ("probe-" + std::string(to_string(kind)) + "-" + std::string(to_string(mode)));

    const auto ds = read_dataset_tsv(data, scheme);
    const auto res = load_resources(cfg, o.common);
    const auto ctx = context_of(*res, cfg);
    const auto result = grid_search(ds, kind, mode, ctx, hp, seeds, features);

    const auto& best = result.configs[result.best];
    write_file_atomic(dir / "metrics.csv", metrics_to_csv(result, seeds));
    write_file_atomic(dir / "grid.csv", grid_to_csv(result));
    write_file_atomic(dir / "predictions.csv", predictions_to_csv(result, ds));
    write_file_atomic(dir / "model.txt", model_to_text(result.runs.front().model));
    nlohmann::json info = {{"name", std::string(to_string(kind)) + "-" + std::string(to_string(mode))},
                           {"kind", to_string(kind)},
                           {"mode", to_string(mode)},
                           {"include_hyphen", features.include_hyphen},
                           {"best", {{"epochs", best.epochs}, {"learning_rate", best.learning_rate}, {"batch_size", hp.batch_size}}},
                           {"mean_dev_f1", best.mean_dev_f1},
                           {"sd_dev_f1", best.sd_dev_f1},
                           {"seeds", seeds},
                           {"model_seed", seeds.front()},
                           {"feature_space", FeatureSpace{ctx.vocab.size()}.size()},
                           {"dataset", file_record(data)}};
    write_file_atomic(dir / "probe.json", info.dump(2) + "\n");
    std::cerr << "probe " << to_string(kind) << "/" << to_string(mode) << ": best " << config_label(best.epochs, best.learning_rate)
              << ", dev F1 " << format_fixed(best.mean_dev_f1, 4) << " +/- " << format_fixed(best.sd_dev_f1, 4)
              << " over " << seeds.size() << " seeds\n";
    return exit_ok;
}

// analyze ---------------------------------------------------------------

struct AnalyzeOptions {
    CommonOptions common;
    std::string dataset, out;
    std::vector<std::string> models;
};

ModelPredictions load_model_dir(const std::string& spec)
{
    std::string name;
    fs::path dir = spec;
    if (const auto eq = spec.find('='); eq != std::string::npos) {
        name = spec.substr(0, eq);
        dir = spec.substr(eq + 1);
    }
    const auto info_path = dir / "probe.json";
    const auto pred_path = dir / "predictions.csv";
    if (!fs::is_regular_file(info_path) || !fs::is_regular_file(pred_path))
        throw io_error("model directory " + dir.string() + " lacks probe.json or predictions.csv");
    nlohmann::json info;
    try {
        info = nlohmann::json::parse(read_file(info_path));
    } catch (const nlohmann::json::exception& e) {
        throw format_error(info_path.string() + ": " + e.what());
    }
    const auto kind = parse_kind(info.value("kind", ""));
    const auto mode = parse_mode(info.value("mode", ""));
    if (!kind || !mode) throw format_error(info_path.string() + ": bad kind or mode");
    if (name.empty()) name = info.value("name", dir.filename().string());
    if (name.find_first_of(",\t\n") != std::string::npos) throw config_error("model name '" + name + "' contains a separator");
    return read_predictions_csv(pred_path, name, *kind, *mode);
}

int run_analyze(const AnalyzeOptions& o)
{
    const auto cfg = collect(o.common, {{"dataset", o.dataset}});
    if (o.models.empty()) throw config_error("analyze needs at least one --model directory");
    const auto scheme = label_scheme(cfg);
    const auto data = dataset_path(cfg);
    if (!fs::is_regular_file(data)) throw io_error("dataset not found: " + data.string());
    const fs::path dir = !o.out.empty() ? fs::path(o.out) : cfg.require_path("output_dir") / "analysis";

    std::vector<ModelPredictions> models;
    for (const auto& m : o.models) models.push_back(load_model_dir(m));
    const auto ds = read_dataset_tsv(data, scheme);
    const auto res = load_resources(cfg, o.common);
    const auto ctx = context_of(*res, cfg);
    const auto report = run_analysis(ds, ctx, models);
    for (const auto& [file, contents] : report.files) write_file_atomic(dir / file, contents);
    for (const auto& n : report.notices) std::cerr << "notice: " << n << "\n";
    std::cerr << "analysis: " << report.files.size() << " files written to " << dir.string() << "\n";
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Derivational and WordPiece segmentation, dataset building, probing and analysis"};
    app.require_subcommand(1);

    SegmentOptions seg;
    auto* segment = app.add_subcommand("segment", "print segmentations, one word per line");
    add_common(*segment, seg.common);
    segment->add_option("-m,--mode", seg.mode, "derivational or wordpiece")->check(CLI::IsMember({"derivational", "wordpiece"}));
    segment->add_option("-f,--file", seg.file, "file with one word per line");
    segment->add_option("words", seg.words, "words to segment");

    BuildVocabOptions bv;
    auto* build_vocab = app.add_subcommand("build-vocab", "derive the stem set from the vocabulary");
    add_common(*build_vocab, bv.common);
    build_vocab->add_option("-o,--out", bv.out, "output directory");

    BuildDatasetOptions bd;
    auto* build_dataset = app.add_subcommand("build-dataset", "extract and label complex words from a JSONL corpus");
    add_common(*build_dataset, bd.common);
    build_dataset->add_option("--corpus", bd.corpus, "JSON Lines corpus");
    build_dataset->add_option("-o,--out", bd.out, "output directory");
    build_dataset->add_option("--seed", bd.seed, "split seed");

    ProbeOptions pr;
    auto* probe = app.add_subcommand("probe", "grid-search and train the linear probe");
    add_common(*probe, pr.common);
    probe->add_option("--dataset", pr.dataset, "dataset TSV");
    probe->add_option("-o,--out", pr.out, "output directory");
    probe->add_option("--kind", pr.kind, "wordpiece or derivational");
    probe->add_option("-m,--mode", pr.mode, "full, stem_ablated or affix_ablated");
    probe->add_option("--seeds", pr.seeds, "seed list, e.g. 0-19");
    probe->add_option("--epochs", pr.epochs, "epoch grid, e.g. 1-20");
    probe->add_option("--learning-rates", pr.learning_rates, "learning-rate grid, e.g. 0.01,0.1");
    probe->add_option("--batch-size", pr.batch_size, "mini-batch size");

    AnalyzeOptions an;
    auto* analyze = app.add_subcommand("analyze", "validity, frequency, affix and error reports");
    add_common(*analyze, an.common);
    analyze->add_option("--dataset", an.dataset, "dataset TSV");
    analyze->add_option("--model", an.models, "probe output directory, optionally name=dir; the first is the reference");
    analyze->add_option("-o,--out", an.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }

    try {
        if (*segment) return run_segment(seg);
        if (*build_vocab) return run_build_vocab(bv);
        if (*build_dataset) return run_build_dataset(bd);
        if (*probe) return run_probe(pr);
        if (*analyze) return run_analyze(an);
    } catch (const data_shape_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_shape;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    }
    return exit_input;
}
