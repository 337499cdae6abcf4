#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "morphseg/corpus.hpp"
#include "morphseg/error.hpp"
#include "morphseg/probe.hpp"
#include "morphseg/text.hpp"

namespace morphseg {

/// key = value settings. Relative paths resolve against the directory of the
/// file that set them, so a config can be run from anywhere.
class ConfigValues {
public:
    struct Entry {
        std::string value;
        std::filesystem::path base;
        std::string origin;  // file:line or "flag"
    };

    static inline const std::set<std::string, std::less<>> known_keys{
        "vocab",         "prefixes",       "suffixes",     "stopwords",    "corpus",      "dataset",
        "output_dir",    "text_field",     "label_field",  "class1_name",  "class1_labels", "class2_name",
        "class2_labels", "seed",           "seeds",        "epochs",       "learning_rates", "batch_size",
        "kind",          "mode",           "max_depth",    "max_chars",    "include_hyphen"};

    void set(std::string key, std::string value, std::filesystem::path base, std::string origin)
    {
        if (!known_keys.contains(key)) throw config_error(origin + ": unknown key '" + key + "'");
        values_[std::move(key)] = {std::move(value), std::move(base), std::move(origin)};
    }

    /// Parses `key=value` as given on the command line.
    void set_assignment(std::string_view assignment, const std::filesystem::path& base)
    {
        const auto eq = assignment.find('=');
        if (eq == std::string_view::npos) throw config_error("expected key=value, got '" + std::string(assignment) + "'");
        set(std::string(trim(assignment.substr(0, eq))), std::string(trim(assignment.substr(eq + 1))), base, "flag");
    }

    void load_file(const std::filesystem::path& path)
    {
        const auto base = std::filesystem::absolute(path).parent_path();
        for (const auto& line : read_lines(path)) {
            const auto text = trim(line.text);
            if (text.empty() || text.front() == '#') continue;
            const auto origin = path.string() + ":" + std::to_string(line.line_number);
            const auto eq = text.find('=');
            if (eq == std::string_view::npos) throw config_error(origin + ": expected key = value");
            set(std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1))), base, origin);
        }
    }

    bool has(std::string_view key) const { return values_.find(key) != values_.end(); }

    const Entry* find(std::string_view key) const
    {
        const auto it = values_.find(key);
        return it == values_.end() ? nullptr : &it->second;
    }

    std::optional<std::string> string(std::string_view key) const
    {
        const auto* e = find(key);
        return e ? std::optional(e->value) : std::nullopt;
    }

    std::string require(std::string_view key) const
    {
        const auto* e = find(key);
        if (!e || e->value.empty()) throw config_error("missing setting '" + std::string(key) + "'");
        return e->value;
    }

    std::optional<std::filesystem::path> path(std::string_view key) const
    {
        const auto* e = find(key);
        if (!e || e->value.empty()) return std::nullopt;
        std::filesystem::path p(e->value);
        return p.is_absolute() ? p : (e->base / p).lexically_normal();
    }

    std::filesystem::path require_path(std::string_view key) const
    {
        auto p = path(key);
        if (!p) throw config_error("missing setting '" + std::string(key) + "'");
        return *p;
    }

    std::int64_t integer(std::string_view key, std::int64_t fallback) const
    {
        const auto* e = find(key);
        return e ? parse_integer(e->value, key) : fallback;
    }

    bool boolean(std::string_view key, bool fallback) const
    {
        const auto* e = find(key);
        if (!e) return fallback;
        const auto v = to_lower(e->value);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw config_error("setting '" + std::string(key) + "' must be true or false");
    }

    static std::int64_t parse_integer(std::string_view text, std::string_view key)
    {
        const std::string s(trim(text));
        try {
            std::size_t used = 0;
            const auto v = std::stoll(s, &used);
            if (used == s.size()) return v;
        } catch (const std::exception&) {
        }
        throw config_error("setting '" + std::string(key) + "': '" + s + "' is not an integer");
    }

    static double parse_real(std::string_view text, std::string_view key)
    {
        const std::string s(trim(text));
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (s.empty() || *end != '\0') throw config_error("setting '" + std::string(key) + "': '" + s + "' is not a number");
        return v;
    }

    /// Comma-separated integers; `a-b` expands to the inclusive range.
    static std::vector<std::int64_t> parse_integer_list(std::string_view text, std::string_view key)
    {
        std::vector<std::int64_t> out;
        for (const auto& raw : split(text, ',')) {
            const auto item = trim(raw);
            if (item.empty()) continue;
            const auto dash = item.find('-', 1);
            if (dash == std::string_view::npos) {
                out.push_back(parse_integer(item, key));
                continue;
            }
            const auto lo = parse_integer(item.substr(0, dash), key);
            const auto hi = parse_integer(item.substr(dash + 1), key);
            if (hi < lo) throw config_error("setting '" + std::string(key) + "': empty range '" + std::string(item) + "'");
            if (hi - lo > 100000) throw config_error("setting '" + std::string(key) + "': range too large");
            for (auto v = lo; v <= hi; ++v) out.push_back(v);
        }
        if (out.empty()) throw config_error("setting '" + std::string(key) + "' is empty");
        return out;
    }

    static std::set<std::string> parse_string_set(std::string_view text)
    {
        std::set<std::string> out;
        for (const auto& raw : split(text, ',')) {
            const auto item = trim(raw);
            if (!item.empty()) out.emplace(item);
        }
        return out;
    }

private:
    std::map<std::string, Entry, std::less<>> values_;
};

/// Resource files every command needs; missing entries fall back to `data_dir`.
struct ResourcePaths {
    std::filesystem::path vocab, prefixes, suffixes, stopwords;
};

inline ResourcePaths resource_paths(const ConfigValues& cfg, const std::filesystem::path& data_dir)
{
    return {cfg.path("vocab").value_or(data_dir / "bert-base-uncased-vocab.txt"),
            cfg.path("prefixes").value_or(data_dir / "prefixes.txt"),
            cfg.path("suffixes").value_or(data_dir / "suffixes.txt"),
            cfg.path("stopwords").value_or(data_dir / "stopwords-en.txt")};
}

inline LabelScheme label_scheme(const ConfigValues& cfg)
{
    LabelScheme s;
    s.class1_name = cfg.require("class1_name");
    s.class2_name = cfg.require("class2_name");
    s.class1_labels = ConfigValues::parse_string_set(cfg.require("class1_labels"));
    s.class2_labels = ConfigValues::parse_string_set(cfg.require("class2_labels"));
    s.validate();
    return s;
}

inline CorpusFormat corpus_format(const ConfigValues& cfg)
{
    CorpusFormat f;
    if (auto v = cfg.string("text_field")) f.text_field = *v;
    if (auto v = cfg.string("label_field")) f.label_field = *v;
    return f;
}

inline std::uint64_t split_seed(const ConfigValues& cfg)
{
    const auto v = cfg.integer("seed", 0);
    if (v < 0) throw config_error("seed must be non-negative");
    return static_cast<std::uint64_t>(v);
}

inline std::vector<std::uint64_t> probe_seeds(const ConfigValues& cfg)
{
    std::vector<std::uint64_t> out;
    for (const auto v : ConfigValues::parse_integer_list(cfg.string("seeds").value_or("0-19"), "seeds")) {
        if (v < 0) throw config_error("seeds must be non-negative");
        out.push_back(static_cast<std::uint64_t>(v));
    }
    return out;
}

inline Hyperparams hyperparams(const ConfigValues& cfg)
{
    Hyperparams hp;
    if (auto v = cfg.string("epochs")) {
        hp.epochs.clear();
        for (const auto e : ConfigValues::parse_integer_list(*v, "epochs")) hp.epochs.push_back(static_cast<int>(e));
    }
    if (auto v = cfg.string("learning_rates")) {
        hp.learning_rates.clear();
        for (const auto& item : split(*v, ',')) {
            if (!trim(item).empty()) hp.learning_rates.push_back(ConfigValues::parse_real(item, "learning_rates"));
        }
    }
    hp.batch_size = static_cast<int>(cfg.integer("batch_size", hp.batch_size));
    hp.validate();
    return hp;
}

inline SegmentationKind segmentation_kind(const ConfigValues& cfg)
{
    const auto s = cfg.string("kind").value_or("derivational");
    const auto k = parse_kind(s);
    if (!k) throw config_error("kind must be wordpiece or derivational, got '" + s + "'");
    return *k;
}

inline AblationMode ablation_mode(const ConfigValues& cfg)
{
    const auto s = cfg.string("mode").value_or("full");
    const auto m = parse_mode(s);
    if (!m) throw config_error("mode must be full, stem_ablated or affix_ablated, got '" + s + "'");
    return *m;
}

}  // namespace morphseg
