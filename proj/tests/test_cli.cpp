#include <gtest/gtest.h>

#include <fstream>

#include "support/fixtures.hpp"
#include "support/synthetic.hpp"

using namespace morphseg;
namespace fs = std::filesystem;
using fixtures::run;

namespace {

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

std::string cmd(const std::string& args) { return quote(fixtures::cli()) + " " + args + " 2>/dev/null"; }

void write(const fs::path& p, const std::string& text)
{
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

std::string slurp(const fs::path& p) { return read_file(p); }

const char* scheme_config = "class1_name = pos\nclass1_labels = pos\nclass2_name = neg\nclass2_labels = neg\n";

// Writes run.conf with the label scheme and output_dir = out.
fs::path write_config(const fixtures::TempDir& dir, const std::string& extra = "")
{
    const auto p = dir / "run.conf";
    write(p, std::string(scheme_config) + "output_dir = out\n" + extra);
    return p;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// A corpus and dataset shared by the probe and analyze tests.
struct SharedRun {
    fixtures::TempDir dir{"cli-shared"};
    fs::path config;
    int build_exit = -1;

    SharedRun()
    {
        synthetic::write_jsonl_corpus(dir / "corpus.jsonl", fixtures::bert(), 400);
        config = write_config(dir, "corpus = corpus.jsonl\nepochs = 1-3\nlearning_rates = 0.1,0.3\n");
        build_exit = run(cmd("build-dataset -c " + quote(config))).exit_code;
    }
};

SharedRun& shared()
{
    static SharedRun r;
    return r;
}

}  // namespace

TEST(CliSegment, Goldens)
{
    const auto r = run(cmd("segment superbizarre Unlockable xyzzyq"));
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.out, "superbizarre\tsuper - bizarre\nunlockable\tunlock ##able\nxyzzyq\t<none>\n");
    const auto w = run(cmd("segment --mode wordpiece superbizarre templatize"));
    EXPECT_EQ(w.exit_code, 0);
    EXPECT_EQ(w.out, "superbizarre\tsuperb ##iza ##rre\ntemplatize\tte ##mp ##lat ##ize\n");
}

TEST(CliSegment, FileInputAndEmptyInput)
{
    fixtures::TempDir dir("cli-seg");
    write(dir / "words.txt", "happiness\n\n  tribalize \n");
    const auto r = run(cmd("segment -f " + quote(dir / "words.txt")));
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(count_lines(r.out), 2u);
    EXPECT_EQ(r.out.rfind("happiness\t", 0), 0u);
    write(dir / "empty.txt", "");
    const auto e = run(cmd("segment -f " + quote(dir / "empty.txt")));
    EXPECT_EQ(e.exit_code, 0);
    EXPECT_EQ(e.out, "");
}

TEST(CliSegment, MissingResources)
{
    fixtures::TempDir dir("cli-seg");
    EXPECT_EQ(run(cmd("segment --vocab " + quote(dir / "nope.txt") + " word")).exit_code, 2);
    EXPECT_EQ(run(cmd("segment --data-dir " + quote(dir.path()) + " word")).exit_code, 2);
    EXPECT_EQ(run(cmd("segment -f " + quote(dir / "missing.txt"))).exit_code, 2);
}

TEST(CliGeneral, HelpAndUsageErrors)
{
    EXPECT_EQ(run(cmd("--help")).exit_code, 0);
    EXPECT_EQ(run(cmd("")).exit_code, 2);
    EXPECT_EQ(run(cmd("frobnicate")).exit_code, 2);
    EXPECT_EQ(run(cmd("segment --mode morfessor word")).exit_code, 2);
    EXPECT_EQ(run(cmd("segment --set colour=blue word")).exit_code, 2);
}

TEST(CliBuildVocab, WritesStemSet)
{
    fixtures::TempDir dir("cli-vocab");
    const auto r = run(cmd("build-vocab -o " + quote(dir / "v")));
    ASSERT_EQ(r.exit_code, 0);
    const auto stems = slurp(dir / "v/stems.txt");
    EXPECT_EQ(count_lines(stems), fixtures::bert().stems().size());
    const auto prov = nlohmann::json::parse(slurp(dir / "v/stems.provenance.json"));
    EXPECT_EQ(prov["stems"], fixtures::bert().stems().size());
    EXPECT_EQ(prov["sha256"], sha256_hex(stems));
}

TEST(CliBuildDataset, SmallCorpus)
{
    fixtures::TempDir dir("cli-ds");
    // Nine complex words with distinct class fractions.
    std::string corpus;
    const std::vector<std::string> words{"superbizarre", "unlockable", "happiness", "tribalize", "overseasoned",
                                         "promosque",    "superannoying",    "unkind",    "hopeful"};
    for (std::size_t i = 0; i < words.size(); ++i) {
        for (std::size_t j = 0; j < 9; ++j) {
            const std::string label = j < i ? "pos" : "neg";
            corpus += nlohmann::json{{"text", "the " + words[i] + " one"}, {"label", label}}.dump() + "\n";
        }
    }
    corpus += "{\"text\": \"skipped entirely\", \"label\": \"meh\"}\n";
    write(dir / "c.jsonl", corpus);
    const auto config = write_config(dir, "corpus = c.jsonl\nseed = 5\n");
    ASSERT_EQ(run(cmd("build-dataset -c " + quote(config))).exit_code, 0);
    const auto tsv = slurp(dir / "out/dataset.tsv");
    EXPECT_EQ(count_lines(tsv), 7u);
    const auto ds = read_dataset_tsv(dir / "out/dataset.tsv", label_scheme([&] {
                                         ConfigValues c;
                                         c.load_file(config);
                                         return c;
                                     }()));
    std::size_t pos = 0;
    for (const auto& e : ds.entries) {
        EXPECT_EQ(e.frequency, 9u);
        if (e.cls == SemanticClass::class1) {
            ++pos;
            EXPECT_TRUE(e.word == "hopeful" || e.word == "unkind" || e.word == "superannoying") << e.word;
        }
    }
    EXPECT_EQ(pos, 3u);
    const auto prov = nlohmann::json::parse(slurp(dir / "out/dataset.provenance.json"));
    EXPECT_EQ(prov["labeled_words"], 6);
    EXPECT_EQ(prov["splits"]["train"], 4);
    EXPECT_EQ(prov["splits"]["dev"], 1);
    EXPECT_EQ(prov["splits"]["test"], 1);
    EXPECT_EQ(prov["documents_skipped"], 1);
    EXPECT_EQ(prov["dataset_sha256"], sha256_hex(tsv));
    EXPECT_EQ(prov["corpus"]["file"], "c.jsonl");

    ASSERT_EQ(run(cmd("build-dataset -c " + quote(config) + " -o " + quote(dir / "again"))).exit_code, 0);
    EXPECT_EQ(slurp(dir / "again/dataset.tsv"), tsv);
    EXPECT_EQ(slurp(dir / "again/dataset.provenance.json"), slurp(dir / "out/dataset.provenance.json"));

    ASSERT_EQ(run(cmd("build-dataset -c " + quote(config) + " --seed 6 -o " + quote(dir / "other"))).exit_code, 0);
    EXPECT_EQ(count_lines(slurp(dir / "other/dataset.tsv")), 7u);
}

TEST(CliBuildDataset, Errors)
{
    fixtures::TempDir dir("cli-ds");
    write(dir / "tiny.jsonl", "{\"text\": \"superbizarre unlockable\", \"label\": \"pos\"}\n");
    const auto config = write_config(dir, "corpus = tiny.jsonl\n");
    EXPECT_EQ(run(cmd("build-dataset -c " + quote(config))).exit_code, 3);
    EXPECT_EQ(run(cmd("build-dataset -c " + quote(config) + " --corpus " + quote(dir / "absent.jsonl"))).exit_code, 2);
    EXPECT_EQ(run(cmd("build-dataset -c " + quote(config) + " --set class2_labels=pos,neg")).exit_code, 2);
    EXPECT_EQ(run(cmd("build-dataset -c " + quote(dir / "missing.conf"))).exit_code, 2);
    write(dir / "bad.jsonl", "{\"text\": \"superbizarre\", \"label\": \"pos\"}\nnot json\n");
    EXPECT_EQ(run(cmd("build-dataset -c " + quote(config) + " --corpus " + quote(dir / "bad.jsonl"))).exit_code, 2);
}

TEST(CliProbe, TwentySeeds)
{
    auto& s = shared();
    ASSERT_EQ(s.build_exit, 0);
    const auto out = s.dir / "p1";
    const auto fixed = " --epochs 3 --learning-rates 0.3";
    ASSERT_EQ(run(cmd("probe -c " + quote(s.config) + fixed + " -o " + quote(out))).exit_code, 0);
    const auto metrics = slurp(out / "metrics.csv");
    const auto lines = split(metrics, '\n');
    EXPECT_EQ(lines.front(), "config,seed,split,f1,accuracy");
    std::size_t dev = 0, test = 0;
    for (const auto& l : lines) {
        if (l.find(",dev,") != std::string::npos) ++dev;
        if (l.find(",test,") != std::string::npos) ++test;
    }
    EXPECT_EQ(dev, 20u);
    EXPECT_EQ(test, 20u);
    const auto info = nlohmann::json::parse(slurp(out / "probe.json"));
    EXPECT_EQ(info["name"], "derivational-full");
    EXPECT_EQ(info["seeds"].size(), 20u);
    EXPECT_EQ(count_lines(slurp(out / "grid.csv")), 2u);
    const auto model = read_model(out / "model.txt");
    EXPECT_EQ(model.weights.size(), static_cast<std::size_t>(info["feature_space"].get<std::size_t>()));

    ASSERT_EQ(run(cmd("probe -c " + quote(s.config) + fixed + " -o " + quote(s.dir / "p2"))).exit_code, 0);
    for (const std::string f : {"metrics.csv", "grid.csv", "predictions.csv", "model.txt", "probe.json"})
        EXPECT_EQ(slurp(out / f), slurp(s.dir / "p2" / f)) << f;

    // The full grid reports every configuration for every seed.
    ASSERT_EQ(run(cmd("probe -c " + quote(s.config) + " -o " + quote(s.dir / "p3"))).exit_code, 0);
    EXPECT_EQ(count_lines(slurp(s.dir / "p3/grid.csv")), 1u + 3u * 2u);
    EXPECT_EQ(count_lines(slurp(s.dir / "p3/metrics.csv")), 1u + 3u * 2u * 20u * 2u);
}

TEST(CliProbe, Errors)
{
    auto& s = shared();
    ASSERT_EQ(s.build_exit, 0);
    const auto base = "probe -c " + quote(s.config) + " --seeds 0 -o " + quote(s.dir / "perr");
    EXPECT_EQ(run(cmd(base + " --kind wordpiece --mode stem_ablated")).exit_code, 2);
    EXPECT_EQ(run(cmd(base + " --kind bpe")).exit_code, 2);
    EXPECT_EQ(run(cmd(base + " --dataset " + quote(s.dir / "none.tsv"))).exit_code, 2);
    EXPECT_EQ(run(cmd(base + " --epochs 0")).exit_code, 2);

    write(s.dir / "oneclass.tsv", "word\tclass\tfrequency\tsplit\nsuperbizarre\tpos\t3\ttrain\nunlockable\tpos\t3\ttrain\n"
                                  "happiness\tneg\t4\tdev\nsadness\tpos\t4\ttest\n");
    EXPECT_EQ(run(cmd(base + " --dataset " + quote(s.dir / "oneclass.tsv"))).exit_code, 3);
    write(s.dir / "badshape.tsv", "word\tclass\tfrequency\nsuperbizarre\tpos\t3\n");
    EXPECT_NE(run(cmd(base + " --dataset " + quote(s.dir / "badshape.tsv"))).exit_code, 0);
}

TEST(CliAnalyze, OneAndTwoModels)
{
    auto& s = shared();
    ASSERT_EQ(s.build_exit, 0);
    const auto probe = [&](const std::string& kind, const std::string& dir) {
        return run(cmd("probe -c " + quote(s.config) + " --seeds 0-2 --kind " + kind + " -o " + quote(s.dir / dir))).exit_code;
    };
    ASSERT_EQ(probe("derivational", "pd"), 0);
    ASSERT_EQ(probe("wordpiece", "pw"), 0);

    const auto one = run(quote(fixtures::cli()) + " analyze -c " + quote(s.config) + " --model " + quote(s.dir / "pd") +
                         " -o " + quote(s.dir / "a1") + " 2>&1");
    ASSERT_EQ(one.exit_code, 0) << one.out;
    EXPECT_NE(one.out.find("notice:"), std::string::npos);
    EXPECT_TRUE(fs::exists(s.dir / "a1/validity.csv"));
    EXPECT_TRUE(fs::exists(s.dir / "a1/frequency_bins.csv"));
    EXPECT_FALSE(fs::exists(s.dir / "a1/ttest.csv"));

    ASSERT_EQ(run(cmd("analyze -c " + quote(s.config) + " --model " + quote(s.dir / "pd") + " --model wp=" +
                      quote(s.dir / "pw") + " -o " + quote(s.dir / "a2")))
                  .exit_code,
              0);
    for (const std::string f : {"validity.csv", "frequency_bins.csv", "affix_delta.csv", "ttest.csv", "regression.csv",
                                "error_ranking.csv"})
        EXPECT_TRUE(fs::exists(s.dir / "a2" / f)) << f;
    const auto ttest = split(slurp(s.dir / "a2/ttest.csv"), '\n');
    ASSERT_GE(ttest.size(), 2u);
    EXPECT_EQ(ttest[1].rfind("derivational-full,wp,", 0), 0u) << ttest[1];

    EXPECT_EQ(run(cmd("analyze -c " + quote(s.config) + " -o " + quote(s.dir / "a3"))).exit_code, 2);
    EXPECT_EQ(run(cmd("analyze -c " + quote(s.config) + " --model " + quote(s.dir / "nothing"))).exit_code, 2);
}
