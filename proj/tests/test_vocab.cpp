#include <gtest/gtest.h>

#include <fstream>

#include "support/fixtures.hpp"

using namespace morphseg;

namespace {

void write_lines(const std::filesystem::path& p, std::initializer_list<std::string> lines)
{
    std::ofstream out(p);
    for (const auto& l : lines) out << l << "\n";
}

}  // namespace

TEST(Vocabulary, IdsFollowLineOrder)
{
    fixtures::TempDir dir("vocab");
    write_lines(dir / "v.txt", {"the", "super", "##ize"});
    const auto v = load_vocabulary(dir / "v.txt");
    ASSERT_EQ(v.size(), 3u);
    EXPECT_EQ(index_of(*v.find("the")), 0u);
    EXPECT_EQ(index_of(*v.find("super")), 1u);
    EXPECT_EQ(index_of(*v.find("##ize")), 2u);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(index_of(*v.find(v.token(static_cast<TokenId>(i)))), i);
}

TEST(Vocabulary, DuplicateTokenNamesLine)
{
    fixtures::TempDir dir("vocab");
    write_lines(dir / "v.txt", {"the", "super", "bizarre", "super"});
    try {
        load_vocabulary(dir / "v.txt");
        FAIL() << "expected format_error";
    } catch (const format_error& e) {
        EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
    }
}

TEST(Vocabulary, EmptyFileIsFormatError)
{
    fixtures::TempDir dir("vocab");
    write_lines(dir / "v.txt", {});
    EXPECT_THROW(load_vocabulary(dir / "v.txt"), format_error);
}

TEST(Vocabulary, MissingFileIsIoError) { EXPECT_THROW(load_vocabulary("/nonexistent/vocab.txt"), io_error); }

TEST(Vocabulary, LowercasesExceptSpecialTokens)
{
    fixtures::TempDir dir("vocab");
    write_lines(dir / "v.txt", {"[UNK]", "Super", "##IZE"});
    const auto v = load_vocabulary(dir / "v.txt");
    EXPECT_TRUE(v.contains("[UNK]"));
    EXPECT_TRUE(v.contains("super"));
    EXPECT_TRUE(v.contains("##ize"));
}

TEST(Vocabulary, ContinuationTokens)
{
    EXPECT_TRUE(Vocabulary::is_continuation("##ize"));
    EXPECT_FALSE(Vocabulary::is_continuation("ize"));
    EXPECT_FALSE(Vocabulary::is_continuation("##"));
    EXPECT_EQ(Vocabulary::piece_of("##ize"), "ize");
    EXPECT_EQ(Vocabulary::piece_of("super"), "super");
}

TEST(Vocabulary, BertFixtureSize) { EXPECT_EQ(fixtures::bert().vocab().size(), 30522u); }

TEST(AffixInventory, AcceptsPaperAffixes)
{
    const auto& v = fixtures::bert().vocab();
    EXPECT_NO_THROW(AffixInventory({"super", "anti", "non"}, {"ize"}, v));
}

TEST(AffixInventory, RejectsAffixMissingFromVocab)
{
    const auto& v = fixtures::bert().vocab();
    try {
        AffixInventory({}, {"esque"}, v);
        FAIL() << "expected validation_error";
    } catch (const validation_error& e) {
        EXPECT_NE(std::string(e.what()).find("esque"), std::string::npos);
    }
}

TEST(AffixInventory, RejectsNonAlphabetic)
{
    const auto& v = fixtures::bert().vocab();
    EXPECT_THROW(AffixInventory({"co-"}, {}, v), format_error);
}

TEST(AffixInventory, EmptyPrefixFileGivesEmptySet)
{
    fixtures::TempDir dir("affix");
    write_lines(dir / "p.txt", {"# nothing here"});
    write_lines(dir / "s.txt", {"ize"});
    const auto inv = load_affix_inventory(dir / "p.txt", dir / "s.txt", fixtures::bert().vocab());
    EXPECT_TRUE(inv.prefixes().empty());
    EXPECT_TRUE(inv.is_suffix("ize"));
}

TEST(AffixInventory, ShippedListsHave46And44)
{
    EXPECT_EQ(fixtures::bert().affixes().prefixes().size(), 46u);
    EXPECT_EQ(fixtures::bert().affixes().suffixes().size(), 44u);
}

TEST(StemSet, FilterExample)
{
    const Vocabulary v({"the", "superb", "##ize", "anti", "bizarre"});
    const AffixInventory a({"anti"}, {"ize"}, v);
    const auto s = build_stem_set(v, a, {"the"});
    EXPECT_EQ(s.stems(), (std::set<std::string>{"superb", "bizarre"}));
}

TEST(StemSet, LengthBoundaryIsStrict)
{
    const Vocabulary v({"run", "runs", "naïve", "abc1", "Test"});
    const AffixInventory a({}, {}, v);
    const auto s = build_stem_set(v, a, {});
    EXPECT_EQ(s.stems(), (std::set<std::string>{"runs"}));
}

TEST(StemSet, BertScale)
{
    const auto n = static_cast<double>(fixtures::bert().stems().size());
    EXPECT_NEAR(n, 20259.0, 0.01 * 20259.0);
}

TEST(StemSet, Invariants)
{
    const auto& r = fixtures::bert();
    for (const auto& s : r.stems().stems()) {
        ASSERT_GT(s.size(), 3u);
        ASSERT_TRUE(is_lower_alpha_word(s));
        ASSERT_TRUE(r.vocab().contains_word_initial(s));
        ASSERT_FALSE(r.stopwords().contains(s));
        ASSERT_FALSE(r.affixes().contains(s));
    }
}

TEST(StemSet, IndependentOfLineOrder)
{
    const Vocabulary a({"alpha", "beta", "gamma", "##ize", "over"});
    const Vocabulary b({"over", "##ize", "gamma", "alpha", "beta"});
    const AffixInventory ia({"over"}, {"ize"}, a), ib({"over"}, {"ize"}, b);
    EXPECT_EQ(build_stem_set(a, ia, {"beta"}).stems(), build_stem_set(b, ib, {"beta"}).stems());
}
