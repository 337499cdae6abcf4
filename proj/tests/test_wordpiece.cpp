#include <gtest/gtest.h>

#include "support/fixtures.hpp"

using namespace morphseg;

namespace {

std::string wp(std::string_view word) { return join(segment_wordpiece(word, fixtures::bert().vocab()).tokens, " "); }

}  // namespace

TEST(WordPiece, WordsFromTheLiterature)
{
    EXPECT_EQ(wp("finalize"), "final ##ize");
    EXPECT_EQ(wp("mobilize"), "mob ##ili ##ze");
    EXPECT_EQ(wp("tribalize"), "tribal ##ize");
    EXPECT_EQ(wp("templatize"), "te ##mp ##lat ##ize");
    EXPECT_EQ(wp("stabilize"), "stabilize");
    EXPECT_EQ(wp("superbizarre"), "superb ##iza ##rre");
}

TEST(WordPiece, QualitativeExamples)
{
    EXPECT_EQ(wp("applausive"), "app ##laus ##ive");
    EXPECT_EQ(wp("superannoying"), "super ##ann ##oy ##ing");
    EXPECT_EQ(wp("overseasoned"), "overseas ##oned");
    EXPECT_EQ(wp("isotopize"), "iso ##top ##ize");
    EXPECT_EQ(wp("antimicrosoft"), "anti ##mic ##ros ##oft");
    EXPECT_EQ(wp("inkinetic"), "ink ##ine ##tic");
    EXPECT_EQ(wp("prematuration"), "prem ##at ##uration");
    EXPECT_EQ(wp("nonmultiplayer"), "non ##mu ##lt ##ip ##layer");
    EXPECT_EQ(wp("promosque"), "promo ##sque");
}

TEST(WordPiece, EmptyWordIsArgumentError)
{
    EXPECT_THROW(segment_wordpiece("", fixtures::bert().vocab()), argument_error);
}

TEST(WordPiece, TooLongIsUnknown)
{
    const auto r = segment_wordpiece(std::string(101, 'a'), fixtures::bert().vocab());
    EXPECT_TRUE(r.is_unknown);
    EXPECT_EQ(r.tokens, std::vector<std::string>{"[UNK]"});
    EXPECT_FALSE(segment_wordpiece("abc", fixtures::bert().vocab(), 3).is_unknown);
    EXPECT_TRUE(segment_wordpiece("abcd", fixtures::bert().vocab(), 3).is_unknown);
}

TEST(WordPiece, UnmatchablePositionIsUnknown)
{
    const Vocabulary v({"[UNK]", "ab", "##c"});
    EXPECT_EQ(segment_wordpiece("abc", v).tokens, (std::vector<std::string>{"ab", "##c"}));
    EXPECT_TRUE(segment_wordpiece("abd", v).is_unknown);
    EXPECT_TRUE(segment_wordpiece("c", v).is_unknown);
}

TEST(WordPiece, RoundTripAndMembership)
{
    const auto& v = fixtures::bert().vocab();
    Rng rng(11);
    std::vector<std::string> stems(fixtures::bert().stems().stems().begin(), fixtures::bert().stems().stems().end());
    for (int i = 0; i < 2000; ++i) {
        const std::string word = stems[uniform_below(rng, stems.size())] + stems[uniform_below(rng, stems.size())];
        const auto seg = segment_wordpiece(word, v);
        if (seg.is_unknown) continue;
        std::string joined;
        for (std::size_t k = 0; k < seg.tokens.size(); ++k) {
            ASSERT_TRUE(v.contains(seg.tokens[k]));
            ASSERT_EQ(Vocabulary::is_continuation(seg.tokens[k]), k > 0);
            joined += Vocabulary::piece_of(seg.tokens[k]);
        }
        ASSERT_EQ(joined, word);
    }
}

// The first token must be the longest word-initial entry that starts the word,
// found here by scanning the whole vocabulary.
TEST(WordPiece, FirstTokenIsLongestWordInitialPrefix)
{
    const auto& v = fixtures::bert().vocab();
    for (const std::string word : {"superbizarre", "overseasoned", "unlockable", "antimicrosoft", "promosque",
                                   "inkinetic", "nonmultiplayer", "prematuration", "hyperactive"}) {
        std::string best;
        for (const auto& t : v.tokens()) {
            if (!Vocabulary::is_continuation(t) && word.starts_with(t) && t.size() > best.size()) best = t;
        }
        EXPECT_EQ(segment_wordpiece(word, v).tokens.front(), best) << word;
    }
}
