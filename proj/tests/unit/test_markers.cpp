#include <gtest/gtest.h>

#include <fstream>

#include "causalx/error.hpp"
#include "causalx/markers.hpp"
#include "synthetic.hpp"

using namespace causalx;
using causalx::testing::chain_sentence;

namespace {

Sentence words(const std::string& id, std::vector<std::string> w) {
  return chain_sentence(id, w, std::string(w.size(), 'O'));
}

}  // namespace

TEST(Explicitness, PaperExplicitExample) {
  const Sentence s = words("a", {"Insomnia", "is", "often", "caused", "by", "fear"});
  EXPECT_TRUE(classify_explicitness(s, MarkerLexicon::defaults()));
}

TEST(Explicitness, PaperImplicitExample) {
  const Sentence s = words("a", {"The", "clock", "struck", "twelve", "with", "a", "loud", "chime",
                                 "that", "made", "me", "jump", "."});
  EXPECT_FALSE(classify_explicitness(s, MarkerLexicon::defaults()));
}

TEST(Explicitness, NoOverlap) {
  EXPECT_FALSE(classify_explicitness(words("a", {"red", "green", "blue"}),
                                     MarkerLexicon::defaults()));
}

TEST(Explicitness, MultiWordMarkerMustBeContiguous) {
  const MarkerLexicon lex({"leads to"});
  EXPECT_TRUE(classify_explicitness(words("a", {"rain", "leads", "to", "floods"}), lex));
  EXPECT_FALSE(classify_explicitness(words("b", {"rain", "leads", "often", "to", "floods"}), lex));
}

TEST(Explicitness, CaseInsensitive) {
  const MarkerLexicon lex = MarkerLexicon::defaults();
  const Sentence lower = words("a", {"smoke", "leads", "to", "fire"});
  const Sentence upper = words("b", {"SMOKE", "Leads", "TO", "Fire"});
  EXPECT_EQ(classify_explicitness(lower, lex), classify_explicitness(upper, lex));
  EXPECT_TRUE(classify_explicitness(upper, lex));
}

TEST(Explicitness, CauseFamily) {
  const MarkerLexicon lex({"cause"});
  for (const char* w : {"cause", "causes", "caused", "causing", "CAUSED"}) {
    EXPECT_TRUE(classify_explicitness(words("a", {"x", w, "y"}), lex)) << w;
  }
  EXPECT_FALSE(classify_explicitness(words("a", {"x", "because", "y"}), lex));
  EXPECT_TRUE(is_cause_variant("causing"));
  EXPECT_FALSE(is_cause_variant("causeway"));
}

TEST(Explicitness, FlagOverridesLexicon) {
  Sentence s = words("a", {"red", "green"});
  s.explicit_flag = true;
  EXPECT_TRUE(is_explicit(s, MarkerLexicon::defaults()));
  EXPECT_FALSE(classify_explicitness(s, MarkerLexicon::defaults()));
}

TEST(Lexicon, EmptyIsAnError) {
  EXPECT_THROW(MarkerLexicon(std::vector<std::string>{}), ValidationError);
  EXPECT_THROW(MarkerLexicon::parse("# only a comment\n\n"), ValidationError);
}

TEST(Lexicon, ShippedFileMatchesBuiltIn) {
  const auto file = MarkerLexicon::load(std::string(CAUSALX_DATA_DIR) + "/markers.txt");
  EXPECT_EQ(file.pattern_strings(), MarkerLexicon::defaults().pattern_strings());
  const auto p = file.pattern_strings();
  for (const char* m : {"cause", "leads to", "due to", "because of", "as a result of",
                        "associated with", "triggered"}) {
    EXPECT_NE(std::find(p.begin(), p.end(), m), p.end()) << m;
  }
}

TEST(Subsample, SampleEqualsQualifyingSet) {
  const Corpus c("c", {words("a", {"x", "caused", "y"}), words("b", {"p", "q"}),
                       words("c", {"fire", "caused", "smoke"}), words("d", {"r", "s"})});
  const Corpus out = subsample_by_marker(c, {"caused"}, {}, 2, 3);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].id, "a");
  EXPECT_EQ(out[1].id, "c");
}

TEST(Subsample, ForbiddenCauseVariantExcludes) {
  const Corpus c("c", {words("a", {"smoking", "causes", "cancer"}),
                       words("b", {"smoking", "leads", "to", "cancer"})});
  const Corpus out = subsample_by_marker(c, {"leads to"}, {"cause"}, 1, 0);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].id, "b");
  const Corpus both("c", {words("a", {"smoking", "causes", "cancer", "and", "leads", "to", "x"})});
  EXPECT_THROW(subsample_by_marker(both, {"leads to"}, {"cause"}, 1, 0), ValidationError);
}

TEST(Subsample, TooFewQualifiersReportsCount) {
  const Corpus c("c", {words("a", {"x", "caused", "y"}), words("b", {"p", "caused"}),
                       words("c", {"q"})});
  try {
    subsample_by_marker(c, {"caused"}, {}, 3, 0);
    FAIL() << "expected an error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find('2'), std::string::npos) << e.what();
  }
}

TEST(Subsample, OverlappingMarkerSetsRejected) {
  const Corpus c("c", {words("a", {"x", "caused", "y"})});
  EXPECT_THROW(subsample_by_marker(c, {"caused"}, {"cause"}, 1, 0), ValidationError);
}

TEST(Subsample, OutputIsSubsetSatisfyingPredicatesAndDeterministic) {
  Rng rng(3);
  std::vector<Sentence> s;
  const std::vector<std::string> vocab = {"cause", "leads", "to", "due", "fire", "causing", "x"};
  for (int i = 0; i < 200; ++i) {
    std::vector<std::string> w;
    for (int k = 0; k < 5; ++k) w.push_back(vocab[rng.uniform_index(vocab.size())]);
    s.push_back(words("s" + std::to_string(i), w));
  }
  const Corpus c("c", s);
  const MarkerLexicon req({"leads to", "due to"});
  const MarkerLexicon forb({"cause"});
  const Corpus a = subsample_by_marker(c, {"leads to", "due to"}, {"cause"}, 5, 9);
  const Corpus b = subsample_by_marker(c, {"leads to", "due to"}, {"cause"}, 5, 9);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.size(), 5u);
  for (const auto& x : a) {
    EXPECT_TRUE(req.matches(x));
    EXPECT_FALSE(forb.matches(x));
    EXPECT_NE(std::find(s.begin(), s.end(), x), s.end());
  }
}
