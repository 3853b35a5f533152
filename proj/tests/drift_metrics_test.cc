// Copyright 2026 The Driftscope Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "driftscope/drift_metrics.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "driftscope/error.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace driftscope {
namespace {

using testing::ContentExample;
using testing::TagExample;

TrainProfile Profile(std::vector<AnnotatedExample> corpus, std::size_t dim = 0) {
  return BuildProfile(corpus, dim);
}

AnnotatedExample WithSubwords(AnnotatedExample ex, std::vector<std::string> sub) {
  ex.subword_tokens = std::move(sub);
  return ex;
}

TEST(VocabularyDrift, Fixtures) {
  const TrainProfile dog4 = Profile({ContentExample("t", {"dog", "dog", "dog", "dog"})});
  EXPECT_EQ(*VocabularyDrift(ContentExample("x", {"dog"}), dog4).value, 0.0);

  const TrainProfile p = Profile({ContentExample("t", {"dog", "dog", "dog", "cat"})});
  EXPECT_NEAR(*VocabularyDrift(ContentExample("x", {"dog", "cat"}), p).value, 0.836988, 1e-6);
  EXPECT_NEAR(*VocabularyDrift(ContentExample("x", {"dog", "cat"}), p).value,
              -(std::log(0.75) + std::log(0.25)) / 2, 1e-15);
  EXPECT_NEAR(*VocabularyDrift(ContentExample("x", {"zebra"}), p).value, 23.025851, 1e-6);
}

TEST(VocabularyDrift, NoContentTokens) {
  const TrainProfile p = Profile({ContentExample("t", {"dog"})});
  const auto r = VocabularyDrift(testing::MakeExample("x", {{"the", "DET", false}}), p);
  EXPECT_FALSE(r.present());
  EXPECT_EQ(r.reason, AbsenceReason::kNoContentTokens);
}

TEST(VocabularyDrift, CustomFloor) {
  const TrainProfile p = Profile({ContentExample("t", {"dog"})});
  ScoringOptions options;
  options.oov_floor = 1e-3;
  EXPECT_NEAR(*VocabularyDrift(ContentExample("x", {"emu"}), p, options).value,
              -std::log(1e-3), 1e-12);
}

// Self-scoring a single-example profile yields the entropy of the example's
// own content distribution: ln n for n distinct types, 0 for one type.
TEST(VocabularyDrift, SelfScore) {
  const AnnotatedExample one = ContentExample("t", {"dog", "dog"});
  EXPECT_EQ(*VocabularyDrift(one, Profile({one})).value, 0.0);
  const AnnotatedExample three = ContentExample("t", {"dog", "cat", "emu"});
  EXPECT_NEAR(*VocabularyDrift(three, Profile({three})).value, std::log(3.0), 1e-15);
}

TEST(StructuralDrift, Fixtures) {
  const std::vector<PosTag> seq = {PosTag::kDet, PosTag::kNoun, PosTag::kVerb};
  const TrainProfile p = Profile({TagExample("t", seq)});
  EXPECT_NEAR(*StructuralDrift(TagExample("x", seq), p).value, 0.934309, 1e-6);
  EXPECT_NEAR(*StructuralDrift(TagExample("x", seq), p).value, -std::log(1.1 / 2.8), 1e-15);

  // A profile without 5-grams leaves every context unseen: uniform 1/18.
  const TrainProfile empty_pos = Profile({ContentExample("t", {"solo"})});
  EXPECT_NEAR(*StructuralDrift(TagExample("x", {PosTag::kAdj, PosTag::kAdv, PosTag::kAdj}),
                               empty_pos)
                   .value,
              std::log(18.0), 1e-12);
}

TEST(StructuralDrift, TooShort) {
  const TrainProfile p = Profile({TagExample("t", {PosTag::kDet, PosTag::kNoun})});
  const auto r = StructuralDrift(ContentExample("x", {"dog"}), p);
  EXPECT_FALSE(r.present());
  EXPECT_EQ(r.reason, AbsenceReason::kTooShort);
}

TEST(StructuralDrift, OrderSensitive) {
  const TrainProfile p = Profile({TagExample("t", {PosTag::kDet, PosTag::kNoun, PosTag::kVerb})});
  const double forward =
      *StructuralDrift(TagExample("x", {PosTag::kDet, PosTag::kNoun, PosTag::kVerb}), p).value;
  const double reversed =
      *StructuralDrift(TagExample("x", {PosTag::kVerb, PosTag::kNoun, PosTag::kDet}), p).value;
  EXPECT_LT(forward, reversed);
}

AnnotatedExample EmbeddedExample(const std::string& id,
                                 const std::vector<std::pair<std::string, Vector>>& toks) {
  AnnotatedExample ex;
  ex.id = id;
  for (const auto& [w, v] : toks) {
    AnnotatedToken tok;
    tok.surface = w;
    tok.pos = PosTag::kNoun;
    tok.is_content = true;
    tok.embedding = v;
    ex.tokens.push_back(tok);
  }
  return ex;
}

TEST(SemanticDrift, Fixtures) {
  const TrainProfile p =
      Profile({EmbeddedExample("t", {{"dog", {0, 1}}, {"dog", {1, 0}}})}, 2);
  EXPECT_NEAR(*SemanticDrift(EmbeddedExample("x", {{"dog", {1, 0}}}), p).value, 0.5, 1e-12);

  const TrainProfile same = Profile({EmbeddedExample("t", {{"dog", {2, 0}}, {"cat", {0, 3}}})}, 2);
  EXPECT_NEAR(*SemanticDrift(EmbeddedExample("x", {{"dog", {1, 0}}, {"cat", {0, 1}}}), same).value,
              0.0, 1e-15);

  const auto none = SemanticDrift(EmbeddedExample("x", {{"emu", {1, 0}}}), p);
  EXPECT_EQ(none.reason, AbsenceReason::kNoSharedTokens);
}

TEST(SemanticDrift, MissingEmbeddings) {
  const TrainProfile p = Profile({EmbeddedExample("t", {{"dog", {0, 1}}})}, 2);
  EXPECT_EQ(SemanticDrift(ContentExample("x", {"dog"}), p).reason,
            AbsenceReason::kNoEmbeddings);
  const TrainProfile no_emb = Profile({ContentExample("t", {"dog"})});
  EXPECT_EQ(SemanticDrift(EmbeddedExample("x", {{"dog", {1, 0}}}), no_emb).reason,
            AbsenceReason::kNoEmbeddings);
}

TEST(SemanticDrift, IgnoresNonContentTokens) {
  const TrainProfile p = Profile({EmbeddedExample("t", {{"dog", {1, 0}}})}, 2);
  AnnotatedExample x = EmbeddedExample("x", {{"dog", {1, 0}}, {"the", {0, 1}}});
  x.tokens[1].is_content = false;
  EXPECT_NEAR(*SemanticDrift(x, p).value, 0.0, 1e-15);
}

TEST(TokenJsDivergence, Fixtures) {
  const TrainProfile ab = Profile({WithSubwords(ContentExample("t", {"x"}), {"a", "b"})});
  EXPECT_NEAR(*TokenJsDivergence(WithSubwords(ContentExample("x", {"x"}), {"a", "b"}), ab).value,
              0.0, 1e-15);
  EXPECT_NEAR(*TokenJsDivergence(WithSubwords(ContentExample("x", {"x"}), {"c", "d"}), ab).value,
              1.0, 1e-15);
  EXPECT_NEAR(*TokenJsDivergence(WithSubwords(ContentExample("x", {"x"}), {"a"}), ab).value,
              0.311278, 1e-6);
}

TEST(TokenJsDivergence, MatchesGenericFormula) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> train_sub, x_sub;
    for (int i = 0; i < 40; ++i) train_sub.push_back("s" + std::to_string(rng() % 15));
    for (int i = 0; i < 1 + static_cast<int>(rng() % 10); ++i) {
      x_sub.push_back("s" + std::to_string(rng() % 20));
    }
    const TrainProfile p = Profile({WithSubwords(ContentExample("t", {"x"}), train_sub)});
    std::map<std::string, std::uint64_t, std::less<>> counts;
    for (const auto& s : x_sub) ++counts[s];
    const double generic =
        JensenShannonDivergence(Normalize(counts), Normalize(p.subword_unigrams.counts));
    const double fast = *TokenJsDivergence(WithSubwords(ContentExample("x", {"x"}), x_sub), p).value;
    EXPECT_NEAR(fast, generic, 1e-12);
    EXPECT_GE(fast, 0.0);
    EXPECT_LE(fast, 1.0);
  }
}

TEST(TokenJsDivergence, NoSubwords) {
  const TrainProfile p = Profile({WithSubwords(ContentExample("t", {"x"}), {"a"})});
  EXPECT_EQ(TokenJsDivergence(ContentExample("x", {"x"}), p).reason, AbsenceReason::kNoSubwords);
  EXPECT_EQ(TokenJsDivergence(WithSubwords(ContentExample("x", {"x"}), {}), p).reason,
            AbsenceReason::kNoSubwords);
}

TEST(TokenCrossEntropy, Fixtures) {
  std::vector<std::string> sub(9, "the");
  sub.push_back("dog");
  const TrainProfile p = Profile({WithSubwords(ContentExample("t", {"x"}), sub)});
  EXPECT_NEAR(*TokenCrossEntropy(WithSubwords(ContentExample("x", {"x"}), {"the"}), p).value,
              0.105361, 1e-6);
  EXPECT_NEAR(*TokenCrossEntropy(WithSubwords(ContentExample("x", {"x"}), {"unseen"}), p).value,
              23.025851, 1e-6);
  const TrainProfile a = Profile({WithSubwords(ContentExample("t", {"x"}), {"a"})});
  EXPECT_EQ(*TokenCrossEntropy(WithSubwords(ContentExample("x", {"x"}), {"a"}), a).value, 0.0);
}

TEST(TokenCrossEntropy, EqualsVocabularyDriftWhenSubwordsAreContentWords) {
  std::mt19937_64 rng(43);
  const std::vector<std::string> vocab = {"dog", "cat", "emu", "owl", "yak"};
  auto make = [&](const std::string& id) {
    std::vector<std::string> words;
    for (int i = 0; i < 1 + static_cast<int>(rng() % 6); ++i) words.push_back(vocab[rng() % 5]);
    return WithSubwords(ContentExample(id, words), words);
  };
  std::vector<AnnotatedExample> train;
  for (int i = 0; i < 30; ++i) train.push_back(make("t" + std::to_string(i)));
  const TrainProfile p = Profile(train);
  for (int i = 0; i < 30; ++i) {
    const AnnotatedExample x = make("x" + std::to_string(i));
    EXPECT_EQ(*TokenCrossEntropy(x, p).value, *VocabularyDrift(x, p).value);
  }
}

TEST(EmbeddingCosineDistance, Fixtures) {
  auto with_emb = [](const std::string& id, Vector v) {
    AnnotatedExample ex = ContentExample(id, {"w"});
    ex.example_embedding = std::move(v);
    return ex;
  };
  const TrainProfile same = Profile({with_emb("a", {2, 0}), with_emb("b", {5, 0})}, 2);
  EXPECT_NEAR(*EmbeddingCosineDistance(with_emb("x", {1, 0}), same).value, 0.0, 1e-15);
  const TrainProfile ortho = Profile({with_emb("a", {0, 1})}, 2);
  EXPECT_NEAR(*EmbeddingCosineDistance(with_emb("x", {1, 0}), ortho).value, 1.0, 1e-15);
  const TrainProfile mixed = Profile({with_emb("a", {1, 0}), with_emb("b", {0, 1})}, 2);
  EXPECT_NEAR(*EmbeddingCosineDistance(with_emb("x", {1, 0}), mixed).value, 0.5, 1e-15);
  EXPECT_EQ(EmbeddingCosineDistance(ContentExample("x", {"w"}), mixed).reason,
            AbsenceReason::kNoEmbeddings);
}

TEST(MeanPairwiseCosine, Fixtures) {
  const std::vector<Vector> u = {{3, 4}};
  EXPECT_NEAR(MeanPairwiseCosine(u, u), 1.0, 1e-15);
  EXPECT_NEAR(MeanPairwiseCosine(std::vector<Vector>{{1, 0}, {0, 1}}, std::vector<Vector>{{1, 0}}),
              0.5, 1e-15);
}

TEST(MeanPairwiseCosine, MatchesBruteForce) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = 1 + rng() % 16;
    std::vector<Vector> u(1 + rng() % 50), v(1 + rng() % 50);
    for (Vector& x : u) x = testing::RandomVector(rng, dim);
    for (Vector& x : v) x = testing::RandomVector(rng, dim);
    EXPECT_NEAR(MeanPairwiseCosine(u, v), testing::BruteMeanPairwiseCosine(u, v), 1e-10);
  }
}

TEST(MeanPairwiseCosine, Errors) {
  EXPECT_THROW(MeanPairwiseCosine(std::vector<Vector>{}, std::vector<Vector>{{1}}), DataError);
  EXPECT_THROW(MeanPairwiseCosine(std::vector<Vector>{{0, 0}}, std::vector<Vector>{{1, 0}}),
               DataError);
  EXPECT_THROW(MeanPairwiseCosine(std::vector<Vector>{{1, 0}}, std::vector<Vector>{{1, 0, 0}}),
               DataError);
}

TEST(JensenShannonDivergence, SymmetricOnRandomDistributions) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Distribution p, q;
    double sp = 0.0, sq = 0.0;
    for (int i = 0; i < 12; ++i) {
      if (rng() % 3) sp += p["k" + std::to_string(i)] = unit(rng);
      if (rng() % 3) sq += q["k" + std::to_string(i)] = unit(rng);
    }
    if (p.empty() || q.empty()) continue;
    for (auto& [k, v] : p) v /= sp;
    for (auto& [k, v] : q) v /= sq;
    EXPECT_NEAR(JensenShannonDivergence(p, q), JensenShannonDivergence(q, p), 1e-12);
  }
}

TEST(ScoreExample, FullFeatureExampleHasAllSix) {
  AnnotatedExample t = EmbeddedExample("t", {{"dog", {1, 0}}, {"ran", {0, 1}}});
  t.subword_tokens = std::vector<std::string>{"Ġdog", "Ġran"};
  t.example_embedding = Vector{1, 1};
  const TrainProfile p = Profile({t}, 2);
  AnnotatedExample x = t;
  x.id = "x";
  const DriftVector d = ScoreExample(x, p);
  EXPECT_EQ(d.id, "x");
  for (Metric m : kAllMetrics) EXPECT_TRUE(d[m].present()) << MetricName(m);
}

TEST(ScoreExample, WithoutEmbeddings) {
  AnnotatedExample t = EmbeddedExample("t", {{"dog", {1, 0}}, {"ran", {0, 1}}});
  t.subword_tokens = std::vector<std::string>{"Ġdog", "Ġran"};
  t.example_embedding = Vector{1, 1};
  const TrainProfile p = Profile({t}, 2);
  AnnotatedExample x = WithSubwords(ContentExample("x", {"dog", "ran"}), {"Ġdog"});
  const DriftVector d = ScoreExample(x, p);
  EXPECT_EQ(d[Metric::kSemantic].reason, AbsenceReason::kNoEmbeddings);
  EXPECT_EQ(d[Metric::kEmbeddingCosineDistance].reason, AbsenceReason::kNoEmbeddings);
  EXPECT_TRUE(d[Metric::kVocabulary].present());
  EXPECT_TRUE(d[Metric::kStructural].present());
  EXPECT_TRUE(d[Metric::kTokenJsDivergence].present());
  EXPECT_TRUE(d[Metric::kTokenCrossEntropy].present());
}

TEST(ScoreExample, OneTokenExample) {
  const TrainProfile p = Profile({ContentExample("t", {"dog", "dog", "dog", "cat"})});
  const DriftVector d = ScoreExample(ContentExample("x", {"dog"}), p);
  EXPECT_EQ(d[Metric::kStructural].reason, AbsenceReason::kTooShort);
  EXPECT_NEAR(*d[Metric::kVocabulary].value, -std::log(0.75), 1e-15);
}

TEST(ScoreExample, SelectionLeavesOthersUnselected) {
  const TrainProfile p = Profile({ContentExample("t", {"dog", "cat"})});
  const std::vector<Metric> sel = ParseMetricList("vocabulary,structural");
  const DriftVector d = ScoreExample(ContentExample("x", {"dog", "cat"}), p, sel);
  EXPECT_TRUE(d[Metric::kVocabulary].present());
  EXPECT_TRUE(d[Metric::kStructural].present());
  EXPECT_EQ(d[Metric::kSemantic].reason, AbsenceReason::kNotSelected);
  EXPECT_EQ(d[Metric::kTokenJsDivergence].reason, AbsenceReason::kNotSelected);
}

TEST(ParseMetricList, Names) {
  EXPECT_EQ(ParseMetricList("all").size(), 6u);
  EXPECT_EQ(ParseMetricList(" semantic , vocabulary ,semantic"),
            (std::vector<Metric>{Metric::kSemantic, Metric::kVocabulary}));
  try {
    ParseMetricList("vocabulary,bogus");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
}

// Permutation invariance for the bag-of-tokens metrics, plus ranges.
TEST(DriftMetrics, PermutationInvarianceAndRanges) {
  std::mt19937_64 rng(59);
  const std::vector<std::string> vocab = {"dog", "cat", "emu", "owl", "yak", "ant"};
  auto make = [&](const std::string& id) {
    AnnotatedExample ex;
    ex.id = id;
    std::vector<std::string> sub;
    for (int i = 0; i < 2 + static_cast<int>(rng() % 6); ++i) {
      AnnotatedToken tok;
      tok.surface = vocab[rng() % vocab.size()];
      tok.pos = static_cast<PosTag>(1 + rng() % kNumUposTags);
      tok.is_content = rng() % 4 != 0;
      tok.embedding = testing::RandomVector(rng, 3);
      sub.push_back(tok.surface);
      ex.tokens.push_back(tok);
    }
    ex.subword_tokens = sub;
    ex.example_embedding = testing::RandomVector(rng, 3);
    return ex;
  };
  std::vector<AnnotatedExample> train;
  for (int i = 0; i < 40; ++i) train.push_back(make("t" + std::to_string(i)));
  const TrainProfile p = Profile(train, 3);
  for (int i = 0; i < 100; ++i) {
    AnnotatedExample x = make("x");
    AnnotatedExample shuffled = x;
    std::shuffle(shuffled.tokens.begin(), shuffled.tokens.end(), rng);
    std::shuffle(shuffled.subword_tokens->begin(), shuffled.subword_tokens->end(), rng);
    const DriftVector a = ScoreExample(x, p);
    const DriftVector b = ScoreExample(shuffled, p);
    for (Metric m : {Metric::kVocabulary, Metric::kSemantic, Metric::kTokenJsDivergence,
                     Metric::kTokenCrossEntropy}) {
      ASSERT_EQ(a[m].present(), b[m].present());
      if (a[m].present()) {
        EXPECT_NEAR(*a[m].value, *b[m].value, 1e-12) << MetricName(m);
      }
    }
    const double cap = -std::log(kDefaultOovFloor);
    for (Metric m : {Metric::kVocabulary, Metric::kStructural, Metric::kTokenCrossEntropy}) {
      if (!a[m].present()) continue;
      EXPECT_GE(*a[m].value, 0.0);
      EXPECT_LE(*a[m].value, cap + 1e-9);
    }
    for (Metric m : {Metric::kSemantic, Metric::kEmbeddingCosineDistance}) {
      if (!a[m].present()) continue;
      EXPECT_GE(*a[m].value, 0.0);
      EXPECT_LE(*a[m].value, 2.0);
    }
    if (a[Metric::kTokenJsDivergence].present()) {
      EXPECT_GE(*a[Metric::kTokenJsDivergence].value, 0.0);
      EXPECT_LE(*a[Metric::kTokenJsDivergence].value, 1.0);
    }
  }
}

}  // namespace
}  // namespace driftscope
