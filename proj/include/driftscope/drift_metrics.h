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

// Per-example drift metrics against a TrainProfile.
//
// Every metric is oriented so that larger means more drift:
//
//   vocabulary     mean -ln P_train(w) over the example's content tokens
//   structural     mean -ln P_train(tag_i | 4 previous tags), [SEP]-padded
//   semantic       mean over shared content types of 1 - <mean normed
//                  embedding in x, mean normed embedding in train>
//   token_js_divergence        base-2 JS divergence of subword distributions
//   token_cross_entropy        mean -ln P_train(s) over subwords
//   embedding_cosine_distance  1 - <x / |x|, mean normed train embedding>
//
// A metric that cannot be computed for an example is absent and carries an
// AbsenceReason instead of a value.

#ifndef DRIFTSCOPE_DRIFT_METRICS_H_
#define DRIFTSCOPE_DRIFT_METRICS_H_

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "driftscope/annotation.h"
#include "driftscope/profile.h"

namespace driftscope {

enum class Metric {
  kVocabulary = 0,
  kStructural,
  kSemantic,
  kTokenJsDivergence,
  kTokenCrossEntropy,
  kEmbeddingCosineDistance,
};

inline constexpr int kNumMetrics = 6;
inline constexpr std::array<Metric, kNumMetrics> kAllMetrics = {
    Metric::kVocabulary,        Metric::kStructural,
    Metric::kSemantic,          Metric::kTokenJsDivergence,
    Metric::kTokenCrossEntropy, Metric::kEmbeddingCosineDistance,
};

std::string_view MetricName(Metric metric);
std::optional<Metric> ParseMetric(std::string_view name);
// Comma-separated names, e.g. "vocabulary,structural". "all" selects every
// metric. Throws DataError naming the first unknown metric.
std::vector<Metric> ParseMetricList(std::string_view list);

enum class AbsenceReason {
  kNone = 0,
  kNoContentTokens,
  kTooShort,
  kNoSharedTokens,
  kNoEmbeddings,
  kNoSubwords,
  kNotSelected,
};

std::string_view AbsenceReasonName(AbsenceReason reason);
std::optional<AbsenceReason> ParseAbsenceReason(std::string_view name);

struct MetricResult {
  std::optional<double> value;
  AbsenceReason reason = AbsenceReason::kNone;

  static MetricResult Of(double v) { return {v, AbsenceReason::kNone}; }
  static MetricResult Absent(AbsenceReason r) { return {std::nullopt, r}; }
  bool present() const { return value.has_value(); }

  bool operator==(const MetricResult&) const = default;
};

struct DriftVector {
  std::string id;
  std::array<MetricResult, kNumMetrics> results{};

  MetricResult& operator[](Metric m) { return results[static_cast<int>(m)]; }
  const MetricResult& operator[](Metric m) const {
    return results[static_cast<int>(m)];
  }

  bool operator==(const DriftVector&) const = default;
};

struct ScoringOptions {
  double oov_floor = kDefaultOovFloor;
  double add_k = kDefaultAddK;
};

MetricResult VocabularyDrift(const AnnotatedExample& x, const TrainProfile& profile,
                             const ScoringOptions& options = {});
MetricResult StructuralDrift(const AnnotatedExample& x, const TrainProfile& profile,
                             const ScoringOptions& options = {});
MetricResult SemanticDrift(const AnnotatedExample& x, const TrainProfile& profile);
MetricResult TokenJsDivergence(const AnnotatedExample& x, const TrainProfile& profile);
MetricResult TokenCrossEntropy(const AnnotatedExample& x, const TrainProfile& profile,
                               const ScoringOptions& options = {});
MetricResult EmbeddingCosineDistance(const AnnotatedExample& x,
                                     const TrainProfile& profile);

// Mean of u / |u| over `vectors`. Throws DataError on an empty set, a zero
// or non-finite vector, or mixed dimensions.
Vector MeanNormed(std::span<const Vector> vectors);

// Mean over all pairs (u, v) of cos(u, v), computed as the dot product of the
// two mean-normed vectors. Same preconditions as MeanNormed.
double MeanPairwiseCosine(std::span<const Vector> u, std::span<const Vector> v);

double Dot(std::span<const double> a, std::span<const double> b);

// Probability distribution over strings.
using Distribution = std::map<std::string, double, std::less<>>;

Distribution Normalize(const std::map<std::string, std::uint64_t, std::less<>>& counts);

// Base-2 Jensen-Shannon divergence, in [0, 1].
double JensenShannonDivergence(const Distribution& p, const Distribution& q);

// Computes the selected metrics; the rest are absent(kNotSelected).
DriftVector ScoreExample(const AnnotatedExample& x, const TrainProfile& profile,
                         std::span<const Metric> selection = kAllMetrics,
                         const ScoringOptions& options = {});

}  // namespace driftscope

#endif  // DRIFTSCOPE_DRIFT_METRICS_H_
