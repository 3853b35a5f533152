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

#include "driftscope/error.h"

namespace driftscope {
namespace {

constexpr std::array<std::string_view, kNumMetrics> kMetricNames = {
    "vocabulary",          "structural",          "semantic",
    "token_js_divergence", "token_cross_entropy", "embedding_cosine_distance",
};

constexpr std::array<std::string_view, 7> kReasonNames = {
    "",       "no-content-tokens", "too-short",    "no-shared-tokens",
    "no-embeddings", "no-subwords", "not-selected",
};

double Clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

double CosineDistance(std::span<const double> a, std::span<const double> b) {
  return Clamp(1.0 - Dot(a, b), 0.0, 2.0);
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view MetricName(Metric metric) {
  return kMetricNames[static_cast<int>(metric)];
}

std::optional<Metric> ParseMetric(std::string_view name) {
  for (int i = 0; i < kNumMetrics; ++i) {
    if (kMetricNames[i] == name) return static_cast<Metric>(i);
  }
  return std::nullopt;
}

std::vector<Metric> ParseMetricList(std::string_view list) {
  std::vector<Metric> out;
  if (Trim(list) == "all") return {kAllMetrics.begin(), kAllMetrics.end()};
  while (true) {
    const auto comma = list.find(',');
    const std::string_view item = Trim(list.substr(0, comma));
    if (!item.empty()) {
      auto metric = ParseMetric(item);
      if (!metric) throw DataError("unknown metric '" + std::string(item) + "'");
      if (std::find(out.begin(), out.end(), *metric) == out.end()) {
        out.push_back(*metric);
      }
    }
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (out.empty()) throw DataError("empty metric selection");
  return out;
}

std::string_view AbsenceReasonName(AbsenceReason reason) {
  return kReasonNames[static_cast<int>(reason)];
}

std::optional<AbsenceReason> ParseAbsenceReason(std::string_view name) {
  for (std::size_t i = 1; i < kReasonNames.size(); ++i) {
    if (kReasonNames[i] == name) return static_cast<AbsenceReason>(i);
  }
  return std::nullopt;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Vector MeanNormed(std::span<const Vector> vectors) {
  if (vectors.empty()) throw DataError("mean of an empty vector set");
  NormedSum sum;
  for (const Vector& v : vectors) {
    try {
      sum.AddNormed(v);
    } catch (const ValidationError& e) {
      throw DataError(std::string("invalid vector: ") + e.what());
    }
  }
  return sum.Mean();
}

double MeanPairwiseCosine(std::span<const Vector> u, std::span<const Vector> v) {
  const Vector mu = MeanNormed(u);
  const Vector mv = MeanNormed(v);
  if (mu.size() != mv.size()) throw DataError("vector sets differ in dimension");
  return Dot(mu, mv);
}

MetricResult VocabularyDrift(const AnnotatedExample& x, const TrainProfile& profile,
                             const ScoringOptions& options) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const AnnotatedToken& tok : x.tokens) {
    if (!tok.is_content) continue;
    sum += ContentUnigramLogProb(profile, tok.surface, options.oov_floor);
    ++n;
  }
  if (n == 0) return MetricResult::Absent(AbsenceReason::kNoContentTokens);
  return MetricResult::Of(-sum / static_cast<double>(n));
}

MetricResult StructuralDrift(const AnnotatedExample& x, const TrainProfile& profile,
                             const ScoringOptions& options) {
  if (x.tokens.size() < 2) return MetricResult::Absent(AbsenceReason::kTooShort);
  PosContext context = kSepContext;
  double sum = 0.0;
  for (const AnnotatedToken& tok : x.tokens) {
    sum += PosNgramLogProb(profile, context, tok.pos, options.add_k);
    context = Advance(context, tok.pos);
  }
  return MetricResult::Of(-sum / static_cast<double>(x.tokens.size()));
}

MetricResult SemanticDrift(const AnnotatedExample& x, const TrainProfile& profile) {
  std::map<std::string_view, NormedSum> local;
  bool any_content = false;
  for (const AnnotatedToken& tok : x.tokens) {
    if (!tok.is_content) continue;
    any_content = true;
    if (tok.embedding) local[tok.surface].AddNormed(*tok.embedding);
  }
  if (!any_content) return MetricResult::Absent(AbsenceReason::kNoContentTokens);
  if (local.empty() || profile.token_embeddings.empty()) {
    return MetricResult::Absent(AbsenceReason::kNoEmbeddings);
  }
  double sum = 0.0;
  std::size_t shared = 0;
  for (const auto& [surface, normed] : local) {
    auto it = profile.token_embeddings.find(surface);
    if (it == profile.token_embeddings.end() || it->second.count == 0) continue;
    if (it->second.sum.size() != normed.sum.size()) {
      throw DataError("token embedding dimension differs from profile");
    }
    sum += CosineDistance(normed.Mean(), it->second.Mean());
    ++shared;
  }
  if (shared == 0) return MetricResult::Absent(AbsenceReason::kNoSharedTokens);
  return MetricResult::Of(sum / static_cast<double>(shared));
}

Distribution Normalize(const std::map<std::string, std::uint64_t, std::less<>>& counts) {
  std::uint64_t total = 0;
  for (const auto& [w, n] : counts) total += n;
  Distribution out;
  if (total == 0) return out;
  for (const auto& [w, n] : counts) {
    out.emplace(w, static_cast<double>(n) / static_cast<double>(total));
  }
  return out;
}

double JensenShannonDivergence(const Distribution& p, const Distribution& q) {
  // Half of KL(p || m) + KL(q || m); zero-probability terms contribute zero.
  auto term = [](double a, double b) {
    return a > 0.0 ? a * std::log2(2.0 * a / (a + b)) : 0.0;
  };
  double sum = 0.0;
  for (const auto& [w, pw] : p) {
    auto it = q.find(w);
    const double qw = it == q.end() ? 0.0 : it->second;
    sum += term(pw, qw) + term(qw, pw);
  }
  for (const auto& [w, qw] : q) {
    if (!p.contains(w)) sum += term(qw, 0.0);
  }
  return Clamp(0.5 * sum, 0.0, 1.0);
}

MetricResult TokenJsDivergence(const AnnotatedExample& x, const TrainProfile& profile) {
  if (!x.subword_tokens || x.subword_tokens->empty() ||
      profile.subword_unigrams.total == 0) {
    return MetricResult::Absent(AbsenceReason::kNoSubwords);
  }
  std::map<std::string_view, std::uint64_t> local;
  for (const std::string& s : *x.subword_tokens) ++local[s];
  const double n = static_cast<double>(x.subword_tokens->size());
  const double total = static_cast<double>(profile.subword_unigrams.total);

  // Training types absent from x each contribute q * log2(2) = q, so the sum
  // only has to visit x's support.
  double sum = 0.0;
  double q_covered = 0.0;
  for (const auto& [w, count] : local) {
    const double pw = static_cast<double>(count) / n;
    const double qw = static_cast<double>(profile.subword_unigrams.Count(w)) / total;
    sum += pw * std::log2(2.0 * pw / (pw + qw));
    if (qw > 0.0) sum += qw * std::log2(2.0 * qw / (pw + qw));
    q_covered += qw;
  }
  sum += std::max(0.0, 1.0 - q_covered);
  return MetricResult::Of(Clamp(0.5 * sum, 0.0, 1.0));
}

MetricResult TokenCrossEntropy(const AnnotatedExample& x, const TrainProfile& profile,
                               const ScoringOptions& options) {
  if (!x.subword_tokens || x.subword_tokens->empty()) {
    return MetricResult::Absent(AbsenceReason::kNoSubwords);
  }
  double sum = 0.0;
  for (const std::string& s : *x.subword_tokens) {
    sum += profile.subword_unigrams.LogProb(s, options.oov_floor);
  }
  return MetricResult::Of(-sum / static_cast<double>(x.subword_tokens->size()));
}

MetricResult EmbeddingCosineDistance(const AnnotatedExample& x,
                                     const TrainProfile& profile) {
  if (!x.example_embedding || profile.corpus_embedding.count == 0) {
    return MetricResult::Absent(AbsenceReason::kNoEmbeddings);
  }
  const Vector& e = *x.example_embedding;
  if (e.size() != profile.corpus_embedding.sum.size()) {
    throw DataError("example embedding dimension differs from profile");
  }
  const double norm = std::sqrt(Dot(e, e));
  Vector unit(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) unit[i] = e[i] / norm;
  return MetricResult::Of(CosineDistance(unit, profile.corpus_embedding.Mean()));
}

DriftVector ScoreExample(const AnnotatedExample& x, const TrainProfile& profile,
                         std::span<const Metric> selection,
                         const ScoringOptions& options) {
  DriftVector out;
  out.id = x.id;
  out.results.fill(MetricResult::Absent(AbsenceReason::kNotSelected));
  for (Metric m : selection) {
    switch (m) {
      case Metric::kVocabulary:
        out[m] = VocabularyDrift(x, profile, options);
        break;
      case Metric::kStructural:
        out[m] = StructuralDrift(x, profile, options);
        break;
      case Metric::kSemantic:
        out[m] = SemanticDrift(x, profile);
        break;
      case Metric::kTokenJsDivergence:
        out[m] = TokenJsDivergence(x, profile);
        break;
      case Metric::kTokenCrossEntropy:
        out[m] = TokenCrossEntropy(x, profile, options);
        break;
      case Metric::kEmbeddingCosineDistance:
        out[m] = EmbeddingCosineDistance(x, profile);
        break;
    }
  }
  return out;
}

}  // namespace driftscope
