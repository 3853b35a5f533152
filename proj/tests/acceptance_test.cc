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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "driftscope/cli.h"
#include "driftscope/drift_metrics.h"
#include "driftscope/evaluation.h"
#include "driftscope/predictor.h"
#include "driftscope/profile.h"
#include "synthetic.h"
#include "test_util.h"

namespace driftscope {
namespace {

using testing::BruteCosine;
using testing::BruteMeanPairwiseCosine;
using testing::ContentExample;
using testing::RandomVector;
using testing::TagExample;

// Accumulates failures for one criterion.
class Check {
 public:
  void Near(const char* what, double got, double want, double tol) {
    if (!(std::abs(got - want) <= tol)) {
      Fail(what, got, want);
    }
  }
  void True(const char* what, bool ok) {
    if (!ok && failures_++ == 0) first_ = what;
  }
  void Fail(const char* what, double got, double want) {
    if (failures_++ == 0) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s: got %.15g, want %.15g", what, got, want);
      first_ = buf;
    }
  }
  bool ok() const { return failures_ == 0; }
  const std::string& first() const { return first_; }
  std::string note;

 private:
  int failures_ = 0;
  std::string first_;
};

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void PairwiseCosineOracle(Check& c) {
  std::mt19937_64 rng(101);
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 1 + rng() % 16;
    const std::size_t nu = 1 + rng() % 50, nv = 1 + rng() % 50;
    std::vector<Vector> u, v;
    for (std::size_t i = 0; i < nu; ++i) u.push_back(RandomVector(rng, d));
    for (std::size_t i = 0; i < nv; ++i) v.push_back(RandomVector(rng, d));
    const double diff = std::abs(MeanPairwiseCosine(u, v) - BruteMeanPairwiseCosine(u, v));
    worst = std::max(worst, diff);
    if (!(diff <= 1e-10)) c.Fail("pair mismatch", diff, 1e-10);
  }
  const double secs = Seconds(start);
  c.True("runtime over 5 s", secs < 5.0);
  char buf[96];
  std::snprintf(buf, sizeof buf, "1000 pairs, max |diff| %.2e, %.2f s", worst, secs);
  c.note = buf;
}

TrainProfile Profile(std::vector<AnnotatedExample> examples, std::size_t dim = 0) {
  return BuildProfile(examples, dim);
}

void UnigramFixture(Check& c) {
  const TrainProfile p = Profile({ContentExample("t", {"dog", "dog", "dog", "cat"})});
  const double v = *VocabularyDrift(ContentExample("x", {"dog", "cat"}), p).value;
  const double oov = *VocabularyDrift(ContentExample("x", {"zebra"}), p).value;
  // Exact closed forms at the stated tolerance; the printed six-decimal
  // values must agree to their last digit.
  c.Near("dog,cat exact", v, (std::log(4.0 / 3.0) + std::log(4.0)) / 2.0, 1e-9);
  c.Near("dog,cat printed", v, 0.836988, 5e-7);
  c.Near("oov exact", oov, -std::log(1e-10), 1e-9);
  c.Near("oov printed", oov, 23.025851, 5e-7);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.9f, %.9f", v, oov);
  c.note = buf;
}

void PosFixture(Check& c) {
  const std::vector<PosTag> seq = {PosTag::kDet, PosTag::kNoun, PosTag::kVerb};
  const TrainProfile p = Profile({TagExample("t", seq)});
  const double self = *StructuralDrift(TagExample("x", seq), p).value;
  c.Near("self exact", self, -std::log(1.1 / 2.8), 1e-9);
  c.Near("self printed", self, 0.934309, 5e-7);
  // Every sequence starts from the all-[SEP] context, which the fixture has
  // seen; probe an unseen context directly, and a whole sequence against a
  // profile holding no 5-grams.
  const double unseen = -PosNgramLogProb(
      p, {PosTag::kAdj, PosTag::kAdv, PosTag::kAdj, PosTag::kAdv}, PosTag::kNoun);
  c.Near("unseen context", unseen, std::log(18.0), 1e-12);
  const TrainProfile no_ngrams = Profile({ContentExample("t", {"solo"})});
  c.Near("unseen sequence",
         *StructuralDrift(TagExample("x", {PosTag::kAdj, PosTag::kAdv, PosTag::kAdj}),
                          no_ngrams).value,
         std::log(18.0), 1e-12);

  std::mt19937_64 rng(103);
  std::vector<AnnotatedExample> corpus;
  for (int i = 0; i < 300; ++i) {
    std::vector<PosTag> tags(2 + rng() % 10);
    for (PosTag& t : tags) t = static_cast<PosTag>(1 + rng() % 6);
    corpus.push_back(TagExample("c" + std::to_string(i), tags));
  }
  const TrainProfile big = BuildProfile(corpus, 0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    PosContext ctx;
    if (i % 2 == 0) {
      // Seen contexts.
      auto it = big.pos_ngrams.context_counts().begin();
      std::advance(it, rng() % big.pos_ngrams.context_counts().size());
      ctx = PosNgramTable::UnpackContext(it->first);
    } else {
      for (PosTag& t : ctx) t = static_cast<PosTag>(rng() % kNumPosSymbols);
    }
    double sum = 0.0;
    for (int t = 0; t < kPosVocabSize; ++t) {
      sum += std::exp(PosNgramLogProb(big, ctx, static_cast<PosTag>(t)));
    }
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  c.Near("context sums", worst, 0.0, 1e-12);
  char buf[128];
  std::snprintf(buf, sizeof buf, "self %.9f, unseen %.12f, max |sum-1| %.1e", self, unseen,
                worst);
  c.note = buf;
}

// Average over shared content surfaces of the mean pairwise cosine distance.
double BruteSemanticDrift(const AnnotatedExample& x,
                          const std::vector<AnnotatedExample>& train) {
  std::map<std::string, std::vector<Vector>> mine, theirs;
  for (const AnnotatedToken& t : x.tokens) {
    if (t.is_content && t.embedding) mine[t.surface].push_back(*t.embedding);
  }
  for (const AnnotatedExample& ex : train) {
    for (const AnnotatedToken& t : ex.tokens) {
      if (t.is_content && t.embedding) theirs[t.surface].push_back(*t.embedding);
    }
  }
  double sum = 0.0;
  int shared = 0;
  for (const auto& [w, u] : mine) {
    auto it = theirs.find(w);
    if (it == theirs.end()) continue;
    double d = 0.0;
    for (const Vector& a : u) {
      for (const Vector& b : it->second) d += 1.0 - BruteCosine(a, b);
    }
    sum += d / static_cast<double>(u.size() * it->second.size());
    ++shared;
  }
  return sum / shared;
}

void SemanticFixture(Check& c) {
  AnnotatedExample t1 = ContentExample("t1", {"w"});
  AnnotatedExample t2 = ContentExample("t2", {"w"});
  t1.tokens[0].embedding = Vector{0, 1};
  t2.tokens[0].embedding = Vector{1, 0};
  AnnotatedExample x = ContentExample("x", {"w"});
  x.tokens[0].embedding = Vector{1, 0};
  const double fixture = *SemanticDrift(x, Profile({t1, t2}, 2)).value;
  c.Near("fixture", fixture, 0.5, 1e-12);

  std::mt19937_64 rng(107);
  double worst = 0.0;
  int compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = 1 + rng() % 8;
    const std::size_t vocab = 2 + rng() % 6;
    auto example = [&](const std::string& id) {
      AnnotatedExample ex;
      ex.id = id;
      const std::size_t n = 1 + rng() % 8;
      for (std::size_t i = 0; i < n; ++i) {
        AnnotatedToken t;
        t.surface = "v" + std::to_string(rng() % vocab);
        t.pos = PosTag::kNoun;
        t.is_content = rng() % 4 != 0;
        t.embedding = RandomVector(rng, dim);
        ex.tokens.push_back(t);
      }
      return ex;
    };
    std::vector<AnnotatedExample> train;
    for (int i = 0, n = 1 + rng() % 6; i < n; ++i) train.push_back(example("t" + std::to_string(i)));
    const AnnotatedExample probe = example("x");
    const MetricResult r = SemanticDrift(probe, BuildProfile(train, dim));
    const double brute = BruteSemanticDrift(probe, train);
    if (std::isnan(brute)) {
      // Nothing shared or nothing content: the metric must be absent.
      c.True("absent when nothing is shared", !r.present());
      continue;
    }
    if (!r.present()) {
      c.Fail("unexpectedly absent", 0, brute);
      continue;
    }
    worst = std::max(worst, std::abs(*r.value - brute));
    ++compared;
  }
  c.Near("random corpora", worst, 0.0, 1e-10);
  c.True("enough comparisons", compared >= 150);
  char buf[96];
  std::snprintf(buf, sizeof buf, "fixture %.15f, %d corpora, max |diff| %.1e", fixture,
                compared, worst);
  c.note = buf;
}

void JsFixture(Check& c) {
  const Distribution a = {{"a", 1.0}};
  const Distribution b = {{"b", 1.0}};
  const Distribution ab = {{"a", 0.5}, {"b", 0.5}};
  c.Near("identical", JensenShannonDivergence(ab, ab), 0.0, 1e-15);
  c.Near("disjoint", JensenShannonDivergence(a, b), 1.0, 1e-15);
  const double half = JensenShannonDivergence(a, ab);
  c.Near("{a:1} vs {a:.5,b:.5}", half, 0.311278, 1e-6);

  // The same case through subword scoring against a profile.
  AnnotatedExample t = ContentExample("t", {"z"});
  t.subword_tokens = std::vector<std::string>{"a", "b"};
  AnnotatedExample x = ContentExample("x", {"z"});
  x.subword_tokens = std::vector<std::string>{"a"};
  c.Near("token-level", *TokenJsDivergence(x, Profile({t})).value, 0.311278, 1e-6);

  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    Distribution p, q;
    double sp = 0.0, sq = 0.0;
    for (int k = 0; k < 12; ++k) {
      const std::string key = "k" + std::to_string(k);
      if (rng() % 3) sp += (p[key] = unit(rng));
      if (rng() % 3) sq += (q[key] = unit(rng));
    }
    if (p.empty() || q.empty()) continue;
    for (auto& [k, v] : p) v /= sp;
    for (auto& [k, v] : q) v /= sq;
    worst = std::max(worst, std::abs(JensenShannonDivergence(p, q) -
                                     JensenShannonDivergence(q, p)));
  }
  c.Near("symmetry", worst, 0.0, 1e-12);
  char buf[96];
  std::snprintf(buf, sizeof buf, "fixture %.9f, max asymmetry %.1e", half, worst);
  c.note = buf;
}

void LogisticFit(Check& c) {
  std::mt19937_64 rng(113);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  FeatureMatrix m;
  m.feature_names = {"vocabulary"};
  for (std::size_t i = 0; i < 10000; ++i) {
    const double x = normal(rng);
    m.AddRow(std::vector<double>{x}, unit(rng) < Sigmoid(1.0 - 2.0 * x), i);
  }
  const auto start = std::chrono::steady_clock::now();
  const PredictorModel model = FitLogistic(m);
  const double secs = Seconds(start);
  const double w = model.RawWeights()[0], b = model.RawIntercept();
  c.Near("w", w, -2.0, 0.1);
  c.Near("b", b, 1.0, 0.1);
  c.True("converged", model.diagnostics.converged);
  c.Near("gradient", model.diagnostics.gradient_norm, 0.0, 1e-8);

  FeatureMatrix flat;
  flat.feature_names = {"vocabulary"};
  for (std::size_t i = 0; i < 100; ++i) flat.AddRow(std::vector<double>{4.2}, i % 2 == 0, i);
  const PredictorModel constant = FitLogistic(flat);
  const double p = PredictProba(constant, std::vector<double>{4.2});
  c.Near("constant feature", p, 0.5, 1e-6);
  c.True("runtime over 2 s", secs < 2.0);
  char buf[128];
  std::snprintf(buf, sizeof buf, "w %.4f, b %.4f, |g| %.1e, p %.9f, %.3f s", w, b,
                model.diagnostics.gradient_norm, p, secs);
  c.note = buf;
}

double PairCountAuc(const std::vector<double>& s, const std::vector<bool>& y) {
  double num = 0.0, pos = 0.0, neg = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) (y[i] ? pos : neg) += 1.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (!y[i] || y[j]) continue;
      num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return num / (pos * neg);
}

void AucOracle(Check& c) {
  std::mt19937_64 rng(127);
  std::normal_distribution<double> normal(0.0, 1.0);
  int exact = 0;
  double worst_transform = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 499;
    const int levels = 1 + static_cast<int>(rng() % 30);  // few levels, many ties
    std::vector<double> s(n), t(n);
    std::vector<bool> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = trial % 4 == 0 ? normal(rng) : static_cast<double>(rng() % levels) / levels;
      y[i] = rng() % 2;
      t[i] = std::exp(3.0 * s[i]) + s[i];  // strictly increasing
    }
    y[0] = true;
    y[1] = false;
    const double auc = *RocAuc(s, y);
    if (auc == PairCountAuc(s, y)) {
      ++exact;
    } else {
      c.Fail("pair count", auc, PairCountAuc(s, y));
    }
    worst_transform = std::max(worst_transform, std::abs(*RocAuc(t, y) - auc));
  }
  c.Near("monotone transform", worst_transform, 0.0, 1e-12);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d/200 exact, max transform |diff| %.1e", exact,
                worst_transform);
  c.note = buf;
}

void RmseFixture(Check& c) {
  const RmseResult r =
      RmsePercent(std::vector<double>{0.80, 0.70}, std::vector<double>{0.82, 0.68}, 0.85);
  c.True("percent present", r.percent.has_value());
  const double pct = r.percent.value_or(NAN);
  c.Near("percent", pct, 16.38, 0.01);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f%%", pct);
  c.note = buf;
}

void EndToEnd(Check& c) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<Metric> features = {Metric::kVocabulary};
  double min_auc = 1.0, max_pct = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    testing::SyntheticData data = testing::SyntheticGenerator(seed, {}).Generate();
    const TrainProfile profile = BuildProfile(data.train, 0);
    auto assemble = [&](const std::string& name, const std::vector<AnnotatedExample>& set) {
      std::vector<DriftVector> drift;
      std::vector<std::optional<bool>> labels;
      for (const AnnotatedExample& ex : set) {
        drift.push_back(ScoreExample(ex, profile, features));
        labels.push_back(ex.correct);
      }
      NamedMatrix named;
      named.name = name;
      named.matrix = AssembleFeatures(drift, labels, features);
      named.excluded = named.matrix.excluded;
      return named;
    };
    const NamedMatrix in = assemble("in", data.in_domain);
    const std::vector<NamedMatrix> ood = {assemble("ood1", data.ood[0]),
                                          assemble("ood2", data.ood[1])};
    const PredictorModel model = FitLogistic(in.matrix);
    EvaluationOptions options;
    options.seed = seed;
    const EvalReport report = Evaluate(model, in, ood, options);
    for (std::size_t d = 1; d < report.datasets.size(); ++d) {
      const double auc = report.datasets[d].roc_auc.value_or(0.0);
      min_auc = std::min(min_auc, auc);
      if (!(auc >= 0.60)) c.Fail("out-of-domain ROC AUC", auc, 0.60);
    }
    const double pct = report.rmse && report.rmse->percent ? *report.rmse->percent : INFINITY;
    max_pct = std::max(max_pct, pct);
    if (!(pct < 100.0)) c.Fail("rmse_percent", pct, 100.0);
  }
  const double secs = Seconds(start);
  c.True("runtime over 60 s", secs < 60.0);
  char buf[128];
  std::snprintf(buf, sizeof buf, "20 seeds, min OOD AUC %.3f, max rmse%% %.1f, %.1f s", min_auc,
                max_pct, secs);
  c.note = buf;
}

std::string Slurp(const std::filesystem::path& p) { return testing::ReadFile(p); }

void Determinism(Check& c) {
  namespace fs = std::filesystem;
  const fs::path dir = testing::TempDir("acceptance");
  testing::SyntheticOptions options;
  options.train_examples = 400;
  options.in_domain_examples = 200;
  options.ood_examples = 150;
  options.dim = 4;
  const testing::SyntheticData data = testing::SyntheticGenerator(131, options).Generate();
  const auto path = [&](const std::string& n) { return (dir / n).string(); };
  testing::WriteCorpus(path("train.jsonl"), data.train, 4);
  testing::WriteCorpus(path("in.jsonl"), data.in_domain, 4);
  testing::WriteCorpus(path("ood1.jsonl"), data.ood[0], 4);
  testing::WriteCorpus(path("ood2.jsonl"), data.ood[1], 4);

  const std::vector<std::string> outputs = {"p.bin", "in.s", "ood1.s", "ood2.s",
                                            "m.json", "r.json", "r.csv"};
  auto run = [&](const std::string& tag) {
    std::ostringstream out, err;
    auto p = [&](const std::string& n) { return path(tag + n); };
    auto cmd = [&](std::vector<std::string> args) {
      const int code = cli::Run(args, out, err);
      if (code != 0) c.Fail(("command failed: " + err.str()).c_str(), code, 0);
    };
    cmd({"build-profile", "-i", path("train.jsonl"), "-o", p("p.bin")});
    for (const char* n : {"in", "ood1", "ood2"}) {
      cmd({"score", "-p", p("p.bin"), "-i", path(std::string(n) + ".jsonl"), "-o",
           p(std::string(n) + ".s")});
    }
    cmd({"fit", "-s", p("in.s"), "-o", p("m.json")});
    cmd({"evaluate", "--model", p("m.json"), "--in-domain", "in=" + p("in.s"), "--ood",
         "ood1=" + p("ood1.s"), "--ood", "ood2=" + p("ood2.s"), "-o", p("r.json"), "--csv",
         p("r.csv")});
  };
  run("a_");
  run("b_");
  std::size_t bytes = 0;
  for (const std::string& f : outputs) {
    const std::string a = Slurp(path("a_" + f));
    bytes += a.size();
    c.True(("nonempty " + f).c_str(), !a.empty());
    c.True(("byte-identical " + f).c_str(), a == Slurp(path("b_" + f)));
  }
  fs::remove_all(dir);
  c.note = std::to_string(outputs.size()) + " outputs, " + std::to_string(bytes) +
           " bytes compared";
}

}  // namespace
}  // namespace driftscope

int main() {
  using driftscope::Check;
  const std::vector<std::pair<const char*, std::function<void(Check&)>>> criteria = {
      {"mean pairwise cosine matches brute force on 1000 pairs",
       driftscope::PairwiseCosineOracle},
      {"vocabulary drift fixtures", driftscope::UnigramFixture},
      {"structural drift fixtures and smoothed distributions", driftscope::PosFixture},
      {"semantic drift fixture and brute-force agreement", driftscope::SemanticFixture},
      {"Jensen-Shannon divergence fixtures and symmetry", driftscope::JsFixture},
      {"logistic fit recovery, convergence and constant feature", driftscope::LogisticFit},
      {"ROC AUC exact against pair counting, transform invariant", driftscope::AucOracle},
      {"RMSE percent fixture", driftscope::RmseFixture},
      {"end-to-end drift regression beats the no-drop baseline", driftscope::EndToEnd},
      {"full CLI pipeline is byte-deterministic", driftscope::Determinism},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Check c;
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.True((std::string("exception: ") + e.what()).c_str(), false);
    }
    if (c.ok()) {
      std::printf("PASS  %s  (%s)\n", name, c.note.c_str());
    } else {
      ++failed;
      std::printf("FAIL  %s  (%s)\n", name, c.first().c_str());
    }
  }
  std::printf("%d/%zu acceptance criteria passed\n",
              static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
