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

#include "driftscope/evaluation.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "driftscope/error.h"
#include "json.hpp"

namespace driftscope {
namespace {

void CheckAligned(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) {
    throw DataError("scores and labels differ in length");
  }
  for (double s : scores) {
    if (std::isnan(s)) throw DataError("NaN score");
  }
}

// Indices sorted by descending score.
std::vector<std::size_t> DescendingOrder(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

nlohmann::ordered_json OptionalNumber(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::string Csv(const std::optional<double>& v) {
  if (!v) return "";
  nlohmann::json j = *v;
  return j.dump();
}

std::string Csv(double v) { return nlohmann::json(v).dump(); }

std::string_view RoleName(DatasetRole role) {
  return role == DatasetRole::kInDomain ? "in_domain" : "out_of_domain";
}

double ActualAccuracy(const FeatureMatrix& m) {
  return static_cast<double>(m.positives()) / static_cast<double>(m.rows());
}

}  // namespace

std::optional<double> RocAuc(std::span<const double> scores,
                             const std::vector<bool>& labels) {
  CheckAligned(scores, labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Sum of 1-based average ranks of the positives; doubled to stay integral.
  std::uint64_t twice_rank_sum = 0;
  std::uint64_t n_pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const std::uint64_t twice_avg_rank = (i + 1) + j;  // 2 * mean of i+1..j
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]]) {
        twice_rank_sum += twice_avg_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::uint64_t n_neg = scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  // 2 * (#pos>neg pairs + 0.5 #ties) = twice_rank_sum - n_pos (n_pos + 1).
  const std::uint64_t twice_u = twice_rank_sum - n_pos * (n_pos + 1);
  return static_cast<double>(twice_u) /
         (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::vector<RocPoint> RocCurve(std::span<const double> scores,
                               const std::vector<bool>& labels) {
  CheckAligned(scores, labels);
  const std::size_t n_pos =
      static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw DataError("ROC curve needs both classes");
  }
  const std::vector<std::size_t> order = DescendingOrder(scores);
  std::vector<RocPoint> curve = {{0.0, 0.0}};
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      labels[order[j]] ? ++tp : ++fp;
      ++j;
    }
    curve.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                     static_cast<double>(tp) / static_cast<double>(n_pos)});
    i = j;
  }
  return curve;
}

double TrapezoidArea(std::span<const RocPoint> curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += (curve[i].false_positive_rate - curve[i - 1].false_positive_rate) *
            (curve[i].recall + curve[i - 1].recall) / 2.0;
  }
  return area;
}

double ExpectedAccuracy(std::span<const double> probabilities) {
  if (probabilities.empty()) throw DataError("expected accuracy of an empty dataset");
  double sum = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) throw DataError("probability outside [0, 1]");
    sum += p;
  }
  return sum / static_cast<double>(probabilities.size());
}

RmseResult RmsePercent(std::span<const double> predicted,
                       std::span<const double> actual,
                       std::span<const double> in_domain) {
  if (predicted.empty()) throw DataError("RMSE over zero datasets");
  if (predicted.size() != actual.size() || predicted.size() != in_domain.size()) {
    throw DataError("RMSE inputs differ in length");
  }
  double se_metric = 0.0;
  double se_baseline = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    se_metric += (predicted[i] - actual[i]) * (predicted[i] - actual[i]);
    se_baseline += (in_domain[i] - actual[i]) * (in_domain[i] - actual[i]);
  }
  const double n = static_cast<double>(predicted.size());
  RmseResult r;
  r.rmse_metric = std::sqrt(se_metric / n);
  r.rmse_baseline = std::sqrt(se_baseline / n);
  if (r.rmse_baseline > 0.0) r.percent = 100.0 * r.rmse_metric / r.rmse_baseline;
  return r;
}

RmseResult RmsePercent(std::span<const double> predicted,
                       std::span<const double> actual, double in_domain) {
  const std::vector<double> baseline(predicted.size(), in_domain);
  return RmsePercent(predicted, actual, baseline);
}

EvalReport Evaluate(const PredictorModel& model, const NamedMatrix& in_domain,
                    std::span<const NamedMatrix> out_of_domain,
                    const EvaluationOptions& options) {
  EvalReport report;
  report.features = model.feature_names;

  auto check = [&](const NamedMatrix& d) {
    if (d.matrix.feature_names != model.feature_names) {
      throw DataError("dataset '" + d.name + "' features do not match the model");
    }
    if (d.matrix.rows() == 0) throw DataError("dataset '" + d.name + "' is empty");
  };

  check(in_domain);
  const std::vector<double> in_probs =
      CrossValPredict(in_domain.matrix, options.folds, options.seed, options.fit);
  DatasetReport in;
  in.name = in_domain.name;
  in.role = DatasetRole::kInDomain;
  in.n = in_domain.matrix.rows();
  in.excluded = in_domain.excluded;
  in.actual_accuracy = ActualAccuracy(in_domain.matrix);
  in.predicted_accuracy = ExpectedAccuracy(in_probs);
  in.roc_auc = RocAuc(in_probs, in_domain.matrix.labels);
  report.in_domain_accuracy = options.in_domain_accuracy.value_or(in.actual_accuracy);
  report.mean_in_domain_roc_auc = in.roc_auc;
  report.datasets.push_back(in);

  std::vector<double> predicted;
  std::vector<double> actual;
  double auc_sum = 0.0;
  std::size_t auc_count = 0;
  for (const NamedMatrix& d : out_of_domain) {
    check(d);
    const std::vector<double> probs = PredictProba(model, d.matrix);
    DatasetReport r;
    r.name = d.name;
    r.role = DatasetRole::kOutOfDomain;
    r.n = d.matrix.rows();
    r.excluded = d.excluded;
    r.actual_accuracy = ActualAccuracy(d.matrix);
    r.predicted_accuracy = ExpectedAccuracy(probs);
    r.roc_auc = RocAuc(probs, d.matrix.labels);
    if (r.roc_auc) {
      auc_sum += *r.roc_auc;
      ++auc_count;
    }
    predicted.push_back(r.predicted_accuracy);
    actual.push_back(r.actual_accuracy);
    report.datasets.push_back(std::move(r));
  }
  if (auc_count > 0) report.mean_out_of_domain_roc_auc = auc_sum / auc_count;
  if (!predicted.empty()) {
    report.rmse = RmsePercent(predicted, actual, report.in_domain_accuracy);
  }
  return report;
}

void WriteReportJson(const EvalReport& report, std::ostream& out) {
  nlohmann::ordered_json j;
  j["schema"] = "driftscope.report/v1";
  j["features"] = report.features;
  nlohmann::ordered_json datasets = nlohmann::ordered_json::array();
  for (const DatasetReport& d : report.datasets) {
    nlohmann::ordered_json r;
    r["name"] = d.name;
    r["role"] = std::string(RoleName(d.role));
    r["n"] = d.n;
    r["excluded"] = d.excluded;
    r["actual_accuracy"] = d.actual_accuracy;
    r["predicted_accuracy"] = d.predicted_accuracy;
    r["roc_auc"] = OptionalNumber(d.roc_auc);
    datasets.push_back(std::move(r));
  }
  j["datasets"] = std::move(datasets);
  nlohmann::ordered_json agg;
  agg["in_domain_accuracy"] = report.in_domain_accuracy;
  agg["mean_in_domain_roc_auc"] = OptionalNumber(report.mean_in_domain_roc_auc);
  agg["mean_out_of_domain_roc_auc"] = OptionalNumber(report.mean_out_of_domain_roc_auc);
  agg["rmse_metric"] = OptionalNumber(
      report.rmse ? std::optional<double>(report.rmse->rmse_metric) : std::nullopt);
  agg["rmse_baseline"] = OptionalNumber(
      report.rmse ? std::optional<double>(report.rmse->rmse_baseline) : std::nullopt);
  agg["rmse_percent"] =
      OptionalNumber(report.rmse ? report.rmse->percent : std::nullopt);
  j["aggregate"] = std::move(agg);
  out << j.dump(2) << '\n';
}

void WriteReportCsv(const EvalReport& report, std::ostream& out) {
  out << "name,role,n,excluded,actual_accuracy,predicted_accuracy,roc_auc\n";
  for (const DatasetReport& d : report.datasets) {
    out << d.name << ',' << RoleName(d.role) << ',' << d.n << ',' << d.excluded
        << ',' << Csv(d.actual_accuracy) << ',' << Csv(d.predicted_accuracy) << ','
        << Csv(d.roc_auc) << '\n';
  }
}

}  // namespace driftscope
