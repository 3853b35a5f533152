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

#ifndef DRIFTSCOPE_EVALUATION_H_
#define DRIFTSCOPE_EVALUATION_H_

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "driftscope/predictor.h"

namespace driftscope {

// Mann-Whitney statistic: P(score_pos > score_neg) + 0.5 P(tie), computed
// from average ranks in O(n log n). nullopt when only one class is present.
std::optional<double> RocAuc(std::span<const double> scores,
                             const std::vector<bool>& labels);

struct RocPoint {
  double false_positive_rate = 0.0;
  double recall = 0.0;

  bool operator==(const RocPoint&) const = default;
};

// One point per distinct threshold, from (0, 0) to (1, 1). Throws DataError
// for single-class input.
std::vector<RocPoint> RocCurve(std::span<const double> scores,
                               const std::vector<bool>& labels);
double TrapezoidArea(std::span<const RocPoint> curve);

// Mean predicted probability. Throws DataError if empty or outside [0, 1].
double ExpectedAccuracy(std::span<const double> probabilities);

struct RmseResult {
  double rmse_metric = 0.0;
  double rmse_baseline = 0.0;
  std::optional<double> percent;  // absent when rmse_baseline == 0
};

// Pools every (predicted, actual) pair; in_domain[i] is the no-drop
// baseline prediction for pair i.
RmseResult RmsePercent(std::span<const double> predicted,
                       std::span<const double> actual,
                       std::span<const double> in_domain);
RmseResult RmsePercent(std::span<const double> predicted,
                       std::span<const double> actual, double in_domain);

enum class DatasetRole { kInDomain, kOutOfDomain };

struct DatasetReport {
  std::string name;
  DatasetRole role = DatasetRole::kOutOfDomain;
  std::size_t n = 0;         // rows with every model feature present
  std::size_t excluded = 0;  // rows dropped for a missing feature
  double actual_accuracy = 0.0;
  double predicted_accuracy = 0.0;
  std::optional<double> roc_auc;
};

struct EvalReport {
  std::vector<std::string> features;
  std::vector<DatasetReport> datasets;
  double in_domain_accuracy = 0.0;
  std::optional<double> mean_in_domain_roc_auc;
  std::optional<double> mean_out_of_domain_roc_auc;
  std::optional<RmseResult> rmse;  // absent without out-of-domain datasets
};

struct NamedMatrix {
  std::string name;
  FeatureMatrix matrix;
  std::size_t excluded = 0;
};

struct EvaluationOptions {
  int folds = 5;
  std::uint64_t seed = 0;
  FitOptions fit;
  // Overrides the no-drop baseline; defaults to the in-domain dataset's
  // actual accuracy.
  std::optional<double> in_domain_accuracy;
};

// In-domain rows are scored with out-of-fold probabilities; out-of-domain
// rows with `model`, which should be fit on the full in-domain set.
EvalReport Evaluate(const PredictorModel& model, const NamedMatrix& in_domain,
                    std::span<const NamedMatrix> out_of_domain,
                    const EvaluationOptions& options = {});

void WriteReportJson(const EvalReport& report, std::ostream& out);
void WriteReportCsv(const EvalReport& report, std::ostream& out);

}  // namespace driftscope

#endif  // DRIFTSCOPE_EVALUATION_H_
