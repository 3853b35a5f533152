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

// Logistic regression from drift metrics to per-example correctness.
//
// Features are z-scored with fit-set statistics, then the ridge-penalized
// log-likelihood
//
//   sum_i [y_i * eta_i - log(1 + exp(eta_i))] - lambda/2 * |w|^2,
//   eta_i = b + <w, z_i>
//
// is maximized by Newton's method (IRLS) with step halving. The intercept is
// not penalized. Only first-order terms are modeled.

#ifndef DRIFTSCOPE_PREDICTOR_H_
#define DRIFTSCOPE_PREDICTOR_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "driftscope/drift_metrics.h"

namespace driftscope {

struct FeatureMatrix {
  std::vector<std::string> feature_names;
  // Row-major, rows() x cols().
  std::vector<double> values;
  std::vector<bool> labels;
  // Index into the assembler's input for each row.
  std::vector<std::size_t> source_rows;
  std::size_t excluded = 0;

  std::size_t rows() const { return labels.size(); }
  std::size_t cols() const { return feature_names.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * cols(), cols());
  }
  std::size_t positives() const;
  bool single_class() const;

  void AddRow(std::span<const double> features, bool label,
              std::size_t source_row);
  // Rows at `indices`, in that order.
  FeatureMatrix Subset(std::span<const std::size_t> indices) const;
};

// Builds the matrix for `selection`. Examples missing any selected metric
// are skipped and counted in `excluded`. `labels` must be parallel to
// `drift` and present wherever a row is kept.
// Throws DataError when no row survives or a kept example is unlabeled.
FeatureMatrix AssembleFeatures(std::span<const DriftVector> drift,
                               std::span<const std::optional<bool>> labels,
                               std::span<const Metric> selection);

struct FitOptions {
  double ridge = 1e-6;
  double tolerance = 1e-8;
  int max_iterations = 100;
  // When set, receives the penalized log-likelihood after every accepted
  // step (starting point first).
  std::vector<double>* trace = nullptr;
};

struct FitDiagnostics {
  int iterations = 0;
  // Infinity norm of the penalized log-likelihood gradient at the returned
  // parameters (standardized scale).
  double gradient_norm = 0.0;
  double log_likelihood = 0.0;
  bool converged = false;

  bool operator==(const FitDiagnostics&) const = default;
};

struct PredictorModel {
  std::vector<std::string> feature_names;
  std::vector<double> means;
  std::vector<double> stds;
  std::vector<double> weights;  // on the standardized scale
  double intercept = 0.0;
  FitDiagnostics diagnostics;

  // Weights mapped back to raw feature units.
  std::vector<double> RawWeights() const;
  double RawIntercept() const;

  bool operator==(const PredictorModel&) const = default;
};

// Throws DataError for single-class labels or fewer than cols()+1 rows.
// Non-convergence is reported through diagnostics.converged, not thrown.
PredictorModel FitLogistic(const FeatureMatrix& m, const FitOptions& options = {});

double Sigmoid(double x);
// intercept + <w, standardized features>. Throws DataError on size mismatch
// or non-finite input.
double LinearScore(const PredictorModel& model, std::span<const double> features);
double PredictProba(const PredictorModel& model, std::span<const double> features);
std::vector<double> PredictProba(const PredictorModel& model, const FeatureMatrix& m);

// Seeded k-fold out-of-fold probabilities, in the matrix's row order.
// Throws DataError naming the fold whose training part is unusable.
std::vector<double> CrossValPredict(const FeatureMatrix& m, int folds,
                                    std::uint64_t seed,
                                    const FitOptions& options = {});

// Deterministic permutation of [0, n) used by CrossValPredict.
std::vector<std::size_t> SeededPermutation(std::size_t n, std::uint64_t seed);

void SaveModel(const PredictorModel& model, std::ostream& out);
void SaveModel(const PredictorModel& model, const std::string& path);
PredictorModel LoadModel(std::istream& in);
PredictorModel LoadModel(const std::string& path);

}  // namespace driftscope

#endif  // DRIFTSCOPE_PREDICTOR_H_
