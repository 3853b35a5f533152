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

#include "driftscope/predictor.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "driftscope/error.h"
#include "json.hpp"

namespace driftscope {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr const char* kModelSchema = "driftscope.model/v1";

// log(1 + exp(x)) without overflow.
double Log1pExp(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

struct Problem {
  MatrixXd design;  // n x (p + 1); column 0 is the intercept
  VectorXd y;
  double ridge;

  double LogLikelihood(const VectorXd& beta) const {
    const VectorXd eta = design * beta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      ll += y[i] * eta[i] - Log1pExp(eta[i]);
    }
    return ll - 0.5 * ridge * beta.tail(beta.size() - 1).squaredNorm();
  }

  // Gradient and (negated) Hessian of the penalized log-likelihood.
  void Derivatives(const VectorXd& beta, VectorXd* grad, MatrixXd* info) const {
    const VectorXd eta = design * beta;
    VectorXd resid(eta.size());
    VectorXd w(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      const double mu = Sigmoid(eta[i]);
      resid[i] = y[i] - mu;
      w[i] = mu * Sigmoid(-eta[i]);
    }
    *grad = design.transpose() * resid;
    *info = design.transpose() * w.asDiagonal() * design;
    for (Eigen::Index j = 1; j < beta.size(); ++j) {
      (*grad)[j] -= ridge * beta[j];
      (*info)(j, j) += ridge;
    }
  }
};

}  // namespace

std::size_t FeatureMatrix::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
}

bool FeatureMatrix::single_class() const {
  const std::size_t pos = positives();
  return pos == 0 || pos == rows();
}

void FeatureMatrix::AddRow(std::span<const double> features, bool label,
                           std::size_t source_row) {
  if (features.size() != cols()) throw DataError("feature row has wrong width");
  for (double v : features) {
    if (!std::isfinite(v)) throw DataError("non-finite feature value");
  }
  values.insert(values.end(), features.begin(), features.end());
  labels.push_back(label);
  source_rows.push_back(source_row);
}

FeatureMatrix FeatureMatrix::Subset(std::span<const std::size_t> indices) const {
  FeatureMatrix out;
  out.feature_names = feature_names;
  for (std::size_t i : indices) out.AddRow(row(i), labels[i], source_rows[i]);
  return out;
}

FeatureMatrix AssembleFeatures(std::span<const DriftVector> drift,
                               std::span<const std::optional<bool>> labels,
                               std::span<const Metric> selection) {
  if (labels.size() != drift.size()) {
    throw DataError("labels and drift vectors differ in length");
  }
  if (selection.empty()) throw DataError("no features selected");
  FeatureMatrix m;
  for (Metric metric : selection) m.feature_names.emplace_back(MetricName(metric));
  std::vector<double> row(selection.size());
  for (std::size_t i = 0; i < drift.size(); ++i) {
    bool complete = true;
    for (std::size_t j = 0; j < selection.size(); ++j) {
      const MetricResult& r = drift[i][selection[j]];
      if (!r.present()) {
        complete = false;
        break;
      }
      row[j] = *r.value;
    }
    if (!complete) {
      ++m.excluded;
      continue;
    }
    if (!labels[i]) {
      throw DataError("example '" + drift[i].id + "' has no correctness label");
    }
    m.AddRow(row, *labels[i], i);
  }
  if (m.rows() == 0) {
    throw DataError("every example is missing a selected metric");
  }
  return m;
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

PredictorModel FitLogistic(const FeatureMatrix& m, const FitOptions& options) {
  const std::size_t n = m.rows();
  const std::size_t p = m.cols();
  if (m.single_class()) {
    throw DataError("cannot fit: all " + std::to_string(n) +
                    " labels belong to one class");
  }
  if (n < p + 1) {
    throw DataError("cannot fit " + std::to_string(p) + " features on " +
                    std::to_string(n) + " rows");
  }

  PredictorModel model;
  model.feature_names = m.feature_names;
  model.means.assign(p, 0.0);
  model.stds.assign(p, 1.0);
  model.weights.assign(p, 0.0);

  Problem problem;
  problem.ridge = options.ridge;
  problem.design.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p + 1));
  problem.y.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    problem.design(i, 0) = 1.0;
    problem.y[i] = m.labels[i] ? 1.0 : 0.0;
  }
  for (std::size_t j = 0; j < p; ++j) {
    const double first = m.row(0)[j];
    bool constant = true;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += m.row(i)[j];
      constant = constant && m.row(i)[j] == first;
    }
    if (constant) {
      model.means[j] = first;
      model.stds[j] = 1.0;
      for (std::size_t i = 0; i < n; ++i) problem.design(i, j + 1) = 0.0;
      continue;
    }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = m.row(i)[j] - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    model.means[j] = mean;
    model.stds[j] = sd > 0.0 ? sd : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      problem.design(i, j + 1) = (m.row(i)[j] - mean) / model.stds[j];
    }
  }

  VectorXd beta = VectorXd::Zero(static_cast<Eigen::Index>(p + 1));
  // Start the intercept at the log-odds of the base rate.
  const double rate = static_cast<double>(m.positives()) / static_cast<double>(n);
  beta[0] = std::log(rate / (1.0 - rate));

  double ll = problem.LogLikelihood(beta);
  if (options.trace != nullptr) options.trace->assign(1, ll);
  VectorXd grad;
  MatrixXd info;
  FitDiagnostics& diag = model.diagnostics;
  for (diag.iterations = 0;; ++diag.iterations) {
    problem.Derivatives(beta, &grad, &info);
    diag.gradient_norm = grad.lpNorm<Eigen::Infinity>();
    if (diag.gradient_norm <= options.tolerance) {
      diag.converged = true;
      break;
    }
    if (diag.iterations >= options.max_iterations) break;

    Eigen::LDLT<MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success) {
      throw NumericalError("IRLS: Hessian factorization failed");
    }
    const VectorXd step = ldlt.solve(grad);
    // Near the optimum the true change in ll is below its rounding error, so
    // a decrease within that slack is not treated as a failed step.
    const double slack = 1e-12 * std::max(1.0, std::abs(ll));
    double scale = 1.0;
    VectorXd candidate = beta + step;
    double candidate_ll = problem.LogLikelihood(candidate);
    for (int halvings = 0; !(candidate_ll >= ll - slack) && halvings < 50;
         ++halvings) {
      scale *= 0.5;
      candidate = beta + scale * step;
      candidate_ll = problem.LogLikelihood(candidate);
    }
    if (!(candidate_ll >= ll - slack)) break;  // no ascent direction left
    beta = candidate;
    ll = candidate_ll;
    if (options.trace != nullptr) options.trace->push_back(ll);
  }
  diag.log_likelihood = ll;
  if (!beta.allFinite()) throw NumericalError("IRLS produced non-finite parameters");

  model.intercept = beta[0];
  for (std::size_t j = 0; j < p; ++j) model.weights[j] = beta[j + 1];
  return model;
}

std::vector<double> PredictorModel::RawWeights() const {
  std::vector<double> raw(weights.size());
  for (std::size_t j = 0; j < weights.size(); ++j) raw[j] = weights[j] / stds[j];
  return raw;
}

double PredictorModel::RawIntercept() const {
  double b = intercept;
  for (std::size_t j = 0; j < weights.size(); ++j) b -= weights[j] * means[j] / stds[j];
  return b;
}

double LinearScore(const PredictorModel& model, std::span<const double> features) {
  if (features.size() != model.weights.size()) {
    throw DataError("expected " + std::to_string(model.weights.size()) +
                    " features, got " + std::to_string(features.size()));
  }
  double s = model.intercept;
  for (std::size_t j = 0; j < features.size(); ++j) {
    if (!std::isfinite(features[j])) {
      throw DataError("non-finite value for feature '" + model.feature_names[j] + "'");
    }
    s += model.weights[j] * (features[j] - model.means[j]) / model.stds[j];
  }
  return s;
}

double PredictProba(const PredictorModel& model, std::span<const double> features) {
  return Sigmoid(LinearScore(model, features));
}

std::vector<double> PredictProba(const PredictorModel& model, const FeatureMatrix& m) {
  if (m.feature_names != model.feature_names) {
    throw DataError("feature matrix columns do not match the model");
  }
  std::vector<double> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out[i] = PredictProba(model, m.row(i));
  return out;
}

std::vector<std::size_t> SeededPermutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  // Fisher-Yates over mt19937_64, whose output sequence is fixed by the
  // standard; rejection sampling keeps the draws unbiased and portable.
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::uint64_t bound = i;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw;
    do {
      draw = rng();
    } while (draw >= limit);
    std::swap(perm[i - 1], perm[draw % bound]);
  }
  return perm;
}

std::vector<double> CrossValPredict(const FeatureMatrix& m, int folds,
                                    std::uint64_t seed, const FitOptions& options) {
  const std::size_t n = m.rows();
  if (folds < 2) throw DataError("cross-validation needs at least 2 folds");
  if (static_cast<std::size_t>(folds) > n) {
    throw DataError("cannot split " + std::to_string(n) + " rows into " +
                    std::to_string(folds) + " folds");
  }
  const std::vector<std::size_t> perm = SeededPermutation(n, seed);
  const std::size_t k = static_cast<std::size_t>(folds);
  std::vector<double> out(n, 0.0);
  std::vector<std::size_t> train;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t begin = f * n / k;
    const std::size_t end = (f + 1) * n / k;
    train.clear();
    train.insert(train.end(), perm.begin(), perm.begin() + begin);
    train.insert(train.end(), perm.begin() + end, perm.end());
    const FeatureMatrix part = m.Subset(train);
    if (part.single_class()) {
      throw DataError("fold " + std::to_string(f) +
                      ": training part contains a single class");
    }
    PredictorModel model;
    try {
      model = FitLogistic(part, options);
    } catch (const DataError& e) {
      throw DataError("fold " + std::to_string(f) + ": " + e.what());
    }
    for (std::size_t pos = begin; pos < end; ++pos) {
      out[perm[pos]] = PredictProba(model, m.row(perm[pos]));
    }
  }
  return out;
}

void SaveModel(const PredictorModel& model, std::ostream& out) {
  nlohmann::ordered_json j;
  j["schema"] = kModelSchema;
  j["features"] = model.feature_names;
  j["means"] = model.means;
  j["stds"] = model.stds;
  j["weights"] = model.weights;
  j["intercept"] = model.intercept;
  j["diagnostics"] = {
      {"iterations", model.diagnostics.iterations},
      {"gradient_norm", model.diagnostics.gradient_norm},
      {"log_likelihood", model.diagnostics.log_likelihood},
      {"converged", model.diagnostics.converged},
  };
  out << j.dump(2) << '\n';
  if (!out) throw Error("failed writing model");
}

void SaveModel(const PredictorModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  SaveModel(model, out);
}

PredictorModel LoadModel(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("schema", std::string()) != kModelSchema) {
      throw FormatError("unsupported model schema (expected \"" +
                        std::string(kModelSchema) + "\")");
    }
    PredictorModel model;
    model.feature_names = j.at("features").get<std::vector<std::string>>();
    model.means = j.at("means").get<std::vector<double>>();
    model.stds = j.at("stds").get<std::vector<double>>();
    model.weights = j.at("weights").get<std::vector<double>>();
    model.intercept = j.at("intercept").get<double>();
    const auto& d = j.at("diagnostics");
    model.diagnostics.iterations = d.at("iterations").get<int>();
    model.diagnostics.gradient_norm = d.at("gradient_norm").get<double>();
    model.diagnostics.log_likelihood = d.at("log_likelihood").get<double>();
    model.diagnostics.converged = d.at("converged").get<bool>();
    const std::size_t p = model.feature_names.size();
    if (model.means.size() != p || model.stds.size() != p ||
        model.weights.size() != p) {
      throw FormatError("model parameter arrays differ in length");
    }
    for (std::size_t i = 0; i < p; ++i) {
      if (!ParseMetric(model.feature_names[i])) {
        throw FormatError("model names unknown feature '" + model.feature_names[i] + "'");
      }
      if (!(model.stds[i] > 0.0)) throw FormatError("model std must be > 0");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  }
}

PredictorModel LoadModel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model '" + path + "'");
  return LoadModel(in);
}

}  // namespace driftscope
