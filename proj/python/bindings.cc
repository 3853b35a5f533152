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

// Python bindings. Examples cross the boundary as driftscope/v1 JSON
// records, so Python callers share one schema with the command line.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "driftscope/annotation.h"
#include "driftscope/cli.h"
#include "driftscope/drift_metrics.h"
#include "driftscope/error.h"
#include "driftscope/evaluation.h"
#include "driftscope/predictor.h"
#include "driftscope/profile.h"

namespace py = pybind11;
using namespace driftscope;

namespace {

std::vector<AnnotatedExample> ParseRecords(const std::vector<std::string>& records,
                                           std::size_t dim) {
  std::vector<AnnotatedExample> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    out.push_back(ParseExample(records[i], dim, i + 1));
  }
  return out;
}

FeatureMatrix MakeMatrix(const std::vector<std::vector<double>>& x, const std::vector<bool>& y,
                         const std::vector<std::string>& features) {
  for (const std::string& name : features) {
    if (!ParseMetric(name)) throw DataError("unknown feature '" + name + "'");
  }
  if (x.size() != y.size()) throw DataError("x and y differ in length");
  FeatureMatrix m;
  m.feature_names = features;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != features.size()) {
      throw DataError("row " + std::to_string(i) + " has " + std::to_string(x[i].size()) +
                      " values for " + std::to_string(features.size()) + " features");
    }
    m.AddRow(x[i], y[i], i);
  }
  return m;
}

FitOptions MakeFitOptions(double ridge, double tolerance, int max_iterations) {
  FitOptions options;
  options.ridge = ridge;
  options.tolerance = tolerance;
  options.max_iterations = max_iterations;
  return options;
}

py::dict Scores(const DriftVector& d) {
  py::dict out;
  for (Metric m : kAllMetrics) {
    const MetricResult& r = d[m];
    out[py::str(std::string(MetricName(m)))] =
        r.present() ? py::object(py::float_(*r.value)) : py::object(py::none());
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_driftscope, m) {
  m.doc() = "Drift metrics and performance prediction for NLP models";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  py::class_<TrainProfile>(m, "Profile")
      .def_readonly("dim", &TrainProfile::dim)
      .def_readonly("example_count", &TrainProfile::example_count)
      .def_property_readonly("domains",
                             [](const TrainProfile& p) {
                               return std::vector<std::string>(p.domains.begin(),
                                                               p.domains.end());
                             })
      .def_property_readonly("content_vocab_size",
                             [](const TrainProfile& p) { return p.content_unigrams.counts.size(); })
      .def_property_readonly("content_tokens",
                             [](const TrainProfile& p) { return p.content_unigrams.total; })
      .def("content_log_prob",
           [](const TrainProfile& p, const std::string& word, double floor) {
             return ContentUnigramLogProb(p, word, floor);
           },
           py::arg("word"), py::arg("oov_floor") = kDefaultOovFloor)
      .def("save", [](const TrainProfile& p, const std::string& path) { SaveProfile(p, path); })
      .def_static("load", [](const std::string& path) { return LoadProfile(path); })
      .def("__eq__", [](const TrainProfile& a, const TrainProfile& b) { return a == b; });

  m.def("build_profile",
        [](const std::vector<std::string>& records, std::size_t dim) {
          return BuildProfile(ParseRecords(records, dim), dim);
        },
        py::arg("records"), py::arg("dim") = 0,
        "Builds a profile from driftscope/v1 JSON records.");
  m.def("build_profile_from_file", &BuildProfileFromFile, py::arg("path"));
  m.def("merge_profiles", &MergeProfiles, py::arg("a"), py::arg("b"));

  m.def("score",
        [](const std::string& record, const TrainProfile& profile, const std::string& metrics,
           double oov_floor, double add_k) {
          ScoringOptions options;
          options.oov_floor = oov_floor;
          options.add_k = add_k;
          const AnnotatedExample x = ParseExample(record, profile.dim, 1);
          return Scores(ScoreExample(x, profile, ParseMetricList(metrics), options));
        },
        py::arg("record"), py::arg("profile"), py::arg("metrics") = "all",
        py::arg("oov_floor") = kDefaultOovFloor, py::arg("add_k") = kDefaultAddK,
        "Scores one JSON record; absent metrics map to None.");

  m.def("mean_pairwise_cosine",
        [](const std::vector<Vector>& u, const std::vector<Vector>& v) {
          return MeanPairwiseCosine(u, v);
        },
        py::arg("u"), py::arg("v"));
  m.def("js_divergence",
        [](const std::map<std::string, double>& p, const std::map<std::string, double>& q) {
          return JensenShannonDivergence(Distribution(p.begin(), p.end()),
                                         Distribution(q.begin(), q.end()));
        },
        py::arg("p"), py::arg("q"), "Base-2 Jensen-Shannon divergence of two distributions.");

  py::class_<PredictorModel>(m, "Model")
      .def_readonly("feature_names", &PredictorModel::feature_names)
      .def_readonly("means", &PredictorModel::means)
      .def_readonly("stds", &PredictorModel::stds)
      .def_readonly("weights", &PredictorModel::weights)
      .def_readonly("intercept", &PredictorModel::intercept)
      .def_property_readonly("raw_weights", &PredictorModel::RawWeights)
      .def_property_readonly("raw_intercept", &PredictorModel::RawIntercept)
      .def_property_readonly("converged",
                             [](const PredictorModel& p) { return p.diagnostics.converged; })
      .def_property_readonly("iterations",
                             [](const PredictorModel& p) { return p.diagnostics.iterations; })
      .def_property_readonly("gradient_norm",
                             [](const PredictorModel& p) { return p.diagnostics.gradient_norm; })
      .def("predict_proba",
           [](const PredictorModel& model, const std::vector<double>& x) {
             return PredictProba(model, x);
           },
           py::arg("x"))
      .def("save", [](const PredictorModel& p, const std::string& path) { SaveModel(p, path); })
      .def_static("load", [](const std::string& path) { return LoadModel(path); })
      .def("__eq__", [](const PredictorModel& a, const PredictorModel& b) { return a == b; });

  m.def("fit_logistic",
        [](const std::vector<std::vector<double>>& x, const std::vector<bool>& y,
           const std::vector<std::string>& features, double ridge, double tolerance,
           int max_iterations) {
          return FitLogistic(MakeMatrix(x, y, features),
                             MakeFitOptions(ridge, tolerance, max_iterations));
        },
        py::arg("x"), py::arg("y"), py::arg("features"), py::arg("ridge") = 1e-6,
        py::arg("tolerance") = 1e-8, py::arg("max_iterations") = 100);
  m.def("cross_val_predict",
        [](const std::vector<std::vector<double>>& x, const std::vector<bool>& y,
           const std::vector<std::string>& features, int folds, std::uint64_t seed) {
          return CrossValPredict(MakeMatrix(x, y, features), folds, seed);
        },
        py::arg("x"), py::arg("y"), py::arg("features"), py::arg("folds") = 5,
        py::arg("seed") = 0);

  m.def("roc_auc",
        [](const std::vector<double>& scores, const std::vector<bool>& labels) {
          return RocAuc(scores, labels);
        },
        py::arg("scores"), py::arg("labels"), "None when labels hold a single class.");
  m.def("expected_accuracy",
        [](const std::vector<double>& probs) { return ExpectedAccuracy(probs); },
        py::arg("probabilities"));
  m.def("rmse_percent",
        [](const std::vector<double>& predicted, const std::vector<double>& actual,
           double in_domain) {
          const RmseResult r = RmsePercent(predicted, actual, in_domain);
          py::dict out;
          out["rmse_metric"] = r.rmse_metric;
          out["rmse_baseline"] = r.rmse_baseline;
          out["percent"] = r.percent ? py::object(py::float_(*r.percent)) : py::object(py::none());
          return out;
        },
        py::arg("predicted"), py::arg("actual"), py::arg("in_domain_accuracy"));

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          const int code = cli::Run(args, out, err);
          return std::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs a driftscope subcommand; returns (exit_code, stdout, stderr).");

#ifdef VERSION_INFO
#define DRIFTSCOPE_STR(x) #x
#define DRIFTSCOPE_XSTR(x) DRIFTSCOPE_STR(x)
  m.attr("__version__") = DRIFTSCOPE_XSTR(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
