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

#include "driftscope/cli.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "driftscope/annotation.h"
#include "driftscope/drift_metrics.h"
#include "driftscope/error.h"
#include "driftscope/evaluation.h"
#include "driftscope/predictor.h"
#include "driftscope/profile.h"
#include "driftscope/score_io.h"
#include "json.hpp"

namespace driftscope::cli {
namespace {

using ojson = nlohmann::ordered_json;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::vector<std::string> inputs;
  std::vector<std::string> merge;
  std::string output;
  std::string profile;
  std::string scores;
  std::string model;
  std::string in_domain;
  std::vector<std::string> out_of_domain;
  std::string csv;
  std::string metrics = "all";
  std::string format = "jsonl";
  int folds = 5;
  std::uint64_t seed = 0;
  double oov_floor = kDefaultOovFloor;
  double add_k = kDefaultAddK;
  double ridge = FitOptions{}.ridge;
  double tolerance = FitOptions{}.tolerance;
  int max_iterations = FitOptions{}.max_iterations;
  std::optional<double> in_domain_accuracy;
};

// --metrics is an option value, so a bad name is a usage error.
std::vector<Metric> SelectedMetrics(const RunConfig& c) {
  try {
    return ParseMetricList(c.metrics);
  } catch (const DataError& e) {
    throw UsageError(std::string("--metrics: ") + e.what());
  }
}

// Writes via a temp file + rename so a failed command leaves no partial
// output behind.
void WriteFileAtomically(const std::string& path,
                         const std::function<void(std::ostream&)>& write) {
  const std::string tmp = path + ".tmp";
  try {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + tmp + "' for writing");
    write(out);
    out.close();
    if (!out) throw DataError("failed writing '" + tmp + "'");
  } catch (...) {
    std::remove(tmp.c_str());
    throw;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw DataError("cannot move output into place at '" + path + "'");
  }
}

void CheckScoringOptions(const RunConfig& c) {
  if (!(c.oov_floor > 0.0 && c.oov_floor < 1.0)) {
    throw UsageError("--oov-floor must lie in (0, 1)");
  }
  if (!(c.add_k > 0.0)) throw UsageError("--smoothing-k must be > 0");
}

FitOptions MakeFitOptions(const RunConfig& c) {
  if (!(c.ridge >= 0.0)) throw UsageError("--ridge must be >= 0");
  if (!(c.tolerance > 0.0)) throw UsageError("--tolerance must be > 0");
  if (c.max_iterations < 1) throw UsageError("--max-iterations must be >= 1");
  FitOptions options;
  options.ridge = c.ridge;
  options.tolerance = c.tolerance;
  options.max_iterations = c.max_iterations;
  return options;
}

int BuildProfileCommand(const RunConfig& c, std::ostream& out) {
  if (c.inputs.empty() && c.merge.empty()) {
    throw UsageError("build-profile needs --input and/or --merge");
  }
  std::optional<TrainProfile> profile;
  auto fold_in = [&](TrainProfile p) {
    profile = profile ? MergeProfiles(*profile, p) : std::move(p);
  };
  if (!c.inputs.empty()) {
    std::optional<ProfileBuilder> builder;
    for (const std::string& path : c.inputs) {
      CorpusReader reader(path);
      if (!builder) {
        builder.emplace(reader.handle().dim);
      }
      try {
        while (auto ex = reader.Next()) builder->Add(*ex);
      } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
      }
    }
    fold_in(std::move(*builder).Finish());
  }
  for (const std::string& path : c.merge) fold_in(LoadProfile(path));

  SaveProfile(*profile, c.output);
  std::uint64_t content_tokens = profile->content_unigrams.total;
  ojson summary;
  summary["command"] = "build-profile";
  summary["output"] = c.output;
  summary["examples"] = profile->example_count;
  summary["dim"] = profile->dim;
  summary["content_tokens"] = content_tokens;
  summary["content_vocab"] = profile->content_unigrams.counts.size();
  summary["subword_tokens"] = profile->subword_unigrams.total;
  summary["subword_vocab"] = profile->subword_unigrams.counts.size();
  summary["pos_contexts"] = profile->pos_ngrams.context_counts().size();
  summary["token_embedding_types"] = profile->token_embeddings.size();
  summary["example_embeddings"] = profile->corpus_embedding.count;
  summary["example_embedding_coverage"] =
      100.0 * static_cast<double>(profile->corpus_embedding.count) /
      static_cast<double>(profile->example_count);
  out << summary.dump() << '\n';
  return kExitOk;
}

int ScoreCommand(const RunConfig& c, std::ostream& out) {
  CheckScoringOptions(c);
  if (c.format != "jsonl" && c.format != "csv") {
    throw UsageError("--format must be jsonl or csv");
  }
  const std::vector<Metric> selection = SelectedMetrics(c);
  const TrainProfile profile = LoadProfile(c.profile);
  const ScoringOptions options{c.oov_floor, c.add_k};

  std::size_t count = 0;
  WriteFileAtomically(c.output, [&](std::ostream& sink) {
    if (c.format == "csv") WriteCsvHeader(sink);
    for (const std::string& path : c.inputs) {
      CorpusReader reader(path);
      try {
        while (auto ex = reader.Next()) {
          ScoredExample scored{ScoreExample(*ex, profile, selection, options),
                               ex->domain, ex->correct};
          if (c.format == "csv") {
            WriteCsvRow(scored, sink);
          } else {
            sink << SerializeScore(scored) << '\n';
          }
          ++count;
        }
      } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
      }
    }
  });
  ojson summary;
  summary["command"] = "score";
  summary["output"] = c.output;
  summary["examples"] = count;
  std::vector<std::string> names;
  for (Metric m : selection) names.emplace_back(MetricName(m));
  summary["metrics"] = names;
  out << summary.dump() << '\n';
  return kExitOk;
}

// "name=path" or just "path" (name = file stem).
std::pair<std::string, std::string> SplitNamed(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq != std::string::npos && eq > 0) return {arg.substr(0, eq), arg.substr(eq + 1)};
  return {std::filesystem::path(arg).stem().string(), arg};
}

NamedMatrix LoadDataset(const std::string& arg, std::span<const Metric> features) {
  auto [name, path] = SplitNamed(arg);
  try {
    const std::vector<ScoredExample> scores = ReadScores(path);
    std::vector<DriftVector> drift;
    std::vector<std::optional<bool>> labels;
    drift.reserve(scores.size());
    for (const ScoredExample& s : scores) {
      drift.push_back(s.drift);
      labels.push_back(s.correct);
    }
    NamedMatrix named;
    named.name = name;
    named.matrix = AssembleFeatures(drift, labels, features);
    named.excluded = named.matrix.excluded;
    return named;
  } catch (const DataError& e) {
    throw DataError("dataset '" + name + "': " + e.what());
  }
}

ojson DiagnosticsJson(const PredictorModel& model) {
  ojson d;
  d["iterations"] = model.diagnostics.iterations;
  d["gradient_norm"] = model.diagnostics.gradient_norm;
  d["log_likelihood"] = model.diagnostics.log_likelihood;
  d["converged"] = model.diagnostics.converged;
  return d;
}

int FitCommand(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const FitOptions options = MakeFitOptions(c);
  const std::vector<Metric> features = SelectedMetrics(c);
  const NamedMatrix data = LoadDataset(c.scores, features);
  if (data.excluded > 0) {
    err << "fit: excluded " << data.excluded
        << " example(s) missing a selected metric\n";
  }
  PredictorModel model;
  try {
    model = FitLogistic(data.matrix, options);
  } catch (const DataError& e) {
    throw DataError("dataset '" + data.name + "': " + e.what());
  }
  // Written even when not converged.
  WriteFileAtomically(c.output, [&](std::ostream& sink) { SaveModel(model, sink); });
  ojson summary;
  summary["command"] = "fit";
  summary["output"] = c.output;
  summary["rows"] = data.matrix.rows();
  summary["excluded"] = data.excluded;
  summary["features"] = model.feature_names;
  summary["weights"] = model.weights;
  summary["intercept"] = model.intercept;
  summary["diagnostics"] = DiagnosticsJson(model);
  out << summary.dump() << '\n';
  if (!model.diagnostics.converged) {
    err << "fit: IRLS did not converge after " << model.diagnostics.iterations
        << " iterations (gradient norm " << model.diagnostics.gradient_norm << ")\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int EvaluateCommand(const RunConfig& c, std::ostream& out) {
  if (c.folds < 2) throw UsageError("--folds must be >= 2");
  if (c.in_domain_accuracy &&
      !(*c.in_domain_accuracy >= 0.0 && *c.in_domain_accuracy <= 1.0)) {
    throw UsageError("--in-domain-accuracy must lie in [0, 1]");
  }
  EvaluationOptions options;
  options.folds = c.folds;
  options.seed = c.seed;
  options.fit = MakeFitOptions(c);
  options.in_domain_accuracy = c.in_domain_accuracy;

  const PredictorModel model = LoadModel(c.model);
  std::vector<Metric> features;
  for (const std::string& name : model.feature_names) features.push_back(*ParseMetric(name));

  const NamedMatrix in_domain = LoadDataset(c.in_domain, features);
  std::vector<NamedMatrix> ood;
  for (const std::string& arg : c.out_of_domain) ood.push_back(LoadDataset(arg, features));

  EvalReport report;
  try {
    report = Evaluate(model, in_domain, ood, options);
  } catch (const DataError& e) {
    throw DataError("dataset '" + in_domain.name + "': " + e.what());
  }
  WriteFileAtomically(c.output, [&](std::ostream& sink) { WriteReportJson(report, sink); });
  if (!c.csv.empty()) {
    WriteFileAtomically(c.csv, [&](std::ostream& sink) { WriteReportCsv(report, sink); });
  }
  ojson summary;
  summary["command"] = "evaluate";
  summary["output"] = c.output;
  summary["datasets"] = report.datasets.size();
  summary["mean_in_domain_roc_auc"] =
      report.mean_in_domain_roc_auc ? ojson(*report.mean_in_domain_roc_auc) : ojson();
  summary["mean_out_of_domain_roc_auc"] = report.mean_out_of_domain_roc_auc
                                              ? ojson(*report.mean_out_of_domain_roc_auc)
                                              : ojson();
  summary["rmse_percent"] =
      report.rmse && report.rmse->percent ? ojson(*report.rmse->percent) : ojson();
  out << summary.dump() << '\n';
  return kExitOk;
}

int ValidateCommand(const RunConfig& c, std::ostream& out, std::ostream& err) {
  bool ok = true;
  for (const std::string& path : c.inputs) {
    const ValidationSummary s = ValidateCorpus(path);
    ojson j;
    j["command"] = "validate";
    j["input"] = path;
    j["dim"] = s.dim;
    j["examples"] = s.examples;
    j["tokens"] = s.tokens;
    j["content_tokens"] = s.content_tokens;
    j["example_embedding_coverage"] = s.example_embedding_coverage();
    j["token_embedding_coverage"] = s.token_embedding_coverage();
    j["label_coverage"] = s.label_coverage();
    j["violations"] = s.issues.size();
    out << j.dump() << '\n';
    for (const ValidationIssue& issue : s.issues) err << path << ": " << issue.message << '\n';
    ok = ok && s.ok();
  }
  return ok ? kExitOk : kExitData;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"driftscope: vocabulary, structural and semantic drift metrics"};
  app.require_subcommand(1);

  auto* build = app.add_subcommand("build-profile", "Build a training profile");
  build->add_option("--input,-i", c.inputs, "Annotated training corpus (repeatable)");
  build->add_option("--merge", c.merge, "Existing profile to merge in (repeatable)");
  build->add_option("--output,-o", c.output, "Profile file to write")->required();

  auto* score = app.add_subcommand("score", "Score examples against a profile");
  score->add_option("--profile,-p", c.profile, "Training profile")->required();
  score->add_option("--input,-i", c.inputs, "Annotated corpus (repeatable)")->required();
  score->add_option("--output,-o", c.output, "Score file to write")->required();
  score->add_option("--metrics,-m", c.metrics, "Comma-separated metrics or 'all'");
  score->add_option("--format", c.format, "jsonl or csv");
  score->add_option("--oov-floor", c.oov_floor, "Probability assigned to unseen words");
  score->add_option("--smoothing-k", c.add_k, "Add-k constant for the POS 5-gram model");

  auto* fit = app.add_subcommand("fit", "Fit a logistic performance predictor");
  fit->add_option("--scores,-s", c.scores, "Labeled in-domain score file")->required();
  fit->add_option("--output,-o", c.output, "Model file to write")->required();
  fit->add_option("--metrics,-m", c.metrics, "Comma-separated features or 'all'");

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a predictor");
  evaluate->add_option("--model", c.model, "Model file from 'fit'")->required();
  evaluate->add_option("--in-domain", c.in_domain, "In-domain score file ([NAME=]PATH)")
      ->required();
  evaluate->add_option("--ood", c.out_of_domain,
                       "Out-of-domain score file ([NAME=]PATH, repeatable)");
  evaluate->add_option("--output,-o", c.output, "JSON report to write")->required();
  evaluate->add_option("--csv", c.csv, "Optional CSV report");
  evaluate->add_option("--folds", c.folds, "Cross-validation folds for in-domain rows");
  evaluate->add_option("--seed", c.seed, "Fold shuffle seed");
  evaluate->add_option("--in-domain-accuracy", c.in_domain_accuracy,
                       "Override the no-drop baseline accuracy");

  for (CLI::App* sub : {fit, evaluate}) {
    sub->add_option("--ridge", c.ridge, "L2 penalty on standardized weights");
    sub->add_option("--tolerance", c.tolerance, "Gradient infinity-norm tolerance");
    sub->add_option("--max-iterations", c.max_iterations, "IRLS iteration cap");
  }

  auto* validate = app.add_subcommand("validate", "Validate annotated corpora");
  validate->add_option("--input,-i", c.inputs, "Annotated corpus (repeatable)")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    if (!app.get_subcommands().empty()) err << app.get_subcommands()[0]->help();
    return kExitUsage;
  }

  try {
    if (build->parsed()) return BuildProfileCommand(c, out);
    if (score->parsed()) return ScoreCommand(c, out);
    if (fit->parsed()) return FitCommand(c, out, err);
    if (evaluate->parsed()) return EvaluateCommand(c, out);
    if (validate->parsed()) return ValidateCommand(c, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace driftscope::cli
