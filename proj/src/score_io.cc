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

#include "driftscope/score_io.h"

#include <cmath>
#include <fstream>

#include "driftscope/error.h"
#include "json.hpp"

namespace driftscope {
namespace {

using ojson = nlohmann::ordered_json;

// RFC 4180 quoting, only when needed.
std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string SerializeScore(const ScoredExample& scored) {
  ojson j;
  j["id"] = scored.drift.id;
  j["domain"] = scored.domain;
  j["correct"] = scored.correct ? ojson(*scored.correct) : ojson(nullptr);
  ojson metrics = ojson::object();
  ojson flags = ojson::object();
  for (Metric m : kAllMetrics) {
    const MetricResult& r = scored.drift[m];
    const std::string name(MetricName(m));
    if (r.present()) {
      metrics[name] = *r.value;
    } else {
      metrics[name] = nullptr;
      flags[name] = std::string(AbsenceReasonName(r.reason));
    }
  }
  j["metrics"] = std::move(metrics);
  j["flags"] = std::move(flags);
  return j.dump();
}

ScoredExample ParseScore(std::string_view line, std::size_t line_number) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line_number, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError(line_number, "<record>", "expected an object");
  ScoredExample out;
  auto id = j.find("id");
  if (id == j.end() || !id->is_string()) {
    throw ValidationError(line_number, "id", "missing or not a string");
  }
  out.drift.id = id->get<std::string>();
  if (auto d = j.find("domain"); d != j.end() && d->is_string()) {
    out.domain = d->get<std::string>();
  }
  if (auto c = j.find("correct"); c != j.end() && !c->is_null()) {
    if (!c->is_boolean()) throw ValidationError(line_number, "correct", "expected a boolean");
    out.correct = c->get<bool>();
  }
  auto metrics = j.find("metrics");
  if (metrics == j.end() || !metrics->is_object()) {
    throw ValidationError(line_number, "metrics", "missing or not an object");
  }
  const nlohmann::json empty = nlohmann::json::object();
  auto flags_it = j.find("flags");
  const nlohmann::json& flags =
      flags_it != j.end() && flags_it->is_object() ? *flags_it : empty;
  for (Metric m : kAllMetrics) {
    const std::string name(MetricName(m));
    auto v = metrics->find(name);
    if (v != metrics->end() && !v->is_null()) {
      if (!v->is_number() || !std::isfinite(v->get<double>())) {
        throw ValidationError(line_number, "metrics." + name, "expected a finite number");
      }
      out.drift[m] = MetricResult::Of(v->get<double>());
      continue;
    }
    auto f = flags.find(name);
    std::optional<AbsenceReason> reason;
    if (f != flags.end() && f->is_string()) reason = ParseAbsenceReason(f->get<std::string>());
    if (!reason) {
      throw ValidationError(line_number, "flags." + name,
                            "absent metric without a valid reason code");
    }
    out.drift[m] = MetricResult::Absent(*reason);
  }
  return out;
}

void WriteCsvHeader(std::ostream& out) {
  out << "id,domain,correct";
  for (Metric m : kAllMetrics) out << ',' << MetricName(m);
  out << '\n';
}

void WriteCsvRow(const ScoredExample& scored, std::ostream& out) {
  out << CsvField(scored.drift.id) << ',' << CsvField(scored.domain) << ',';
  if (scored.correct) out << (*scored.correct ? "true" : "false");
  for (Metric m : kAllMetrics) {
    out << ',';
    const MetricResult& r = scored.drift[m];
    if (r.present()) out << nlohmann::json(*r.value).dump();
  }
  out << '\n';
}

std::vector<ScoredExample> ReadScores(std::istream& in) {
  std::vector<ScoredExample> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(ParseScore(line, number));
  }
  return out;
}

std::vector<ScoredExample> ReadScores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open score file '" + path + "'");
  return ReadScores(in);
}

}  // namespace driftscope
