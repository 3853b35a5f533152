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

// Drift score files. One JSON object per line:
//
//   {"id": "r1", "domain": "books", "correct": true,
//    "metrics": {"vocabulary": 4.2, ..., "semantic": null},
//    "flags": {"semantic": "no-embeddings"}}
//
// Every metric name is always present under "metrics"; "flags" holds a
// reason for each null. The CSV form has one column per metric and an empty
// cell for an absent value.

#ifndef DRIFTSCOPE_SCORE_IO_H_
#define DRIFTSCOPE_SCORE_IO_H_

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "driftscope/drift_metrics.h"

namespace driftscope {

struct ScoredExample {
  DriftVector drift;
  std::string domain;
  std::optional<bool> correct;

  bool operator==(const ScoredExample&) const = default;
};

std::string SerializeScore(const ScoredExample& scored);
ScoredExample ParseScore(std::string_view line, std::size_t line_number = 0);

void WriteCsvHeader(std::ostream& out);
void WriteCsvRow(const ScoredExample& scored, std::ostream& out);

std::vector<ScoredExample> ReadScores(std::istream& in);
std::vector<ScoredExample> ReadScores(const std::string& path);

}  // namespace driftscope

#endif  // DRIFTSCOPE_SCORE_IO_H_
