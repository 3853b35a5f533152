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

// Sufficient statistics of a training corpus.
//
// A TrainProfile holds everything the drift metrics need from the training
// side: content-word and subword unigram counts, POS 5-gram counts over
// [SEP]-padded tag sequences, per-type sums of unit-normed token embeddings,
// and the sum of unit-normed example embeddings. All tables are sums, so
// profiles of disjoint shards merge by pointwise addition.

#ifndef DRIFTSCOPE_PROFILE_H_
#define DRIFTSCOPE_PROFILE_H_

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "driftscope/annotation.h"

namespace driftscope {

inline constexpr double kDefaultOovFloor = 1e-10;
inline constexpr double kDefaultAddK = 0.1;
inline constexpr std::uint32_t kProfileFormatVersion = 1;

struct UnigramTable {
  std::map<std::string, std::uint64_t, std::less<>> counts;
  std::uint64_t total = 0;

  void Add(std::string_view word, std::uint64_t n = 1);
  std::uint64_t Count(std::string_view word) const;
  // ln(count/total) for seen words, ln(oov_floor) otherwise.
  double LogProb(std::string_view word, double oov_floor = kDefaultOovFloor) const;

  bool operator==(const UnigramTable&) const = default;
};

// Four preceding tags, oldest first.
using PosContext = std::array<PosTag, 4>;

inline constexpr PosContext kSepContext = {PosTag::kSep, PosTag::kSep,
                                           PosTag::kSep, PosTag::kSep};

// Shifts `next` into the context window.
PosContext Advance(const PosContext& context, PosTag next);

class PosNgramTable {
 public:
  static constexpr int kOrder = 5;

  // Counts one observed transition context -> next.
  void Add(const PosContext& context, PosTag next, std::uint64_t n = 1);

  std::uint64_t ContextCount(const PosContext& context) const;
  std::uint64_t TransitionCount(const PosContext& context, PosTag next) const;

  // Add-k smoothed ln P(next | context) over the fixed kPosVocabSize symbols.
  double LogProb(const PosContext& context, PosTag next,
                 double add_k = kDefaultAddK) const;

  void Merge(const PosNgramTable& other);

  // Packed keys, exposed for persistence.
  static std::uint32_t PackContext(const PosContext& context);
  static PosContext UnpackContext(std::uint32_t key);
  const std::map<std::uint32_t, std::uint64_t>& context_counts() const {
    return context_counts_;
  }
  const std::map<std::uint32_t, std::uint64_t>& transition_counts() const {
    return transition_counts_;
  }
  // Key of a (context, next) pair in transition_counts().
  static std::uint32_t PackTransition(const PosContext& context, PosTag next);

  // Replaces both tables; throws FormatError unless every context count
  // equals the sum of its transition counts.
  void SetRaw(std::map<std::uint32_t, std::uint64_t> contexts,
              std::map<std::uint32_t, std::uint64_t> transitions);

  bool operator==(const PosNgramTable&) const = default;

 private:
  std::map<std::uint32_t, std::uint64_t> context_counts_;
  std::map<std::uint32_t, std::uint64_t> transition_counts_;
};

// Sum of unit-normed vectors and how many were added.
struct NormedSum {
  Vector sum;
  std::uint64_t count = 0;

  // Adds v / ||v||. v must be nonzero and match the dimension (if set).
  void AddNormed(std::span<const double> v);
  void Merge(const NormedSum& other);
  // sum / count; empty vector when count == 0.
  Vector Mean() const;

  bool operator==(const NormedSum&) const = default;
};

using TokenEmbeddingTable = std::map<std::string, NormedSum, std::less<>>;

struct TrainProfile {
  std::uint32_t format_version = kProfileFormatVersion;
  std::size_t dim = 0;
  std::uint64_t example_count = 0;
  std::set<std::string> domains;

  UnigramTable content_unigrams;
  UnigramTable subword_unigrams;
  PosNgramTable pos_ngrams;
  TokenEmbeddingTable token_embeddings;
  NormedSum corpus_embedding;

  bool operator==(const TrainProfile&) const = default;
};

// Accumulates examples one at a time; constant memory per example.
class ProfileBuilder {
 public:
  explicit ProfileBuilder(std::size_t dim) { profile_.dim = dim; }

  void Add(const AnnotatedExample& example);
  std::uint64_t count() const { return profile_.example_count; }
  // Throws DataError if no example was added.
  TrainProfile Finish() &&;

 private:
  TrainProfile profile_;
};

TrainProfile BuildProfile(std::span<const AnnotatedExample> corpus,
                          std::size_t dim);
// Streams a corpus file straight into a profile.
TrainProfile BuildProfileFromFile(const std::string& path);

// Pointwise sum. Throws DataError on dimension or version mismatch.
TrainProfile MergeProfiles(const TrainProfile& a, const TrainProfile& b);

double ContentUnigramLogProb(const TrainProfile& profile, std::string_view word,
                             double oov_floor = kDefaultOovFloor);
double PosNgramLogProb(const TrainProfile& profile, const PosContext& context,
                       PosTag next, double add_k = kDefaultAddK);
std::optional<Vector> TokenMeanNormedEmbedding(const TrainProfile& profile,
                                               std::string_view word);

// Binary persistence; see docs/formats.md. Throws FormatError on truncation,
// corruption, or an unsupported version.
void SaveProfile(const TrainProfile& profile, std::ostream& out);
void SaveProfile(const TrainProfile& profile, const std::string& path);
TrainProfile LoadProfile(std::istream& in);
TrainProfile LoadProfile(const std::string& path);

}  // namespace driftscope

#endif  // DRIFTSCOPE_PROFILE_H_
