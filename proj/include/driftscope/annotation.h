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

// Annotated-corpus data model and the driftscope/v1 JSON-lines reader.
//
// A corpus file is an optional header line
//
//   {"schema": "driftscope/v1", "dim": 768}
//
// followed by one example per line:
//
//   {"id": "r1", "domain": "books",
//    "tokens": [{"t": "dog", "pos": "NOUN", "content": true, "emb": [...]}],
//    "subwords": ["Ġdog"], "emb": [...], "correct": true}
//
// Without a header the embedding dimension is 0 and no "emb" field may occur.

#ifndef DRIFTSCOPE_ANNOTATION_H_
#define DRIFTSCOPE_ANNOTATION_H_

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace driftscope {

inline constexpr std::string_view kCorpusSchema = "driftscope/v1";

// The 17 Universal POS tags, plus the left-padding sentinel and the unknown
// tag. Numeric values are persisted in profiles; do not reorder.
enum class PosTag : std::uint8_t {
  kSep = 0,
  kAdj,
  kAdp,
  kAdv,
  kAux,
  kCconj,
  kDet,
  kIntj,
  kNoun,
  kNum,
  kPart,
  kPron,
  kPropn,
  kPunct,
  kSconj,
  kSym,
  kVerb,
  kX,
  kUnk,
};

inline constexpr int kNumUposTags = 17;
// Size of the symbol space a POS n-gram model predicts over: [SEP] + UPOS.
inline constexpr int kPosVocabSize = kNumUposTags + 1;
inline constexpr int kNumPosSymbols = kPosVocabSize + 1;  // incl. UNK

// Parses an input tag ("NOUN", ..., "UNK"). "[SEP]" is not a valid input tag.
std::optional<PosTag> ParsePosTag(std::string_view name);
std::string_view PosTagName(PosTag tag);

using Vector = std::vector<double>;

struct AnnotatedToken {
  std::string surface;
  PosTag pos = PosTag::kX;
  bool is_content = false;
  std::optional<Vector> embedding;

  bool operator==(const AnnotatedToken&) const = default;
};

struct AnnotatedExample {
  std::string id;
  std::string domain;
  std::vector<AnnotatedToken> tokens;
  std::optional<std::vector<std::string>> subword_tokens;
  std::optional<Vector> example_embedding;
  std::optional<bool> correct;

  bool operator==(const AnnotatedExample&) const = default;
};

// Parses and validates one record line. `dim` is the corpus embedding
// dimension; `line_number` is only used for error messages.
// Throws ParseError or ValidationError.
AnnotatedExample ParseExample(std::string_view line, std::size_t dim,
                              std::size_t line_number = 0);

// Serializes to one JSON line (no trailing newline). Field order is fixed.
std::string SerializeExample(const AnnotatedExample& example);
std::string SerializeHeader(std::size_t dim);

struct CorpusHandle {
  std::string source;
  std::size_t dim = 0;
  std::size_t count = 0;  // examples yielded so far; final after exhaustion
};

// Single-pass streaming reader. Each call to Next() parses one record; the
// reader keeps only the set of seen ids so duplicates can be rejected.
class CorpusReader {
 public:
  // Opens `path`; throws DataError if unreadable.
  explicit CorpusReader(const std::string& path);
  // Reads from an existing stream (not owned).
  CorpusReader(std::istream& in, std::string source_name);

  CorpusReader(const CorpusReader&) = delete;
  CorpusReader& operator=(const CorpusReader&) = delete;

  // Returns the next example, or nullopt at end of input. Throws the first
  // ParseError/ValidationError encountered.
  std::optional<AnnotatedExample> Next();

  const CorpusHandle& handle() const { return handle_; }

 private:
  void ReadHeader();
  bool NextRecordLine(std::string* line);

  std::unique_ptr<std::ifstream> owned_;
  std::istream* in_;
  CorpusHandle handle_;
  std::size_t line_number_ = 0;
  std::optional<std::string> pending_;  // first record if there was no header
  std::size_t pending_line_ = 0;
  std::unordered_set<std::string> seen_ids_;
};

// Reads a whole corpus into memory.
std::vector<AnnotatedExample> LoadCorpus(const std::string& path,
                                         CorpusHandle* handle = nullptr);

struct ValidationIssue {
  std::size_t line = 0;
  std::string message;
};

struct ValidationSummary {
  std::size_t dim = 0;
  std::size_t examples = 0;
  std::size_t tokens = 0;
  std::size_t content_tokens = 0;
  std::size_t examples_with_embedding = 0;
  std::size_t tokens_with_embedding = 0;
  std::size_t labeled = 0;
  std::vector<ValidationIssue> issues;

  // Percentages in [0, 100]; 0 for an empty corpus.
  double example_embedding_coverage() const;
  double token_embedding_coverage() const;
  double label_coverage() const;
  bool ok() const { return issues.empty(); }
};

// Report mode: never throws on bad records; every invalid line becomes an
// issue and counting continues with the next line.
ValidationSummary ValidateCorpus(std::istream& in);
ValidationSummary ValidateCorpus(const std::string& path);

}  // namespace driftscope

#endif  // DRIFTSCOPE_ANNOTATION_H_
