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

#include "driftscope/annotation.h"

#include <array>
#include <cmath>
#include <utility>

#include "driftscope/error.h"
#include "json.hpp"

namespace driftscope {
namespace {

using json = nlohmann::json;

constexpr std::array<std::string_view, kNumPosSymbols> kTagNames = {
    "[SEP]", "ADJ",   "ADP",   "ADV",  "AUX",   "CCONJ", "DET",
    "INTJ",  "NOUN",  "NUM",   "PART", "PRON",  "PROPN", "PUNCT",
    "SCONJ", "SYM",   "VERB",  "X",    "UNK",
};

bool IsBlank(std::string_view line) {
  for (char c : line) {
    if (c != ' ' && c != '\t' && c != '\r' && c != '\n') return false;
  }
  return true;
}

json ParseJsonLine(std::string_view line, std::size_t line_number) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(line_number, std::string("malformed JSON: ") + e.what());
  }
}

Vector ParseVector(const json& value, std::size_t dim, std::size_t line,
                   const std::string& field) {
  if (!value.is_array()) {
    throw ValidationError(line, field, "expected an array of numbers");
  }
  if (dim == 0) {
    throw ValidationError(line, field,
                          "embedding present but corpus declares dim 0");
  }
  if (value.size() != dim) {
    throw ValidationError(line, field,
                          "embedding has dimension " +
                              std::to_string(value.size()) + ", corpus dim is " +
                              std::to_string(dim));
  }
  Vector out;
  out.reserve(dim);
  double sq = 0.0;
  for (const json& x : value) {
    if (!x.is_number()) throw ValidationError(line, field, "non-numeric entry");
    double v = x.get<double>();
    if (!std::isfinite(v)) throw ValidationError(line, field, "non-finite entry");
    sq += v * v;
    out.push_back(v);
  }
  if (!(sq > 0.0) || !std::isfinite(sq)) {
    throw ValidationError(line, field, "embedding norm must be finite and > 0");
  }
  return out;
}

const json* Find(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

AnnotatedExample FromJson(const json& obj, std::size_t dim, std::size_t line) {
  if (!obj.is_object()) {
    throw ValidationError(line, "<record>", "expected a JSON object");
  }
  AnnotatedExample ex;

  const json* id = Find(obj, "id");
  if (id == nullptr) throw ValidationError(line, "id", "missing");
  if (!id->is_string()) throw ValidationError(line, "id", "expected a string");
  ex.id = id->get<std::string>();
  if (ex.id.empty()) throw ValidationError(line, "id", "must be nonempty");

  if (const json* domain = Find(obj, "domain")) {
    if (!domain->is_string()) {
      throw ValidationError(line, "domain", "expected a string");
    }
    ex.domain = domain->get<std::string>();
  }

  const json* tokens = Find(obj, "tokens");
  if (tokens == nullptr) throw ValidationError(line, "tokens", "missing");
  if (!tokens->is_array()) {
    throw ValidationError(line, "tokens", "expected an array");
  }
  if (tokens->empty()) throw ValidationError(line, "tokens", "must be nonempty");
  ex.tokens.reserve(tokens->size());
  for (std::size_t i = 0; i < tokens->size(); ++i) {
    const json& tok = (*tokens)[i];
    const std::string prefix = "tokens[" + std::to_string(i) + "]";
    if (!tok.is_object()) throw ValidationError(line, prefix, "expected an object");
    AnnotatedToken out;
    const json* t = Find(tok, "t");
    if (t == nullptr || !t->is_string()) {
      throw ValidationError(line, prefix + ".t", "missing or not a string");
    }
    out.surface = t->get<std::string>();
    const json* pos = Find(tok, "pos");
    if (pos == nullptr || !pos->is_string()) {
      throw ValidationError(line, prefix + ".pos", "missing or not a string");
    }
    auto tag = ParsePosTag(pos->get<std::string>());
    if (!tag) {
      throw ValidationError(line, prefix + ".pos",
                            "unknown POS tag '" + pos->get<std::string>() + "'");
    }
    out.pos = *tag;
    const json* content = Find(tok, "content");
    if (content == nullptr || !content->is_boolean()) {
      throw ValidationError(line, prefix + ".content", "missing or not a boolean");
    }
    out.is_content = content->get<bool>();
    if (const json* emb = Find(tok, "emb")) {
      out.embedding = ParseVector(*emb, dim, line, prefix + ".emb");
    }
    ex.tokens.push_back(std::move(out));
  }

  if (const json* subwords = Find(obj, "subwords")) {
    if (!subwords->is_array()) {
      throw ValidationError(line, "subwords", "expected an array of strings");
    }
    std::vector<std::string> pieces;
    pieces.reserve(subwords->size());
    for (const json& s : *subwords) {
      if (!s.is_string()) {
        throw ValidationError(line, "subwords", "expected an array of strings");
      }
      pieces.push_back(s.get<std::string>());
    }
    ex.subword_tokens = std::move(pieces);
  }

  if (const json* emb = Find(obj, "emb")) {
    ex.example_embedding = ParseVector(*emb, dim, line, "emb");
  }

  if (const json* correct = Find(obj, "correct")) {
    if (!correct->is_boolean()) {
      throw ValidationError(line, "correct", "expected a boolean");
    }
    ex.correct = correct->get<bool>();
  }
  return ex;
}

bool IsHeader(const json& obj) { return obj.is_object() && obj.contains("schema"); }

std::size_t ParseHeader(const json& obj, std::size_t line) {
  const json& schema = obj["schema"];
  if (!schema.is_string() || schema.get<std::string>() != kCorpusSchema) {
    throw ValidationError(line, "schema",
                          "unsupported corpus schema " + schema.dump() +
                              " (expected \"" + std::string(kCorpusSchema) +
                              "\")");
  }
  const json* dim = Find(obj, "dim");
  if (dim == nullptr) return 0;
  if (!dim->is_number_unsigned()) {
    throw ValidationError(line, "dim", "expected a nonnegative integer");
  }
  return dim->get<std::size_t>();
}

json VectorToJson(const Vector& v) {
  json arr = json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

}  // namespace

std::optional<PosTag> ParsePosTag(std::string_view name) {
  for (int i = 1; i < kNumPosSymbols; ++i) {
    if (kTagNames[i] == name) return static_cast<PosTag>(i);
  }
  return std::nullopt;
}

std::string_view PosTagName(PosTag tag) {
  return kTagNames[static_cast<std::size_t>(tag)];
}

AnnotatedExample ParseExample(std::string_view line, std::size_t dim,
                              std::size_t line_number) {
  return FromJson(ParseJsonLine(line, line_number), dim, line_number);
}

std::string SerializeExample(const AnnotatedExample& example) {
  // ordered_json keeps the documented field order.
  nlohmann::ordered_json obj;
  obj["id"] = example.id;
  obj["domain"] = example.domain;
  nlohmann::ordered_json tokens = nlohmann::ordered_json::array();
  for (const AnnotatedToken& tok : example.tokens) {
    nlohmann::ordered_json t;
    t["t"] = tok.surface;
    t["pos"] = std::string(PosTagName(tok.pos));
    t["content"] = tok.is_content;
    if (tok.embedding) t["emb"] = VectorToJson(*tok.embedding);
    tokens.push_back(std::move(t));
  }
  obj["tokens"] = std::move(tokens);
  if (example.subword_tokens) obj["subwords"] = *example.subword_tokens;
  if (example.example_embedding) {
    obj["emb"] = VectorToJson(*example.example_embedding);
  }
  if (example.correct) obj["correct"] = *example.correct;
  return obj.dump();
}

std::string SerializeHeader(std::size_t dim) {
  nlohmann::ordered_json obj;
  obj["schema"] = std::string(kCorpusSchema);
  obj["dim"] = dim;
  return obj.dump();
}

CorpusReader::CorpusReader(const std::string& path)
    : owned_(std::make_unique<std::ifstream>(path)), in_(owned_.get()) {
  if (!*owned_) throw DataError("cannot open corpus '" + path + "'");
  handle_.source = path;
  ReadHeader();
}

CorpusReader::CorpusReader(std::istream& in, std::string source_name)
    : in_(&in) {
  handle_.source = std::move(source_name);
  ReadHeader();
}

bool CorpusReader::NextRecordLine(std::string* line) {
  while (std::getline(*in_, *line)) {
    ++line_number_;
    if (!IsBlank(*line)) return true;
  }
  return false;
}

void CorpusReader::ReadHeader() {
  std::string line;
  if (!NextRecordLine(&line)) return;
  json obj = ParseJsonLine(line, line_number_);
  if (IsHeader(obj)) {
    handle_.dim = ParseHeader(obj, line_number_);
  } else {
    pending_ = std::move(line);
    pending_line_ = line_number_;
  }
}

std::optional<AnnotatedExample> CorpusReader::Next() {
  std::string line;
  std::size_t number = 0;
  if (pending_) {
    line = std::move(*pending_);
    pending_.reset();
    number = pending_line_;
  } else {
    if (!NextRecordLine(&line)) return std::nullopt;
    number = line_number_;
  }
  AnnotatedExample ex = ParseExample(line, handle_.dim, number);
  if (!seen_ids_.insert(ex.id).second) {
    throw ValidationError(number, "id", "duplicate id '" + ex.id + "'");
  }
  ++handle_.count;
  return ex;
}

std::vector<AnnotatedExample> LoadCorpus(const std::string& path,
                                         CorpusHandle* handle) {
  CorpusReader reader(path);
  std::vector<AnnotatedExample> out;
  while (auto ex = reader.Next()) out.push_back(std::move(*ex));
  if (handle != nullptr) *handle = reader.handle();
  return out;
}

double ValidationSummary::example_embedding_coverage() const {
  return examples ? 100.0 * examples_with_embedding / examples : 0.0;
}

double ValidationSummary::token_embedding_coverage() const {
  return tokens ? 100.0 * tokens_with_embedding / tokens : 0.0;
}

double ValidationSummary::label_coverage() const {
  return examples ? 100.0 * labeled / examples : 0.0;
}

ValidationSummary ValidateCorpus(std::istream& in) {
  ValidationSummary summary;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t number = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++number;
    if (IsBlank(line)) continue;
    try {
      json obj = ParseJsonLine(line, number);
      if (first) {
        first = false;
        if (IsHeader(obj)) {
          summary.dim = ParseHeader(obj, number);
          continue;
        }
      }
      AnnotatedExample ex = FromJson(obj, summary.dim, number);
      if (!seen.insert(ex.id).second) {
        throw ValidationError(number, "id", "duplicate id '" + ex.id + "'");
      }
      ++summary.examples;
      summary.tokens += ex.tokens.size();
      for (const AnnotatedToken& tok : ex.tokens) {
        if (tok.is_content) ++summary.content_tokens;
        if (tok.embedding) ++summary.tokens_with_embedding;
      }
      if (ex.example_embedding) ++summary.examples_with_embedding;
      if (ex.correct) ++summary.labeled;
    } catch (const DataError& e) {
      summary.issues.push_back({number, e.what()});
    }
  }
  return summary;
}

ValidationSummary ValidateCorpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ValidationSummary summary;
    summary.issues.push_back({0, "cannot open corpus '" + path + "'"});
    return summary;
  }
  return ValidateCorpus(in);
}

}  // namespace driftscope
