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

#include "driftscope/profile.h"

#include <cmath>
#include <utility>

#include "driftscope/error.h"

namespace driftscope {

void UnigramTable::Add(std::string_view word, std::uint64_t n) {
  if (n == 0) return;
  auto it = counts.find(word);
  if (it == counts.end()) {
    counts.emplace(std::string(word), n);
  } else {
    it->second += n;
  }
  total += n;
}

std::uint64_t UnigramTable::Count(std::string_view word) const {
  auto it = counts.find(word);
  return it == counts.end() ? 0 : it->second;
}

double UnigramTable::LogProb(std::string_view word, double oov_floor) const {
  const std::uint64_t c = Count(word);
  if (c == 0 || total == 0) return std::log(oov_floor);
  return std::log(static_cast<double>(c) / static_cast<double>(total));
}

PosContext Advance(const PosContext& context, PosTag next) {
  return {context[1], context[2], context[3], next};
}

std::uint32_t PosNgramTable::PackContext(const PosContext& context) {
  std::uint32_t key = 0;
  for (PosTag tag : context) key = (key << 5) | static_cast<std::uint32_t>(tag);
  return key;
}

PosContext PosNgramTable::UnpackContext(std::uint32_t key) {
  PosContext context;
  for (int i = 3; i >= 0; --i) {
    context[i] = static_cast<PosTag>(key & 0x1f);
    key >>= 5;
  }
  return context;
}

std::uint32_t PosNgramTable::PackTransition(const PosContext& context,
                                            PosTag next) {
  return (PackContext(context) << 5) | static_cast<std::uint32_t>(next);
}

void PosNgramTable::Add(const PosContext& context, PosTag next,
                        std::uint64_t n) {
  if (n == 0) return;
  context_counts_[PackContext(context)] += n;
  transition_counts_[PackTransition(context, next)] += n;
}

std::uint64_t PosNgramTable::ContextCount(const PosContext& context) const {
  auto it = context_counts_.find(PackContext(context));
  return it == context_counts_.end() ? 0 : it->second;
}

std::uint64_t PosNgramTable::TransitionCount(const PosContext& context,
                                             PosTag next) const {
  auto it = transition_counts_.find(PackTransition(context, next));
  return it == transition_counts_.end() ? 0 : it->second;
}

double PosNgramTable::LogProb(const PosContext& context, PosTag next,
                              double add_k) const {
  // UNK never receives counts, so it takes only the smoothing mass.
  const double transitions =
      next == PosTag::kUnk ? 0.0 : static_cast<double>(TransitionCount(context, next));
  const double contexts = static_cast<double>(ContextCount(context));
  return std::log((transitions + add_k) / (contexts + add_k * kPosVocabSize));
}

void PosNgramTable::Merge(const PosNgramTable& other) {
  for (const auto& [key, n] : other.context_counts_) context_counts_[key] += n;
  for (const auto& [key, n] : other.transition_counts_) transition_counts_[key] += n;
}

void PosNgramTable::SetRaw(std::map<std::uint32_t, std::uint64_t> contexts,
                           std::map<std::uint32_t, std::uint64_t> transitions) {
  std::map<std::uint32_t, std::uint64_t> sums;
  for (const auto& [key, n] : transitions) {
    const auto next = key & 0x1f;
    if (n == 0 || next == 0 || next >= static_cast<std::uint32_t>(PosTag::kUnk)) {
      throw FormatError("invalid POS transition entry");
    }
    sums[key >> 5] += n;
  }
  if (sums != contexts) {
    throw FormatError("POS context counts disagree with transition counts");
  }
  context_counts_ = std::move(contexts);
  transition_counts_ = std::move(transitions);
}

void NormedSum::AddNormed(std::span<const double> v) {
  if (count > 0 && v.size() != sum.size()) {
    throw ValidationError(0, "emb", "embedding dimension mismatch");
  }
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double norm = std::sqrt(sq);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw ValidationError(0, "emb", "embedding norm must be finite and > 0");
  }
  if (count == 0) sum.assign(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) sum[i] += v[i] / norm;
  ++count;
}

void NormedSum::Merge(const NormedSum& other) {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  if (other.sum.size() != sum.size()) {
    throw DataError("embedding dimension mismatch while merging");
  }
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += other.sum[i];
  count += other.count;
}

Vector NormedSum::Mean() const {
  Vector mean;
  if (count == 0) return mean;
  mean.reserve(sum.size());
  for (double x : sum) mean.push_back(x / static_cast<double>(count));
  return mean;
}

void ProfileBuilder::Add(const AnnotatedExample& example) {
  TrainProfile& p = profile_;
  auto check_dim = [&](const Vector& v) {
    if (v.size() != p.dim) {
      throw ValidationError(0, "emb",
                            "example '" + example.id + "' has a " +
                                std::to_string(v.size()) +
                                "-dim embedding, profile dim is " +
                                std::to_string(p.dim));
    }
  };

  ++p.example_count;
  p.domains.insert(example.domain);

  for (const AnnotatedToken& tok : example.tokens) {
    if (!tok.is_content) continue;
    p.content_unigrams.Add(tok.surface);
    if (tok.embedding) {
      check_dim(*tok.embedding);
      p.token_embeddings[tok.surface].AddNormed(*tok.embedding);
    }
  }
  if (example.subword_tokens) {
    for (const std::string& piece : *example.subword_tokens) {
      p.subword_unigrams.Add(piece);
    }
  }
  if (example.tokens.size() >= 2) {
    PosContext context = kSepContext;
    for (const AnnotatedToken& tok : example.tokens) {
      if (tok.pos != PosTag::kUnk) p.pos_ngrams.Add(context, tok.pos);
      context = Advance(context, tok.pos);
    }
  }
  if (example.example_embedding) {
    check_dim(*example.example_embedding);
    p.corpus_embedding.AddNormed(*example.example_embedding);
  }
}

TrainProfile ProfileBuilder::Finish() && {
  if (profile_.example_count == 0) {
    throw DataError("cannot build a profile from an empty corpus");
  }
  return std::move(profile_);
}

TrainProfile BuildProfile(std::span<const AnnotatedExample> corpus,
                          std::size_t dim) {
  ProfileBuilder builder(dim);
  for (const AnnotatedExample& ex : corpus) builder.Add(ex);
  return std::move(builder).Finish();
}

TrainProfile BuildProfileFromFile(const std::string& path) {
  CorpusReader reader(path);
  ProfileBuilder builder(reader.handle().dim);
  while (auto ex = reader.Next()) builder.Add(*ex);
  return std::move(builder).Finish();
}

TrainProfile MergeProfiles(const TrainProfile& a, const TrainProfile& b) {
  if (a.format_version != b.format_version) {
    throw DataError("cannot merge profiles with format versions " +
                    std::to_string(a.format_version) + " and " +
                    std::to_string(b.format_version));
  }
  if (a.dim != b.dim) {
    throw DataError("cannot merge profiles with embedding dims " +
                    std::to_string(a.dim) + " and " + std::to_string(b.dim));
  }
  TrainProfile out = a;
  out.example_count += b.example_count;
  out.domains.insert(b.domains.begin(), b.domains.end());
  for (const auto& [w, n] : b.content_unigrams.counts) out.content_unigrams.Add(w, n);
  for (const auto& [w, n] : b.subword_unigrams.counts) out.subword_unigrams.Add(w, n);
  out.pos_ngrams.Merge(b.pos_ngrams);
  for (const auto& [w, sum] : b.token_embeddings) out.token_embeddings[w].Merge(sum);
  out.corpus_embedding.Merge(b.corpus_embedding);
  return out;
}

double ContentUnigramLogProb(const TrainProfile& profile, std::string_view word,
                             double oov_floor) {
  return profile.content_unigrams.LogProb(word, oov_floor);
}

double PosNgramLogProb(const TrainProfile& profile, const PosContext& context,
                       PosTag next, double add_k) {
  return profile.pos_ngrams.LogProb(context, next, add_k);
}

std::optional<Vector> TokenMeanNormedEmbedding(const TrainProfile& profile,
                                               std::string_view word) {
  auto it = profile.token_embeddings.find(word);
  if (it == profile.token_embeddings.end() || it->second.count == 0) {
    return std::nullopt;
  }
  return it->second.Mean();
}

}  // namespace driftscope
