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

// Binary profile container. All integers little-endian; doubles are written
// as their IEEE-754 bit pattern, so a load/save round trip is bit-exact.

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

#include "driftscope/error.h"
#include "driftscope/profile.h"

namespace driftscope {
namespace {

constexpr char kMagic[8] = {'D', 'S', 'P', 'R', 'O', 'F', '\r', '\n'};
constexpr char kTrailer[8] = {'D', 'S', 'E', 'N', 'D', '\0', '\0', '\0'};
constexpr std::uint64_t kMaxLength = std::uint64_t{1} << 32;

// FNV-1a over every byte before the trailer.
class Checksum {
 public:
  void Update(const char* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      hash_ ^= static_cast<unsigned char>(data[i]);
      hash_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void Bytes(const char* data, std::size_t n) {
    checksum_.Update(data, n);
    out_.write(data, static_cast<std::streamsize>(n));
  }
  void U32(std::uint32_t v) {
    char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    Bytes(buf, 4);
  }
  void U64(std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    Bytes(buf, 8);
  }
  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }
  void Str(const std::string& s) {
    U64(s.size());
    Bytes(s.data(), s.size());
  }
  void Unigrams(const UnigramTable& table) {
    U64(table.total);
    U64(table.counts.size());
    for (const auto& [w, n] : table.counts) {
      Str(w);
      U64(n);
    }
  }
  void Sum(const NormedSum& sum, std::size_t dim) {
    U64(sum.count);
    if (sum.count == 0) return;
    for (std::size_t i = 0; i < dim; ++i) F64(sum.sum[i]);
  }
  std::uint64_t checksum() const { return checksum_.value(); }

 private:
  std::ostream& out_;
  Checksum checksum_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void Bytes(char* data, std::size_t n) {
    in_.read(data, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw FormatError("profile file is truncated");
    }
    checksum_.Update(data, n);
  }
  std::uint32_t U32() {
    unsigned char buf[4];
    Bytes(reinterpret_cast<char*>(buf), 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | buf[i];
    return v;
  }
  std::uint64_t U64() {
    unsigned char buf[8];
    Bytes(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
    return v;
  }
  double F64() { return std::bit_cast<double>(U64()); }
  std::uint64_t Length() {
    const std::uint64_t n = U64();
    if (n > kMaxLength) throw FormatError("profile file is corrupt (bad length)");
    return n;
  }
  std::string Str() {
    std::string s(Length(), '\0');
    if (!s.empty()) Bytes(s.data(), s.size());
    return s;
  }
  UnigramTable Unigrams() {
    UnigramTable table;
    const std::uint64_t total = U64();
    const std::uint64_t n = Length();
    for (std::uint64_t i = 0; i < n; ++i) {
      std::string w = Str();
      const std::uint64_t c = U64();
      if (c == 0) throw FormatError("profile file is corrupt (zero count)");
      table.Add(w, c);
    }
    if (table.counts.size() != n || table.total != total) {
      throw FormatError("profile file is corrupt (unigram totals)");
    }
    return table;
  }
  NormedSum Sum(std::size_t dim) {
    NormedSum sum;
    sum.count = U64();
    if (sum.count == 0) return sum;
    sum.sum.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) sum.sum[i] = F64();
    return sum;
  }
  std::uint64_t checksum() const { return checksum_.value(); }

 private:
  std::istream& in_;
  Checksum checksum_;
};

}  // namespace

void SaveProfile(const TrainProfile& p, std::ostream& out) {
  Writer w(out);
  w.Bytes(kMagic, sizeof(kMagic));
  w.U32(p.format_version);
  w.U64(p.dim);
  w.U64(p.example_count);
  w.U64(p.domains.size());
  for (const std::string& d : p.domains) w.Str(d);

  w.Unigrams(p.content_unigrams);
  w.Unigrams(p.subword_unigrams);

  w.U64(p.pos_ngrams.context_counts().size());
  for (const auto& [key, n] : p.pos_ngrams.context_counts()) {
    w.U32(key);
    w.U64(n);
  }
  w.U64(p.pos_ngrams.transition_counts().size());
  for (const auto& [key, n] : p.pos_ngrams.transition_counts()) {
    w.U32(key);
    w.U64(n);
  }

  w.U64(p.token_embeddings.size());
  for (const auto& [token, sum] : p.token_embeddings) {
    w.Str(token);
    w.Sum(sum, p.dim);
  }
  w.Sum(p.corpus_embedding, p.dim);

  const std::uint64_t checksum = w.checksum();
  out.write(kTrailer, sizeof(kTrailer));
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((checksum >> (8 * i)) & 0xff);
  out.write(buf, 8);
  if (!out) throw Error("failed writing profile");
}

void SaveProfile(const TrainProfile& profile, const std::string& path) {
  // Write to a sibling temp file first so a failure never leaves a partial
  // profile at `path`.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp + "' for writing");
    SaveProfile(profile, out);
    out.close();
    if (!out) throw Error("failed writing '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw Error("cannot move profile into place at '" + path + "'");
  }
}

TrainProfile LoadProfile(std::istream& in) {
  Reader r(in);
  char magic[8];
  r.Bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not a driftscope profile (bad magic)");
  }
  TrainProfile p;
  p.format_version = r.U32();
  if (p.format_version == 0 || p.format_version > kProfileFormatVersion) {
    throw FormatError("unsupported profile format version " +
                      std::to_string(p.format_version) +
                      " (this build reads version " +
                      std::to_string(kProfileFormatVersion) + ")");
  }
  p.dim = r.Length();
  p.example_count = r.U64();
  const std::uint64_t n_domains = r.Length();
  for (std::uint64_t i = 0; i < n_domains; ++i) p.domains.insert(r.Str());

  p.content_unigrams = r.Unigrams();
  p.subword_unigrams = r.Unigrams();

  std::map<std::uint32_t, std::uint64_t> contexts;
  std::map<std::uint32_t, std::uint64_t> transitions;
  const std::uint64_t n_contexts = r.Length();
  for (std::uint64_t i = 0; i < n_contexts; ++i) {
    const std::uint32_t key = r.U32();
    contexts[key] = r.U64();
  }
  const std::uint64_t n_transitions = r.Length();
  for (std::uint64_t i = 0; i < n_transitions; ++i) {
    const std::uint32_t key = r.U32();
    transitions[key] = r.U64();
  }
  p.pos_ngrams.SetRaw(std::move(contexts), std::move(transitions));

  const std::uint64_t n_tokens = r.Length();
  for (std::uint64_t i = 0; i < n_tokens; ++i) {
    std::string token = r.Str();
    NormedSum sum = r.Sum(p.dim);
    if (sum.count == 0) throw FormatError("profile file is corrupt (empty embedding)");
    p.token_embeddings.emplace(std::move(token), std::move(sum));
  }
  p.corpus_embedding = r.Sum(p.dim);
  if ((p.dim == 0) && (!p.token_embeddings.empty() || p.corpus_embedding.count)) {
    throw FormatError("profile file is corrupt (embeddings with dim 0)");
  }

  const std::uint64_t expected = r.checksum();
  char trailer[8];
  r.Bytes(trailer, sizeof(trailer));
  if (std::memcmp(trailer, kTrailer, sizeof(kTrailer)) != 0) {
    throw FormatError("profile file is corrupt (missing trailer)");
  }
  if (r.U64() != expected) {
    throw FormatError("profile file is corrupt (checksum mismatch)");
  }
  return p;
}

TrainProfile LoadProfile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open profile '" + path + "'");
  return LoadProfile(in);
}

}  // namespace driftscope
