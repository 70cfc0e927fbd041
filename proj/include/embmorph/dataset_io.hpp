// Copyright 2026 The embmorph Authors.
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

#pragma once

// Persistence for embedding sets, morph protocols and score sets.
//
// FEMB binary layout, little-endian throughout:
//
//   magic "FEMB" | u16 version = 1 | u16 flags | u32 dim | u64 count
//   count x { u16 len, subject bytes | u16 len, sample bytes | f32 raw_norm | dim x f32 }
//
// flags bit 0 marks values stored pre-normalized; the other bits are reserved
// and must be zero. Values are renormalized in 64-bit arithmetic on read.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "embmorph/embedding.hpp"

namespace embmorph {

inline constexpr std::uint16_t kFembVersion = 1;
inline constexpr std::uint16_t kFembFlagNormalized = 0x1;
inline constexpr std::size_t kFembHeaderSize = 20;
inline constexpr std::size_t kMaxIdBytes = 65535;

/// One stored sample. The embedding is always normalize(stored), so two
/// records compare equal iff their ids, raw norm and stored floats match.
class EmbeddingRecord {
 public:
  static EmbeddingRecord from_stored(std::string subject_id, std::string sample_id,
                                     std::vector<float> stored, float raw_norm);
  /// Stores the embedding's values as f32 and keeps raw_norm as provenance.
  static EmbeddingRecord from_embedding(std::string subject_id, std::string sample_id,
                                        const Embedding& embedding, double raw_norm);

  const std::string& subject_id() const noexcept { return subject_id_; }
  const std::string& sample_id() const noexcept { return sample_id_; }
  float raw_norm() const noexcept { return raw_norm_; }
  std::span<const float> stored() const noexcept { return stored_; }
  const Embedding& embedding() const noexcept { return embedding_; }
  std::size_t dim() const noexcept { return stored_.size(); }

  friend bool operator==(const EmbeddingRecord& a, const EmbeddingRecord& b);

 private:
  EmbeddingRecord(std::string subject_id, std::string sample_id, std::vector<float> stored,
                  float raw_norm, Embedding embedding);

  std::string subject_id_;
  std::string sample_id_;
  std::vector<float> stored_;
  float raw_norm_;
  Embedding embedding_;
};

class EmbeddingSet {
 public:
  EmbeddingSet(std::size_t dim, bool normalized_flag);

  /// Throws DimensionMismatch, DuplicateKey, or InvalidArgument when the
  /// record's stored norm contradicts the set's normalized flag.
  void add(EmbeddingRecord record);

  std::size_t dim() const noexcept { return dim_; }
  bool normalized() const noexcept { return normalized_; }
  std::size_t size() const noexcept { return records_.size(); }
  std::span<const EmbeddingRecord> records() const noexcept { return records_; }

  const EmbeddingRecord* find(std::string_view subject_id, std::string_view sample_id) const;
  /// Throws MissingEmbedding.
  const EmbeddingRecord& at(std::string_view subject_id, std::string_view sample_id) const;

  friend bool operator==(const EmbeddingSet& a, const EmbeddingSet& b);

 private:
  std::size_t dim_;
  bool normalized_;
  std::vector<EmbeddingRecord> records_;
  std::map<std::pair<std::string, std::string>, std::size_t, std::less<>> index_;
};

/// True when the stored values agree with the flag: unit norm if stored
/// pre-normalized, otherwise norm equal to raw_norm (relative 1e-4).
bool record_consistent(const EmbeddingRecord& record, bool normalized_flag) noexcept;

std::string serialize_embeddings(const EmbeddingSet& set);
EmbeddingSet parse_embeddings(std::string_view bytes);

void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& destination);
EmbeddingSet read_embeddings(const std::filesystem::path& source);

/// CSV ingestion: header `subject,sample,v0,...,v{d-1}`. Values are stored
/// raw (flag unset) with raw_norm set to their norm.
EmbeddingSet parse_embeddings_csv(std::string_view text);
EmbeddingSet read_embeddings_csv(const std::filesystem::path& source);

/// Dispatches on the leading magic: FEMB binary, otherwise CSV.
EmbeddingSet load_embeddings(const std::filesystem::path& source);

// ---------------------------------------------------------------------------
// Morph protocols

struct MorphPair {
  std::string subject_a;
  std::string subject_b;
  std::string reference_a;
  std::string reference_b;

  /// "<subject_a>+<subject_b>", the sample id a morph of this pair carries.
  std::string morph_id() const { return subject_a + "+" + subject_b; }

  friend bool operator==(const MorphPair&, const MorphPair&) = default;
};

class MorphProtocol {
 public:
  using ProbeMap = std::map<std::string, std::vector<std::string>, std::less<>>;

  /// Enforces: no self morphs (SelfMorph), no repeated subject pair
  /// (DuplicatePair), every paired subject has a probe (MissingProbes).
  static MorphProtocol validated(std::vector<MorphPair> pairs, ProbeMap probes);

  std::span<const MorphPair> pairs() const noexcept { return pairs_; }
  const ProbeMap& probes() const noexcept { return probes_; }
  std::span<const std::string> probes_of(std::string_view subject_id) const;

  friend bool operator==(const MorphProtocol&, const MorphProtocol&) = default;

 private:
  MorphProtocol() = default;

  std::vector<MorphPair> pairs_;
  ProbeMap probes_;
};

/// Line-oriented text: `pair <subjA> <subjB> <refA> <refB>`,
/// `probe <subj> <sample>`, `#` starts a comment.
MorphProtocol parse_protocol(std::string_view text);
MorphProtocol read_protocol(const std::filesystem::path& source);
std::string format_protocol(const MorphProtocol& protocol);
void write_protocol(const MorphProtocol& protocol, const std::filesystem::path& destination);

// ---------------------------------------------------------------------------
// Score sets

enum class ScoreLabel { Mated, Nonmated, Attack, Bonafide };

std::string_view label_name(ScoreLabel label) noexcept;
std::optional<ScoreLabel> parse_label(std::string_view text) noexcept;

struct LabeledScore {
  ScoreLabel label;
  double score;

  friend bool operator==(const LabeledScore&, const LabeledScore&) = default;
};

class ScoreSet {
 public:
  ScoreSet() = default;

  void add(ScoreLabel label, double score) { entries_.push_back({label, score}); }
  void add_all(ScoreLabel label, std::span<const double> scores);

  std::span<const LabeledScore> entries() const noexcept { return entries_; }
  std::vector<double> scores(ScoreLabel label) const;
  bool empty() const noexcept { return entries_.empty(); }

  friend bool operator==(const ScoreSet&, const ScoreSet&) = default;

 private:
  std::vector<LabeledScore> entries_;
};

/// CSV with header `label,score`.
ScoreSet parse_scores_csv(std::string_view text);
ScoreSet read_scores_csv(const std::filesystem::path& source);
std::string format_scores_csv(const ScoreSet& scores);
void write_scores_csv(const ScoreSet& scores, const std::filesystem::path& destination);

// ---------------------------------------------------------------------------
// File helpers

/// Whole-file read; throws IoError.
std::string read_file_bytes(const std::filesystem::path& source);

/// Writes to a sibling temporary file, then renames over the destination.
void write_file_atomic(const std::filesystem::path& destination, std::string_view bytes);

}  // namespace embmorph
