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

#include "embmorph/dataset_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "embmorph/error.hpp"

namespace embmorph {

namespace {

constexpr std::string_view kMagic = "FEMB";
constexpr double kNormConsistencyTol = 1e-4;

std::string line_error(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

void check_id(const std::string& id, const char* which) {
  if (id.size() > kMaxIdBytes) {
    throw Error(ErrorCode::InvalidArgument, std::string(which) + " id exceeds 65535 bytes");
  }
}

double stored_norm(std::span<const float> stored) {
  double acc = 0.0;
  for (float v : stored) acc += static_cast<double>(v) * static_cast<double>(v);
  return std::sqrt(acc);
}

// --- little-endian primitives ------------------------------------------------

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  std::size_t remaining() const noexcept { return data_.size() - pos_; }

  std::string_view take(std::size_t n) {
    if (remaining() < n) {
      throw Error(ErrorCode::TruncatedFile, "needed " + std::to_string(n) + " bytes at offset " +
                                                std::to_string(pos_) + ", file has " +
                                                std::to_string(remaining()) + " left");
    }
    std::string_view out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::uint64_t uint(std::size_t bytes) {
    std::string_view raw = take(bytes);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < bytes; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(raw[i])) << (8 * i);
    }
    return v;
  }

  std::uint16_t u16() { return static_cast<std::uint16_t>(uint(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(uint(4)); }
  std::uint64_t u64() { return uint(8); }
  float f32() { return std::bit_cast<float>(u32()); }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t end = line.find(sep, start);
    out.push_back(line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

// Iterates lines, stripping a trailing '\r'.
template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(++line_no, line);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
}

std::optional<double> parse_double(std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

// --- records and sets --------------------------------------------------------

EmbeddingRecord::EmbeddingRecord(std::string subject_id, std::string sample_id,
                                 std::vector<float> stored, float raw_norm, Embedding embedding)
    : subject_id_(std::move(subject_id)),
      sample_id_(std::move(sample_id)),
      stored_(std::move(stored)),
      raw_norm_(raw_norm),
      embedding_(std::move(embedding)) {}

EmbeddingRecord EmbeddingRecord::from_stored(std::string subject_id, std::string sample_id,
                                             std::vector<float> stored, float raw_norm) {
  check_id(subject_id, "subject");
  check_id(sample_id, "sample");
  if (!(raw_norm > 0.0f) || !std::isfinite(raw_norm)) {
    throw Error(ErrorCode::InvalidArgument, "raw_norm must be positive and finite");
  }
  for (float v : stored) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite embedding value");
  }
  Embedding embedding = normalize(std::span<const float>(stored));
  return EmbeddingRecord(std::move(subject_id), std::move(sample_id), std::move(stored), raw_norm,
                         std::move(embedding));
}

EmbeddingRecord EmbeddingRecord::from_embedding(std::string subject_id, std::string sample_id,
                                                const Embedding& embedding, double raw_norm) {
  std::vector<float> stored(embedding.values().begin(), embedding.values().end());
  return from_stored(std::move(subject_id), std::move(sample_id), std::move(stored),
                     static_cast<float>(raw_norm));
}

bool operator==(const EmbeddingRecord& a, const EmbeddingRecord& b) {
  if (a.subject_id_ != b.subject_id_ || a.sample_id_ != b.sample_id_) return false;
  if (std::bit_cast<std::uint32_t>(a.raw_norm_) != std::bit_cast<std::uint32_t>(b.raw_norm_)) return false;
  if (a.stored_.size() != b.stored_.size()) return false;
  for (std::size_t i = 0; i < a.stored_.size(); ++i) {
    if (std::bit_cast<std::uint32_t>(a.stored_[i]) != std::bit_cast<std::uint32_t>(b.stored_[i])) return false;
  }
  return true;
}

bool record_consistent(const EmbeddingRecord& record, bool normalized_flag) noexcept {
  const double norm = stored_norm(record.stored());
  if (normalized_flag) return std::abs(norm - 1.0) <= kNormConsistencyTol;
  const double raw = record.raw_norm();
  return std::abs(norm - raw) <= kNormConsistencyTol * raw;
}

EmbeddingSet::EmbeddingSet(std::size_t dim, bool normalized_flag) : dim_(dim), normalized_(normalized_flag) {
  if (dim < 2) throw Error(ErrorCode::DimensionTooSmall, "embedding set dimension must be >= 2");
}

void EmbeddingSet::add(EmbeddingRecord record) {
  if (record.dim() != dim_) {
    throw Error(ErrorCode::DimensionMismatch, "record " + record.subject_id() + "/" + record.sample_id() +
                                                  " has dim " + std::to_string(record.dim()) +
                                                  ", set has " + std::to_string(dim_));
  }
  if (!record_consistent(record, normalized_)) {
    throw Error(ErrorCode::InvalidArgument, "record " + record.subject_id() + "/" + record.sample_id() +
                                                " disagrees with the set's normalized flag");
  }
  auto key = std::make_pair(record.subject_id(), record.sample_id());
  if (index_.contains(key)) {
    throw Error(ErrorCode::DuplicateKey, "duplicate record " + key.first + "/" + key.second);
  }
  index_.emplace(std::move(key), records_.size());
  records_.push_back(std::move(record));
}

const EmbeddingRecord* EmbeddingSet::find(std::string_view subject_id, std::string_view sample_id) const {
  auto it = index_.find(std::make_pair(std::string(subject_id), std::string(sample_id)));
  return it == index_.end() ? nullptr : &records_[it->second];
}

const EmbeddingRecord& EmbeddingSet::at(std::string_view subject_id, std::string_view sample_id) const {
  if (const EmbeddingRecord* r = find(subject_id, sample_id)) return *r;
  throw Error(ErrorCode::MissingEmbedding,
              "no embedding for " + std::string(subject_id) + "/" + std::string(sample_id));
}

bool operator==(const EmbeddingSet& a, const EmbeddingSet& b) {
  return a.dim_ == b.dim_ && a.normalized_ == b.normalized_ && a.records_ == b.records_;
}

// --- FEMB --------------------------------------------------------------------

std::string serialize_embeddings(const EmbeddingSet& set) {
  std::string out;
  out.reserve(kFembHeaderSize + set.size() * (16 + 4 * set.dim()));
  out.append(kMagic);
  put_u16(out, kFembVersion);
  put_u16(out, set.normalized() ? kFembFlagNormalized : 0);
  put_u32(out, static_cast<std::uint32_t>(set.dim()));
  put_u64(out, set.size());
  for (const EmbeddingRecord& r : set.records()) {
    put_u16(out, static_cast<std::uint16_t>(r.subject_id().size()));
    out.append(r.subject_id());
    put_u16(out, static_cast<std::uint16_t>(r.sample_id().size()));
    out.append(r.sample_id());
    put_f32(out, r.raw_norm());
    for (float v : r.stored()) put_f32(out, v);
  }
  return out;
}

EmbeddingSet parse_embeddings(std::string_view bytes) {
  const std::string_view prefix = bytes.substr(0, kMagic.size());
  if (prefix != kMagic.substr(0, prefix.size())) throw Error(ErrorCode::BadMagic, "not a FEMB file");
  ByteReader in(bytes);
  in.take(kMagic.size());
  const std::uint16_t version = in.u16();
  if (version != kFembVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "FEMB version " + std::to_string(version));
  }
  const std::uint16_t flags = in.u16();
  if (flags & ~kFembFlagNormalized) {
    throw Error(ErrorCode::BadHeader, "reserved flag bits set: " + std::to_string(flags));
  }
  const std::uint32_t dim = in.u32();
  if (dim < 2) throw Error(ErrorCode::BadHeader, "dimension " + std::to_string(dim) + " < 2");
  const std::uint64_t count = in.u64();
  const std::uint64_t min_record = 2 + 2 + 4 + 4ull * dim;
  if (count > in.remaining() / min_record) {
    throw Error(ErrorCode::TruncatedFile, "header declares " + std::to_string(count) +
                                              " records but only " + std::to_string(in.remaining()) +
                                              " bytes follow");
  }
  const bool normalized = (flags & kFembFlagNormalized) != 0;
  EmbeddingSet set(dim, normalized);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string subject(in.take(in.u16()));
    std::string sample(in.take(in.u16()));
    const float raw_norm = in.f32();
    std::vector<float> stored(dim);
    for (float& v : stored) v = in.f32();
    const double norm = stored_norm(stored);
    const bool finite = std::isfinite(norm) && std::isfinite(raw_norm) && raw_norm > 0.0f;
    const bool consistent = normalized ? std::abs(norm - 1.0) <= kNormConsistencyTol
                                       : std::abs(norm - raw_norm) <= kNormConsistencyTol * raw_norm;
    if (!finite || !consistent) {
      throw Error(ErrorCode::CorruptRecord, "record " + std::to_string(i) + " (" + subject + "/" + sample +
                                                ") has inconsistent norms");
    }
    set.add(EmbeddingRecord::from_stored(std::move(subject), std::move(sample), std::move(stored), raw_norm));
  }
  if (in.remaining() != 0) {
    throw Error(ErrorCode::TrailingData, std::to_string(in.remaining()) + " bytes after the last record");
  }
  return set;
}

void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& destination) {
  write_file_atomic(destination, serialize_embeddings(set));
}

EmbeddingSet read_embeddings(const std::filesystem::path& source) {
  return parse_embeddings(read_file_bytes(source));
}

EmbeddingSet parse_embeddings_csv(std::string_view text) {
  std::optional<EmbeddingSet> set;
  std::size_t columns = 0;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (line.empty()) return;
    auto fields = split(line, ',');
    if (!set) {
      if (fields.size() < 4 || fields[0] != "subject" || fields[1] != "sample") {
        throw Error(ErrorCode::ParseError, line_error(line_no, "expected header subject,sample,v0,v1,..."));
      }
      for (std::size_t i = 2; i < fields.size(); ++i) {
        if (fields[i] != "v" + std::to_string(i - 2)) {
          throw Error(ErrorCode::ParseError, line_error(line_no, "unexpected column " + std::string(fields[i])));
        }
      }
      columns = fields.size();
      set.emplace(columns - 2, false);
      return;
    }
    if (fields.size() != columns) {
      throw Error(ErrorCode::ParseError, line_error(line_no, "expected " + std::to_string(columns) + " fields"));
    }
    std::vector<float> stored;
    stored.reserve(columns - 2);
    for (std::size_t i = 2; i < columns; ++i) {
      auto v = parse_double(fields[i]);
      if (!v) throw Error(ErrorCode::ParseError, line_error(line_no, "bad number '" + std::string(fields[i]) + "'"));
      stored.push_back(static_cast<float>(*v));
    }
    const double norm = stored_norm(stored);
    if (!(norm > kDegeneracyTol)) throw Error(ErrorCode::ZeroVector, line_error(line_no, "zero embedding"));
    set->add(EmbeddingRecord::from_stored(std::string(fields[0]), std::string(fields[1]), std::move(stored),
                                          static_cast<float>(norm)));
  });
  if (!set) throw Error(ErrorCode::ParseError, "empty CSV: missing header");
  return std::move(*set);
}

EmbeddingSet read_embeddings_csv(const std::filesystem::path& source) {
  return parse_embeddings_csv(read_file_bytes(source));
}

EmbeddingSet load_embeddings(const std::filesystem::path& source) {
  std::string bytes = read_file_bytes(source);
  if (std::string_view(bytes).substr(0, kMagic.size()) == kMagic) return parse_embeddings(bytes);
  return parse_embeddings_csv(bytes);
}

// --- protocols ---------------------------------------------------------------

MorphProtocol MorphProtocol::validated(std::vector<MorphPair> pairs, ProbeMap probes) {
  std::set<std::pair<std::string, std::string>> seen;
  for (const MorphPair& p : pairs) {
    if (p.subject_a == p.subject_b) throw Error(ErrorCode::SelfMorph, "pair morphs " + p.subject_a + " with itself");
    auto key = std::minmax(p.subject_a, p.subject_b);
    if (!seen.emplace(key.first, key.second).second) {
      throw Error(ErrorCode::DuplicatePair, "subjects " + p.subject_a + " and " + p.subject_b + " paired twice");
    }
  }
  for (const auto& [subject, samples] : probes) {
    std::set<std::string_view> unique(samples.begin(), samples.end());
    if (unique.size() != samples.size()) {
      throw Error(ErrorCode::DuplicateKey, "subject " + subject + " lists a probe twice");
    }
  }
  for (const MorphPair& p : pairs) {
    for (const std::string* s : {&p.subject_a, &p.subject_b}) {
      auto it = probes.find(*s);
      if (it == probes.end() || it->second.empty()) {
        throw Error(ErrorCode::MissingProbes, "subject " + *s + " has no probes");
      }
    }
  }
  MorphProtocol protocol;
  protocol.pairs_ = std::move(pairs);
  protocol.probes_ = std::move(probes);
  return protocol;
}

std::span<const std::string> MorphProtocol::probes_of(std::string_view subject_id) const {
  auto it = probes_.find(subject_id);
  if (it == probes_.end()) return {};
  return it->second;
}

MorphProtocol parse_protocol(std::string_view text) {
  std::vector<MorphPair> pairs;
  MorphProtocol::ProbeMap probes;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tokens = split_ws(line);
    if (tokens.empty()) return;
    if (tokens[0] == "pair") {
      if (tokens.size() != 5) throw Error(ErrorCode::ParseError, line_error(line_no, "pair takes 4 fields"));
      pairs.push_back({std::string(tokens[1]), std::string(tokens[2]), std::string(tokens[3]), std::string(tokens[4])});
    } else if (tokens[0] == "probe") {
      if (tokens.size() != 3) throw Error(ErrorCode::ParseError, line_error(line_no, "probe takes 2 fields"));
      probes[std::string(tokens[1])].emplace_back(tokens[2]);
    } else {
      throw Error(ErrorCode::ParseError, line_error(line_no, "unknown directive '" + std::string(tokens[0]) + "'"));
    }
  });
  return MorphProtocol::validated(std::move(pairs), std::move(probes));
}

MorphProtocol read_protocol(const std::filesystem::path& source) {
  return parse_protocol(read_file_bytes(source));
}

std::string format_protocol(const MorphProtocol& protocol) {
  std::string out = "# morph protocol: pair <subjA> <subjB> <refA> <refB> / probe <subj> <sample>\n";
  for (const MorphPair& p : protocol.pairs()) {
    out += "pair " + p.subject_a + " " + p.subject_b + " " + p.reference_a + " " + p.reference_b + "\n";
  }
  for (const auto& [subject, samples] : protocol.probes()) {
    for (const std::string& s : samples) out += "probe " + subject + " " + s + "\n";
  }
  return out;
}

void write_protocol(const MorphProtocol& protocol, const std::filesystem::path& destination) {
  write_file_atomic(destination, format_protocol(protocol));
}

// --- scores ------------------------------------------------------------------

std::string_view label_name(ScoreLabel label) noexcept {
  switch (label) {
    case ScoreLabel::Mated: return "mated";
    case ScoreLabel::Nonmated: return "nonmated";
    case ScoreLabel::Attack: return "attack";
    case ScoreLabel::Bonafide: return "bonafide";
  }
  return "unknown";
}

std::optional<ScoreLabel> parse_label(std::string_view text) noexcept {
  for (ScoreLabel l : {ScoreLabel::Mated, ScoreLabel::Nonmated, ScoreLabel::Attack, ScoreLabel::Bonafide}) {
    if (label_name(l) == text) return l;
  }
  return std::nullopt;
}

void ScoreSet::add_all(ScoreLabel label, std::span<const double> scores) {
  for (double s : scores) add(label, s);
}

std::vector<double> ScoreSet::scores(ScoreLabel label) const {
  std::vector<double> out;
  for (const LabeledScore& e : entries_) {
    if (e.label == label) out.push_back(e.score);
  }
  return out;
}

ScoreSet parse_scores_csv(std::string_view text) {
  ScoreSet scores;
  bool header = false;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (line.empty()) return;
    auto fields = split(line, ',');
    if (!header) {
      if (fields.size() != 2 || fields[0] != "label" || fields[1] != "score") {
        throw Error(ErrorCode::ParseError, line_error(line_no, "expected header label,score"));
      }
      header = true;
      return;
    }
    if (fields.size() != 2) throw Error(ErrorCode::ParseError, line_error(line_no, "expected label,score"));
    auto label = parse_label(fields[0]);
    if (!label) throw Error(ErrorCode::ParseError, line_error(line_no, "unknown label '" + std::string(fields[0]) + "'"));
    auto value = parse_double(fields[1]);
    if (!value) throw Error(ErrorCode::ParseError, line_error(line_no, "bad score '" + std::string(fields[1]) + "'"));
    scores.add(*label, *value);
  });
  if (!header) throw Error(ErrorCode::ParseError, "empty score file: missing header");
  return scores;
}

ScoreSet read_scores_csv(const std::filesystem::path& source) {
  return parse_scores_csv(read_file_bytes(source));
}

std::string format_scores_csv(const ScoreSet& scores) {
  std::string out = "label,score\n";
  for (const LabeledScore& e : scores.entries()) {
    out += label_name(e.label);
    out += ',';
    out += format_double(e.score);
    out += '\n';
  }
  return out;
}

void write_scores_csv(const ScoreSet& scores, const std::filesystem::path& destination) {
  write_file_atomic(destination, format_scores_csv(scores));
}

// --- files -------------------------------------------------------------------

std::string read_file_bytes(const std::filesystem::path& source) {
  std::ifstream in(source, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + source.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "failed reading " + source.string());
  return std::move(buf).str();
}

void write_file_atomic(const std::filesystem::path& destination, std::string_view bytes) {
  std::filesystem::path tmp = destination;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, destination, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot move output into place at " + destination.string());
  }
}

}  // namespace embmorph
