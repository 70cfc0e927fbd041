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

#include "embmorph/synthetic_frs.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>

#include "embmorph/error.hpp"
#include "embmorph/simd/kernels.hpp"

namespace embmorph {

namespace {

constexpr double kOrthonormalTol = 1e-8;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<double> gaussian_matrix(std::uint64_t seed, std::string_view tag, std::size_t rows, std::size_t cols) {
  return gaussian_draws(substream_key(seed, tag, "", 0), rows * cols);
}

// Thin Q of a column-major rows x cols matrix, columns flipped so diag(R) > 0.
std::vector<double> orthonormalize(const std::vector<double>& a, std::size_t rows, std::size_t cols) {
  Eigen::Map<const Eigen::MatrixXd> m(a.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(rows),
                                                                     static_cast<Eigen::Index>(cols));
  const auto diag = qr.matrixQR().diagonal();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (diag(j) < 0) q.col(j) *= -1.0;
  }
  return std::vector<double>(q.data(), q.data() + q.size());
}

std::string subject_name(std::size_t index, std::size_t total) {
  std::string digits = std::to_string(index);
  const std::size_t width = std::max<std::size_t>(3, std::to_string(total - 1).size());
  return "s" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

}  // namespace

std::uint64_t substream_key(std::uint64_t seed, std::string_view tag, std::string_view id,
                            std::uint64_t index) noexcept {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ fnv1a(tag));
  h = splitmix64(h ^ fnv1a(id));
  return splitmix64(h ^ index);
}

std::vector<double> gaussian_draws(std::uint64_t key, std::size_t count, double variance) {
  std::mt19937_64 engine(key);
  std::normal_distribution<double> normal(0.0, std::sqrt(variance));
  std::vector<double> out(count);
  for (double& v : out) v = normal(engine);
  return out;
}

LatentIdentity make_identity(std::size_t latent_dim, std::uint64_t seed, std::string id) {
  const Embedding z = normalize(gaussian_draws(substream_key(seed, "identity", id, 0), latent_dim));
  return {std::move(id), std::vector<double>(z.values().begin(), z.values().end())};
}

// --- extractor ---------------------------------------------------------------

SyntheticFrs::SyntheticFrs(std::string label, std::size_t latent_dim, std::size_t embedding_dim,
                           std::vector<double> basis, double sample_noise_sigma, std::uint64_t noise_seed)
    : label_(std::move(label)),
      latent_dim_(latent_dim),
      embedding_dim_(embedding_dim),
      basis_(std::move(basis)),
      sample_noise_sigma_(sample_noise_sigma),
      noise_seed_(noise_seed) {
  if (embedding_dim_ < 2 || latent_dim_ < embedding_dim_) {
    throw Error(ErrorCode::InvalidDims, "need latent_dim >= embedding_dim >= 2");
  }
  if (basis_.size() != latent_dim_ * embedding_dim_) {
    throw Error(ErrorCode::InvalidDims, "basis size does not match latent_dim x embedding_dim");
  }
  if (!(sample_noise_sigma_ >= 0.0)) throw Error(ErrorCode::InvalidConfig, "noise sigma must be >= 0");
  for (std::size_t i = 0; i < embedding_dim_; ++i) {
    for (std::size_t j = i; j < embedding_dim_; ++j) {
      const double g = simd::dot(column(i), column(j));
      if (std::abs(g - (i == j ? 1.0 : 0.0)) > kOrthonormalTol) {
        throw Error(ErrorCode::InvalidArgument, "extractor basis columns are not orthonormal");
      }
    }
  }
}

SyntheticFrs SyntheticFrs::with_label(std::string label) const {
  SyntheticFrs copy = *this;
  copy.label_ = std::move(label);
  return copy;
}

std::pair<SyntheticFrs, SyntheticFrs> make_correlated_frs_pair(std::size_t latent_dim, std::size_t embedding_dim,
                                                               double rho, std::uint64_t seed,
                                                               double sample_noise_sigma) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw Error(ErrorCode::InvalidRho, "rho must lie in [0, 1]");
  if (embedding_dim < 2 || latent_dim < embedding_dim) {
    throw Error(ErrorCode::InvalidDims, "need latent_dim >= embedding_dim >= 2");
  }
  const std::size_t n = latent_dim * embedding_dim;
  const std::vector<double> shared = gaussian_matrix(seed, "basis-shared", latent_dim, embedding_dim);
  const double own_weight = std::sqrt(1.0 - rho * rho);

  auto build = [&](std::string_view tag, std::string label) {
    const std::vector<double> own = gaussian_matrix(seed, tag, latent_dim, embedding_dim);
    std::vector<double> blend(n);
    simd::active_kernels().lincomb(rho, shared.data(), own_weight, own.data(), blend.data(), n);
    return SyntheticFrs(std::move(label), latent_dim, embedding_dim, orthonormalize(blend, latent_dim, embedding_dim),
                        sample_noise_sigma, seed);
  };
  return {build("basis-a", "A"), build("basis-b", "B")};
}

Normalized extract_with_norm(const SyntheticFrs& frs, const LatentIdentity& latent, std::uint64_t sample_index) {
  if (latent.z.size() != frs.latent_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "latent has dim " + std::to_string(latent.z.size()) +
                                                  ", extractor expects " + std::to_string(frs.latent_dim()));
  }
  const std::size_t k = frs.embedding_dim();
  std::vector<double> y(k);
  const auto& kern = simd::active_kernels();
  kern.dot_rows(frs.basis().data(), k, frs.latent_dim(), latent.z.data(), y.data());
  if (frs.sample_noise_sigma() > 0.0) {
    const auto eta = gaussian_draws(substream_key(frs.noise_seed(), "sample", latent.id, sample_index), k,
                                    1.0 / static_cast<double>(k));
    kern.axpy(frs.sample_noise_sigma(), eta.data(), y.data(), k);
  }
  return normalize_with_norm(y);
}

Embedding extract(const SyntheticFrs& frs, const LatentIdentity& latent, std::uint64_t sample_index) {
  return extract_with_norm(frs, latent, sample_index).embedding;
}

LatentIdentity invert(const SyntheticFrs& frs, const Embedding& x, double inversion_noise_sigma, std::string id) {
  if (x.dim() != frs.embedding_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "embedding has dim " + std::to_string(x.dim()) +
                                                  ", extractor emits " + std::to_string(frs.embedding_dim()));
  }
  if (!(inversion_noise_sigma >= 0.0)) throw Error(ErrorCode::InvalidConfig, "inversion sigma must be >= 0");
  const std::size_t d = frs.latent_dim();
  std::vector<double> z(d, 0.0);
  const auto& kern = simd::active_kernels();
  for (std::size_t j = 0; j < frs.embedding_dim(); ++j) kern.axpy(x[j], frs.column(j).data(), z.data(), d);
  if (inversion_noise_sigma > 0.0) {
    const auto eta = gaussian_draws(substream_key(frs.noise_seed(), "inversion", id, 0), d,
                                    1.0 / static_cast<double>(d));
    kern.axpy(inversion_noise_sigma, eta.data(), z.data(), d);
  }
  const Embedding unit = normalize(z);
  return {std::move(id), std::vector<double>(unit.values().begin(), unit.values().end())};
}

// --- configuration -----------------------------------------------------------

void SimConfig::validate() const {
  if (embedding_dim < 2 || latent_dim < embedding_dim) {
    throw Error(ErrorCode::InvalidDims, "need latent_dim >= embedding_dim >= 2");
  }
  if (n_subjects < 2) throw Error(ErrorCode::InvalidConfig, "n_subjects must be >= 2");
  if (probes_per_subject < 1) throw Error(ErrorCode::InvalidConfig, "probes_per_subject must be >= 1");
  if (!(sample_noise_sigma >= 0.0) || !(inversion_noise_sigma >= 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "noise sigmas must be >= 0");
  }
  if (!(rho >= 0.0 && rho <= 1.0)) throw Error(ErrorCode::InvalidRho, "rho must lie in [0, 1]");
  if (frs_a_label.empty() || frs_b_label.empty() || frs_a_label == frs_b_label) {
    throw Error(ErrorCode::InvalidConfig, "FRS labels must be non-empty and distinct");
  }
}

namespace {

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorCode::InvalidConfig, "bad value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

SimConfig parse_sim_config(std::string_view text) {
  SimConfig c;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    std::size_t end = text.find('\n');
    std::string_view line = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key == "latent_dim") c.latent_dim = parse_number<std::size_t>(key, value);
    else if (key == "embedding_dim") c.embedding_dim = parse_number<std::size_t>(key, value);
    else if (key == "n_subjects") c.n_subjects = parse_number<std::size_t>(key, value);
    else if (key == "probes_per_subject") c.probes_per_subject = parse_number<std::size_t>(key, value);
    else if (key == "n_nonmated_pairs") c.n_nonmated_pairs = parse_number<std::size_t>(key, value);
    else if (key == "n_morph_pairs") c.n_morph_pairs = parse_number<std::size_t>(key, value);
    else if (key == "sample_noise_sigma") c.sample_noise_sigma = parse_number<double>(key, value);
    else if (key == "inversion_noise_sigma") c.inversion_noise_sigma = parse_number<double>(key, value);
    else if (key == "rho") c.rho = parse_number<double>(key, value);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "frs_a_label") c.frs_a_label = std::string(value);
    else if (key == "frs_b_label") c.frs_b_label = std::string(value);
    else throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
  }
  c.validate();
  return c;
}

std::string format_sim_config(const SimConfig& c) {
  auto num = [](double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
  };
  std::string out;
  out += "latent_dim=" + std::to_string(c.latent_dim) + "\n";
  out += "embedding_dim=" + std::to_string(c.embedding_dim) + "\n";
  out += "n_subjects=" + std::to_string(c.n_subjects) + "\n";
  out += "probes_per_subject=" + std::to_string(c.probes_per_subject) + "\n";
  out += "n_nonmated_pairs=" + std::to_string(c.n_nonmated_pairs) + "\n";
  out += "n_morph_pairs=" + std::to_string(c.n_morph_pairs) + "\n";
  out += "sample_noise_sigma=" + num(c.sample_noise_sigma) + "\n";
  out += "inversion_noise_sigma=" + num(c.inversion_noise_sigma) + "\n";
  out += "rho=" + num(c.rho) + "\n";
  out += "seed=" + std::to_string(c.seed) + "\n";
  out += "frs_a_label=" + c.frs_a_label + "\n";
  out += "frs_b_label=" + c.frs_b_label + "\n";
  return out;
}

// --- end-to-end run ----------------------------------------------------------

const EmbeddingSet& SimulationResult::bonafide(std::string_view frs_label) const {
  if (frs_label == frs_a.label()) return bonafide_a;
  if (frs_label == frs_b.label()) return bonafide_b;
  throw Error(ErrorCode::InvalidArgument, "no FRS labelled " + std::string(frs_label));
}

const AttackSet& SimulationResult::attack(std::string_view crafted_with, std::string_view evaluated_on) const {
  for (const AttackSet& a : attacks) {
    if (a.crafted_with == crafted_with && a.evaluated_on == evaluated_on) return a;
  }
  throw Error(ErrorCode::InvalidArgument, "no attack crafted with " + std::string(crafted_with) + " on " +
                                              std::string(evaluated_on));
}

SimulationResult run_attack_simulation(const SimConfig& config) {
  config.validate();
  auto [frs_a, frs_b] = make_correlated_frs_pair(config.latent_dim, config.embedding_dim, config.rho, config.seed,
                                                 config.sample_noise_sigma);
  frs_a = frs_a.with_label(config.frs_a_label);
  frs_b = frs_b.with_label(config.frs_b_label);

  const std::size_t n = config.n_subjects;
  std::vector<LatentIdentity> identities;
  identities.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    identities.push_back(make_identity(config.latent_dim, config.seed, subject_name(s, n)));
  }

  auto bona_fide = [&](const SyntheticFrs& frs) {
    EmbeddingSet set(config.embedding_dim, true);
    for (const LatentIdentity& id : identities) {
      for (std::size_t sample = 0; sample <= config.probes_per_subject; ++sample) {
        Normalized x = extract_with_norm(frs, id, sample);
        set.add(EmbeddingRecord::from_embedding(id.id, std::to_string(sample), x.embedding, x.raw_norm));
      }
    }
    return set;
  };
  EmbeddingSet bonafide_a = bona_fide(frs_a);
  EmbeddingSet bonafide_b = bona_fide(frs_b);

  std::vector<std::pair<std::size_t, std::size_t>> chosen;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) chosen.emplace_back(i, j);
  }
  if (config.n_morph_pairs > 0 && config.n_morph_pairs < chosen.size()) {
    std::mt19937_64 engine(substream_key(config.seed, "morph-pairs", "", 0));
    std::shuffle(chosen.begin(), chosen.end(), engine);
    chosen.resize(config.n_morph_pairs);
    std::sort(chosen.begin(), chosen.end());
  }

  std::vector<MorphPair> pairs;
  MorphProtocol::ProbeMap probes;
  for (auto [i, j] : chosen) {
    pairs.push_back({identities[i].id, identities[j].id, "0", "0"});
    for (std::size_t s : {i, j}) {
      auto& list = probes[identities[s].id];
      if (list.empty()) {
        for (std::size_t p = 1; p <= config.probes_per_subject; ++p) list.push_back(std::to_string(p));
      }
    }
  }
  MorphProtocol protocol = MorphProtocol::validated(std::move(pairs), std::move(probes));

  std::vector<AttackSet> attacks;
  auto craft = [&](const SyntheticFrs& crafter, const EmbeddingSet& refs, const SyntheticFrs& other) {
    AttackSet white{"Inv-" + crafter.label(), crafter.label(), crafter.label(), AttackMode::WhiteBox,
                    EmbeddingSet(config.embedding_dim, true)};
    AttackSet black{"Inv-" + crafter.label(), crafter.label(), other.label(), AttackMode::BlackBox,
                    EmbeddingSet(config.embedding_dim, true)};
    for (const MorphPair& p : protocol.pairs()) {
      const std::string morph_id = p.morph_id();
      const Embedding target = optimal_morph(refs.at(p.subject_a, p.reference_a).embedding(),
                                             refs.at(p.subject_b, p.reference_b).embedding());
      LatentIdentity latent = invert(crafter, target, config.inversion_noise_sigma, "inv-" + crafter.label() + ":" + morph_id);
      // The re-extracted "image" is the same for both FRS, so both share its noise substream.
      latent.id = "attack-" + crafter.label() + ":" + morph_id;
      Normalized on_crafter = extract_with_norm(crafter, latent, 0);
      Normalized on_other = extract_with_norm(other, latent, 0);
      white.embeddings.add(EmbeddingRecord::from_embedding("morph", morph_id, on_crafter.embedding, on_crafter.raw_norm));
      black.embeddings.add(EmbeddingRecord::from_embedding("morph", morph_id, on_other.embedding, on_other.raw_norm));
    }
    attacks.push_back(std::move(white));
    attacks.push_back(std::move(black));
  };
  craft(frs_a, bonafide_a, frs_b);
  craft(frs_b, bonafide_b, frs_a);

  return SimulationResult{std::move(frs_a), std::move(frs_b), std::move(bonafide_a), std::move(bonafide_b),
                          std::move(protocol), std::move(attacks)};
}

}  // namespace embmorph
