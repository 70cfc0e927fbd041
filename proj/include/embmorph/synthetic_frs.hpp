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

// Desk-scale stand-in for face recognition systems and template inversion.
//
// A latent identity is a unit vector z in R^d ("face space"). An extractor
// attends to a k-dimensional subspace spanned by the orthonormal columns of
// M (d x k) and emits normalize(M^T z + sigma * eta) in R^k. Inversion is
// the pseudo-inverse M, so extract(invert(x)) == x without noise. Two
// extractors built from partially shared bases see overlapping but distinct
// subspaces; what one FRS cannot see, an attack crafted against it cannot
// control, which is what degrades black-box transfer.
//
// Noise terms eta are isotropic Gaussians scaled so E|eta|^2 = 1. Every draw
// comes from a substream keyed by (seed, tag, id, index), so results do not
// depend on evaluation order.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "embmorph/attack_mode.hpp"
#include "embmorph/dataset_io.hpp"
#include "embmorph/embedding.hpp"

namespace embmorph {

/// SplitMix64 finalizer chained over the seed, FNV-1a hashes of tag and id,
/// and the index.
std::uint64_t substream_key(std::uint64_t seed, std::string_view tag, std::string_view id,
                            std::uint64_t index) noexcept;

/// `count` draws of N(0, variance) from the keyed substream
/// (std::mt19937_64 + std::normal_distribution).
std::vector<double> gaussian_draws(std::uint64_t key, std::size_t count, double variance = 1.0);

struct LatentIdentity {
  std::string id;
  std::vector<double> z;  // unit norm
};

/// Uniformly random unit latent for `id`.
LatentIdentity make_identity(std::size_t latent_dim, std::uint64_t seed, std::string id);

class SyntheticFrs {
 public:
  /// `basis` is column-major d x k and must have orthonormal columns.
  SyntheticFrs(std::string label, std::size_t latent_dim, std::size_t embedding_dim,
               std::vector<double> basis, double sample_noise_sigma, std::uint64_t noise_seed);

  const std::string& label() const noexcept { return label_; }
  std::size_t latent_dim() const noexcept { return latent_dim_; }
  std::size_t embedding_dim() const noexcept { return embedding_dim_; }
  double sample_noise_sigma() const noexcept { return sample_noise_sigma_; }
  std::uint64_t noise_seed() const noexcept { return noise_seed_; }

  std::span<const double> basis() const noexcept { return basis_; }
  std::span<const double> column(std::size_t j) const noexcept {
    return std::span<const double>(basis_).subspan(j * latent_dim_, latent_dim_);
  }

  SyntheticFrs with_label(std::string label) const;

  friend bool operator==(const SyntheticFrs&, const SyntheticFrs&) = default;

 private:
  std::string label_;
  std::size_t latent_dim_;
  std::size_t embedding_dim_;
  std::vector<double> basis_;
  double sample_noise_sigma_;
  std::uint64_t noise_seed_;
};

/// Columns of each extractor are QR-orthonormalized blends
/// rho * shared + sqrt(1 - rho^2) * independent of Gaussian matrices.
/// rho = 1 gives identical extractors. Throws InvalidRho, InvalidDims.
std::pair<SyntheticFrs, SyntheticFrs> make_correlated_frs_pair(std::size_t latent_dim, std::size_t embedding_dim,
                                                               double rho, std::uint64_t seed,
                                                               double sample_noise_sigma = 0.0);

/// normalize(M^T z + sigma * eta), eta keyed by (seed, latent id, sample index).
Normalized extract_with_norm(const SyntheticFrs& frs, const LatentIdentity& latent, std::uint64_t sample_index);
Embedding extract(const SyntheticFrs& frs, const LatentIdentity& latent, std::uint64_t sample_index);

/// normalize(M x + sigma * eta), eta keyed by (seed, id).
LatentIdentity invert(const SyntheticFrs& frs, const Embedding& x, double inversion_noise_sigma, std::string id);

struct SimConfig {
  std::size_t latent_dim = 128;
  std::size_t embedding_dim = 32;
  std::size_t n_subjects = 50;
  std::size_t probes_per_subject = 5;
  std::size_t n_nonmated_pairs = 10000;  // calibration comparisons; 0 = all
  std::size_t n_morph_pairs = 0;         // 0 = every unordered subject pair
  double sample_noise_sigma = 0.15;
  double inversion_noise_sigma = 0.05;
  double rho = 0.8;
  std::uint64_t seed = 1;
  std::string frs_a_label = "A";
  std::string frs_b_label = "B";

  /// Throws InvalidConfig, InvalidDims or InvalidRho.
  void validate() const;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// key=value lines, `#` comments. Unknown keys are an error.
SimConfig parse_sim_config(std::string_view text);
std::string format_sim_config(const SimConfig& config);

struct AttackSet {
  std::string attack_label;  // "Inv-<crafting FRS>"
  std::string crafted_with;
  std::string evaluated_on;
  AttackMode mode;
  EmbeddingSet embeddings;   // subject "morph", sample "<A>+<B>"
};

struct SimulationResult {
  SyntheticFrs frs_a;
  SyntheticFrs frs_b;
  EmbeddingSet bonafide_a;  // sample "0" is the reference, "1".."P" are probes
  EmbeddingSet bonafide_b;
  MorphProtocol protocol;
  std::vector<AttackSet> attacks;  // Inv-A on A, Inv-A on B, Inv-B on B, Inv-B on A

  const EmbeddingSet& bonafide(std::string_view frs_label) const;
  const AttackSet& attack(std::string_view crafted_with, std::string_view evaluated_on) const;
};

/// For every protocol pair: morph the two references in the crafting FRS,
/// invert with it, then re-extract the latent with both FRS.
SimulationResult run_attack_simulation(const SimConfig& config);

}  // namespace embmorph
