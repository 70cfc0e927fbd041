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

#include <cstddef>
#include <span>
#include <vector>

namespace embmorph {

// Tolerances shared by every module.
inline constexpr double kGeometryTol = 1e-9;    // unit-norm and equidistance checks
inline constexpr double kDegeneracyTol = 1e-12;  // smallest norm accepted by normalize()
inline constexpr double kAntipodalTol = 1e-9;    // smallest source-sum norm for a morph

/// A point on the unit hypersphere. Values are held in 64-bit reals and can
/// only be produced by normalize() or the morph operations, so every instance
/// has unit norm.
class Embedding {
 public:
  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  explicit Embedding(std::vector<double> values) : values_(std::move(values)) {}
  friend Embedding make_unit(std::vector<double>&& raw, double norm);

  std::vector<double> values_;
};

/// Cosine similarity clamped to [-1, 1].
struct Similarity {
  double value;
};

struct Normalized {
  Embedding embedding;
  double raw_norm;
};

double euclidean_norm(std::span<const double> v) noexcept;

Embedding normalize(std::span<const double> raw);
Embedding normalize(std::span<const float> raw);

/// normalize() that also reports the norm the input had.
Normalized normalize_with_norm(std::span<const double> raw);

Similarity cosine_similarity(const Embedding& a, const Embedding& b);

/// 1 - cosine_similarity, in [0, 2].
double cosine_distance(const Embedding& a, const Embedding& b);

/// Minimizer of d(x1, x) + d(x2, x) over the unit sphere under cosine
/// distance: the normalized sum of the sources. Throws AntipodalSources when
/// the sum vanishes, since the minimizer is then a whole great circle.
Embedding optimal_morph(const Embedding& x1, const Embedding& x2);

/// normalize(alpha * x1 + (1 - alpha) * x2), alpha in (0, 1).
Embedding weighted_morph(const Embedding& x1, const Embedding& x2, double alpha);

/// N-source generalization of optimal_morph.
Embedding multi_morph(std::span<const Embedding> sources);

}  // namespace embmorph
