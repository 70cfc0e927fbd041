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

#include "embmorph/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "embmorph/error.hpp"
#include "embmorph/simd/kernels.hpp"

namespace embmorph {

Embedding make_unit(std::vector<double>&& raw, double norm);

namespace {

void require_dim(std::size_t d) {
  if (d < 2) throw Error(ErrorCode::DimensionTooSmall, "embedding dimension must be >= 2, got " + std::to_string(d));
}

void require_same_dim(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "dimensions " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  }
}

Embedding finish_morph(std::vector<double>&& sum) {
  const double norm = euclidean_norm(sum);
  if (!(norm > kAntipodalTol)) {
    throw Error(ErrorCode::AntipodalSources, "source embeddings cancel out; the morph is not unique");
  }
  return make_unit(std::move(sum), norm);
}

}  // namespace

Embedding make_unit(std::vector<double>&& raw, double norm) {
  const auto& k = simd::active_kernels();
  k.scale(raw.data(), 1.0 / norm, raw.data(), raw.size());
  return Embedding(std::move(raw));
}

double euclidean_norm(std::span<const double> v) noexcept { return std::sqrt(simd::dot(v, v)); }

Normalized normalize_with_norm(std::span<const double> raw) {
  require_dim(raw.size());
  const double norm = euclidean_norm(raw);
  if (!(norm > kDegeneracyTol)) throw Error(ErrorCode::ZeroVector, "cannot normalize a zero vector");
  std::vector<double> values(raw.begin(), raw.end());
  return {make_unit(std::move(values), norm), norm};
}

Embedding normalize(std::span<const double> raw) { return normalize_with_norm(raw).embedding; }

Embedding normalize(std::span<const float> raw) {
  std::vector<double> wide(raw.begin(), raw.end());
  return normalize(wide);
}

Similarity cosine_similarity(const Embedding& a, const Embedding& b) {
  require_same_dim(a, b);
  return {std::clamp(simd::dot(a.values(), b.values()), -1.0, 1.0)};
}

double cosine_distance(const Embedding& a, const Embedding& b) {
  return 1.0 - cosine_similarity(a, b).value;
}

Embedding optimal_morph(const Embedding& x1, const Embedding& x2) {
  require_same_dim(x1, x2);
  std::vector<double> sum(x1.dim());
  simd::active_kernels().add(x1.values().data(), x2.values().data(), sum.data(), sum.size());
  return finish_morph(std::move(sum));
}

Embedding weighted_morph(const Embedding& x1, const Embedding& x2, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::AlphaOutOfRange, "alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  require_same_dim(x1, x2);
  std::vector<double> mix(x1.dim());
  simd::active_kernels().lincomb(alpha, x1.values().data(), 1.0 - alpha, x2.values().data(),
                                 mix.data(), mix.size());
  return finish_morph(std::move(mix));
}

Embedding multi_morph(std::span<const Embedding> sources) {
  if (sources.size() < 2) throw Error(ErrorCode::EmptyList, "a morph needs at least two sources");
  const Embedding& first = sources.front();
  std::vector<double> sum(first.values().begin(), first.values().end());
  const auto& k = simd::active_kernels();
  for (const Embedding& x : sources.subspan(1)) {
    require_same_dim(first, x);
    k.add(sum.data(), x.values().data(), sum.data(), sum.size());
  }
  return finish_morph(std::move(sum));
}

}  // namespace embmorph
