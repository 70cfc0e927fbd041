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

// Test-only reference computations. Everything here is written directly from
// the metric definitions with plain loops and does not call the library's
// kernels or metric code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <span>
#include <random>
#include <string>
#include <vector>

namespace oracle {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) acc += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(acc);
}

inline std::vector<double> unit(std::vector<double> v) {
  const double n = std::sqrt(dot(v, v));
  for (double& x : v) x /= n;
  return v;
}

inline std::vector<double> random_unit(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> g;
  std::vector<double> v(d);
  for (double& x : v) x = g(rng);
  return unit(std::move(v));
}

inline std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

/// Random orthogonal matrix (row-major d x d) by classical Gram-Schmidt on
/// Gaussian rows, repeated twice for stability.
inline std::vector<std::vector<double>> random_orthogonal(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> q(d, std::vector<double>(d));
  for (auto& row : q) for (double& x : row) x = g(rng);
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        const double p = dot(q[i], q[j]);
        for (std::size_t t = 0; t < d; ++t) q[i][t] -= p * q[j][t];
      }
      q[i] = unit(q[i]);
    }
  }
  return q;
}

inline std::vector<double> apply(const std::vector<std::vector<double>>& m, const std::vector<double>& v) {
  std::vector<double> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = dot(m[i], v);
  return out;
}

inline double fmr(const std::vector<double>& nonmated, double t) {
  std::size_t c = 0;
  for (double s : nonmated) c += s >= t;
  return static_cast<double>(c) / static_cast<double>(nonmated.size());
}

inline double fnmr(const std::vector<double>& mated, double t) {
  std::size_t c = 0;
  for (double s : mated) c += s < t;
  return static_cast<double>(c) / static_cast<double>(mated.size());
}

/// Exhaustive scan over the union of observed scores.
inline std::pair<double, double> eer(const std::vector<double>& mated, const std::vector<double>& nonmated) {
  std::vector<double> cands = mated;
  cands.insert(cands.end(), nonmated.begin(), nonmated.end());
  std::sort(cands.begin(), cands.end());
  double best_gap = std::numeric_limits<double>::infinity();
  std::pair<double, double> best{0, 0};
  for (double t : cands) {
    const double a = fmr(nonmated, t), b = fnmr(mated, t);
    if (std::abs(a - b) < best_gap) {
      best_gap = std::abs(a - b);
      best = {(a + b) / 2, t};
    }
  }
  return best;
}

/// Pairwise Mann-Whitney count.
inline double auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double acc = 0.0;
  for (double p : pos)
    for (double n : neg) acc += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  return acc / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

/// One morph's scores: per subject, that subject's probe similarities.
using MorphScores = std::vector<std::vector<double>>;

inline double minmax_mmpmr(const std::vector<MorphScores>& morphs, double t) {
  double hits = 0;
  for (const auto& m : morphs) {
    bool ok = true;
    for (const auto& subject : m) ok = ok && *std::max_element(subject.begin(), subject.end()) >= t;
    hits += ok ? 1 : 0;
  }
  return hits / static_cast<double>(morphs.size());
}

inline double prodavg_mmpmr(const std::vector<MorphScores>& morphs, double t) {
  double total = 0;
  for (const auto& m : morphs) {
    double prod = 1;
    for (const auto& subject : m) {
      std::size_t pass = 0;
      for (double s : subject) pass += s >= t;
      prod *= static_cast<double>(pass) / static_cast<double>(subject.size());
    }
    total += prod;
  }
  return total / static_cast<double>(morphs.size());
}

/// Spearman rank correlation with average ranks for ties.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j) + 1.0;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) { mx += rx[i]; my += ry[i]; }
  mx /= n; my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  static std::mt19937_64 rng(std::random_device{}());
  auto p = std::filesystem::temp_directory_path() / ("embmorph-" + name + "-" + std::to_string(rng() % 1000000007));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace oracle
