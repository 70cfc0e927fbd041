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

// Verification metrics. A comparison matches iff score >= threshold; every
// metric in the library uses this one rule. Inputs are never mutated.

#include <cstddef>
#include <optional>
#include <span>

namespace embmorph {

struct OperatingPoint {
  double threshold;
  double fmr;
  std::optional<double> fnmr;  // present when mated scores were supplied
  std::size_t n_mated;
  std::size_t n_nonmated;
};

/// Fraction of nonmated scores >= threshold.
double fmr(std::span<const double> nonmated, double threshold);

/// Fraction of mated scores < threshold.
double fnmr(std::span<const double> mated, double threshold);

/// Smallest threshold, among the observed nonmated scores and +inf, whose
/// empirical FMR does not exceed target_fmr. Mated scores, when given, only
/// fill in the FNMR of the chosen point.
OperatingPoint calibrate_threshold(std::span<const double> nonmated, double target_fmr,
                                   std::span<const double> mated = {});

struct EerPoint {
  double eer;
  double threshold;
};

/// Scans the union of observed scores for the threshold minimizing
/// |FMR - FNMR| (lowest threshold on ties) and reports (FMR + FNMR) / 2 there.
/// No interpolation between observed scores.
EerPoint eer(std::span<const double> mated, std::span<const double> nonmated);

/// Mann-Whitney estimate of P(pos > neg) + P(pos == neg) / 2.
/// auc(p, n) + auc(n, p) == 1 holds exactly in floating point.
double auc(std::span<const double> positive, std::span<const double> negative);

}  // namespace embmorph
