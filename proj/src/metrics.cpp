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

#include "embmorph/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "embmorph/error.hpp"

namespace embmorph {

namespace {

void require_scores(std::span<const double> scores, const char* what) {
  if (scores.empty()) throw Error(ErrorCode::EmptyScores, std::string(what) + " score list is empty");
}

std::vector<double> sorted_copy(std::span<const double> scores) {
  std::vector<double> out(scores.begin(), scores.end());
  std::sort(out.begin(), out.end());
  return out;
}

// Number of sorted values >= threshold.
std::size_t count_at_least(const std::vector<double>& sorted, double threshold) {
  return static_cast<std::size_t>(sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), threshold));
}

double fraction(std::size_t count, std::size_t total) {
  return static_cast<double>(count) / static_cast<double>(total);
}

}  // namespace

double fmr(std::span<const double> nonmated, double threshold) {
  require_scores(nonmated, "nonmated");
  auto hits = std::count_if(nonmated.begin(), nonmated.end(), [&](double s) { return s >= threshold; });
  return fraction(static_cast<std::size_t>(hits), nonmated.size());
}

double fnmr(std::span<const double> mated, double threshold) {
  require_scores(mated, "mated");
  auto misses = std::count_if(mated.begin(), mated.end(), [&](double s) { return s < threshold; });
  return fraction(static_cast<std::size_t>(misses), mated.size());
}

OperatingPoint calibrate_threshold(std::span<const double> nonmated, double target_fmr,
                                   std::span<const double> mated) {
  require_scores(nonmated, "nonmated");
  if (!(target_fmr > 0.0 && target_fmr < 1.0)) {
    throw Error(ErrorCode::InvalidTarget, "target FMR must lie in (0, 1), got " + std::to_string(target_fmr));
  }
  const std::vector<double> sorted = sorted_copy(nonmated);
  const std::size_t n = sorted.size();

  double threshold = std::numeric_limits<double>::infinity();
  std::size_t accepted = 0;
  // Walk distinct values from the top; the count at or above the first
  // occurrence of a value is n - i.
  for (std::size_t i = n; i-- > 0;) {
    if (i > 0 && sorted[i - 1] == sorted[i]) continue;
    if (fraction(n - i, n) > target_fmr) break;
    threshold = sorted[i];
    accepted = n - i;
  }

  OperatingPoint point{threshold, fraction(accepted, n), std::nullopt, mated.size(), n};
  if (!mated.empty()) point.fnmr = fnmr(mated, threshold);
  return point;
}

EerPoint eer(std::span<const double> mated, std::span<const double> nonmated) {
  require_scores(mated, "mated");
  require_scores(nonmated, "nonmated");
  const std::vector<double> gen = sorted_copy(mated);
  const std::vector<double> imp = sorted_copy(nonmated);

  std::vector<double> candidates;
  candidates.reserve(gen.size() + imp.size());
  std::merge(gen.begin(), gen.end(), imp.begin(), imp.end(), std::back_inserter(candidates));
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  EerPoint best{0.0, candidates.front()};
  double best_gap = std::numeric_limits<double>::infinity();
  for (double t : candidates) {
    const double fm = fraction(count_at_least(imp, t), imp.size());
    const double fn = fraction(gen.size() - count_at_least(gen, t), gen.size());
    const double gap = std::abs(fm - fn);
    if (gap < best_gap) {
      best_gap = gap;
      best = {0.5 * (fm + fn), t};
    }
  }
  return best;
}

double auc(std::span<const double> positive, std::span<const double> negative) {
  require_scores(positive, "positive");
  require_scores(negative, "negative");
  const std::vector<double> neg = sorted_copy(negative);

  // Twice the Mann-Whitney U: 2 per ordered pair, 1 per tie.
  std::uint64_t doubled = 0;
  for (double p : positive) {
    auto lo = std::lower_bound(neg.begin(), neg.end(), p);
    auto hi = std::upper_bound(lo, neg.end(), p);
    doubled += 2 * static_cast<std::uint64_t>(lo - neg.begin()) + static_cast<std::uint64_t>(hi - lo);
  }
  const std::uint64_t total = 2 * static_cast<std::uint64_t>(positive.size()) * negative.size();

  // Divide whichever side is at most one half and take 1 - x for the other:
  // the two orientations then sum to exactly 1.
  if (2 * doubled <= total) return static_cast<double>(doubled) / static_cast<double>(total);
  return 1.0 - static_cast<double>(total - doubled) / static_cast<double>(total);
}

}  // namespace embmorph
