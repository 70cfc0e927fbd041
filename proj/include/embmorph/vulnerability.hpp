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

// Morphing-attack vulnerability: morphs are enrolled as references and
// compared against bona fide probes of both contributing subjects.
//
// MinMax-MMPMR  = (1/M) sum_m [ min_n max_i S(m, n, i) >= t ]
// ProdAvg-MMPMR = (1/M) sum_m prod_n (1/I_n) sum_i [ S(m, n, i) >= t ]
//
// with M morphs, n over the two contributing subjects and i over that
// subject's I_n probes.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "embmorph/attack_mode.hpp"
#include "embmorph/dataset_io.hpp"
#include "embmorph/metrics.hpp"
#include "embmorph/report.hpp"

namespace embmorph {

/// Subject id carried by every morph embedding record.
inline constexpr std::string_view kMorphSubject = "morph";

struct ProbeScore {
  std::string sample_id;
  double score;
};

struct SubjectScores {
  std::string subject_id;
  std::vector<ProbeScore> probes;
};

struct MorphScoreBlock {
  std::string morph_id;
  std::vector<SubjectScores> subjects;
};

/// One block per protocol pair, in protocol order. The morph of pair (A, B)
/// is looked up as ("morph", "A+B"). Throws MissingEmbedding, DimensionMismatch.
std::vector<MorphScoreBlock> score_morphs(const EmbeddingSet& morphs, const EmbeddingSet& probes,
                                          const MorphProtocol& protocol);

double minmax_mmpmr(std::span<const MorphScoreBlock> blocks, double threshold);
double prodavg_mmpmr(std::span<const MorphScoreBlock> blocks, double threshold);

struct ResultLabels {
  std::string frs;
  std::string attack;
  AttackMode mode;
};

struct VulnerabilityResult {
  std::string frs_label;
  std::string attack_label;
  AttackMode mode;
  double threshold;
  double minmax_mmpmr;
  double prodavg_mmpmr;
  std::size_t n_morphs;
};

VulnerabilityResult evaluate(const EmbeddingSet& morphs, const EmbeddingSet& probes, const MorphProtocol& protocol,
                             double threshold, const ResultLabels& labels);

/// Columns: FRS, Attack, Mode, MinMax-MMPMR (%), ProdAvg-MMPMR (%), Threshold, Morphs.
ReportTable vulnerability_table(std::span<const VulnerabilityResult> results);

/// Mated (same subject, different sample) and nonmated (different subject)
/// similarities over a bona fide set. All nonmated pairs are used when
/// max_nonmated is 0 or covers them; otherwise max_nonmated pairs are drawn
/// with replacement from a generator seeded with `seed`.
ScoreSet comparison_scores(const EmbeddingSet& bonafide, std::size_t max_nonmated = 0, std::uint64_t seed = 0);

}  // namespace embmorph
