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

#include "embmorph/vulnerability.hpp"

#include <algorithm>
#include <random>

#include "embmorph/error.hpp"
#include "embmorph/simd/kernels.hpp"

namespace embmorph {

namespace {

void require_blocks(std::span<const MorphScoreBlock> blocks) {
  if (blocks.empty()) throw Error(ErrorCode::EmptyBlocks, "no morphs to evaluate");
}

const std::vector<ProbeScore>& probes_checked(const SubjectScores& s) {
  if (s.probes.empty()) throw Error(ErrorCode::MissingProbes, "subject " + s.subject_id + " has no probe scores");
  return s.probes;
}

}  // namespace

std::vector<MorphScoreBlock> score_morphs(const EmbeddingSet& morphs, const EmbeddingSet& probes,
                                          const MorphProtocol& protocol) {
  if (morphs.dim() != probes.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "morph dim " + std::to_string(morphs.dim()) + " vs probe dim " +
                                                  std::to_string(probes.dim()));
  }
  const std::size_t dim = probes.dim();
  const auto& kern = simd::active_kernels();
  std::vector<MorphScoreBlock> blocks;
  blocks.reserve(protocol.pairs().size());
  std::vector<double> gallery;
  std::vector<double> scores;

  for (const MorphPair& pair : protocol.pairs()) {
    const std::string morph_id = pair.morph_id();
    const Embedding& morph = morphs.at(kMorphSubject, morph_id).embedding();
    MorphScoreBlock block{morph_id, {}};
    for (const std::string* subject : {&pair.subject_a, &pair.subject_b}) {
      auto sample_ids = protocol.probes_of(*subject);
      gallery.resize(sample_ids.size() * dim);
      for (std::size_t i = 0; i < sample_ids.size(); ++i) {
        auto values = probes.at(*subject, sample_ids[i]).embedding().values();
        std::copy(values.begin(), values.end(), gallery.begin() + static_cast<std::ptrdiff_t>(i * dim));
      }
      scores.resize(sample_ids.size());
      kern.dot_rows(gallery.data(), sample_ids.size(), dim, morph.values().data(), scores.data());
      SubjectScores subject_scores{*subject, {}};
      for (std::size_t i = 0; i < sample_ids.size(); ++i) {
        subject_scores.probes.push_back({sample_ids[i], std::clamp(scores[i], -1.0, 1.0)});
      }
      block.subjects.push_back(std::move(subject_scores));
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

double minmax_mmpmr(std::span<const MorphScoreBlock> blocks, double threshold) {
  require_blocks(blocks);
  std::size_t accepted = 0;
  for (const MorphScoreBlock& block : blocks) {
    bool all_subjects = true;
    for (const SubjectScores& s : block.subjects) {
      const auto& probes = probes_checked(s);
      const double best = std::max_element(probes.begin(), probes.end(), [](const ProbeScore& a, const ProbeScore& b) {
                            return a.score < b.score;
                          })->score;
      all_subjects = all_subjects && best >= threshold;
    }
    if (all_subjects) ++accepted;
  }
  return static_cast<double>(accepted) / static_cast<double>(blocks.size());
}

double prodavg_mmpmr(std::span<const MorphScoreBlock> blocks, double threshold) {
  require_blocks(blocks);
  double total = 0.0;
  for (const MorphScoreBlock& block : blocks) {
    double product = 1.0;
    for (const SubjectScores& s : block.subjects) {
      const auto& probes = probes_checked(s);
      const auto passing = std::count_if(probes.begin(), probes.end(),
                                         [&](const ProbeScore& p) { return p.score >= threshold; });
      product *= static_cast<double>(passing) / static_cast<double>(probes.size());
    }
    total += product;
  }
  return total / static_cast<double>(blocks.size());
}

VulnerabilityResult evaluate(const EmbeddingSet& morphs, const EmbeddingSet& probes, const MorphProtocol& protocol,
                             double threshold, const ResultLabels& labels) {
  const auto blocks = score_morphs(morphs, probes, protocol);
  return VulnerabilityResult{labels.frs,
                             labels.attack,
                             labels.mode,
                             threshold,
                             minmax_mmpmr(blocks, threshold),
                             prodavg_mmpmr(blocks, threshold),
                             blocks.size()};
}

ReportTable vulnerability_table(std::span<const VulnerabilityResult> results) {
  ReportTable table;
  table.columns = {"FRS", "Attack", "Mode", "MinMax-MMPMR (%)", "ProdAvg-MMPMR (%)", "Threshold", "Morphs"};
  for (const VulnerabilityResult& r : results) {
    table.rows.push_back({r.frs_label, r.attack_label, std::string(mode_name(r.mode)), format_percent(r.minmax_mmpmr),
                          format_percent(r.prodavg_mmpmr), format_fixed(r.threshold, 6), std::to_string(r.n_morphs)});
  }
  table.notes.push_back("A comparison matches when its cosine similarity is >= the threshold.");
  return table;
}

ScoreSet comparison_scores(const EmbeddingSet& bonafide, std::size_t max_nonmated, std::uint64_t seed) {
  auto records = bonafide.records();
  const std::size_t n = records.size();
  ScoreSet scores;
  std::size_t nonmated_total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (records[i].subject_id() == records[j].subject_id()) {
        scores.add(ScoreLabel::Mated, cosine_similarity(records[i].embedding(), records[j].embedding()).value);
      } else {
        ++nonmated_total;
      }
    }
  }
  if (max_nonmated == 0 || max_nonmated >= nonmated_total) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (records[i].subject_id() != records[j].subject_id()) {
          scores.add(ScoreLabel::Nonmated, cosine_similarity(records[i].embedding(), records[j].embedding()).value);
        }
      }
    }
    return scores;
  }
  std::mt19937_64 engine(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::size_t drawn = 0;
  while (drawn < max_nonmated) {
    const std::size_t i = pick(engine);
    const std::size_t j = pick(engine);
    if (records[i].subject_id() == records[j].subject_id()) continue;
    scores.add(ScoreLabel::Nonmated, cosine_similarity(records[i].embedding(), records[j].embedding()).value);
    ++drawn;
  }
  return scores;
}

}  // namespace embmorph
