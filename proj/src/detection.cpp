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

#include "embmorph/detection.hpp"

#include "embmorph/metrics.hpp"

namespace embmorph {

DetectionResult evaluate_detection(const ScoreSet& attack_scores, const ScoreSet& bonafide_scores,
                                   std::string attack_label) {
  const std::vector<double> attack = attack_scores.scores(ScoreLabel::Attack);
  const std::vector<double> bonafide = bonafide_scores.scores(ScoreLabel::Bonafide);
  const EerPoint point = eer(attack, bonafide);
  return DetectionResult{std::move(attack_label), auc(attack, bonafide), point.eer, point.threshold,
                         attack.size(), bonafide.size()};
}

ReportTable detection_table(std::span<const DetectionResult> results) {
  ReportTable table;
  table.columns = {"Attack", "AUC", "EER (%)"};
  for (const DetectionResult& r : results) {
    table.rows.push_back({r.attack_label, format_fixed(r.auc, 3), format_percent(r.eer)});
  }
  table.notes.push_back(
      "EER is the mean of FMR and FNMR at the observed score minimizing |FMR - FNMR|; no interpolation.");
  return table;
}

}  // namespace embmorph
