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

// Detectability of attacks from an external detector's scores. Attack
// samples are the positive class; higher scores mean "more likely attack".

#include <span>
#include <string>

#include "embmorph/dataset_io.hpp"
#include "embmorph/report.hpp"

namespace embmorph {

struct DetectionResult {
  std::string attack_label;
  double auc;
  double eer;
  double eer_threshold;
  std::size_t n_attack;
  std::size_t n_bonafide;
};

/// Uses the `attack`-labelled entries of the first set and the
/// `bonafide`-labelled entries of the second. Throws EmptyScores.
DetectionResult evaluate_detection(const ScoreSet& attack_scores, const ScoreSet& bonafide_scores,
                                   std::string attack_label);

/// Columns: Attack, AUC, EER (%), with AUC to three decimals.
ReportTable detection_table(std::span<const DetectionResult> results);

}  // namespace embmorph
