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

// The `embmorph` command-line front end. Each subcommand is also callable
// as a function so tests can drive it without spawning a process.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "embmorph/dataset_io.hpp"
#include "embmorph/metrics.hpp"
#include "embmorph/report.hpp"

namespace embmorph::cli {

/// Name of the one environment variable the tool reads: the default output
/// directory for commands whose --out is omitted.
inline constexpr const char* kOutDirEnv = "EMBMORPH_OUT_DIR";

/// One morph per protocol pair from the pair's reference embeddings:
/// optimal_morph, or weighted_morph when alpha is given. Records carry
/// subject "morph" and sample "<A>+<B>".
EmbeddingSet generate_morphs(const EmbeddingSet& references, const MorphProtocol& protocol,
                             std::optional<double> alpha = std::nullopt);

struct BenchStats {
  std::vector<double> seconds;  // one entry per repetition
  double mean;
  double stddev;                // sample standard deviation
  std::size_t n_morphs;
};

/// Times end-to-end generation (parse inputs, morph every pair, serialize)
/// over `repetitions` runs. Throws InvalidArgument if repetitions < 2.
BenchStats bench_morph_generation(std::string_view embedding_bytes, std::string_view protocol_text,
                                  std::size_t repetitions);

/// "m ± s" in seconds, two decimals when m >= 0.005, otherwise scientific.
std::string format_mean_sd(double mean, double sd);

/// Columns: Attack, Runtime (s), Per morph (s), Runs, Morphs.
ReportTable bench_table(const std::string& label, const BenchStats& stats);

struct MorphOptions {
  std::filesystem::path in;
  std::filesystem::path protocol;
  std::filesystem::path out;
  std::optional<double> alpha;
};

struct SimulateOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;
};

struct CalibrateOptions {
  std::filesystem::path in;  // score CSV or embedding file
  double target_fmr = 1e-3;
  std::optional<std::filesystem::path> out;
};

struct EvalVulnOptions {
  std::filesystem::path in;      // morph embeddings
  std::filesystem::path probes;  // bona fide embeddings
  std::filesystem::path protocol;
  std::optional<double> threshold;
  std::optional<std::filesystem::path> calib;  // score CSV or embedding file
  double target_fmr = 1e-3;
  std::string frs = "FRS";
  std::string attack = "Attack";
  std::string mode = "white-box";
  std::optional<std::filesystem::path> out;
  ReportFormat format = ReportFormat::Csv;
};

struct EvalDetectOptions {
  std::filesystem::path in;        // attack scores
  std::filesystem::path bonafide;  // bona fide scores
  std::string attack = "Attack";
  std::optional<std::filesystem::path> out;
  ReportFormat format = ReportFormat::Csv;
};

struct BenchOptions {
  std::filesystem::path in;
  std::filesystem::path protocol;
  std::size_t reps = 10;
  std::string label = "Embedding morph";
  std::optional<std::filesystem::path> out;
  ReportFormat format = ReportFormat::Csv;
};

void cmd_morph(const MorphOptions& options, std::ostream& out);
void cmd_simulate(const SimulateOptions& options, std::ostream& out);
OperatingPoint cmd_calibrate(const CalibrateOptions& options, std::ostream& out);
void cmd_eval_vuln(const EvalVulnOptions& options, std::ostream& out);
void cmd_eval_detect(const EvalDetectOptions& options, std::ostream& out);
BenchStats cmd_bench(const BenchOptions& options, std::ostream& out);

/// Parses argv and dispatches. Returns 0 on success, 1 on a typed error
/// (reported on `err` as "error: <Name>: ..."), 2 on a usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace embmorph::cli
