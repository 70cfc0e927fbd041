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

#include "embmorph/cli/commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>

#include "embmorph/attack_mode.hpp"
#include "embmorph/cli/manifest.hpp"
#include "embmorph/detection.hpp"
#include "embmorph/error.hpp"
#include "embmorph/synthetic_frs.hpp"
#include "embmorph/vulnerability.hpp"

namespace embmorph::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kFembMagic = "FEMB";

fs::path default_out_dir() {
  if (const char* dir = std::getenv(kOutDirEnv); dir != nullptr && *dir != '\0') return dir;
  return ".";
}

fs::path manifest_path_for(const fs::path& output) {
  fs::path p = output;
  p += ".manifest.json";
  return p;
}

std::string read_input(const fs::path& path, RunManifest& manifest) {
  std::string bytes = read_file_bytes(path);
  manifest.add_input(path, bytes);
  return bytes;
}

EmbeddingSet embeddings_from_bytes(std::string_view bytes) {
  if (bytes.substr(0, kFembMagic.size()) == kFembMagic) return parse_embeddings(bytes);
  return parse_embeddings_csv(bytes);
}

bool looks_like_score_csv(std::string_view bytes) { return bytes.substr(0, 11) == "label,score"; }

// Mated and nonmated scores from either a score CSV or a bona fide
// embedding set (all pairs).
ScoreSet calibration_scores(const fs::path& path, RunManifest& manifest) {
  const std::string bytes = read_input(path, manifest);
  if (looks_like_score_csv(bytes)) return parse_scores_csv(bytes);
  return comparison_scores(embeddings_from_bytes(bytes));
}

OperatingPoint calibrate_from(const ScoreSet& scores, double target_fmr) {
  const auto nonmated = scores.scores(ScoreLabel::Nonmated);
  const auto mated = scores.scores(ScoreLabel::Mated);
  return calibrate_threshold(nonmated, target_fmr, mated);
}

std::string format_operating_point(const OperatingPoint& op, double target_fmr) {
  char buf[64];
  auto num = [&](double v) {
    if (std::isinf(v)) return std::string(v > 0 ? "inf" : "-inf");
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
  };
  std::string out;
  out += "target_fmr=" + num(target_fmr) + "\n";
  out += "threshold=" + num(op.threshold) + "\n";
  out += "fmr=" + num(op.fmr) + "\n";
  out += "fnmr=" + (op.fnmr ? num(*op.fnmr) : std::string("n/a")) + "\n";
  out += "n_mated=" + std::to_string(op.n_mated) + "\n";
  out += "n_nonmated=" + std::to_string(op.n_nonmated) + "\n";
  return out;
}

void emit_report(const ReportTable& table, ReportFormat format, const std::optional<fs::path>& out_path,
                 std::ostream& out, RunManifest& manifest, std::string_view default_stem) {
  const std::string rendered = render_report(table, format);
  out << rendered;
  fs::path manifest_target;
  if (out_path) {
    write_file_atomic(*out_path, rendered);
    manifest.outputs.push_back(out_path->string());
    manifest_target = *out_path;
  } else {
    manifest_target = default_out_dir() / std::string(default_stem);
  }
  manifest.write(manifest_path_for(manifest_target));
}

double sample_stddev(const std::vector<double>& v, double mean) {
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace

// --- pipeline helpers --------------------------------------------------------

EmbeddingSet generate_morphs(const EmbeddingSet& references, const MorphProtocol& protocol,
                             std::optional<double> alpha) {
  EmbeddingSet morphs(references.dim(), true);
  for (const MorphPair& p : protocol.pairs()) {
    const Embedding& a = references.at(p.subject_a, p.reference_a).embedding();
    const Embedding& b = references.at(p.subject_b, p.reference_b).embedding();
    const Embedding m = alpha ? weighted_morph(a, b, *alpha) : optimal_morph(a, b);
    morphs.add(EmbeddingRecord::from_embedding(std::string(kMorphSubject), p.morph_id(), m, 1.0));
  }
  return morphs;
}

BenchStats bench_morph_generation(std::string_view embedding_bytes, std::string_view protocol_text,
                                  std::size_t repetitions) {
  if (repetitions < 2) throw Error(ErrorCode::InvalidArgument, "bench needs at least 2 repetitions");
  BenchStats stats{{}, 0.0, 0.0, 0};
  stats.seconds.reserve(repetitions);
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto start = std::chrono::steady_clock::now();
    const EmbeddingSet refs = embeddings_from_bytes(embedding_bytes);
    const MorphProtocol protocol = parse_protocol(protocol_text);
    const EmbeddingSet morphs = generate_morphs(refs, protocol);
    const std::string bytes = serialize_embeddings(morphs);
    const auto stop = std::chrono::steady_clock::now();
    stats.seconds.push_back(std::chrono::duration<double>(stop - start).count());
    stats.n_morphs = morphs.size();
    if (bytes.empty()) throw Error(ErrorCode::IoError, "serialization produced no bytes");
  }
  double sum = 0.0;
  for (double s : stats.seconds) sum += s;
  stats.mean = sum / static_cast<double>(repetitions);
  stats.stddev = sample_stddev(stats.seconds, stats.mean);
  return stats;
}

std::string format_mean_sd(double mean, double sd) {
  char buf[96];
  if (mean >= 0.005) {
    std::snprintf(buf, sizeof(buf), "%.2f ± %.2f", mean, sd);
  } else {
    std::snprintf(buf, sizeof(buf), "%.2e ± %.2e", mean, sd);
  }
  return buf;
}

ReportTable bench_table(const std::string& label, const BenchStats& stats) {
  ReportTable table;
  table.columns = {"Attack", "Runtime (s)", "Per morph (s)", "Runs", "Morphs"};
  const double per = stats.n_morphs ? 1.0 / static_cast<double>(stats.n_morphs) : 0.0;
  table.rows.push_back({label, format_mean_sd(stats.mean, stats.stddev),
                        format_mean_sd(stats.mean * per, stats.stddev * per), std::to_string(stats.seconds.size()),
                        std::to_string(stats.n_morphs)});
  table.notes.push_back("Runtime is mean ± sample standard deviation of end-to-end generation over all runs.");
  return table;
}

// --- commands ----------------------------------------------------------------

void cmd_morph(const MorphOptions& options, std::ostream& out) {
  RunManifest manifest("morph");
  manifest.config["alpha"] = options.alpha ? nlohmann::ordered_json(*options.alpha) : nlohmann::ordered_json(nullptr);
  PhaseTimer timer(manifest);
  const EmbeddingSet refs = embeddings_from_bytes(read_input(options.in, manifest));
  const MorphProtocol protocol = parse_protocol(read_input(options.protocol, manifest));
  timer.lap("read");
  const EmbeddingSet morphs = generate_morphs(refs, protocol, options.alpha);
  timer.lap("morph");
  write_embeddings(morphs, options.out);
  timer.lap("write");
  manifest.outputs.push_back(options.out.string());
  manifest.write(manifest_path_for(options.out));
  out << "wrote " << morphs.size() << " morphs to " << options.out.string() << "\n";
}

void cmd_simulate(const SimulateOptions& options, std::ostream& out) {
  RunManifest manifest("simulate");
  PhaseTimer timer(manifest);
  SimConfig config = parse_sim_config(read_input(options.config, manifest));
  if (options.seed) config.seed = *options.seed;
  config.validate();
  manifest.seed = config.seed;
  manifest.config["latent_dim"] = config.latent_dim;
  manifest.config["embedding_dim"] = config.embedding_dim;
  manifest.config["n_subjects"] = config.n_subjects;
  manifest.config["probes_per_subject"] = config.probes_per_subject;
  manifest.config["n_nonmated_pairs"] = config.n_nonmated_pairs;
  manifest.config["n_morph_pairs"] = config.n_morph_pairs;
  manifest.config["sample_noise_sigma"] = config.sample_noise_sigma;
  manifest.config["inversion_noise_sigma"] = config.inversion_noise_sigma;
  manifest.config["rho"] = config.rho;
  manifest.config["frs_a_label"] = config.frs_a_label;
  manifest.config["frs_b_label"] = config.frs_b_label;

  const SimulationResult sim = run_attack_simulation(config);
  timer.lap("simulate");

  fs::create_directories(options.out_dir);
  auto emit = [&](const std::string& name, const EmbeddingSet& set) {
    const fs::path p = options.out_dir / name;
    write_embeddings(set, p);
    manifest.outputs.push_back(p.string());
  };
  emit("bonafide_" + sim.frs_a.label() + ".femb", sim.bonafide_a);
  emit("bonafide_" + sim.frs_b.label() + ".femb", sim.bonafide_b);
  for (const AttackSet& a : sim.attacks) {
    emit("attack_" + a.attack_label + "_on_" + a.evaluated_on + ".femb", a.embeddings);
  }
  const fs::path protocol_path = options.out_dir / "protocol.txt";
  write_protocol(sim.protocol, protocol_path);
  manifest.outputs.push_back(protocol_path.string());
  timer.lap("write");
  manifest.write(options.out_dir / "manifest.json");
  out << "wrote " << manifest.outputs.size() << " files to " << options.out_dir.string() << "\n";
}

OperatingPoint cmd_calibrate(const CalibrateOptions& options, std::ostream& out) {
  RunManifest manifest("calibrate");
  manifest.config["target_fmr"] = options.target_fmr;
  PhaseTimer timer(manifest);
  const ScoreSet scores = calibration_scores(options.in, manifest);
  timer.lap("read");
  const OperatingPoint op = calibrate_from(scores, options.target_fmr);
  timer.lap("calibrate");
  const std::string text = format_operating_point(op, options.target_fmr);
  out << text;
  fs::path manifest_target = default_out_dir() / "calibrate";
  if (options.out) {
    write_file_atomic(*options.out, text);
    manifest.outputs.push_back(options.out->string());
    manifest_target = *options.out;
  }
  manifest.write(manifest_path_for(manifest_target));
  return op;
}

void cmd_eval_vuln(const EvalVulnOptions& options, std::ostream& out) {
  const auto mode = parse_mode(options.mode);
  if (!mode) throw Error(ErrorCode::InvalidArgument, "mode must be white-box or black-box");
  if (options.threshold.has_value() == options.calib.has_value()) {
    throw Error(ErrorCode::InvalidArgument, "give exactly one of --threshold or --calib");
  }
  RunManifest manifest("eval-vuln");
  manifest.config["frs"] = options.frs;
  manifest.config["attack"] = options.attack;
  manifest.config["mode"] = options.mode;
  PhaseTimer timer(manifest);
  const EmbeddingSet morphs = embeddings_from_bytes(read_input(options.in, manifest));
  const EmbeddingSet probes = embeddings_from_bytes(read_input(options.probes, manifest));
  const MorphProtocol protocol = parse_protocol(read_input(options.protocol, manifest));
  timer.lap("read");

  double threshold = 0.0;
  if (options.threshold) {
    threshold = *options.threshold;
  } else {
    manifest.config["target_fmr"] = options.target_fmr;
    threshold = calibrate_from(calibration_scores(*options.calib, manifest), options.target_fmr).threshold;
    timer.lap("calibrate");
  }
  manifest.config["threshold"] = threshold;
  const VulnerabilityResult result =
      evaluate(morphs, probes, protocol, threshold, ResultLabels{options.frs, options.attack, *mode});
  timer.lap("evaluate");
  emit_report(vulnerability_table(std::span(&result, 1)), options.format, options.out, out, manifest, "eval-vuln");
}

void cmd_eval_detect(const EvalDetectOptions& options, std::ostream& out) {
  RunManifest manifest("eval-detect");
  manifest.config["attack"] = options.attack;
  PhaseTimer timer(manifest);
  const ScoreSet attack = parse_scores_csv(read_input(options.in, manifest));
  const ScoreSet bonafide = parse_scores_csv(read_input(options.bonafide, manifest));
  timer.lap("read");
  const DetectionResult result = evaluate_detection(attack, bonafide, options.attack);
  timer.lap("evaluate");
  emit_report(detection_table(std::span(&result, 1)), options.format, options.out, out, manifest, "eval-detect");
}

BenchStats cmd_bench(const BenchOptions& options, std::ostream& out) {
  RunManifest manifest("bench");
  manifest.config["repetitions"] = options.reps;
  manifest.config["label"] = options.label;
  const std::string embeddings = read_input(options.in, manifest);
  const std::string protocol = read_input(options.protocol, manifest);
  const BenchStats stats = bench_morph_generation(embeddings, protocol, options.reps);
  for (std::size_t i = 0; i < stats.seconds.size(); ++i) {
    manifest.timings.emplace_back("run_" + std::to_string(i), stats.seconds[i]);
  }
  manifest.config["n_morphs"] = stats.n_morphs;
  emit_report(bench_table(options.label, stats), options.format, options.out, out, manifest, "bench");
  return stats;
}

// --- argv front end ----------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Embedding-space morphing attacks: generation, simulation and vulnerability evaluation", "embmorph"};
  app.require_subcommand(1);
  app.set_version_flag("--version", EMBMORPH_VERSION);

  const std::vector<std::string> formats{"csv", "markdown", "md"};
  std::string format_text = "csv";

  MorphOptions morph;
  auto* morph_cmd = app.add_subcommand("morph", "Morph embeddings for every protocol pair");
  morph_cmd->add_option("--in", morph.in, "Reference embeddings (FEMB or CSV)")->required();
  morph_cmd->add_option("--protocol", morph.protocol, "Protocol file")->required();
  morph_cmd->add_option("--out", morph.out, "Output FEMB file")->required();
  morph_cmd->add_option("--alpha", morph.alpha, "Weight of the first subject, in (0, 1)");

  SimulateOptions simulate;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the synthetic FRS attack simulation");
  sim_cmd->add_option("--in", simulate.config, "key=value simulation config")->required();
  sim_cmd->add_option("--out", simulate.out_dir, "Output directory");
  sim_cmd->add_option("--seed", simulate.seed, "Override the config seed");

  CalibrateOptions calibrate;
  auto* cal_cmd = app.add_subcommand("calibrate", "Pick the threshold meeting a target FMR");
  cal_cmd->add_option("--in", calibrate.in, "Score CSV (label,score) or bona fide embeddings")->required();
  cal_cmd->add_option("--target-fmr", calibrate.target_fmr, "Target false match rate")->capture_default_str();
  cal_cmd->add_option("--out", calibrate.out, "Write the operating point here");

  EvalVulnOptions vuln;
  auto* vuln_cmd = app.add_subcommand("eval-vuln", "MinMax- and ProdAvg-MMPMR of a morph set");
  vuln_cmd->add_option("--in", vuln.in, "Morph embeddings")->required();
  vuln_cmd->add_option("--probes", vuln.probes, "Bona fide probe embeddings")->required();
  vuln_cmd->add_option("--protocol", vuln.protocol, "Protocol file")->required();
  vuln_cmd->add_option("--threshold", vuln.threshold, "Decision threshold");
  vuln_cmd->add_option("--calib", vuln.calib, "Calibrate the threshold from this score CSV or embedding file");
  vuln_cmd->add_option("--target-fmr", vuln.target_fmr, "Target FMR for --calib")->capture_default_str();
  vuln_cmd->add_option("--frs", vuln.frs, "FRS label for the report");
  vuln_cmd->add_option("--attack", vuln.attack, "Attack label for the report");
  vuln_cmd->add_option("--mode", vuln.mode, "white-box or black-box")->check(CLI::IsMember({"white-box", "black-box"}));
  vuln_cmd->add_option("--out", vuln.out, "Report file");
  vuln_cmd->add_option("--format", format_text, "csv or markdown")->check(CLI::IsMember(formats));

  EvalDetectOptions detect;
  auto* det_cmd = app.add_subcommand("eval-detect", "AUC and EER of attack-detector scores");
  det_cmd->add_option("--in", detect.in, "Attack score CSV")->required();
  det_cmd->add_option("--bonafide", detect.bonafide, "Bona fide score CSV")->required();
  det_cmd->add_option("--attack", detect.attack, "Attack label for the report");
  det_cmd->add_option("--out", detect.out, "Report file");
  det_cmd->add_option("--format", format_text, "csv or markdown")->check(CLI::IsMember(formats));

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time end-to-end embedding morph generation");
  bench_cmd->add_option("--in", bench.in, "Reference embeddings")->required();
  bench_cmd->add_option("--protocol", bench.protocol, "Protocol file")->required();
  bench_cmd->add_option("--reps", bench.reps, "Repetitions (>= 2)")->capture_default_str();
  bench_cmd->add_option("--attack", bench.label, "Row label for the report");
  bench_cmd->add_option("--out", bench.out, "Report file");
  bench_cmd->add_option("--format", format_text, "csv or markdown")->check(CLI::IsMember(formats));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const ReportFormat format = parse_report_format(format_text).value_or(ReportFormat::Csv);
    if (morph_cmd->parsed()) {
      cmd_morph(morph, out);
    } else if (sim_cmd->parsed()) {
      if (simulate.out_dir.empty()) simulate.out_dir = default_out_dir();
      cmd_simulate(simulate, out);
    } else if (cal_cmd->parsed()) {
      cmd_calibrate(calibrate, out);
    } else if (vuln_cmd->parsed()) {
      vuln.format = format;
      cmd_eval_vuln(vuln, out);
    } else if (det_cmd->parsed()) {
      detect.format = format;
      cmd_eval_detect(detect, out);
    } else if (bench_cmd->parsed()) {
      bench.format = format;
      cmd_bench(bench, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << error_name(ErrorCode::IoError) << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace embmorph::cli
