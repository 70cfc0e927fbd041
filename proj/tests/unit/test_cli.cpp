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

#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <json.hpp>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "embmorph/cli/commands.hpp"
#include "embmorph/cli/manifest.hpp"
#include "embmorph/synthetic_frs.hpp"
#include "oracles.hpp"

using namespace embmorph;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "embmorph");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Every test works inside its own scratch directory, which is also the
// default output directory.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(oracle::scratch_dir(name)) {
    setenv(cli::kOutDirEnv, dir.c_str(), 1);
  }
  ~Scratch() {
    unsetenv(cli::kOutDirEnv);
    fs::remove_all(dir);
  }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

EmbeddingSet reference_set(std::mt19937_64& rng, std::size_t dim) {
  EmbeddingSet set(dim, true);
  for (const char* s : {"A", "B", "C"}) {
    for (const char* sample : {"ref", "p1", "p2"}) {
      set.add(EmbeddingRecord::from_embedding(s, sample, normalize(oracle::random_unit(rng, dim)), 1.0));
    }
  }
  return set;
}

const char* kProtocol =
    "pair A B ref ref\n"
    "pair A C ref ref\n"
    "probe A p1\nprobe A p2\nprobe B p1\nprobe B p2\nprobe C p1\nprobe C p2\n";

std::string write_scores(const Scratch& s, const std::string& name, ScoreLabel label, const std::vector<double>& v) {
  ScoreSet set;
  set.add_all(label, v);
  write_scores_csv(set, s / name);
  return s / name;
}

}  // namespace

TEST_CASE("morph command") {
  Scratch s("cli-morph");
  std::mt19937_64 rng(51);
  const EmbeddingSet refs = reference_set(rng, 16);
  write_embeddings(refs, s / "refs.femb");
  write_file_atomic(s / "protocol.txt", kProtocol);

  const Outcome r = run_cli({"morph", "--in", s / "refs.femb", "--protocol", s / "protocol.txt", "--out", s / "m.femb"});
  REQUIRE(r.code == 0);
  const EmbeddingSet morphs = read_embeddings(s / "m.femb");
  CHECK(morphs.size() == 2);
  const Embedding expected = optimal_morph(refs.at("A", "ref").embedding(), refs.at("B", "ref").embedding());
  const Embedding& got = morphs.at("morph", "A+B").embedding();
  for (std::size_t i = 0; i < 16; ++i) CHECK(std::abs(got[i] - expected[i]) < 1e-6);
  CHECK(fs::exists(s / "m.femb.manifest.json"));

  SUBCASE("weighted") {
    const Outcome w = run_cli({"morph", "--in", s / "refs.femb", "--protocol", s / "protocol.txt", "--out",
                               s / "w.femb", "--alpha", "0.9"});
    REQUIRE(w.code == 0);
    const EmbeddingSet weighted = read_embeddings(s / "w.femb");
    const Embedding& near_a = weighted.at("morph", "A+B").embedding();
    CHECK(cosine_similarity(near_a, refs.at("A", "ref").embedding()).value >
          cosine_similarity(got, refs.at("A", "ref").embedding()).value);
  }
  SUBCASE("identical twins") {
    EmbeddingSet twins(4, true);
    const Embedding e = normalize(std::vector<double>{1, 2, 3, 4});
    twins.add(EmbeddingRecord::from_embedding("T1", "0", e, 1.0));
    twins.add(EmbeddingRecord::from_embedding("T2", "0", e, 1.0));
    write_embeddings(twins, s / "twins.femb");
    write_file_atomic(s / "twins.txt", "pair T1 T2 0 0\nprobe T1 0\nprobe T2 0\n");
    REQUIRE(run_cli({"morph", "--in", s / "twins.femb", "--protocol", s / "twins.txt", "--out", s / "t.femb"}).code == 0);
    CHECK(read_embeddings(s / "t.femb").at("morph", "T1+T2").embedding() == twins.at("T1", "0").embedding());
  }
  SUBCASE("missing reference") {
    write_file_atomic(s / "bad.txt", "pair A B nope ref\nprobe A p1\nprobe B p1\n");
    const Outcome bad = run_cli({"morph", "--in", s / "refs.femb", "--protocol", s / "bad.txt", "--out", s / "x.femb"});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("MissingEmbedding") != std::string::npos);
    CHECK_FALSE(fs::exists(s / "x.femb"));
  }
  SUBCASE("usage errors") {
    CHECK(run_cli({"morph", "--in", s / "refs.femb"}).code == 2);
    CHECK(run_cli({"frobnicate"}).code == 2);
  }
}

TEST_CASE("simulate command") {
  Scratch s("cli-sim");
  write_file_atomic(s / "sim.cfg", "latent_dim=48\nembedding_dim=12\nn_subjects=6\nprobes_per_subject=2\n");
  REQUIRE(run_cli({"simulate", "--in", s / "sim.cfg", "--out", s / "run1"}).code == 0);
  REQUIRE(run_cli({"simulate", "--in", s / "sim.cfg", "--out", s / "run2"}).code == 0);

  const std::vector<std::string> data_files = {
      "bonafide_A.femb",         "bonafide_B.femb",         "attack_Inv-A_on_A.femb", "attack_Inv-A_on_B.femb",
      "attack_Inv-B_on_B.femb", "attack_Inv-B_on_A.femb", "protocol.txt"};
  std::size_t femb = 0;
  for (const auto& entry : fs::directory_iterator(s / "run1")) femb += entry.path().extension() == ".femb";
  CHECK(femb == 6);
  for (const auto& f : data_files) {
    CAPTURE(f);
    REQUIRE(fs::exists(fs::path(s / "run1") / f));
    CHECK(read_file_bytes(fs::path(s / "run1") / f) == read_file_bytes(fs::path(s / "run2") / f));
  }

  const auto manifest = nlohmann::json::parse(read_file_bytes(fs::path(s / "run1") / "manifest.json"));
  CHECK(manifest["command"] == "simulate");
  CHECK(manifest["seed"] == 1);
  CHECK(manifest["outputs"].size() == 7);
  CHECK(manifest["inputs"][0]["sha256"] == cli::sha256_hex(read_file_bytes(s / "sim.cfg")));

  SUBCASE("seed override changes the output") {
    REQUIRE(run_cli({"simulate", "--in", s / "sim.cfg", "--out", s / "run3", "--seed", "2"}).code == 0);
    CHECK(read_file_bytes(fs::path(s / "run1") / "bonafide_A.femb") !=
          read_file_bytes(fs::path(s / "run3") / "bonafide_A.femb"));
  }
  SUBCASE("rho 1 without noise") {
    write_file_atomic(s / "flat.cfg",
                      "latent_dim=48\nembedding_dim=12\nn_subjects=6\nprobes_per_subject=2\n"
                      "rho=1\nsample_noise_sigma=0\ninversion_noise_sigma=0\n");
    REQUIRE(run_cli({"simulate", "--in", s / "flat.cfg", "--out", s / "flat"}).code == 0);
    const fs::path d = s / "flat";
    CHECK(read_file_bytes(d / "attack_Inv-A_on_A.femb") == read_file_bytes(d / "attack_Inv-A_on_B.femb"));
    CHECK(read_file_bytes(d / "attack_Inv-B_on_B.femb") == read_file_bytes(d / "attack_Inv-B_on_A.femb"));
  }
  SUBCASE("default output directory") {
    REQUIRE(run_cli({"simulate", "--in", s / "sim.cfg"}).code == 0);
    CHECK(fs::exists(s / "manifest.json"));
  }
  SUBCASE("bad config") {
    write_file_atomic(s / "bad.cfg", "rho=2\n");
    const Outcome r = run_cli({"simulate", "--in", s / "bad.cfg", "--out", s / "bad"});
    CHECK(r.code == 1);
    CHECK(r.err.find("InvalidRho") != std::string::npos);
  }
}

TEST_CASE("calibrate command") {
  Scratch s("cli-cal");
  std::mt19937_64 rng(52);
  std::normal_distribution<double> g(0.0, 0.1);
  std::vector<double> scores(1000);
  for (double& x : scores) x = g(rng);
  const std::string path = write_scores(s, "nm.csv", ScoreLabel::Nonmated, scores);

  const Outcome r = run_cli({"calibrate", "--in", path, "--target-fmr", "0.001"});
  REQUIRE(r.code == 0);
  const double top = *std::max_element(scores.begin(), scores.end());
  char expect[64];
  std::snprintf(expect, sizeof(expect), "threshold=%.9g\n", top);
  CHECK(r.out.find(expect) != std::string::npos);
  CHECK(r.out.find("fmr=0.001\n") != std::string::npos);
  CHECK(r.out.find("n_nonmated=1000\n") != std::string::npos);
  CHECK(fs::exists(s / "calibrate.manifest.json"));
  CHECK(run_cli({"calibrate", "--in", path, "--target-fmr", "0.001"}).out == r.out);

  const Outcome bad = run_cli({"calibrate", "--in", path, "--target-fmr", "1.0"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("InvalidTarget") != std::string::npos);

  SUBCASE("from bona fide embeddings") {
    EmbeddingSet set = reference_set(rng, 8);
    write_embeddings(set, s / "bf.femb");
    const Outcome e = run_cli({"calibrate", "--in", s / "bf.femb", "--target-fmr", "0.1", "--out", s / "op.txt"});
    REQUIRE(e.code == 0);
    CHECK(e.out.find("n_mated=9\n") != std::string::npos);
    CHECK(e.out.find("n_nonmated=27\n") != std::string::npos);
    CHECK(read_file_bytes(s / "op.txt") == e.out);
    CHECK(fs::exists(s / "op.txt.manifest.json"));
  }
}

TEST_CASE("eval-vuln command on a simulated run") {
  Scratch s("cli-vuln");
  write_file_atomic(s / "sim.cfg", "n_subjects=12\nprobes_per_subject=3\n");
  REQUIRE(run_cli({"simulate", "--in", s / "sim.cfg", "--out", s / "sim"}).code == 0);
  const fs::path d = s / "sim";

  auto mmpmr = [&](const std::string& attack_file, const std::string& probes, const std::string& mode) {
    const Outcome r = run_cli({"eval-vuln", "--in", (d / attack_file).string(), "--probes", (d / probes).string(),
                               "--protocol", (d / "protocol.txt").string(), "--calib", (d / probes).string(),
                               "--frs", "A", "--attack", "Inv-A", "--mode", mode});
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    CHECK(header == "FRS,Attack,Mode,MinMax-MMPMR (%),ProdAvg-MMPMR (%),Threshold,Morphs");
    std::vector<std::string> cells;
    std::stringstream ss(row);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 7);
    CHECK(cells[2] == mode);
    CHECK(cells[3].size() >= 4);
    CHECK(cells[3][cells[3].size() - 3] == '.');
    CHECK(cells[6] == "66");
    return std::stod(cells[3]);
  };
  const double white = mmpmr("attack_Inv-A_on_A.femb", "bonafide_A.femb", "white-box");
  const double black = mmpmr("attack_Inv-A_on_B.femb", "bonafide_B.femb", "black-box");
  CHECK(white >= 90.0);
  CHECK(black <= white);
  CHECK(fs::exists(s / "eval-vuln.manifest.json"));

  const Outcome both = run_cli({"eval-vuln", "--in", (d / "attack_Inv-A_on_A.femb").string(), "--probes",
                                (d / "bonafide_A.femb").string(), "--protocol", (d / "protocol.txt").string()});
  CHECK(both.code == 1);
  CHECK(both.err.find("InvalidArgument") != std::string::npos);

  const Outcome md = run_cli({"eval-vuln", "--in", (d / "attack_Inv-A_on_A.femb").string(), "--probes",
                              (d / "bonafide_A.femb").string(), "--protocol", (d / "protocol.txt").string(),
                              "--threshold", "0.5", "--format", "markdown", "--out", s / "r.md"});
  REQUIRE(md.code == 0);
  CHECK(read_file_bytes(s / "r.md").rfind("| FRS |", 0) == 0);
  CHECK(fs::exists(s / "r.md.manifest.json"));
}

TEST_CASE("eval-detect command") {
  Scratch s("cli-detect");
  const std::string a = write_scores(s, "a.csv", ScoreLabel::Attack, {0.9, 0.8, 0.95});
  const std::string b = write_scores(s, "b.csv", ScoreLabel::Bonafide, {0.1, 0.2});
  const Outcome r = run_cli({"eval-detect", "--in", a, "--bonafide", b, "--attack", "Inv-A", "--out", s / "d.csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "Attack,AUC,EER (%)\nInv-A,1.000,0.00\n");
  const auto manifest = nlohmann::json::parse(read_file_bytes(s / "d.csv.manifest.json"));
  CHECK(manifest["command"] == "eval-detect");
  CHECK(manifest["inputs"].size() == 2);
  CHECK(manifest["outputs"][0] == s / "d.csv");
}

TEST_CASE("bench command") {
  Scratch s("cli-bench");
  std::mt19937_64 rng(53);
  write_embeddings(reference_set(rng, 32), s / "refs.femb");
  write_file_atomic(s / "protocol.txt", kProtocol);
  const Outcome r = run_cli({"bench", "--in", s / "refs.femb", "--protocol", s / "protocol.txt", "--attack", "Emb"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("Attack,Runtime (s),Per morph (s),Runs,Morphs\nEmb,", 0) == 0);
  CHECK(r.out.find(" ± ") != std::string::npos);
  CHECK(r.out.find(",10,2\n") != std::string::npos);

  const auto manifest = nlohmann::json::parse(read_file_bytes(s / "bench.manifest.json"));
  CHECK(manifest["timings_seconds"].size() == 10);

  CHECK(run_cli({"bench", "--in", s / "refs.femb", "--protocol", s / "protocol.txt", "--reps", "1"}).code == 1);

  CHECK(cli::format_mean_sd(0.876, 0.0512) == "0.88 ± 0.05");
  CHECK(cli::format_mean_sd(0.0012, 0.0003) == "1.20e-03 ± 3.00e-04");
}
