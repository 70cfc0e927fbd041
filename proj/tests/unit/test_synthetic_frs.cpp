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

#include <cmath>
#include <random>
#include <vector>

#include "embmorph/synthetic_frs.hpp"
#include "expect_error.hpp"
#include "oracles.hpp"

using namespace embmorph;

namespace {

std::vector<double> project(const SyntheticFrs& frs, const std::vector<double>& z) {
  std::vector<double> y(frs.embedding_dim());
  for (std::size_t j = 0; j < y.size(); ++j) y[j] = oracle::dot(oracle::to_vec(frs.column(j)), z);
  return y;
}

double sim(const Embedding& a, const Embedding& b) { return cosine_similarity(a, b).value; }

SimConfig small_config() {
  SimConfig c;
  c.latent_dim = 48;
  c.embedding_dim = 12;
  c.n_subjects = 8;
  c.probes_per_subject = 2;
  c.n_nonmated_pairs = 100;
  c.seed = 9;
  return c;
}

}  // namespace

TEST_CASE("noise substreams") {
  CHECK(substream_key(1, "a", "x", 0) == substream_key(1, "a", "x", 0));
  CHECK(substream_key(1, "a", "x", 0) != substream_key(2, "a", "x", 0));
  CHECK(substream_key(1, "a", "x", 0) != substream_key(1, "b", "x", 0));
  CHECK(substream_key(1, "a", "x", 0) != substream_key(1, "a", "y", 0));
  CHECK(substream_key(1, "a", "x", 0) != substream_key(1, "a", "x", 1));

  const auto draws = gaussian_draws(substream_key(3, "t", "", 0), 20000, 0.25);
  double mean = 0, sq = 0;
  for (double v : draws) {
    mean += v;
    sq += v * v;
  }
  mean /= draws.size();
  CHECK(std::abs(mean) < 0.02);
  CHECK(sq / draws.size() == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("identities are unit and reproducible") {
  const LatentIdentity a = make_identity(64, 5, "alice");
  CHECK(a.z.size() == 64);
  CHECK(std::sqrt(oracle::dot(a.z, a.z)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(make_identity(64, 5, "alice").z == a.z);
  CHECK(make_identity(64, 5, "bob").z != a.z);
}

TEST_CASE("correlated extractor pairs") {
  SUBCASE("rho = 1 gives identical bases") {
    auto [a, b] = make_correlated_frs_pair(128, 32, 1.0, 4);
    CHECK(a.basis().size() == b.basis().size());
    CHECK(std::equal(a.basis().begin(), a.basis().end(), b.basis().begin()));
    CHECK(a.label() == "A");
    CHECK(b.label() == "B");
  }
  SUBCASE("rho = 0 gives unrelated bases") {
    auto [a, b] = make_correlated_frs_pair(128, 32, 0.0, 4);
    double total = 0;
    for (std::size_t j = 0; j < 32; ++j) total += std::abs(oracle::dot(oracle::to_vec(a.column(j)), oracle::to_vec(b.column(j))));
    CHECK(total / 32 < 3.0 / std::sqrt(128.0));
  }
  SUBCASE("columns are orthonormal") {
    auto [a, b] = make_correlated_frs_pair(40, 10, 0.5, 8);
    for (const SyntheticFrs* f : {&a, &b})
      for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = 0; j < 10; ++j)
          CHECK(std::abs(oracle::dot(oracle::to_vec(f->column(i)), oracle::to_vec(f->column(j))) - (i == j)) < 1e-12);
  }
  SUBCASE("same seed reproduces, different seed differs") {
    CHECK(make_correlated_frs_pair(40, 10, 0.5, 8) == make_correlated_frs_pair(40, 10, 0.5, 8));
    CHECK_FALSE(make_correlated_frs_pair(40, 10, 0.5, 8).first == make_correlated_frs_pair(40, 10, 0.5, 9).first);
  }
  SUBCASE("higher rho means closer extractors") {
    auto agreement = [](double rho) {
      auto [a, b] = make_correlated_frs_pair(128, 32, rho, 3);
      double total = 0;
      for (std::size_t j = 0; j < 32; ++j) total += oracle::dot(oracle::to_vec(a.column(j)), oracle::to_vec(b.column(j)));
      return total / 32;
    };
    CHECK(agreement(0.2) < agreement(0.5));
    CHECK(agreement(0.5) < agreement(0.8));
    CHECK(agreement(0.8) < agreement(1.0));
  }
  SUBCASE("errors") {
    CHECK(code_of([] { make_correlated_frs_pair(40, 10, 1.5, 1); }) == ErrorCode::InvalidRho);
    CHECK(code_of([] { make_correlated_frs_pair(40, 10, -0.1, 1); }) == ErrorCode::InvalidRho);
    CHECK(code_of([] { make_correlated_frs_pair(8, 10, 0.5, 1); }) == ErrorCode::InvalidDims);
    CHECK(code_of([] { SyntheticFrs("x", 4, 2, std::vector<double>(8, 1.0), 0.0, 1); }) == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("extraction") {
  auto [frs, unused] = make_correlated_frs_pair(128, 32, 0.8, 2);
  const LatentIdentity z = make_identity(128, 2, "s");
  const Embedding x = extract(frs, z, 0);
  const Embedding expected = normalize(project(frs, z.z));
  for (std::size_t i = 0; i < 32; ++i) CHECK(std::abs(x[i] - expected[i]) < 1e-12);
  CHECK(extract(frs, z, 1) == x);

  CHECK(code_of([&] { extract(frs, make_identity(64, 2, "s"), 0); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("mated comparisons beat nonmated ones") {
  auto [frs, unused] = make_correlated_frs_pair(128, 32, 0.8, 2, 0.05);
  int wins = 0;
  for (int t = 0; t < 1000; ++t) {
    const LatentIdentity a = make_identity(128, 77, "a" + std::to_string(t));
    const LatentIdentity b = make_identity(128, 77, "b" + std::to_string(t));
    const Embedding a0 = extract(frs, a, 0);
    wins += sim(a0, extract(frs, a, 1)) > sim(a0, extract(frs, b, 0));
  }
  CHECK(wins >= 990);
  // Noise changes samples of one identity.
  const LatentIdentity a = make_identity(128, 77, "a");
  CHECK_FALSE(extract(frs, a, 0) == extract(frs, a, 1));
}

TEST_CASE("inversion") {
  auto [frs, unused] = make_correlated_frs_pair(128, 32, 0.8, 6);
  std::mt19937_64 rng(6);

  // A latent inside the extractor's span is recovered.
  std::vector<double> in_span(128, 0.0);
  const auto coeffs = oracle::random_unit(rng, 32);
  for (std::size_t j = 0; j < 32; ++j)
    for (std::size_t i = 0; i < 128; ++i) in_span[i] += coeffs[j] * frs.column(j)[i];
  const Embedding x = normalize(project(frs, in_span));
  const LatentIdentity back = invert(frs, x, 0.0, "q");
  for (std::size_t i = 0; i < 128; ++i) CHECK(std::abs(back.z[i] - in_span[i]) < 1e-6);

  // extract(invert(x)) == x for any embedding.
  for (int t = 0; t < 20; ++t) {
    const Embedding target = normalize(oracle::random_unit(rng, 32));
    const Embedding round = extract(frs, invert(frs, target, 0.0, "r"), 0);
    for (std::size_t i = 0; i < 32; ++i) CHECK(std::abs(round[i] - target[i]) < 1e-6);
  }

  double clean = 0, noisy = 0;
  for (int t = 0; t < 50; ++t) {
    const Embedding target = normalize(oracle::random_unit(rng, 32));
    clean += sim(extract(frs, invert(frs, target, 0.0, "n" + std::to_string(t)), 0), target);
    noisy += sim(extract(frs, invert(frs, target, 0.5, "n" + std::to_string(t)), 0), target);
  }
  CHECK(noisy < clean);
  CHECK(code_of([&] { invert(frs, normalize(oracle::random_unit(rng, 8)), 0.0, "e"); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("config text") {
  const SimConfig defaults;
  CHECK(defaults.latent_dim == 128);
  CHECK(defaults.embedding_dim == 32);
  CHECK(defaults.n_subjects == 50);
  CHECK(defaults.probes_per_subject == 5);
  CHECK(defaults.sample_noise_sigma == 0.15);
  CHECK(defaults.inversion_noise_sigma == 0.05);
  CHECK(defaults.rho == 0.8);
  CHECK(parse_sim_config(format_sim_config(defaults)) == defaults);
  CHECK(parse_sim_config("") == defaults);

  const SimConfig c = parse_sim_config("# comment\nrho = 0.25\nseed=42\n\nfrs_a_label=AF\n");
  CHECK(c.rho == 0.25);
  CHECK(c.seed == 42);
  CHECK(c.frs_a_label == "AF");
  CHECK(code_of([] { parse_sim_config("bogus=1\n"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse_sim_config("rho=abc\n"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse_sim_config("rho=1.5\n"); }) == ErrorCode::InvalidRho);
  CHECK(code_of([] { parse_sim_config("latent_dim=16\n"); }) == ErrorCode::InvalidDims);
  CHECK(code_of([] { parse_sim_config("frs_b_label=A\n"); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("end-to-end simulation") {
  const SimConfig c = small_config();
  const SimulationResult r = run_attack_simulation(c);
  CHECK(r.bonafide_a.size() == 8 * 3);
  CHECK(r.protocol.pairs().size() == 28);
  REQUIRE(r.attacks.size() == 4);
  CHECK(r.attacks[0].mode == AttackMode::WhiteBox);
  CHECK(r.attacks[1].mode == AttackMode::BlackBox);
  CHECK(r.attack("A", "B").attack_label == "Inv-A");
  CHECK(r.attack("B", "B").mode == AttackMode::WhiteBox);
  CHECK(r.attack("A", "A").embeddings.size() == 28);
  CHECK(&r.bonafide("B") == &r.bonafide_b);

  SUBCASE("bitwise reproducible") {
    const SimulationResult again = run_attack_simulation(c);
    CHECK(again.bonafide_a == r.bonafide_a);
    CHECK(again.bonafide_b == r.bonafide_b);
    for (std::size_t i = 0; i < 4; ++i) CHECK(again.attacks[i].embeddings == r.attacks[i].embeddings);
  }
  SUBCASE("a subset of morph pairs") {
    SimConfig s = c;
    s.n_morph_pairs = 5;
    CHECK(run_attack_simulation(s).protocol.pairs().size() == 5);
  }
  SUBCASE("without noise, white-box attacks sit on the optimal morph") {
    SimConfig s = c;
    s.sample_noise_sigma = 0.0;
    s.inversion_noise_sigma = 0.0;
    const SimulationResult q = run_attack_simulation(s);
    for (const MorphPair& p : q.protocol.pairs()) {
      const Embedding star = optimal_morph(q.bonafide_a.at(p.subject_a, "0").embedding(),
                                           q.bonafide_a.at(p.subject_b, "0").embedding());
      const Embedding& got = q.attack("A", "A").embeddings.at("morph", p.morph_id()).embedding();
      // Stored as f32, hence the looser bound.
      for (std::size_t i = 0; i < star.dim(); ++i) CHECK(std::abs(got[i] - star[i]) < 1e-6);
    }
  }
  SUBCASE("rho = 1 without noise makes white-box and black-box identical") {
    SimConfig s = c;
    s.rho = 1.0;
    s.sample_noise_sigma = 0.0;
    s.inversion_noise_sigma = 0.0;
    const SimulationResult q = run_attack_simulation(s);
    CHECK(q.attack("A", "A").embeddings == q.attack("A", "B").embeddings);
    CHECK(q.attack("B", "B").embeddings == q.attack("B", "A").embeddings);
  }
}
