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

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "embmorph/simd/kernels.hpp"

using embmorph::simd::KernelTable;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  }
  return true;
}

void check_against_scalar(const KernelTable& wide) {
  const KernelTable& ref = embmorph::simd::scalar_kernels();
  std::mt19937_64 rng(42);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 15u, 16u, 17u, 31u, 32u, 33u, 67u, 128u, 512u, 1001u}) {
    CAPTURE(n);
    const auto a = random_vec(rng, n), b = random_vec(rng, n);

    const double d_ref = ref.dot(a.data(), b.data(), n);
    const double d_wide = wide.dot(a.data(), b.data(), n);
    double mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);
    CHECK(std::abs(d_ref - d_wide) <= 1e-13 * (mag + 1.0));

    std::vector<double> o1(n), o2(n);
    ref.add(a.data(), b.data(), o1.data(), n);
    wide.add(a.data(), b.data(), o2.data(), n);
    CHECK(bitwise_equal(o1, o2));

    ref.lincomb(0.3, a.data(), -1.7, b.data(), o1.data(), n);
    wide.lincomb(0.3, a.data(), -1.7, b.data(), o2.data(), n);
    CHECK(bitwise_equal(o1, o2));

    ref.scale(a.data(), 0.123, o1.data(), n);
    wide.scale(a.data(), 0.123, o2.data(), n);
    CHECK(bitwise_equal(o1, o2));

    o1 = b;
    o2 = b;
    ref.axpy(-0.77, a.data(), o1.data(), n);
    wide.axpy(-0.77, a.data(), o2.data(), n);
    CHECK(bitwise_equal(o1, o2));
  }

  const std::size_t rows = 9, n = 37;
  const auto block = random_vec(rng, rows * n);
  const auto q = random_vec(rng, n);
  std::vector<double> r1(rows), r2(rows);
  ref.dot_rows(block.data(), rows, n, q.data(), r1.data());
  wide.dot_rows(block.data(), rows, n, q.data(), r2.data());
  for (std::size_t r = 0; r < rows; ++r) {
    CHECK(r1[r] == doctest::Approx(r2[r]).epsilon(1e-13));
    // Batch rows agree bitwise with the same backend's single dot.
    CHECK(std::bit_cast<std::uint64_t>(r2[r]) ==
          std::bit_cast<std::uint64_t>(wide.dot(block.data() + r * n, q.data(), n)));
  }
}

}  // namespace

TEST_CASE("scalar kernels compute the textbook results") {
  const KernelTable& k = embmorph::simd::scalar_kernels();
  const double a[] = {1, 2, 3}, b[] = {4, 5, 6};
  CHECK(k.dot(a, b, 3) == 32.0);
  double out[3];
  k.lincomb(2.0, a, -1.0, b, out, 3);
  CHECK(out[0] == -2.0);
  CHECK(out[2] == 0.0);
}

TEST_CASE("AVX2 kernels match the scalar reference") {
  const KernelTable* wide = embmorph::simd::avx2_kernels();
  if (wide == nullptr) {
    MESSAGE("AVX2 backend unavailable on this machine; skipped");
    return;
  }
  check_against_scalar(*wide);
}

TEST_CASE("active backend is one of the known tables") {
  const KernelTable& active = embmorph::simd::active_kernels();
  const KernelTable* wide = embmorph::simd::avx2_kernels();
  CHECK((&active == &embmorph::simd::scalar_kernels() || &active == wide));
  if (wide != nullptr) CHECK(&active == wide);
  check_against_scalar(active);
}
