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

// Data-parallel inner loops shared by every module. Each backend fills one
// KernelTable; active_kernels() picks the widest one the running CPU supports.
//
// Elementwise kernels (add, lincomb, scale, axpy) are bitwise identical across
// backends: no fused multiply-add, same operation order per lane. Reductions
// (dot, dot_rows) differ only in summation order.

#include <cstddef>
#include <span>

namespace embmorph::simd {

struct KernelTable {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // out = a + b
  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  // out = wa * a + wb * b
  void (*lincomb)(double wa, const double* a, double wb, const double* b, double* out,
                  std::size_t n);
  // out = s * x
  void (*scale)(const double* x, double s, double* out, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[r] = dot(rows + r * n, q) for a row-major block
  void (*dot_rows)(const double* rows, std::size_t nrows, std::size_t n, const double* q,
                   double* out);
};

const KernelTable& scalar_kernels() noexcept;

/// nullptr when the build has no AVX2 backend or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels() noexcept;

/// Resolved once on first use.
const KernelTable& active_kernels() noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return active_kernels().dot(a.data(), b.data(), a.size());
}

}  // namespace embmorph::simd
