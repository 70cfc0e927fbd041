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

#include "kernels_impl.hpp"

namespace embmorph::simd::detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void add_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void lincomb_scalar(double wa, const double* a, double wb, const double* b, double* out,
                    std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = wa * a[i] + wb * b[i];
}

void scale_scalar(const double* x, double s, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = s * x[i];
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void dot_rows_scalar(const double* rows, std::size_t nrows, std::size_t n, const double* q,
                     double* out) {
  for (std::size_t r = 0; r < nrows; ++r) out[r] = dot_scalar(rows + r * n, q, n);
}

}  // namespace embmorph::simd::detail
