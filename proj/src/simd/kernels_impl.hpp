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

// Raw backend entry points. Kept free of standard-library templates so the
// AVX2 translation unit never emits ISA-specific copies of shared inline code.

#include <cstddef>

namespace embmorph::simd::detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
void add_scalar(const double* a, const double* b, double* out, std::size_t n);
void lincomb_scalar(double wa, const double* a, double wb, const double* b, double* out,
                    std::size_t n);
void scale_scalar(const double* x, double s, double* out, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
void dot_rows_scalar(const double* rows, std::size_t nrows, std::size_t n, const double* q,
                     double* out);

#if defined(EMBMORPH_HAVE_AVX2)
double dot_avx2(const double* a, const double* b, std::size_t n);
void add_avx2(const double* a, const double* b, double* out, std::size_t n);
void lincomb_avx2(double wa, const double* a, double wb, const double* b, double* out,
                  std::size_t n);
void scale_avx2(const double* x, double s, double* out, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void dot_rows_avx2(const double* rows, std::size_t nrows, std::size_t n, const double* q,
                   double* out);
#endif

}  // namespace embmorph::simd::detail
