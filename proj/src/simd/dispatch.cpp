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

#include "embmorph/simd/kernels.hpp"
#include "kernels_impl.hpp"

namespace embmorph::simd {

namespace {

constexpr KernelTable kScalar{
    "scalar",
    detail::dot_scalar,
    detail::add_scalar,
    detail::lincomb_scalar,
    detail::scale_scalar,
    detail::axpy_scalar,
    detail::dot_rows_scalar,
};

#if defined(EMBMORPH_HAVE_AVX2)
constexpr KernelTable kAvx2{
    "avx2",
    detail::dot_avx2,
    detail::add_avx2,
    detail::lincomb_avx2,
    detail::scale_avx2,
    detail::axpy_avx2,
    detail::dot_rows_avx2,
};

bool cpu_has_avx2() noexcept {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

const KernelTable* avx2_kernels() noexcept {
#if defined(EMBMORPH_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() noexcept {
  static const KernelTable& table = [] () -> const KernelTable& {
    if (const KernelTable* wide = avx2_kernels()) return *wide;
    return kScalar;
  }();
  return table;
}

}  // namespace embmorph::simd
