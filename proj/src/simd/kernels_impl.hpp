#pragma once

#include "graphon/simd/kernels.hpp"

namespace graphon::simd::detail {

#if defined(GRAPHON_HAVE_AVX2_TU)
const KernelTable& avx2_table();
#endif

#if defined(GRAPHON_HAVE_NEON_TU)
const KernelTable& neon_table();
#endif

}  // namespace graphon::simd::detail
