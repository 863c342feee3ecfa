#pragma once

#include "hcrn/kernels.hpp"

namespace hcrn::kernels::detail {

#if defined(HCRN_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

#if defined(HCRN_HAVE_NEON)
const KernelTable& neon_table();
#endif

}  // namespace hcrn::kernels::detail
