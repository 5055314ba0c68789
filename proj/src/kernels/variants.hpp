#pragma once

#include "docmine/kernels.hpp"

namespace docmine::detail {

const KernelTable& scalar_kernels();
#if defined(DOCMINE_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif
#if defined(DOCMINE_HAVE_NEON)
const KernelTable& neon_kernels();
#endif

}  // namespace docmine::detail
