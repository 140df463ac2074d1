#pragma once

#include "gnconvert/kernels.hpp"

namespace gnc::kernels::detail {

// Scalar row kernel shared by the SIMD variants for their tail rows.
double dense_row(const double* w, const double* x, std::size_t n_in);

#if defined(GNCONVERT_HAVE_AVX2)
extern const KernelTable kAvx2;
#endif
#if defined(GNCONVERT_HAVE_NEON)
extern const KernelTable kNeon;
#endif

}  // namespace gnc::kernels::detail
