#pragma once

#include <span>

#include "smcreg/kernels.hpp"

namespace smcreg::kernels::detail {

WarpMoments warp_moments_scalar(const WarpProblem& p);
void warp_into_scalar(const WarpProblem& p, std::span<float> out);

#if defined(SMCREG_HAVE_AVX2)
WarpMoments warp_moments_avx2(const WarpProblem& p);
void warp_into_avx2(const WarpProblem& p, std::span<float> out);
#endif

}  // namespace smcreg::kernels::detail
