#include <algorithm>
#include <atomic>
#include <string>

#include "smcreg/error.hpp"
#include "warp_common.hpp"
#include "warp_impl.hpp"

namespace smcreg::kernels {

namespace {

Isa detect() noexcept {
#if defined(SMCREG_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2")) return Isa::Avx2;
#endif
  return Isa::Scalar;
}

std::atomic<Isa>& selected() noexcept {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(SMCREG_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() noexcept { return selected().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (!isa_supported(isa))
    throw Error(ErrorKind::BadConfig, std::string("ISA not supported here: ") + std::string(to_string(isa)));
  selected().store(isa, std::memory_order_relaxed);
}

void reset_isa() noexcept { selected().store(detect(), std::memory_order_relaxed); }

IndexBox grid_box(const Dims& dims) noexcept {
  IndexBox b;
  for (std::size_t a = 0; a < 3; ++a) {
    b.lo[a] = 0.0;
    b.hi[a] = static_cast<double>(dims[a] - 1);
  }
  return b;
}

IndexBox support_box(const Volume3& v) noexcept {
  const Dims& n = v.dims();
  std::array<std::size_t, 3> lo{n[0], n[1], n[2]};
  std::array<std::size_t, 3> hi{0, 0, 0};
  bool any = false;
  const auto values = v.values();
  for (std::size_t k = 0; k < n[2]; ++k) {
    for (std::size_t j = 0; j < n[1]; ++j) {
      const float* row = values.data() + v.index(0, j, k);
      for (std::size_t i = 0; i < n[0]; ++i) {
        if (row[i] == 0.0f) continue;
        any = true;
        lo = {std::min(lo[0], i), std::min(lo[1], j), std::min(lo[2], k)};
        hi = {std::max(hi[0], i), std::max(hi[1], j), std::max(hi[2], k)};
      }
    }
  }
  IndexBox b;
  if (!any) return b;
  for (std::size_t a = 0; a < 3; ++a) {
    b.lo[a] = std::max(0.0, static_cast<double>(lo[a]) - 1.0);
    b.hi[a] = std::min(static_cast<double>(n[a] - 1), static_cast<double>(hi[a]) + 1.0);
  }
  return b;
}

WarpProblem make_problem(std::span<const float> reference, const Dims& reference_dims, const Volume3& source,
                         const IndexAffine& affine, const IndexBox& clip) {
  const std::size_t n = source.size();
  if (n >= (std::size_t{1} << 31))
    throw Error(ErrorKind::BadConfig, "source volume too large for 32-bit gather indices");
  WarpProblem p;
  p.reference = reference;
  p.reference_dims = reference_dims;
  p.source = source.values();
  p.source_dims = source.dims();
  p.affine = affine;
  p.clip = clip;
  return p;
}

WarpMoments warp_moments(const WarpProblem& p) { return warp_moments(p, active_isa()); }

WarpMoments warp_moments(const WarpProblem& p, Isa isa) {
#if defined(SMCREG_HAVE_AVX2)
  if (isa == Isa::Avx2) return detail::warp_moments_avx2(p);
#endif
  (void)isa;
  return detail::warp_moments_scalar(p);
}

void warp_into(const WarpProblem& p, std::span<float> out) { warp_into(p, out, active_isa()); }

void warp_into(const WarpProblem& p, std::span<float> out, Isa isa) {
  const auto& n = p.reference_dims;
  if (out.size() != n[0] * n[1] * n[2]) throw Error(ErrorKind::DimMismatch, "warp output size mismatch");
#if defined(SMCREG_HAVE_AVX2)
  if (isa == Isa::Avx2) return detail::warp_into_avx2(p, out);
#endif
  (void)isa;
  detail::warp_into_scalar(p, out);
}

}  // namespace smcreg::kernels
