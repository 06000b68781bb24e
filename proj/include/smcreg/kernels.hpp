#pragma once

// Fused pull-back warp kernels. Each kernel walks the reference grid row by
// row, maps voxel centers into continuous source index space through an
// affine map and samples the source trilinearly. Scalar and AVX2 variants
// perform the same float operations per voxel, so warped values agree
// bit-for-bit; moment sums differ only by summation order.

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

#include "smcreg/geometry.hpp"
#include "smcreg/volume.hpp"

namespace smcreg::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa) noexcept;
bool isa_supported(Isa isa) noexcept;
/// Best supported ISA unless overridden by force_isa().
Isa active_isa() noexcept;
/// Throws BadConfig if the ISA is not supported on this machine.
void force_isa(Isa isa);
void reset_isa() noexcept;

/// Closed box in continuous source-index space. Empty when lo > hi on any axis.
struct IndexBox {
  std::array<double, 3> lo{0.0, 0.0, 0.0};
  std::array<double, 3> hi{-1.0, -1.0, -1.0};
  bool empty() const noexcept { return lo[0] > hi[0] || lo[1] > hi[1] || lo[2] > hi[2]; }
};

/// [0, n-1] on every axis.
IndexBox grid_box(const Dims& dims) noexcept;
/// Region outside of which trilinear samples of `v` are exactly zero:
/// the nonzero bounding box dilated by one voxel, clipped to the grid.
IndexBox support_box(const Volume3& v) noexcept;

struct WarpProblem {
  std::span<const float> reference;  // reference values; may be empty for warp_into
  Dims reference_dims{1, 1, 1};
  std::span<const float> source;
  Dims source_dims{1, 1, 1};
  IndexAffine affine{};
  /// Voxels whose mapped point lies outside `clip` may be skipped; the clip
  /// box must contain every point where a sample can be nonzero.
  IndexBox clip;
};

WarpProblem make_problem(std::span<const float> reference, const Dims& reference_dims, const Volume3& source,
                         const IndexAffine& affine, const IndexBox& clip);

/// Sums over visited reference voxels. s is the warped source value, t the
/// reference value. `inside`, `st`, `stt` only count voxels whose mapped
/// point lies in the source grid; they are complete only when clip is the
/// full grid box.
struct WarpMoments {
  double inside = 0.0;
  double st = 0.0;
  double stt = 0.0;
  double ss = 0.0;
  double sss = 0.0;
  double sts = 0.0;
};

WarpMoments warp_moments(const WarpProblem& p);
WarpMoments warp_moments(const WarpProblem& p, Isa isa);

/// Writes warped values for every reference voxel into `out` (size must
/// match the reference grid); skipped voxels get the fill value.
void warp_into(const WarpProblem& p, std::span<float> out);
void warp_into(const WarpProblem& p, std::span<float> out, Isa isa);

}  // namespace smcreg::kernels
