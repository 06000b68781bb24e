#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "smcreg/kernels.hpp"

namespace smcreg::kernels::detail {

struct SourceGrid {
  const float* data;
  std::int32_t stride_y, stride_z;
  std::int32_t off_x, off_y, off_z;  // neighbor offsets, 0 on singleton axes
  float hi_x, hi_y, hi_z;            // n - 1
  float base_x, base_y, base_z;      // max(n - 2, 0): largest lower corner
};

inline SourceGrid make_grid(const WarpProblem& p) noexcept {
  const auto& n = p.source_dims;
  SourceGrid g{};
  g.data = p.source.data();
  g.stride_y = static_cast<std::int32_t>(n[0]);
  g.stride_z = static_cast<std::int32_t>(n[0] * n[1]);
  g.off_x = n[0] > 1 ? 1 : 0;
  g.off_y = n[1] > 1 ? g.stride_y : 0;
  g.off_z = n[2] > 1 ? g.stride_z : 0;
  g.hi_x = static_cast<float>(n[0] - 1);
  g.hi_y = static_cast<float>(n[1] - 1);
  g.hi_z = static_cast<float>(n[2] - 1);
  g.base_x = static_cast<float>(n[0] > 1 ? n[0] - 2 : 0);
  g.base_y = static_cast<float>(n[1] > 1 ? n[1] - 2 : 0);
  g.base_z = static_cast<float>(n[2] > 1 ? n[2] - 2 : 0);
  return g;
}

/// One reference row: mapped point of voxel i is start + i * step.
struct Row {
  float sx, sy, sz;
  float dx, dy, dz;
  std::int32_t i0, i1;   // visited voxels [i0, i1)
  std::size_t offset;    // linear index of voxel (0, j, k)
};

/// Calls f(row) for every row with a nonempty visit interval. The interval
/// is a conservative superset of the voxels mapping into p.clip.
template <class F>
void for_each_row(const WarpProblem& p, F&& f) {
  if (p.clip.empty()) return;
  const auto& a = p.affine;
  const auto& n = p.reference_dims;
  const double nx = static_cast<double>(n[0]);
  for (std::size_t k = 0; k < n[2]; ++k) {
    for (std::size_t j = 0; j < n[1]; ++j) {
      const double jd = static_cast<double>(j), kd = static_cast<double>(k);
      double lo = 0.0, hi = nx - 1.0;
      bool empty = false;
      double start[3], step[3];
      for (int r = 0; r < 3 && !empty; ++r) {
        start[r] = a[4 * r + 1] * jd + a[4 * r + 2] * kd + a[4 * r + 3];
        step[r] = a[4 * r];
        const double blo = p.clip.lo[r], bhi = p.clip.hi[r];
        if (std::abs(step[r]) < 1e-12) {
          if (start[r] < blo - 1e-6 || start[r] > bhi + 1e-6) empty = true;
          continue;
        }
        double t0 = (blo - start[r]) / step[r];
        double t1 = (bhi - start[r]) / step[r];
        if (t0 > t1) std::swap(t0, t1);
        lo = std::max(lo, t0);
        hi = std::min(hi, t1);
        if (lo > hi + 2.0) empty = true;
      }
      if (empty) continue;
      const double first = std::max(0.0, std::floor(lo) - 1.0);
      const double last = std::min(nx, std::floor(hi) + 2.0);
      if (!(first < last)) continue;
      Row row{static_cast<float>(start[0]), static_cast<float>(start[1]), static_cast<float>(start[2]),
              static_cast<float>(step[0]),  static_cast<float>(step[1]),  static_cast<float>(step[2]),
              static_cast<std::int32_t>(first), static_cast<std::int32_t>(last), n[0] * (j + n[1] * k)};
      f(row);
    }
  }
}

}  // namespace smcreg::kernels::detail
