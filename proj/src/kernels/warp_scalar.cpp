// Scalar reference warp kernels. Compiled with -ffp-contract=off so the
// per-voxel arithmetic matches the SIMD variants exactly.

#include "warp_common.hpp"
#include "warp_impl.hpp"

namespace smcreg::kernels::detail {

namespace {

inline float lerp(float a, float b, float t) noexcept { return a * (1.0f - t) + b * t; }

/// Returns the trilinear sample, or 0 with inside=false outside the grid.
inline float sample(const SourceGrid& g, float x, float y, float z, bool& inside) noexcept {
  inside = x >= 0.0f && x <= g.hi_x && y >= 0.0f && y <= g.hi_y && z >= 0.0f && z <= g.hi_z;
  if (!inside) return 0.0f;
  const float xb = std::min(std::floor(x), g.base_x);
  const float yb = std::min(std::floor(y), g.base_y);
  const float zb = std::min(std::floor(z), g.base_z);
  const float fx = x - xb, fy = y - yb, fz = z - zb;
  const std::int32_t idx = static_cast<std::int32_t>(xb) + static_cast<std::int32_t>(yb) * g.stride_y +
                           static_cast<std::int32_t>(zb) * g.stride_z;
  const float* d = g.data;
  const float c000 = d[idx];
  const float c100 = d[idx + g.off_x];
  const float c010 = d[idx + g.off_y];
  const float c110 = d[idx + g.off_x + g.off_y];
  const float c001 = d[idx + g.off_z];
  const float c101 = d[idx + g.off_x + g.off_z];
  const float c011 = d[idx + g.off_y + g.off_z];
  const float c111 = d[idx + g.off_x + g.off_y + g.off_z];
  const float c00 = lerp(c000, c100, fx);
  const float c10 = lerp(c010, c110, fx);
  const float c01 = lerp(c001, c101, fx);
  const float c11 = lerp(c011, c111, fx);
  const float c0 = lerp(c00, c10, fy);
  const float c1 = lerp(c01, c11, fy);
  return lerp(c0, c1, fz);
}

}  // namespace

WarpMoments warp_moments_scalar(const WarpProblem& p) {
  const SourceGrid g = make_grid(p);
  const float* ref = p.reference.data();
  WarpMoments m;
  for_each_row(p, [&](const Row& row) {
    const float* t_row = ref + row.offset;
    for (std::int32_t i = row.i0; i < row.i1; ++i) {
      const float fi = static_cast<float>(i);
      const float x = row.sx + fi * row.dx;
      const float y = row.sy + fi * row.dy;
      const float z = row.sz + fi * row.dz;
      bool inside = false;
      const double s = sample(g, x, y, z, inside);
      if (!inside) continue;
      const double t = t_row[i];
      m.inside += 1.0;
      m.st += t;
      m.stt += t * t;
      m.ss += s;
      m.sss += s * s;
      m.sts += t * s;
    }
  });
  return m;
}

void warp_into_scalar(const WarpProblem& p, std::span<float> out) {
  const SourceGrid g = make_grid(p);
  std::fill(out.begin(), out.end(), 0.0f);
  for_each_row(p, [&](const Row& row) {
    float* o = out.data() + row.offset;
    for (std::int32_t i = row.i0; i < row.i1; ++i) {
      const float fi = static_cast<float>(i);
      bool inside = false;
      o[i] = sample(g, row.sx + fi * row.dx, row.sy + fi * row.dy, row.sz + fi * row.dz, inside);
    }
  });
}

}  // namespace smcreg::kernels::detail
