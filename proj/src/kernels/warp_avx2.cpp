// AVX2 warp kernels, 8 reference voxels per step. Built with -mavx2 and
// -ffp-contract=off; only called after a runtime CPU check.

#include <immintrin.h>

#include "warp_common.hpp"
#include "warp_impl.hpp"

namespace smcreg::kernels::detail {

namespace {

inline __m256 lerp8(__m256 a, __m256 b, __m256 t, __m256 one) noexcept {
  return _mm256_add_ps(_mm256_mul_ps(a, _mm256_sub_ps(one, t)), _mm256_mul_ps(b, t));
}

struct Grid8 {
  const float* data;
  __m256i stride_y, stride_z;
  __m256i off_x, off_y, off_z;
  __m256 hi_x, hi_y, hi_z;
  __m256 base_x, base_y, base_z;

  explicit Grid8(const SourceGrid& g)
      : data(g.data),
        stride_y(_mm256_set1_epi32(g.stride_y)),
        stride_z(_mm256_set1_epi32(g.stride_z)),
        off_x(_mm256_set1_epi32(g.off_x)),
        off_y(_mm256_set1_epi32(g.off_y)),
        off_z(_mm256_set1_epi32(g.off_z)),
        hi_x(_mm256_set1_ps(g.hi_x)),
        hi_y(_mm256_set1_ps(g.hi_y)),
        hi_z(_mm256_set1_ps(g.hi_z)),
        base_x(_mm256_set1_ps(g.base_x)),
        base_y(_mm256_set1_ps(g.base_y)),
        base_z(_mm256_set1_ps(g.base_z)) {}
};

/// Samples 8 points; lanes outside the grid (or not in `valid`) come back 0
/// and are cleared in `mask`.
inline __m256 sample8(const Grid8& g, __m256 x, __m256 y, __m256 z, __m256 valid, __m256& mask) noexcept {
  const __m256 zero = _mm256_setzero_ps();
  const __m256 one = _mm256_set1_ps(1.0f);
  __m256 in = _mm256_and_ps(valid, _mm256_cmp_ps(x, zero, _CMP_GE_OQ));
  in = _mm256_and_ps(in, _mm256_cmp_ps(x, g.hi_x, _CMP_LE_OQ));
  in = _mm256_and_ps(in, _mm256_cmp_ps(y, zero, _CMP_GE_OQ));
  in = _mm256_and_ps(in, _mm256_cmp_ps(y, g.hi_y, _CMP_LE_OQ));
  in = _mm256_and_ps(in, _mm256_cmp_ps(z, zero, _CMP_GE_OQ));
  in = _mm256_and_ps(in, _mm256_cmp_ps(z, g.hi_z, _CMP_LE_OQ));
  mask = in;

  // Clamping keeps every gather in bounds; it is a no-op on inside lanes.
  const __m256 xc = _mm256_min_ps(_mm256_max_ps(x, zero), g.hi_x);
  const __m256 yc = _mm256_min_ps(_mm256_max_ps(y, zero), g.hi_y);
  const __m256 zc = _mm256_min_ps(_mm256_max_ps(z, zero), g.hi_z);
  const __m256 xb = _mm256_min_ps(_mm256_floor_ps(xc), g.base_x);
  const __m256 yb = _mm256_min_ps(_mm256_floor_ps(yc), g.base_y);
  const __m256 zb = _mm256_min_ps(_mm256_floor_ps(zc), g.base_z);
  const __m256 fx = _mm256_sub_ps(xc, xb);
  const __m256 fy = _mm256_sub_ps(yc, yb);
  const __m256 fz = _mm256_sub_ps(zc, zb);

  const __m256i idx = _mm256_add_epi32(
      _mm256_cvttps_epi32(xb),
      _mm256_add_epi32(_mm256_mullo_epi32(_mm256_cvttps_epi32(yb), g.stride_y),
                       _mm256_mullo_epi32(_mm256_cvttps_epi32(zb), g.stride_z)));
  const __m256i ixy = _mm256_add_epi32(g.off_x, g.off_y);
  const __m256i ixz = _mm256_add_epi32(g.off_x, g.off_z);
  const __m256i iyz = _mm256_add_epi32(g.off_y, g.off_z);
  const __m256i ixyz = _mm256_add_epi32(ixy, g.off_z);

  const __m256 c000 = _mm256_i32gather_ps(g.data, idx, 4);
  const __m256 c100 = _mm256_i32gather_ps(g.data, _mm256_add_epi32(idx, g.off_x), 4);
  const __m256 c010 = _mm256_i32gather_ps(g.data, _mm256_add_epi32(idx, g.off_y), 4);
  const __m256 c110 = _mm256_i32gather_ps(g.data, _mm256_add_epi32(idx, ixy), 4);
  const __m256 c001 = _mm256_i32gather_ps(g.data, _mm256_add_epi32(idx, g.off_z), 4);
  const __m256 c101 = _mm256_i32gather_ps(g.data, _mm256_add_epi32(idx, ixz), 4);
  const __m256 c011 = _mm256_i32gather_ps(g.data, _mm256_add_epi32(idx, iyz), 4);
  const __m256 c111 = _mm256_i32gather_ps(g.data, _mm256_add_epi32(idx, ixyz), 4);

  const __m256 c00 = lerp8(c000, c100, fx, one);
  const __m256 c10 = lerp8(c010, c110, fx, one);
  const __m256 c01 = lerp8(c001, c101, fx, one);
  const __m256 c11 = lerp8(c011, c111, fx, one);
  const __m256 c0 = lerp8(c00, c10, fy, one);
  const __m256 c1 = lerp8(c01, c11, fy, one);
  return _mm256_and_ps(lerp8(c0, c1, fz, one), in);
}

inline double hsum(__m256d v) noexcept {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

struct Accum {
  __m256d st = _mm256_setzero_pd(), stt = _mm256_setzero_pd();
  __m256d ss = _mm256_setzero_pd(), sss = _mm256_setzero_pd(), sts = _mm256_setzero_pd();

  void add(__m128 s4, __m128 t4) noexcept {
    const __m256d s = _mm256_cvtps_pd(s4);
    const __m256d t = _mm256_cvtps_pd(t4);
    st = _mm256_add_pd(st, t);
    stt = _mm256_add_pd(stt, _mm256_mul_pd(t, t));
    ss = _mm256_add_pd(ss, s);
    sss = _mm256_add_pd(sss, _mm256_mul_pd(s, s));
    sts = _mm256_add_pd(sts, _mm256_mul_pd(t, s));
  }
};

inline __m256 lane_offsets() noexcept { return _mm256_setr_ps(0.f, 1.f, 2.f, 3.f, 4.f, 5.f, 6.f, 7.f); }

}  // namespace

WarpMoments warp_moments_avx2(const WarpProblem& p) {
  const Grid8 g(make_grid(p));
  const float* ref = p.reference.data();
  Accum acc;
  std::int64_t inside = 0;
  for_each_row(p, [&](const Row& row) {
    const float* t_row = ref + row.offset;
    const __m256 sx = _mm256_set1_ps(row.sx), sy = _mm256_set1_ps(row.sy), sz = _mm256_set1_ps(row.sz);
    const __m256 dx = _mm256_set1_ps(row.dx), dy = _mm256_set1_ps(row.dy), dz = _mm256_set1_ps(row.dz);
    const __m256 end = _mm256_set1_ps(static_cast<float>(row.i1));
    const __m256 lanes = lane_offsets();
    for (std::int32_t i = row.i0; i < row.i1; i += 8) {
      const __m256 fi = _mm256_add_ps(_mm256_set1_ps(static_cast<float>(i)), lanes);
      const __m256 valid = _mm256_cmp_ps(fi, end, _CMP_LT_OQ);
      const __m256 x = _mm256_add_ps(sx, _mm256_mul_ps(fi, dx));
      const __m256 y = _mm256_add_ps(sy, _mm256_mul_ps(fi, dy));
      const __m256 z = _mm256_add_ps(sz, _mm256_mul_ps(fi, dz));
      __m256 in;
      const __m256 s = sample8(g, x, y, z, valid, in);
      const int bits = _mm256_movemask_ps(in);
      if (bits == 0) continue;
      inside += __builtin_popcount(static_cast<unsigned>(bits));
      const __m256 t = _mm256_and_ps(_mm256_maskload_ps(t_row + i, _mm256_castps_si256(valid)), in);
      acc.add(_mm256_castps256_ps128(s), _mm256_castps256_ps128(t));
      acc.add(_mm256_extractf128_ps(s, 1), _mm256_extractf128_ps(t, 1));
    }
  });
  WarpMoments m;
  m.inside = static_cast<double>(inside);
  m.st = hsum(acc.st);
  m.stt = hsum(acc.stt);
  m.ss = hsum(acc.ss);
  m.sss = hsum(acc.sss);
  m.sts = hsum(acc.sts);
  return m;
}

void warp_into_avx2(const WarpProblem& p, std::span<float> out) {
  const Grid8 g(make_grid(p));
  std::fill(out.begin(), out.end(), 0.0f);
  for_each_row(p, [&](const Row& row) {
    float* o = out.data() + row.offset;
    const __m256 sx = _mm256_set1_ps(row.sx), sy = _mm256_set1_ps(row.sy), sz = _mm256_set1_ps(row.sz);
    const __m256 dx = _mm256_set1_ps(row.dx), dy = _mm256_set1_ps(row.dy), dz = _mm256_set1_ps(row.dz);
    const __m256 end = _mm256_set1_ps(static_cast<float>(row.i1));
    const __m256 lanes = lane_offsets();
    for (std::int32_t i = row.i0; i < row.i1; i += 8) {
      const __m256 fi = _mm256_add_ps(_mm256_set1_ps(static_cast<float>(i)), lanes);
      const __m256 valid = _mm256_cmp_ps(fi, end, _CMP_LT_OQ);
      __m256 in;
      const __m256 s = sample8(g, _mm256_add_ps(sx, _mm256_mul_ps(fi, dx)), _mm256_add_ps(sy, _mm256_mul_ps(fi, dy)),
                               _mm256_add_ps(sz, _mm256_mul_ps(fi, dz)), valid, in);
      _mm256_maskstore_ps(o + i, _mm256_castps_si256(valid), s);
    }
  });
}

}  // namespace smcreg::kernels::detail
