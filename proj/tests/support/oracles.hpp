#pragma once

// Independent reference implementations used as test oracles. Plain loops,
// long double accumulation, no shared code with the library kernels.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "smcreg/geometry.hpp"
#include "smcreg/rng.hpp"
#include "smcreg/volume.hpp"

namespace oracle {

using Mat4 = std::array<std::array<long double, 4>, 4>;

inline Mat4 eye() {
  Mat4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1;
  return m;
}

inline Mat4 mul(const Mat4& a, const Mat4& b) {
  Mat4 c{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline Mat4 trans(long double x, long double y, long double z) {
  Mat4 m = eye();
  m[0][3] = x;
  m[1][3] = y;
  m[2][3] = z;
  return m;
}

inline Mat4 rot(int axis, long double a) {
  Mat4 m = eye();
  const long double c = std::cos(a), s = std::sin(a);
  const int p = (axis + 1) % 3, q = (axis + 2) % 3;
  m[p][p] = c;
  m[p][q] = -s;
  m[q][p] = s;
  m[q][q] = c;
  return m;
}

/// Trans(c) Rz Ry Rx Trans(-c) Trans(t), multiplied out term by term.
inline Mat4 rigid(const smcreg::RigidParams& p, const smcreg::Vec3& c) {
  Mat4 m = trans(c[0], c[1], c[2]);
  m = mul(m, rot(2, p.rz));
  m = mul(m, rot(1, p.ry));
  m = mul(m, rot(0, p.rx));
  m = mul(m, trans(-c[0], -c[1], -c[2]));
  return mul(m, trans(p.tx, p.ty, p.tz));
}

inline long double ncc(const smcreg::Volume3& t, const smcreg::Volume3& s) {
  const auto a = t.values();
  const auto b = s.values();
  const std::size_t n = a.size();
  long double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  long double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long double da = a[i] - ma, db = b[i] - mb;
    cov += da * db;
    va += da * da;
    vb += db * db;
  }
  return cov * cov / (va * vb);
}

inline long double dice(const smcreg::BinaryMask& a, const smcreg::BinaryMask& b) {
  long double both = 0, na = 0, nb = 0;
  const auto& va = a.volume();
  const auto& vb = b.volume();
  const auto& d = va.dims();
  for (std::size_t k = 0; k < d[2]; ++k)
    for (std::size_t j = 0; j < d[1]; ++j)
      for (std::size_t i = 0; i < d[0]; ++i) {
        const bool x = va.at(i, j, k) == 1.0f, y = vb.at(i, j, k) == 1.0f;
        both += x && y;
        na += x;
        nb += y;
      }
  if (na + nb == 0) return 1;
  return 2 * both / (na + nb);
}

/// Random volume with values from a simple LCG (independent of the library RNG).
struct Lcg {
  std::uint64_t s;
  explicit Lcg(std::uint64_t seed) : s(seed * 6364136223846793005ULL + 1442695040888963407ULL) {}
  double next() {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(s >> 11) * 0x1.0p-53;
  }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() * static_cast<double>(n)); }
};

inline smcreg::Volume3 random_volume(Lcg& g, const smcreg::Dims& d, double lo = -1.0, double hi = 1.0) {
  smcreg::Volume3 v(d, {1.0 + g.next(), 1.0 + g.next(), 1.0 + g.next()}, {g.next() * 10 - 5, g.next() * 10 - 5, g.next() * 10 - 5});
  for (auto& x : v.mutable_values()) x = static_cast<float>(lo + (hi - lo) * g.next());
  return v;
}

inline smcreg::BinaryMask random_mask(Lcg& g, const smcreg::Dims& d, double p) {
  smcreg::Volume3 v(d);
  for (auto& x : v.mutable_values()) x = g.next() < p ? 1.0f : 0.0f;
  return smcreg::BinaryMask(std::move(v));
}

}  // namespace oracle
