#include "smcreg/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "smcreg/kernels.hpp"

namespace smcreg {

namespace {

double wrap_angle(double a) noexcept {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(a, two_pi);
  if (w <= -std::numbers::pi) w += two_pi;
  if (w > std::numbers::pi) w -= two_pi;
  return w;
}

}  // namespace

bool RigidParams::finite() const noexcept {
  for (double v : as_array())
    if (!std::isfinite(v)) return false;
  return true;
}

RigidParams RigidParams::canonical() const noexcept {
  RigidParams out = *this;
  out.rx = wrap_angle(rx);
  out.ry = wrap_angle(ry);
  out.rz = wrap_angle(rz);
  return out;
}

HomogeneousMatrix HomogeneousMatrix::translation(const Vec3& t) noexcept {
  HomogeneousMatrix m;
  m(0, 3) = t[0];
  m(1, 3) = t[1];
  m(2, 3) = t[2];
  return m;
}

HomogeneousMatrix HomogeneousMatrix::rotation_x(double a) noexcept {
  HomogeneousMatrix m;
  const double c = std::cos(a), s = std::sin(a);
  m(1, 1) = c;
  m(1, 2) = -s;
  m(2, 1) = s;
  m(2, 2) = c;
  return m;
}

HomogeneousMatrix HomogeneousMatrix::rotation_y(double a) noexcept {
  HomogeneousMatrix m;
  const double c = std::cos(a), s = std::sin(a);
  m(0, 0) = c;
  m(0, 2) = s;
  m(2, 0) = -s;
  m(2, 2) = c;
  return m;
}

HomogeneousMatrix HomogeneousMatrix::rotation_z(double a) noexcept {
  HomogeneousMatrix m;
  const double c = std::cos(a), s = std::sin(a);
  m(0, 0) = c;
  m(0, 1) = -s;
  m(1, 0) = s;
  m(1, 1) = c;
  return m;
}

Vec3 HomogeneousMatrix::apply(const Vec3& p) const noexcept {
  Vec3 out{};
  for (std::size_t r = 0; r < 3; ++r)
    out[r] = m_[4 * r] * p[0] + m_[4 * r + 1] * p[1] + m_[4 * r + 2] * p[2] + m_[4 * r + 3];
  return out;
}

bool HomogeneousMatrix::is_rigid(double tol) const noexcept {
  if (m_[12] != 0.0 || m_[13] != 0.0 || m_[14] != 0.0 || m_[15] != 1.0) return false;
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      double dot = 0.0;
      for (std::size_t r = 0; r < 3; ++r) dot += (*this)(r, a) * (*this)(r, b);
      if (std::abs(dot - (a == b ? 1.0 : 0.0)) > tol) return false;
    }
  }
  const auto& m = *this;
  const double det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                     m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                     m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  return std::abs(det - 1.0) <= tol;
}

double HomogeneousMatrix::max_abs_diff(const HomogeneousMatrix& other) const noexcept {
  double d = 0.0;
  for (std::size_t i = 0; i < 16; ++i) d = std::max(d, std::abs(m_[i] - other.m_[i]));
  return d;
}

HomogeneousMatrix compose(const HomogeneousMatrix& a, const HomogeneousMatrix& b) noexcept {
  HomogeneousMatrix out;
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      double acc = a(r, 0) * b(0, c) + a(r, 1) * b(1, c) + a(r, 2) * b(2, c);
      if (c == 3) acc += a(r, 3);
      out(r, c) = acc;
    }
  }
  return out;
}

HomogeneousMatrix inverse(const HomogeneousMatrix& m) noexcept {
  HomogeneousMatrix out;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) out(r, c) = m(c, r);
  for (std::size_t r = 0; r < 3; ++r)
    out(r, 3) = -(out(r, 0) * m(0, 3) + out(r, 1) * m(1, 3) + out(r, 2) * m(2, 3));
  return out;
}

HomogeneousMatrix to_matrix(const RigidParams& p, const RotationCenter& c) {
  const Vec3& ctr = c.point;
  HomogeneousMatrix m = HomogeneousMatrix::translation(ctr);
  m = compose(m, HomogeneousMatrix::rotation_z(p.rz));
  m = compose(m, HomogeneousMatrix::rotation_y(p.ry));
  m = compose(m, HomogeneousMatrix::rotation_x(p.rx));
  m = compose(m, HomogeneousMatrix::translation({-ctr[0], -ctr[1], -ctr[2]}));
  return compose(m, HomogeneousMatrix::translation({p.tx, p.ty, p.tz}));
}

double trilinear_sample(const Volume3& v, const Vec3& point) noexcept {
  const Vec3 x = v.continuous_index(point);
  const Dims& n = v.dims();
  std::array<std::size_t, 3> base{};
  std::array<std::size_t, 3> step{};
  std::array<double, 3> frac{};
  for (std::size_t a = 0; a < 3; ++a) {
    const double hi = static_cast<double>(n[a] - 1);
    if (!(x[a] >= 0.0 && x[a] <= hi)) return kFillValue;
    const double fl = std::min(std::floor(x[a]), std::max(hi - 1.0, 0.0));
    base[a] = static_cast<std::size_t>(fl);
    frac[a] = x[a] - fl;
    step[a] = n[a] > 1 ? 1 : 0;
  }
  double acc = 0.0;
  for (std::size_t corner = 0; corner < 8; ++corner) {
    const std::size_t di = corner & 1, dj = (corner >> 1) & 1, dk = (corner >> 2) & 1;
    const double w = (di ? frac[0] : 1.0 - frac[0]) * (dj ? frac[1] : 1.0 - frac[1]) *
                     (dk ? frac[2] : 1.0 - frac[2]);
    acc += w * v.at(base[0] + di * step[0], base[1] + dj * step[1], base[2] + dk * step[2]);
  }
  return acc;
}

IndexAffine index_affine(const Volume3& reference, const Volume3& source, const HomogeneousMatrix& m) noexcept {
  // source_index = diag(1/s_src) * (m * (o_ref + diag(s_ref) * i) - o_src)
  IndexAffine a{};
  const Vec3& sr = reference.spacing();
  const Vec3& orf = reference.origin();
  const Vec3& ss = source.spacing();
  const Vec3& os = source.origin();
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) a[4 * r + c] = m(r, c) * sr[c] / ss[r];
    const double t = m(r, 0) * orf[0] + m(r, 1) * orf[1] + m(r, 2) * orf[2] + m(r, 3) - os[r];
    a[4 * r + 3] = t / ss[r];
  }
  return a;
}

Volume3 resample(const Volume3& source, const Volume3& reference, const HomogeneousMatrix& m) {
  Volume3 out = reference.blank_like(kFillValue);
  const kernels::WarpProblem problem =
      kernels::make_problem(reference.values(), reference.dims(), source, index_affine(reference, source, m),
                            kernels::grid_box(source.dims()));
  kernels::warp_into(problem, out.mutable_values());
  return out;
}

}  // namespace smcreg
