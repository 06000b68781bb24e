#include "smcreg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "smcreg/error.hpp"

namespace smcreg {

namespace {

constexpr double kVarianceFloor = 1e-12;

void require_same_dims(const Dims& a, const Dims& b) {
  if (a != b) throw Error(ErrorKind::DimMismatch, "volumes have different dims");
}

/// cov^2 / (var_t var_s) from raw sums; nullopt-like flag when degenerate.
NccEvaluator::Result ncc_from_sums(double n, double st, double stt, double ss, double sss, double sts) {
  if (n <= 0.0) return {0.0, true};
  const double vt = stt - st * st / n;
  const double vs = sss - ss * ss / n;
  if (vt / n < kVarianceFloor || vs / n < kVarianceFloor) return {0.0, true};
  const double cov = sts - st * ss / n;
  return {std::min(1.0, cov * cov / (vt * vs)), false};
}

}  // namespace

MetricValue::MetricValue(double value, MetricKind kind) : value_(value), kind_(kind) {
  if (!(value_ >= -1e-9 && value_ <= 1.0 + 1e-9))
    throw Error(ErrorKind::InvariantFailure, "metric value out of [0,1]: " + std::to_string(value));
  value_ = std::clamp(value_, 0.0, 1.0);
}

MetricValue ncc(const Volume3& t, const Volume3& s) {
  require_same_dims(t.dims(), s.dims());
  const auto tv = t.values();
  const auto sv = s.values();
  const double n = static_cast<double>(tv.size());
  double tm = 0.0, sm = 0.0;
  for (std::size_t i = 0; i < tv.size(); ++i) {
    tm += tv[i];
    sm += sv[i];
  }
  tm /= n;
  sm /= n;
  double cov = 0.0, vt = 0.0, vs = 0.0;
  for (std::size_t i = 0; i < tv.size(); ++i) {
    const double dt = tv[i] - tm, ds = sv[i] - sm;
    cov += dt * ds;
    vt += dt * dt;
    vs += ds * ds;
  }
  if (vt / n < kVarianceFloor || vs / n < kVarianceFloor)
    throw Error(ErrorKind::DegenerateInput, "ncc input variance below 1e-12");
  return MetricValue(cov * cov / (vt * vs), MetricKind::Ncc);
}

MetricValue dice(const BinaryMask& a, const BinaryMask& b) {
  require_same_dims(a.dims(), b.dims());
  const auto av = a.volume().values();
  const auto bv = b.volume().values();
  std::size_t na = 0, nb = 0, both = 0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const bool x = av[i] != 0.0f, y = bv[i] != 0.0f;
    na += x;
    nb += y;
    both += x && y;
  }
  if (na + nb == 0) return MetricValue(1.0, MetricKind::Dsc);
  return MetricValue(2.0 * static_cast<double>(both) / static_cast<double>(na + nb), MetricKind::Dsc);
}

MetricValue dice_under_transform(const BinaryMask& a, const BinaryMask& b, const HomogeneousMatrix& m) {
  const Volume3 warped = resample(a.volume(), b.volume(), m);
  return dice(binarize(warped, 0.5), b);
}

std::string_view to_string(NccRegion r) noexcept { return r == NccRegion::Full ? "full" : "overlap"; }

NccRegion parse_ncc_region(std::string_view s) {
  if (s == "full") return NccRegion::Full;
  if (s == "overlap") return NccRegion::Overlap;
  throw Error(ErrorKind::BadConfig, "ncc region must be full|overlap, got '" + std::string(s) + "'");
}

NccEvaluator::NccEvaluator(const Volume3& reference, const Volume3& source, NccRegion region)
    : reference_(reference), source_(source), region_(region) {
  if (region_ == NccRegion::Full) {
    clip_ = kernels::support_box(source_);
    const auto v = reference_.values();
    n_ = static_cast<double>(v.size());
    for (float x : v) {
      st_ += x;
      stt_ += static_cast<double>(x) * x;
    }
  } else {
    clip_ = kernels::grid_box(source_.dims());
  }
}

NccEvaluator::Result NccEvaluator::operator()(const HomogeneousMatrix& m) const {
  const kernels::WarpProblem p = kernels::make_problem(reference_.values(), reference_.dims(), source_,
                                                       index_affine(reference_, source_, m), clip_);
  const kernels::WarpMoments mo = kernels::warp_moments(p);
  if (region_ == NccRegion::Full) return ncc_from_sums(n_, st_, stt_, mo.ss, mo.sss, mo.sts);
  return ncc_from_sums(mo.inside, mo.st, mo.stt, mo.ss, mo.sss, mo.sts);
}

}  // namespace smcreg
