#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tempdir.hpp"
#include "smcreg/metrics.hpp"

using namespace smcreg;

namespace {

// Values k/256 so that small affine maps stay exact in float.
Volume3 dyadic_volume(oracle::Lcg& g, const Dims& d) {
  Volume3 v(d);
  for (auto& x : v.mutable_values()) x = static_cast<float>(static_cast<int>(g.below(512)) - 256) / 256.0f;
  return v;
}

Volume3 affine_intensity(const Volume3& v, float a, float b) {
  Volume3 out = v;
  for (auto& x : out.mutable_values()) x = a * x + b;
  return out;
}

// NCC over voxels that map inside the source grid, via explicit sampling.
double overlap_oracle(const Volume3& t, const Volume3& s, const HomogeneousMatrix& m) {
  long double n = 0, a = 0, b = 0, aa = 0, bb = 0, ab = 0;
  const auto& d = t.dims();
  for (std::size_t k = 0; k < d[2]; ++k)
    for (std::size_t j = 0; j < d[1]; ++j)
      for (std::size_t i = 0; i < d[0]; ++i) {
        const Vec3 q = s.continuous_index(m.apply(t.physical_point(i, j, k)));
        bool in = true;
        for (int ax = 0; ax < 3; ++ax) in = in && q[ax] >= 0 && q[ax] <= static_cast<double>(s.dims()[ax] - 1);
        if (!in) continue;
        const long double x = t.at(i, j, k), y = trilinear_sample(s, m.apply(t.physical_point(i, j, k)));
        n += 1;
        a += x;
        b += y;
        aa += x * x;
        bb += y * y;
        ab += x * y;
      }
  const long double cov = ab - a * b / n, va = aa - a * a / n, vb = bb - b * b / n;
  return static_cast<double>(cov * cov / (va * vb));
}

}  // namespace

TEST_CASE("ncc matches the scalar-loop oracle") {
  oracle::Lcg g(31);
  for (int trial = 0; trial < 100; ++trial) {
    const Dims d{2 + g.below(7), 2 + g.below(7), 1 + g.below(7)};
    Volume3 t = oracle::random_volume(g, d);
    Volume3 s(d, t.spacing(), t.origin());
    for (std::size_t i = 0; i < s.size(); ++i)
      s.mutable_values()[i] = static_cast<float>(0.6 * t.values()[i] + 0.4 * (g.next() * 2 - 1));
    CHECK(std::abs(ncc(t, s).value() - static_cast<double>(oracle::ncc(t, s))) < 1e-12);
  }
}

TEST_CASE("ncc is symmetric and invariant to affine intensity maps") {
  oracle::Lcg g(32);
  for (int trial = 0; trial < 100; ++trial) {
    const Dims d{3 + g.below(6), 3 + g.below(6), 3 + g.below(6)};
    const Volume3 t = dyadic_volume(g, d);
    const Volume3 s = dyadic_volume(g, d);
    const double base = ncc(t, s);
    CHECK(std::abs(ncc(s, t) - base) < 1e-9);
    CHECK(std::abs(ncc(t, affine_intensity(s, 2.0f, 0.5f)) - base) < 1e-9);
    CHECK(std::abs(ncc(t, affine_intensity(s, -4.0f, 1.0f)) - base) < 1e-9);
    CHECK(std::abs(ncc(affine_intensity(t, 0.5f, -3.0f), s) - base) < 1e-9);
  }
}

TEST_CASE("ncc edge cases") {
  oracle::Lcg g(33);
  const Volume3 t = oracle::random_volume(g, {4, 4, 4});
  CHECK(ncc(t, t).value() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(kind_of([&] { ncc(t, Volume3({4, 4, 3})); }) == ErrorKind::DimMismatch);
  CHECK(kind_of([&] { ncc(t, Volume3({4, 4, 4}, {1, 1, 1}, {0, 0, 0}, 2.0f)); }) == ErrorKind::DegenerateInput);

  Volume3 a({2, 1, 1}), b({2, 1, 1});
  a.at(0, 0, 0) = 1;
  b.at(1, 0, 0) = 1;  // perfectly anti-correlated
  CHECK(ncc(a, b).value() == doctest::Approx(1.0));
}

TEST_CASE("metric values are range checked") {
  CHECK(MetricValue(1.0 + 1e-10, MetricKind::Ncc).value() == 1.0);
  CHECK(MetricValue(-1e-10, MetricKind::Dsc).value() == 0.0);
  CHECK(kind_of([] { MetricValue(1.01, MetricKind::Ncc); }) == ErrorKind::InvariantFailure);
  CHECK(kind_of([] { MetricValue(NAN, MetricKind::Dsc); }) == ErrorKind::InvariantFailure);
}

TEST_CASE("dice matches the scalar-loop oracle") {
  oracle::Lcg g(34);
  for (int trial = 0; trial < 100; ++trial) {
    const Dims d{1 + g.below(8), 1 + g.below(8), 1 + g.below(8)};
    const auto a = oracle::random_mask(g, d, g.next());
    const auto b = oracle::random_mask(g, d, g.next());
    CHECK(std::abs(dice(a, b).value() - static_cast<double>(oracle::dice(a, b))) < 1e-12);
  }
}

TEST_CASE("dice examples") {
  Volume3 a({4, 1, 1}), b({4, 1, 1});
  CHECK(dice(BinaryMask(a), BinaryMask(b)).value() == 1.0);  // both empty
  a.at(0, 0, 0) = a.at(1, 0, 0) = 1;
  b.at(1, 0, 0) = b.at(2, 0, 0) = b.at(3, 0, 0) = 1;
  CHECK(dice(BinaryMask(a), BinaryMask(b)).value() == doctest::Approx(2.0 / 5.0));
  Volume3 c({4, 1, 1});
  c.at(3, 0, 0) = 1;
  CHECK(dice(BinaryMask(a), BinaryMask(c)).value() == 0.0);
  CHECK(kind_of([&] { dice(BinaryMask(a), BinaryMask(Volume3({3, 1, 1}))); }) == ErrorKind::DimMismatch);
  CHECK(kind_of([] { BinaryMask(Volume3({2, 2, 2}, {1, 1, 1}, {0, 0, 0}, 0.5f)); }) == ErrorKind::DegenerateInput);
}

TEST_CASE("dice under the identity equals dice") {
  oracle::Lcg g(35);
  const auto a = oracle::random_mask(g, {6, 6, 6}, 0.5);
  const auto b = oracle::random_mask(g, {6, 6, 6}, 0.5);
  CHECK(dice_under_transform(a, b, HomogeneousMatrix::identity()).value() == dice(a, b).value());
}

TEST_CASE("fused evaluator matches explicit resample + ncc") {
  oracle::Lcg g(36);
  for (int trial = 0; trial < 30; ++trial) {
    const Dims d{8 + g.below(8), 8 + g.below(8), 8 + g.below(8)};
    const Volume3 t = oracle::random_volume(g, d);
    const Volume3 raw = oracle::random_volume(g, {8 + g.below(8), 8 + g.below(8), 8 + g.below(8)});
    Volume3 s(raw.dims(), t.spacing(), t.origin(), std::vector<float>(raw.values().begin(), raw.values().end()));
    // Zero border so support clipping is exercised.
    for (std::size_t k = 0; k < s.dims()[2]; ++k)
      for (std::size_t j = 0; j < s.dims()[1]; ++j)
        for (std::size_t i = 0; i < s.dims()[0]; ++i)
          if (i < 2 || j < 3 || k > s.dims()[2] - 3) s.at(i, j, k) = 0.0f;
    const RigidParams p = RigidParams::from_mm_deg(g.next() * 4 - 2, g.next() * 4 - 2, g.next() * 4 - 2,
                                                   g.next() * 20 - 10, g.next() * 20 - 10, g.next() * 20 - 10);
    const HomogeneousMatrix m = to_matrix(p, RotationCenter{t.center()});
    const auto full = NccEvaluator(t, s, NccRegion::Full)(m);
    REQUIRE_FALSE(full.degenerate);
    CHECK(full.value == doctest::Approx(ncc(t, resample(s, t, m)).value()).epsilon(1e-9));
    const auto over = NccEvaluator(t, s, NccRegion::Overlap)(m);
    REQUIRE_FALSE(over.degenerate);
    CHECK(over.value == doctest::Approx(overlap_oracle(t, s, m)).epsilon(1e-5));
  }
}

TEST_CASE("evaluator reports degenerate overlaps") {
  oracle::Lcg g(37);
  const Volume3 t = oracle::random_volume(g, {6, 6, 6});
  const Volume3 s = oracle::random_volume(g, {6, 6, 6});
  const HomogeneousMatrix far = HomogeneousMatrix::translation({1000, 0, 0});
  const auto r = NccEvaluator(t, s, NccRegion::Full)(far);
  CHECK(r.degenerate);
  CHECK(r.value == 0.0);
  CHECK(NccEvaluator(t, s, NccRegion::Overlap)(far).degenerate);
}

TEST_CASE("region names parse") {
  CHECK(parse_ncc_region("full") == NccRegion::Full);
  CHECK(parse_ncc_region("overlap") == NccRegion::Overlap);
  CHECK(to_string(NccRegion::Overlap) == "overlap");
  CHECK(kind_of([] { parse_ncc_region("all"); }) == ErrorKind::BadConfig);
}
