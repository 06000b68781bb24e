#include <doctest.h>

#include "tempdir.hpp"
#include "smcreg/metrics.hpp"
#include "smcreg/phantom.hpp"

using namespace smcreg;

namespace {

PhantomSpec small() {
  PhantomSpec s;
  s.dims = {24, 24, 24};
  s.outer_axes = {7, 8, 10};
  s.inner_axes = {4, 5, 7};
  return s;
}

}  // namespace

TEST_CASE("phantom structure") {
  PhantomSpec spec = small();
  spec.speckle = 0.0;
  const Phantom p = make_phantom(spec);
  REQUIRE(p.sequence.size() == 1);
  const Volume3& v = p.sequence.frames[0];
  CHECK(v.at(0, 0, 0) == doctest::Approx(spec.background_level));
  CHECK(v.at(12, 12, 12) == doctest::Approx(spec.blood_level));
  CHECK(v.at(12, 12, 12 + 8) == doctest::Approx(spec.tissue_level));  // between inner (7) and outer (10) along z
  CHECK(p.masks[0].volume().at(12, 12, 12) == 1.0f);
  CHECK(p.masks[0].volume().at(12, 12, 12 + 8) == 0.0f);
  CHECK(p.masks[0].count() > 0);
}

TEST_CASE("speckle is seeded and multiplicative") {
  PhantomSpec spec = small();
  const Phantom a = make_phantom(spec), b = make_phantom(spec);
  CHECK(a.sequence == b.sequence);
  spec.seed = 2;
  const Phantom c = make_phantom(spec);
  CHECK_FALSE(c.sequence == a.sequence);
  CHECK(c.masks == a.masks);
  for (float x : a.sequence.frames[0].values()) CHECK(x > 0.0f);
}

TEST_CASE("cycle contracts the cavity and returns") {
  PhantomSpec spec = small();
  spec.frames = 4;
  spec.amplitude = 0.2;
  const Phantom p = make_phantom(spec);
  REQUIRE(p.masks.size() == 4);
  CHECK(spec.frame_scale(0) == 1.0);
  CHECK(spec.frame_scale(2) == doctest::Approx(0.8));
  CHECK(p.masks[2].count() < p.masks[1].count());
  CHECK(p.masks[1].count() < p.masks[0].count());
  CHECK(p.masks[1].count() == p.masks[3].count());
}

TEST_CASE("pairs are related by the truth transform") {
  const Phantom p = make_phantom(small());
  const RigidParams truth = RigidParams::from_mm_deg(2, -1, 1.5, 4, -3, 6);
  const RegistrationCase c = make_pair(p.sequence, p.masks, truth, 0.0);
  const HomogeneousMatrix m = to_matrix(truth, RotationCenter{c.target.frames[0].center()});
  CHECK(dice(c.source_masks[0], c.target_masks[0]).value() < 0.8);
  CHECK(dice_under_transform(c.source_masks[0], c.target_masks[0], m).value() > 0.9);
  CHECK(c.source.ed_index == c.target.ed_index);
}

TEST_CASE("crop blanks the +x face") {
  const Phantom p = make_phantom(small());
  const RegistrationCase c = make_pair(p.sequence, p.masks, RigidParams{}, 0.25);
  const Volume3& s = c.source.frames[0];
  for (std::size_t k = 0; k < 24; ++k)
    for (std::size_t j = 0; j < 24; ++j) {
      CHECK(s.at(17, j, k) != 0.0f);
      CHECK(s.at(18, j, k) == 0.0f);
    }
  CHECK(kind_of([&] { make_pair(p.sequence, p.masks, RigidParams{}, 1.0); }) == ErrorKind::BadConfig);
}

TEST_CASE("phantom spec validation") {
  PhantomSpec s = small();
  s.inner_axes[1] = 9;  // above the outer axis
  CHECK(kind_of([&] { s.validate(); }) == ErrorKind::BadConfig);
  s = small();
  s.amplitude = 1.0;
  CHECK(kind_of([&] { s.validate(); }) == ErrorKind::BadConfig);
  s = small();
  s.frames = 0;
  CHECK(kind_of([&] { s.validate(); }) == ErrorKind::BadConfig);
}
