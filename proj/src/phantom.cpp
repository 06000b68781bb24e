#include "smcreg/phantom.hpp"

#include <cmath>
#include <numbers>

#include "smcreg/error.hpp"
#include "smcreg/rng.hpp"

namespace smcreg {

void PhantomSpec::validate() const {
  for (std::size_t a = 0; a < 3; ++a) {
    if (dims[a] < 1) throw Error(ErrorKind::BadConfig, "phantom dims must be >= 1");
    if (!(spacing[a] > 0.0)) throw Error(ErrorKind::BadConfig, "phantom spacing must be positive");
    if (!(inner_axes[a] > 0.0) || !(inner_axes[a] < outer_axes[a]))
      throw Error(ErrorKind::BadConfig, "phantom inner semi-axes must be positive and below the outer ones");
  }
  if (!(speckle >= 0.0)) throw Error(ErrorKind::BadConfig, "speckle must be >= 0");
  if (!(amplitude >= 0.0 && amplitude < 1.0)) throw Error(ErrorKind::BadConfig, "amplitude must be in [0, 1)");
  if (frames < 1) throw Error(ErrorKind::BadConfig, "phantom needs at least one frame");
}

Vec3 PhantomSpec::shell_center() const {
  if (center) return *center;
  return {0.5 * spacing[0] * static_cast<double>(dims[0] - 1), 0.5 * spacing[1] * static_cast<double>(dims[1] - 1),
          0.5 * spacing[2] * static_cast<double>(dims[2] - 1)};
}

double PhantomSpec::frame_scale(std::size_t k) const {
  const double s = std::sin(std::numbers::pi * static_cast<double>(k) / static_cast<double>(frames));
  return 1.0 - amplitude * s * s;
}

Phantom make_phantom(const PhantomSpec& spec) {
  spec.validate();
  const Vec3 c = spec.shell_center();
  Phantom out;
  out.sequence.frame_rate = 20.0;
  for (std::size_t f = 0; f < spec.frames; ++f) {
    const double scale = spec.frame_scale(f);
    Volume3 img(spec.dims, spec.spacing);
    Volume3 mask(spec.dims, spec.spacing);
    auto iv = img.mutable_values();
    auto mv = mask.mutable_values();
    for (std::size_t k = 0; k < spec.dims[2]; ++k) {
      for (std::size_t j = 0; j < spec.dims[1]; ++j) {
        for (std::size_t i = 0; i < spec.dims[0]; ++i) {
          const Vec3 p = img.physical_point(static_cast<double>(i), static_cast<double>(j), static_cast<double>(k));
          double r_in = 0.0, r_out = 0.0;
          for (std::size_t a = 0; a < 3; ++a) {
            const double d = p[a] - c[a];
            const double ai = spec.inner_axes[a] * scale, ao = spec.outer_axes[a] * scale;
            r_in += d * d / (ai * ai);
            r_out += d * d / (ao * ao);
          }
          const std::size_t idx = img.index(i, j, k);
          const bool cavity = r_in <= 1.0;
          double level = cavity ? spec.blood_level : r_out <= 1.0 ? spec.tissue_level : spec.background_level;
          if (spec.speckle > 0.0) {
            rng::Stream s(spec.seed, rng::Purpose::Phantom, static_cast<std::uint32_t>(idx),
                          static_cast<std::uint32_t>(f));
            level *= std::exp(spec.speckle * s.normal());
          }
          iv[idx] = static_cast<float>(level);
          mv[idx] = cavity ? 1.0f : 0.0f;
        }
      }
    }
    out.sequence.frames.push_back(std::move(img));
    out.masks.emplace_back(std::move(mask));
  }
  return out;
}

namespace {

void crop_face(Volume3& v, double crop) {
  if (crop <= 0.0) return;
  const auto& n = v.dims();
  const auto first = static_cast<std::size_t>(std::ceil(static_cast<double>(n[0]) * (1.0 - crop)));
  for (std::size_t k = 0; k < n[2]; ++k)
    for (std::size_t j = 0; j < n[1]; ++j)
      for (std::size_t i = first; i < n[0]; ++i) v.at(i, j, k) = kFillValue;
}

}  // namespace

RegistrationCase make_pair(const Sequence4& seq, const std::vector<BinaryMask>& masks, const RigidParams& truth,
                           double crop) {
  seq.validate();
  if (!truth.finite()) throw Error(ErrorKind::BadConfig, "truth must be finite");
  if (!(crop >= 0.0 && crop < 1.0)) throw Error(ErrorKind::BadConfig, "crop must be in [0, 1)");
  const Volume3& ref = seq.frames.front();
  const HomogeneousMatrix back = inverse(to_matrix(truth, RotationCenter{ref.center()}));

  RegistrationCase rc;
  rc.truth = truth;
  rc.crop = crop;
  rc.target = seq;
  rc.target_masks = masks;
  rc.source.frame_rate = seq.frame_rate;
  rc.source.ed_index = seq.ed_index;
  for (const auto& f : seq.frames) {
    Volume3 moved = resample(f, f, back);
    crop_face(moved, crop);
    rc.source.frames.push_back(std::move(moved));
  }
  for (const auto& m : masks) {
    Volume3 moved = binarize(resample(m.volume(), m.volume(), back), 0.5).volume();
    crop_face(moved, crop);
    rc.source_masks.emplace_back(std::move(moved));
  }
  return rc;
}

}  // namespace smcreg
