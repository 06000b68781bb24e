#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "smcreg/geometry.hpp"
#include "smcreg/volume.hpp"

namespace smcreg {

/// Synthetic LV-like phantom: an ellipsoidal myocardial shell around a blood
/// cavity, multiplicative log-normal speckle, and a contraction cycle.
struct PhantomSpec {
  Dims dims{64, 64, 64};
  Vec3 spacing{1.0, 1.0, 1.0};
  Vec3 outer_axes{13.0, 16.0, 23.0};  // mm
  Vec3 inner_axes{9.0, 12.0, 18.0};   // mm, the cavity
  std::optional<Vec3> center;         // mm; defaults to the grid center
  double speckle = 0.3;               // log-normal sigma
  double amplitude = 0.2;             // fractional contraction at mid-cycle
  std::size_t frames = 1;
  std::uint64_t seed = 1;

  double tissue_level = 1.0;
  double blood_level = 0.15;
  double background_level = 0.45;

  /// Throws BadConfig.
  void validate() const;
  Vec3 shell_center() const;
  /// Semi-axis scale of frame k: 1 - amplitude * sin^2(pi k / frames).
  double frame_scale(std::size_t k) const;
};

struct Phantom {
  Sequence4 sequence;
  std::vector<BinaryMask> masks;  // cavity, one per frame
};

Phantom make_phantom(const PhantomSpec& spec);

/// Target/source pair with a known target->source transform.
struct RegistrationCase {
  Sequence4 target;
  Sequence4 source;
  std::vector<BinaryMask> target_masks;
  std::vector<BinaryMask> source_masks;
  RigidParams truth;
  double crop = 0.0;
};

/// Source frames and masks are the originals resampled under truth^-1 about
/// the grid center, so registering source to target should recover `truth`.
/// crop in [0, 1) zeroes that fraction of the source's +x face.
RegistrationCase make_pair(const Sequence4& seq, const std::vector<BinaryMask>& masks, const RigidParams& truth,
                           double crop);

}  // namespace smcreg
