#pragma once

#include <string_view>

#include "smcreg/geometry.hpp"
#include "smcreg/kernels.hpp"
#include "smcreg/volume.hpp"

namespace smcreg {

enum class MetricKind { Ncc, Dsc };

/// A similarity or overlap score in [0, 1].
class MetricValue {
 public:
  /// Throws InvariantFailure if value is outside [0, 1] by more than
  /// rounding (1e-9); rounding overshoot is snapped to the bound.
  MetricValue(double value, MetricKind kind);

  double value() const noexcept { return value_; }
  MetricKind kind() const noexcept { return kind_; }
  operator double() const noexcept { return value_; }

 private:
  double value_;
  MetricKind kind_;
};

/// Squared normalized cross-correlation over all voxels.
/// Throws DimMismatch, or DegenerateInput when either variance < 1e-12.
MetricValue ncc(const Volume3& t, const Volume3& s);

/// 2|A n B| / (|A| + |B|); 1 when both masks are empty. Throws DimMismatch.
MetricValue dice(const BinaryMask& a, const BinaryMask& b);

/// Warps `a` onto `b`'s grid under m (b space -> a space), thresholds the
/// trilinear result at 0.5, then scores dice against b.
MetricValue dice_under_transform(const BinaryMask& a, const BinaryMask& b, const HomogeneousMatrix& m);

enum class NccRegion {
  Full,     // every reference voxel, fill included
  Overlap,  // reference voxels that map inside the source grid
};

std::string_view to_string(NccRegion r) noexcept;
NccRegion parse_ncc_region(std::string_view s);

/// NCC of a fixed reference against a source warped by a candidate
/// transform, without materializing the warped volume. Holds references to
/// both volumes; they must outlive the evaluator. Thread-safe.
class NccEvaluator {
 public:
  struct Result {
    double value = 0.0;
    bool degenerate = false;
  };

  NccEvaluator(const Volume3& reference, const Volume3& source, NccRegion region = NccRegion::Full);

  /// m maps reference space into source space. Degenerate overlaps score 0.
  Result operator()(const HomogeneousMatrix& m) const;

  const Volume3& reference() const noexcept { return reference_; }
  const Volume3& source() const noexcept { return source_; }
  NccRegion region() const noexcept { return region_; }

 private:
  const Volume3& reference_;
  const Volume3& source_;
  NccRegion region_;
  kernels::IndexBox clip_;
  double n_ = 0.0, st_ = 0.0, stt_ = 0.0;
};

}  // namespace smcreg
