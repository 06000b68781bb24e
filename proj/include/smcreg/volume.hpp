#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace smcreg {

using Dims = std::array<std::size_t, 3>;
using Vec3 = std::array<double, 3>;

/// A 3D scalar grid in physical space. Voxel (i, j, k) sits at
/// origin + spacing * (i, j, k); data is stored x-fastest.
class Volume3 {
 public:
  Volume3() : Volume3(Dims{1, 1, 1}) {}
  explicit Volume3(Dims dims, Vec3 spacing = {1.0, 1.0, 1.0}, Vec3 origin = {0.0, 0.0, 0.0},
                   float fill = 0.0f);
  Volume3(Dims dims, Vec3 spacing, Vec3 origin, std::vector<float> data);

  const Dims& dims() const noexcept { return dims_; }
  const Vec3& spacing() const noexcept { return spacing_; }
  const Vec3& origin() const noexcept { return origin_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<const float> values() const noexcept { return data_; }
  std::span<float> mutable_values() noexcept { return data_; }

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return i + dims_[0] * (j + dims_[1] * k);
  }
  float at(std::size_t i, std::size_t j, std::size_t k) const noexcept { return data_[index(i, j, k)]; }
  float& at(std::size_t i, std::size_t j, std::size_t k) noexcept { return data_[index(i, j, k)]; }

  Vec3 physical_point(double i, double j, double k) const noexcept;
  Vec3 continuous_index(const Vec3& point) const noexcept;
  /// Physical center of the grid's bounding box (voxel centers).
  Vec3 center() const noexcept;

  bool same_geometry(const Volume3& other) const noexcept {
    return dims_ == other.dims_ && spacing_ == other.spacing_ && origin_ == other.origin_;
  }

  /// Copy of this grid's geometry with every voxel set to `fill`.
  Volume3 blank_like(float fill = 0.0f) const { return Volume3(dims_, spacing_, origin_, fill); }

  friend bool operator==(const Volume3&, const Volume3&) = default;

 private:
  void check() const;

  Dims dims_;
  Vec3 spacing_;
  Vec3 origin_;
  std::vector<float> data_;
};

/// A Volume3 whose voxels are exactly 0 or 1.
class BinaryMask {
 public:
  BinaryMask() = default;
  /// Throws DegenerateInput if any voxel is not 0 or 1.
  explicit BinaryMask(Volume3 volume);

  const Volume3& volume() const noexcept { return volume_; }
  const Dims& dims() const noexcept { return volume_.dims(); }
  std::size_t count() const noexcept;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  Volume3 volume_;
};

/// A cardiac-cycle sequence: frames share one grid.
struct Sequence4 {
  std::vector<Volume3> frames;
  double frame_rate = 0.0;  // Hz, 0 when unknown
  std::size_t ed_index = 0;

  /// Throws GeometryMismatch or BadConfig when the invariants do not hold.
  void validate() const;
  const Volume3& ed_frame() const { return frames.at(ed_index); }
  std::size_t size() const noexcept { return frames.size(); }

  friend bool operator==(const Sequence4&, const Sequence4&) = default;
};

/// Zero mean, unit population standard deviation. Throws ConstantVolume.
Volume3 normalize_zscore(const Volume3& v);

/// 1 where value > threshold, else 0.
BinaryMask binarize(const Volume3& v, double threshold);

}  // namespace smcreg
