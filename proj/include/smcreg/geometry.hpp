#pragma once

#include <array>
#include <numbers>

#include "smcreg/volume.hpp"

namespace smcreg {

inline constexpr double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

/// 6-DOF rigid transform: Euler angles in radians, translations in mm.
struct RigidParams {
  double rx = 0.0, ry = 0.0, rz = 0.0;
  double tx = 0.0, ty = 0.0, tz = 0.0;

  static constexpr std::size_t kDof = 6;

  /// Builds from external units (mm, degrees).
  static RigidParams from_mm_deg(double tx, double ty, double tz, double rx_deg, double ry_deg, double rz_deg) {
    return {deg_to_rad(rx_deg), deg_to_rad(ry_deg), deg_to_rad(rz_deg), tx, ty, tz};
  }

  /// (rx, ry, rz, tx, ty, tz)
  std::array<double, kDof> as_array() const noexcept { return {rx, ry, rz, tx, ty, tz}; }
  static RigidParams from_array(const std::array<double, kDof>& a) noexcept {
    return {a[0], a[1], a[2], a[3], a[4], a[5]};
  }

  bool finite() const noexcept;
  /// Each angle wrapped into (-pi, pi].
  RigidParams canonical() const noexcept;

  friend bool operator==(const RigidParams&, const RigidParams&) = default;
};

struct RotationCenter {
  Vec3 point{0.0, 0.0, 0.0};
};

/// 4x4 homogeneous rigid transform, row-major.
class HomogeneousMatrix {
 public:
  HomogeneousMatrix() noexcept : m_{} { m_[0] = m_[5] = m_[10] = m_[15] = 1.0; }

  static HomogeneousMatrix identity() noexcept { return {}; }
  static HomogeneousMatrix translation(const Vec3& t) noexcept;
  static HomogeneousMatrix rotation_x(double angle) noexcept;
  static HomogeneousMatrix rotation_y(double angle) noexcept;
  static HomogeneousMatrix rotation_z(double angle) noexcept;

  double operator()(std::size_t r, std::size_t c) const noexcept { return m_[4 * r + c]; }
  double& operator()(std::size_t r, std::size_t c) noexcept { return m_[4 * r + c]; }

  Vec3 apply(const Vec3& p) const noexcept;
  Vec3 translation_part() const noexcept { return {m_[3], m_[7], m_[11]}; }

  /// Orthonormal rotation block with det +1 and an exact (0,0,0,1) bottom row.
  bool is_rigid(double tol = 1e-9) const noexcept;
  double max_abs_diff(const HomogeneousMatrix& other) const noexcept;

  friend bool operator==(const HomogeneousMatrix&, const HomogeneousMatrix&) = default;

 private:
  std::array<double, 16> m_;
};

/// Trans(c) * Rz * Ry * Rx * Trans(-c) * Trans(t).
HomogeneousMatrix to_matrix(const RigidParams& p, const RotationCenter& c);
HomogeneousMatrix compose(const HomogeneousMatrix& a, const HomogeneousMatrix& b) noexcept;
/// Rigid inverse (R^T, -R^T t).
HomogeneousMatrix inverse(const HomogeneousMatrix& m) noexcept;

inline constexpr float kFillValue = 0.0f;

/// Trilinear interpolation at a physical point; kFillValue outside the
/// index-space bounding box [0, n-1]^3.
double trilinear_sample(const Volume3& v, const Vec3& point) noexcept;

/// Row-major 3x4 map from reference voxel index to continuous source index.
using IndexAffine = std::array<double, 12>;
IndexAffine index_affine(const Volume3& reference, const Volume3& source, const HomogeneousMatrix& m) noexcept;

/// Pull-back resampling: output voxel at reference point x holds
/// source(m * x), i.e. m maps reference (target) space into source space.
Volume3 resample(const Volume3& source, const Volume3& reference, const HomogeneousMatrix& m);

}  // namespace smcreg
