#include "smcreg/volume.hpp"

#include <cmath>
#include <string>

#include "smcreg/error.hpp"

namespace smcreg {

Volume3::Volume3(Dims dims, Vec3 spacing, Vec3 origin, float fill)
    : dims_(dims), spacing_(spacing), origin_(origin) {
  for (std::size_t a = 0; a < 3; ++a) {
    if (dims_[a] < 1) throw Error(ErrorKind::BadConfig, "volume dims must be >= 1");
  }
  data_.assign(dims_[0] * dims_[1] * dims_[2], fill);
  check();
}

Volume3::Volume3(Dims dims, Vec3 spacing, Vec3 origin, std::vector<float> data)
    : dims_(dims), spacing_(spacing), origin_(origin), data_(std::move(data)) {
  check();
}

void Volume3::check() const {
  for (std::size_t a = 0; a < 3; ++a) {
    if (dims_[a] < 1) throw Error(ErrorKind::BadConfig, "volume dims must be >= 1");
    if (!(spacing_[a] > 0.0) || !std::isfinite(spacing_[a]))
      throw Error(ErrorKind::BadConfig, "volume spacing must be positive and finite");
    if (!std::isfinite(origin_[a])) throw Error(ErrorKind::BadConfig, "volume origin must be finite");
  }
  if (data_.size() != dims_[0] * dims_[1] * dims_[2]) {
    throw Error(ErrorKind::DimMismatch, "data length " + std::to_string(data_.size()) +
                                            " does not match dims product");
  }
  for (float v : data_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::DegenerateInput, "volume contains non-finite values");
  }
}

Vec3 Volume3::physical_point(double i, double j, double k) const noexcept {
  return {origin_[0] + spacing_[0] * i, origin_[1] + spacing_[1] * j, origin_[2] + spacing_[2] * k};
}

Vec3 Volume3::continuous_index(const Vec3& p) const noexcept {
  return {(p[0] - origin_[0]) / spacing_[0], (p[1] - origin_[1]) / spacing_[1],
          (p[2] - origin_[2]) / spacing_[2]};
}

Vec3 Volume3::center() const noexcept {
  return physical_point(0.5 * static_cast<double>(dims_[0] - 1), 0.5 * static_cast<double>(dims_[1] - 1),
                        0.5 * static_cast<double>(dims_[2] - 1));
}

BinaryMask::BinaryMask(Volume3 volume) : volume_(std::move(volume)) {
  for (float v : volume_.values()) {
    if (v != 0.0f && v != 1.0f) throw Error(ErrorKind::DegenerateInput, "mask voxel is not 0 or 1");
  }
}

std::size_t BinaryMask::count() const noexcept {
  std::size_t n = 0;
  for (float v : volume_.values()) n += v != 0.0f;
  return n;
}

void Sequence4::validate() const {
  if (frames.empty()) throw Error(ErrorKind::BadConfig, "sequence has no frames");
  if (ed_index >= frames.size())
    throw Error(ErrorKind::BadConfig, "ed_index " + std::to_string(ed_index) + " out of range");
  for (std::size_t f = 1; f < frames.size(); ++f) {
    if (!frames[f].same_geometry(frames[0]))
      throw Error(ErrorKind::GeometryMismatch, "frame " + std::to_string(f) + " geometry differs from frame 0");
  }
}

Volume3 normalize_zscore(const Volume3& v) {
  const auto values = v.values();
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (float x : values) mean += x;
  mean /= n;
  double ss = 0.0;
  for (float x : values) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / n);
  if (sd < 1e-12) throw Error(ErrorKind::ConstantVolume, "standard deviation below 1e-12");

  Volume3 out = v.blank_like();
  auto dst = out.mutable_values();
  for (std::size_t i = 0; i < values.size(); ++i) dst[i] = static_cast<float>((values[i] - mean) / sd);
  return out;
}

BinaryMask binarize(const Volume3& v, double threshold) {
  Volume3 out = v.blank_like();
  auto dst = out.mutable_values();
  const auto src = v.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > threshold ? 1.0f : 0.0f;
  return BinaryMask(std::move(out));
}

}  // namespace smcreg
