#include "smcreg/volume_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include <json.hpp>

#include "smcreg/error.hpp"

namespace smcreg {

static_assert(std::endian::native == std::endian::little, "volume I/O assumes a little-endian host");

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

#pragma pack(push, 1)
struct NiftiHeader {
  std::int32_t sizeof_hdr;
  char data_type[10];
  char db_name[18];
  std::int32_t extents;
  std::int16_t session_error;
  char regular;
  char dim_info;
  std::int16_t dim[8];
  float intent_p1, intent_p2, intent_p3;
  std::int16_t intent_code;
  std::int16_t datatype;
  std::int16_t bitpix;
  std::int16_t slice_start;
  float pixdim[8];
  float vox_offset;
  float scl_slope;
  float scl_inter;
  std::int16_t slice_end;
  char slice_code;
  char xyzt_units;
  float cal_max, cal_min;
  float slice_duration;
  float toffset;
  std::int32_t glmax, glmin;
  char descrip[80];
  char aux_file[24];
  std::int16_t qform_code;
  std::int16_t sform_code;
  float quatern_b, quatern_c, quatern_d;
  float qoffset_x, qoffset_y, qoffset_z;
  float srow_x[4], srow_y[4], srow_z[4];
  char intent_name[16];
  char magic[4];
};
#pragma pack(pop)
static_assert(sizeof(NiftiHeader) == nifti::kHeaderSize);
static_assert(offsetof(NiftiHeader, dim) == 40);
static_assert(offsetof(NiftiHeader, datatype) == 70);
static_assert(offsetof(NiftiHeader, pixdim) == 76);
static_assert(offsetof(NiftiHeader, vox_offset) == 108);
static_assert(offsetof(NiftiHeader, qform_code) == 252);
static_assert(offsetof(NiftiHeader, qoffset_x) == 268);
static_assert(offsetof(NiftiHeader, magic) == 344);

enum class Format { Nifti, RawJson };

Format format_for(const fs::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".nii") return Format::Nifti;
  if (ext == ".raw" || ext == ".json") return Format::RawJson;
  throw Error(ErrorKind::UnsupportedFormat, path.string() + ": unknown extension '" + ext + "'");
}

std::vector<char> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spill(const fs::path& path, const char* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(data, static_cast<std::streamsize>(size));
  if (!out) throw Error(ErrorKind::IoFailure, "write failed: " + path.string());
}

Sequence4 as_sequence(VolumeOrSequence v) {
  if (auto* s = std::get_if<Sequence4>(&v)) return std::move(*s);
  Sequence4 s;
  s.frames.push_back(std::move(std::get<Volume3>(v)));
  return s;
}

std::vector<float> decode_voxels(const char* p, std::size_t count, std::int16_t datatype, float slope, float inter) {
  std::vector<float> out(count);
  if (datatype == nifti::kFloat32) {
    std::memcpy(out.data(), p, count * sizeof(float));
  } else {
    for (std::size_t i = 0; i < count; ++i) out[i] = static_cast<float>(static_cast<std::uint8_t>(p[i]));
  }
  if (slope != 0.0f && std::isfinite(slope) && !(slope == 1.0f && inter == 0.0f)) {
    for (float& v : out) v = v * slope + inter;
  }
  return out;
}

VolumeOrSequence read_nifti(const fs::path& path) {
  const std::vector<char> bytes = slurp(path);
  const std::string where = path.string() + ": ";
  if (bytes.size() < nifti::kHeaderSize)
    throw Error(ErrorKind::TruncatedData, where + "file is " + std::to_string(bytes.size()) +
                                              " bytes, header needs 348 (offset 0)");
  NiftiHeader h;
  std::memcpy(&h, bytes.data(), sizeof h);
  if (h.sizeof_hdr != 348) {
    const bool swapped = h.sizeof_hdr == 0x5C010000;
    throw Error(ErrorKind::UnsupportedFormat,
                where + (swapped ? "big-endian NIfTI is not supported (sizeof_hdr at offset 0)"
                                 : "sizeof_hdr at offset 0 is " + std::to_string(h.sizeof_hdr)));
  }
  if (std::memcmp(h.magic, "n+1\0", 4) != 0)
    throw Error(ErrorKind::UnsupportedFormat, where + "magic at offset 344 is not \"n+1\\0\"");
  if (h.datatype != nifti::kFloat32 && h.datatype != nifti::kUInt8)
    throw Error(ErrorKind::UnsupportedFormat,
                where + "datatype (offset 70) " + std::to_string(h.datatype) + " not in {2, 16}");
  const int ndim = h.dim[0];
  if (ndim < 1 || ndim > 4)
    throw Error(ErrorKind::CorruptHeader, where + "dim[0] (offset 40) = " + std::to_string(ndim));
  Dims dims{1, 1, 1};
  std::size_t frames = 1;
  for (int a = 1; a <= ndim; ++a) {
    if (h.dim[a] < 1)
      throw Error(ErrorKind::CorruptHeader, where + "dim[" + std::to_string(a) + "] = " + std::to_string(h.dim[a]));
    if (a <= 3) dims[a - 1] = static_cast<std::size_t>(h.dim[a]);
    else frames = static_cast<std::size_t>(h.dim[a]);
  }
  Vec3 spacing{1.0, 1.0, 1.0};
  for (int a = 0; a < 3; ++a) {
    if (a < ndim) {
      const float s = h.pixdim[a + 1];
      if (!(s > 0.0f) || !std::isfinite(s))
        throw Error(ErrorKind::CorruptHeader, where + "pixdim[" + std::to_string(a + 1) + "] must be positive");
      spacing[a] = s;
    }
  }
  const Vec3 origin{h.qoffset_x, h.qoffset_y, h.qoffset_z};
  const std::size_t bytes_per = h.datatype == nifti::kFloat32 ? 4 : 1;
  if (h.bitpix != static_cast<std::int16_t>(8 * bytes_per))
    throw Error(ErrorKind::CorruptHeader, where + "bitpix (offset 72) inconsistent with datatype");
  if (!(h.vox_offset >= 348.0f) || h.vox_offset != std::floor(h.vox_offset))
    throw Error(ErrorKind::CorruptHeader, where + "vox_offset (offset 108) invalid");
  const std::size_t offset = static_cast<std::size_t>(h.vox_offset);
  const std::size_t per_frame = dims[0] * dims[1] * dims[2];
  const std::size_t need = offset + per_frame * frames * bytes_per;
  if (bytes.size() < need)
    throw Error(ErrorKind::TruncatedData, where + "voxel data ends at byte " + std::to_string(bytes.size()) +
                                              ", expected " + std::to_string(need));

  Sequence4 seq;
  if (frames > 1 && h.pixdim[4] > 0.0f && std::isfinite(h.pixdim[4])) seq.frame_rate = 1.0 / h.pixdim[4];
  for (std::size_t f = 0; f < frames; ++f) {
    const char* p = bytes.data() + offset + f * per_frame * bytes_per;
    seq.frames.emplace_back(dims, spacing, origin, decode_voxels(p, per_frame, h.datatype, h.scl_slope, h.scl_inter));
  }
  if (ndim == 4) return seq;
  return std::move(seq.frames.front());
}

void write_nifti(const std::vector<const Volume3*>& frames, double frame_rate, bool four_d, const fs::path& path,
                 DiskType type) {
  const Volume3& v = *frames.front();
  NiftiHeader h{};
  h.sizeof_hdr = 348;
  h.regular = 'r';
  h.dim[0] = four_d ? 4 : 3;
  for (int a = 0; a < 3; ++a) {
    if (v.dims()[a] > 32767) throw Error(ErrorKind::IoFailure, "dimension too large for NIfTI-1");
    h.dim[a + 1] = static_cast<std::int16_t>(v.dims()[a]);
  }
  h.dim[4] = static_cast<std::int16_t>(frames.size());
  for (int a = 5; a < 8; ++a) h.dim[a] = 1;
  h.datatype = type == DiskType::Float32 ? nifti::kFloat32 : nifti::kUInt8;
  h.bitpix = type == DiskType::Float32 ? 32 : 8;
  h.pixdim[0] = 1.0f;
  for (int a = 0; a < 3; ++a) h.pixdim[a + 1] = static_cast<float>(v.spacing()[a]);
  h.pixdim[4] = four_d && frame_rate > 0.0 ? static_cast<float>(1.0 / frame_rate) : 0.0f;
  h.vox_offset = static_cast<float>(nifti::kVoxOffset);
  h.scl_slope = 1.0f;
  h.xyzt_units = 2 | 8;  // mm, seconds
  h.qform_code = 0;
  h.sform_code = 0;
  h.qoffset_x = static_cast<float>(v.origin()[0]);
  h.qoffset_y = static_cast<float>(v.origin()[1]);
  h.qoffset_z = static_cast<float>(v.origin()[2]);
  std::memcpy(h.magic, "n+1\0", 4);

  const std::size_t per_frame = v.size();
  const std::size_t bytes_per = type == DiskType::Float32 ? 4 : 1;
  std::vector<char> buf(nifti::kVoxOffset + per_frame * frames.size() * bytes_per, 0);
  std::memcpy(buf.data(), &h, sizeof h);
  char* p = buf.data() + nifti::kVoxOffset;
  for (const Volume3* f : frames) {
    if (!f->same_geometry(v)) throw Error(ErrorKind::GeometryMismatch, "frames differ in geometry");
    if (type == DiskType::Float32) {
      std::memcpy(p, f->values().data(), per_frame * 4);
    } else {
      for (std::size_t i = 0; i < per_frame; ++i) {
        const float x = f->values()[i];
        if (x < 0.0f || x > 255.0f || x != std::floor(x))
          throw Error(ErrorKind::IoFailure, "value not representable as uint8");
        p[i] = static_cast<char>(static_cast<std::uint8_t>(x));
      }
    }
    p += per_frame * bytes_per;
  }
  spill(path, buf.data(), buf.size());
}

fs::path with_ext(fs::path p, const char* ext) { return p.replace_extension(ext); }

template <std::size_t N, class T>
std::array<T, N> get_array(const json& j, const char* key, const fs::path& path) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != N)
    throw Error(ErrorKind::CorruptHeader, path.string() + ": field '" + key + "' must be an array of " +
                                              std::to_string(N));
  std::array<T, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = j[key][i].get<T>();
  return out;
}

VolumeOrSequence read_raw(const fs::path& path) {
  const fs::path sidecar = with_ext(path, ".json");
  const fs::path raw = with_ext(path, ".raw");
  json j;
  {
    std::ifstream in(sidecar);
    if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + sidecar.string());
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw Error(ErrorKind::CorruptHeader, sidecar.string() + ": " + e.what());
    }
  }
  Sequence4 seq;
  Dims dims{};
  Vec3 spacing{}, origin{0.0, 0.0, 0.0};
  std::size_t frames = 1;
  bool four_d = false;
  try {
    const auto d = get_array<3, long long>(j, "dims", sidecar);
    for (std::size_t a = 0; a < 3; ++a) {
      if (d[a] < 1) throw Error(ErrorKind::CorruptHeader, sidecar.string() + ": dims must be >= 1");
      dims[a] = static_cast<std::size_t>(d[a]);
    }
    spacing = get_array<3, double>(j, "spacing", sidecar);
    if (j.contains("origin")) origin = get_array<3, double>(j, "origin", sidecar);
    if (j.contains("frames")) {
      const long long f = j["frames"].get<long long>();
      if (f < 1) throw Error(ErrorKind::CorruptHeader, sidecar.string() + ": frames must be >= 1");
      frames = static_cast<std::size_t>(f);
      four_d = true;
    }
    if (j.contains("frame_rate")) seq.frame_rate = j["frame_rate"].get<double>();
    if (j.contains("ed_index")) seq.ed_index = j["ed_index"].get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::CorruptHeader, sidecar.string() + ": " + e.what());
  }
  for (double s : spacing)
    if (!(s > 0.0)) throw Error(ErrorKind::CorruptHeader, sidecar.string() + ": spacing must be positive");

  const std::vector<char> bytes = slurp(raw);
  const std::size_t per_frame = dims[0] * dims[1] * dims[2];
  const std::size_t need = per_frame * frames * sizeof(float);
  if (bytes.size() < need)
    throw Error(ErrorKind::TruncatedData, raw.string() + ": data ends at byte " + std::to_string(bytes.size()) +
                                              ", expected " + std::to_string(need));
  for (std::size_t f = 0; f < frames; ++f) {
    std::vector<float> data(per_frame);
    std::memcpy(data.data(), bytes.data() + f * per_frame * sizeof(float), per_frame * sizeof(float));
    seq.frames.emplace_back(dims, spacing, origin, std::move(data));
  }
  if (four_d) {
    seq.validate();
    return seq;
  }
  return std::move(seq.frames.front());
}

void write_raw(const std::vector<const Volume3*>& frames, const Sequence4* meta, const fs::path& path) {
  const Volume3& v = *frames.front();
  json j;
  j["dims"] = {v.dims()[0], v.dims()[1], v.dims()[2]};
  j["spacing"] = {v.spacing()[0], v.spacing()[1], v.spacing()[2]};
  j["origin"] = {v.origin()[0], v.origin()[1], v.origin()[2]};
  if (meta) {
    j["frames"] = frames.size();
    j["frame_rate"] = meta->frame_rate;
    j["ed_index"] = meta->ed_index;
  }
  const std::string text = j.dump(2) + "\n";
  spill(with_ext(path, ".json"), text.data(), text.size());

  std::vector<char> buf(v.size() * sizeof(float) * frames.size());
  char* p = buf.data();
  for (const Volume3* f : frames) {
    if (!f->same_geometry(v)) throw Error(ErrorKind::GeometryMismatch, "frames differ in geometry");
    std::memcpy(p, f->values().data(), v.size() * sizeof(float));
    p += v.size() * sizeof(float);
  }
  spill(with_ext(path, ".raw"), buf.data(), buf.size());
}

}  // namespace

VolumeOrSequence read_volume(const fs::path& path) {
  return format_for(path) == Format::Nifti ? read_nifti(path) : read_raw(path);
}

Sequence4 read_sequence(const fs::path& path) {
  Sequence4 s = as_sequence(read_volume(path));
  s.validate();
  return s;
}

void write_volume(const Volume3& v, const fs::path& path, DiskType type) {
  if (format_for(path) == Format::Nifti) write_nifti({&v}, 0.0, false, path, type);
  else write_raw({&v}, nullptr, path);
}

void write_volume(const Sequence4& s, const fs::path& path, DiskType type) {
  s.validate();
  std::vector<const Volume3*> frames;
  for (const auto& f : s.frames) frames.push_back(&f);
  if (format_for(path) == Format::Nifti) write_nifti(frames, s.frame_rate, true, path, type);
  else write_raw(frames, &s, path);
}

void write_masks(const std::vector<BinaryMask>& masks, const fs::path& path) {
  if (masks.empty()) throw Error(ErrorKind::EmptyInput, "no masks to write");
  Sequence4 s;
  for (const auto& m : masks) s.frames.push_back(m.volume());
  if (masks.size() == 1) write_volume(s.frames.front(), path, DiskType::UInt8);
  else write_volume(s, path, DiskType::UInt8);
}

std::vector<BinaryMask> read_masks(const fs::path& path) {
  Sequence4 s = read_sequence(path);
  std::vector<BinaryMask> out;
  for (auto& f : s.frames) out.emplace_back(std::move(f));
  return out;
}

}  // namespace smcreg
