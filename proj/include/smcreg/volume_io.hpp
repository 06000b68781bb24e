#pragma once

#include <filesystem>
#include <variant>

#include "smcreg/volume.hpp"

namespace smcreg {

/// On-disk voxel type. Masks are written as uint8.
enum class DiskType { Float32, UInt8 };

using VolumeOrSequence = std::variant<Volume3, Sequence4>;

/// Reads `.nii` (NIfTI-1, single file, little-endian, uint8/float32) or a
/// raw float32 file with a JSON sidecar (`.raw` or `.json`; both files share
/// a stem). 4D inputs decode to Sequence4 with ed_index 0 unless the sidecar
/// says otherwise.
/// Throws UnsupportedFormat, CorruptHeader, TruncatedData or IoFailure.
VolumeOrSequence read_volume(const std::filesystem::path& path);

/// Like read_volume but always returns a sequence (3D files become one frame).
Sequence4 read_sequence(const std::filesystem::path& path);

/// Writes the format implied by the extension. Throws IoFailure.
void write_volume(const Volume3& v, const std::filesystem::path& path, DiskType type = DiskType::Float32);
void write_volume(const Sequence4& s, const std::filesystem::path& path, DiskType type = DiskType::Float32);
void write_masks(const std::vector<BinaryMask>& masks, const std::filesystem::path& path);

/// Reads a mask file; every voxel must be 0 or 1 (DegenerateInput otherwise).
std::vector<BinaryMask> read_masks(const std::filesystem::path& path);

namespace nifti {
inline constexpr std::size_t kHeaderSize = 348;
inline constexpr std::size_t kVoxOffset = 352;
inline constexpr short kUInt8 = 2;
inline constexpr short kFloat32 = 16;
}  // namespace nifti

}  // namespace smcreg
