#include "smcreg/error.hpp"

namespace smcreg {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ConstantVolume: return "ConstantVolume";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::CorruptHeader: return "CorruptHeader";
    case ErrorKind::TruncatedData: return "TruncatedData";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::BadConfig: return "BadConfig";
    case ErrorKind::GeometryMismatch: return "GeometryMismatch";
    case ErrorKind::MissingMasks: return "MissingMasks";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorKind::InvariantFailure: return "InvariantFailure";
  }
  return "Unknown";
}

}  // namespace smcreg
