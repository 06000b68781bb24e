#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smcreg {

enum class ErrorKind {
  ConstantVolume,
  UnsupportedFormat,
  CorruptHeader,
  TruncatedData,
  IoFailure,
  DimMismatch,
  DegenerateInput,
  BadConfig,
  GeometryMismatch,
  MissingMasks,
  EmptyInput,
  ChecksumMismatch,
  InvariantFailure,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` tells callers what failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace smcreg
