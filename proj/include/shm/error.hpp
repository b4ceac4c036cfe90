#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shm {

// Every failure the library reports carries one of these codes.
enum class Errc {
  // pointcloud
  MalformedHeader,
  UnsupportedEncoding,
  MissingCoordinateProperty,
  TruncatedBody,
  NonPositiveVoxelSize,
  NonOrthonormalRotation,
  EmptyCloud,
  InvalidCloud,
  // oma
  RecordTooShort,
  RankDeficient,
  InsufficientExcitation,
  InvalidConfig,
  ZeroVector,
  LengthMismatch,
  ShapeLengthMismatch,
  NonPositiveDefiniteMass,
  MalformedRecord,
  MalformedModalSet,
  // deformation
  EmptyModel,
  OutOfRange,
  UnknownNode,
  NonPositiveLimit,
  NodeSetMismatch,
  MalformedModel,
  MalformedHistory,
  InvalidConfigValue,
  // io
  Io,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  explicit Error(Errc code) : Error(code, std::string(to_string(code))) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace shm
