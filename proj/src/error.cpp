#include "shm/error.hpp"

namespace shm {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::UnsupportedEncoding: return "UnsupportedEncoding";
    case Errc::MissingCoordinateProperty: return "MissingCoordinateProperty";
    case Errc::TruncatedBody: return "TruncatedBody";
    case Errc::NonPositiveVoxelSize: return "NonPositiveVoxelSize";
    case Errc::NonOrthonormalRotation: return "NonOrthonormalRotation";
    case Errc::EmptyCloud: return "EmptyCloud";
    case Errc::InvalidCloud: return "InvalidCloud";
    case Errc::RecordTooShort: return "RecordTooShort";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::InsufficientExcitation: return "InsufficientExcitation";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::ShapeLengthMismatch: return "ShapeLengthMismatch";
    case Errc::NonPositiveDefiniteMass: return "NonPositiveDefiniteMass";
    case Errc::MalformedRecord: return "MalformedRecord";
    case Errc::MalformedModalSet: return "MalformedModalSet";
    case Errc::EmptyModel: return "EmptyModel";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::NonPositiveLimit: return "NonPositiveLimit";
    case Errc::NodeSetMismatch: return "NodeSetMismatch";
    case Errc::MalformedModel: return "MalformedModel";
    case Errc::MalformedHistory: return "MalformedHistory";
    case Errc::InvalidConfigValue: return "InvalidConfigValue";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace shm
