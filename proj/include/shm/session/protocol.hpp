#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "shm/deformation.hpp"

namespace shm::session {

using UserId = std::uint32_t;
using Json = nlohmann::json;

inline constexpr double kDefaultDuration = 112.0;

/// Authoritative shared room state. `seq` increments on every accepted update.
struct SessionState {
  std::uint64_t seq = 0;
  double playback_time = 0.0;
  bool playing = false;
  PlaybackConfig config;
  std::string active_model = "tls_pointcloud";
  std::vector<int> tracked_nodes;
  double duration = kDefaultDuration;

  bool operator==(const SessionState&) const = default;
};

struct Ray {
  std::array<double, 3> origin{};
  std::array<double, 3> direction{};
};

struct UserPresence {
  UserId user_id = 0;
  std::string name;
  std::array<std::uint8_t, 3> color{};
  std::optional<Ray> pointer;
};

/// Wire-level error codes carried by `error` messages.
enum class ProtocolErrc { RoomFull, NotAMember, InvalidField, OutOfOrderBatch, Malformed };

std::string_view to_string(ProtocolErrc code) noexcept;

class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(ProtocolErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ProtocolErrc code() const noexcept { return code_; }

 private:
  ProtocolErrc code_;
};

Json to_json(const SessionState& s);
Json to_json(const UserPresence& u);
Json to_json(const Ray& r);

// Parses a full state object (as sent in `state` / `welcome`).
SessionState state_from_json(const Json& j);

/// Merges a partial update into a copy of `current`. All fields are checked
/// before anything is applied; seq is left untouched. Throws InvalidField.
SessionState merge_update(const SessionState& current, const Json& update);

Ray ray_from_json(const Json& origin, const Json& direction);

Json error_message(ProtocolErrc code, std::string_view detail);

}  // namespace shm::session
