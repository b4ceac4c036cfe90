#include "shm/session/protocol.hpp"

#include <cmath>

namespace shm::session {
namespace {

[[noreturn]] void invalid(const std::string& what) { throw ProtocolError(ProtocolErrc::InvalidField, what); }

double finite_number(const Json& v, const char* field) {
  if (!v.is_number()) invalid(std::string(field) + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) invalid(std::string(field) + " must be finite");
  return x;
}

std::array<double, 3> vec3(const Json& v, const char* field) {
  if (!v.is_array() || v.size() != 3) invalid(std::string(field) + " must be a 3-element array");
  return {finite_number(v[0], field), finite_number(v[1], field), finite_number(v[2], field)};
}

}  // namespace

std::string_view to_string(ProtocolErrc code) noexcept {
  switch (code) {
    case ProtocolErrc::RoomFull: return "room_full";
    case ProtocolErrc::NotAMember: return "not_a_member";
    case ProtocolErrc::InvalidField: return "invalid_field";
    case ProtocolErrc::OutOfOrderBatch: return "out_of_order_batch";
    case ProtocolErrc::Malformed: return "malformed";
  }
  return "malformed";
}

Json to_json(const SessionState& s) {
  return Json{{"seq", s.seq},
              {"playback_time", s.playback_time},
              {"playing", s.playing},
              {"scale", s.config.scale},
              {"speed", s.config.speed},
              {"axis_mask", {s.config.axis_mask[0], s.config.axis_mask[1], s.config.axis_mask[2]}},
              {"active_model", s.active_model},
              {"tracked_nodes", s.tracked_nodes},
              {"duration", s.duration}};
}

Json to_json(const Ray& r) { return Json{{"origin", r.origin}, {"direction", r.direction}}; }

Json to_json(const UserPresence& u) {
  Json j{{"user_id", u.user_id}, {"name", u.name}, {"color", u.color}};
  j["pointer"] = u.pointer ? to_json(*u.pointer) : Json();
  return j;
}

SessionState state_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("seq") || !j["seq"].is_number_unsigned())
    invalid("state needs an unsigned seq");
  Json partial = j;
  partial.erase("seq");
  SessionState s = merge_update(SessionState{}, partial);
  s.seq = j["seq"].get<std::uint64_t>();
  return s;
}

SessionState merge_update(const SessionState& current, const Json& update) {
  if (!update.is_object()) invalid("update must be an object");
  SessionState next = current;
  for (const auto& [key, value] : update.items()) {
    if (key == "playback_time") {
      next.playback_time = finite_number(value, "playback_time");
    } else if (key == "playing") {
      if (!value.is_boolean()) invalid("playing must be a boolean");
      next.playing = value.get<bool>();
    } else if (key == "scale") {
      next.config.scale = finite_number(value, "scale");
      if (next.config.scale < 0.0) invalid("scale must be non-negative");
    } else if (key == "speed") {
      next.config.speed = finite_number(value, "speed");
      if (!(next.config.speed > 0.0)) invalid("speed must be positive");
    } else if (key == "axis_mask") {
      if (!value.is_array() || value.size() != 3) invalid("axis_mask must be a 3-element array");
      for (std::size_t i = 0; i < 3; ++i) {
        if (value[i].is_boolean()) next.config.axis_mask[i] = value[i].get<bool>();
        else if (value[i].is_number_integer() && (value[i] == 0 || value[i] == 1)) next.config.axis_mask[i] = value[i] == 1;
        else invalid("axis_mask entries must be 0/1 or booleans");
      }
    } else if (key == "active_model") {
      if (!value.is_string() || value.get<std::string>().empty()) invalid("active_model must be a non-empty string");
      next.active_model = value.get<std::string>();
    } else if (key == "tracked_nodes") {
      if (!value.is_array()) invalid("tracked_nodes must be an array");
      next.tracked_nodes.clear();
      for (const auto& v : value) {
        if (!v.is_number_integer()) invalid("tracked_nodes entries must be integers");
        next.tracked_nodes.push_back(v.get<int>());
      }
    } else if (key == "duration") {
      next.duration = finite_number(value, "duration");
      if (next.duration < 0.0) invalid("duration must be non-negative");
    } else {
      invalid("unknown state field '" + key + "'");
    }
  }
  if (next.playback_time < 0.0 || next.playback_time > next.duration)
    invalid("playback_time must lie in [0, duration]");
  return next;
}

Ray ray_from_json(const Json& origin, const Json& direction) { return {vec3(origin, "origin"), vec3(direction, "direction")}; }

Json error_message(ProtocolErrc code, std::string_view detail) {
  return Json{{"type", "error"}, {"code", to_string(code)}, {"message", detail}};
}

}  // namespace shm::session
