#include "shm/session/hub.hpp"

namespace shm::session {
namespace {

[[noreturn]] void malformed(const std::string& what) { throw ProtocolError(ProtocolErrc::Malformed, what); }

const Json& field(const Json& msg, const char* name) {
  const auto it = msg.find(name);
  if (it == msg.end()) malformed(std::string("missing field '") + name + "'");
  return *it;
}

Points3d points_from_json(const Json& j) {
  if (!j.is_array()) throw ProtocolError(ProtocolErrc::InvalidField, "points must be an array");
  Points3d pts(3, static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& p = j[i];
    if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number())
      throw ProtocolError(ProtocolErrc::InvalidField, "each point must be [x, y, z]");
    for (int k = 0; k < 3; ++k) pts(k, static_cast<Eigen::Index>(i)) = p[static_cast<std::size_t>(k)].get<double>();
  }
  return pts;
}

}  // namespace

Hub::Hub(RoomLimits limits) : limits_(limits) {}

void Hub::deliver(const Slot& slot, const Outbox& out) {
  for (const auto& d : out) {
    const auto it = slot.sinks.find(d.to);
    if (it == slot.sinks.end()) continue;
    if (auto conn = it->second.lock()) conn->send(d.message);
  }
}

void Hub::on_message(const std::shared_ptr<Connection>& conn, std::string_view text) {
  try {
    const Json msg = Json::parse(text, nullptr, false);
    if (msg.is_discarded() || !msg.is_object()) malformed("message is not a JSON object");
    const auto type = msg.find("type");
    if (type == msg.end() || !type->is_string()) malformed("message needs a string 'type'");
    dispatch(conn, type->get<std::string>(), msg);
  } catch (const ProtocolError& e) {
    conn->send(make_message(error_message(e.code(), e.what())));
  } catch (const nlohmann::json::exception& e) {
    conn->send(make_message(error_message(ProtocolErrc::Malformed, e.what())));
  }
}

void Hub::dispatch(const std::shared_ptr<Connection>& conn, const std::string& type, const Json& msg) {
  if (type == "join") return join(conn, msg);
  if (type == "heartbeat") return conn->send(make_message({{"type", "heartbeat"}}));
  if (type != "state_update" && type != "pointer" && type != "scan_batch" && type != "leave")
    malformed("unknown message type '" + type + "'");

  Membership m;
  {
    std::lock_guard lock(mutex_);
    const auto it = members_.find(conn.get());
    if (it == members_.end()) throw ProtocolError(ProtocolErrc::NotAMember, "join a room first");
    m = it->second;
  }
  std::lock_guard room_lock(m.slot->mutex);
  Room& room = m.slot->room;
  if (type == "state_update") {
    deliver(*m.slot, room.apply_state_update(m.user, field(msg, "update")));
  } else if (type == "pointer") {
    const Ray ray = ray_from_json(field(msg, "origin"), field(msg, "direction"));
    deliver(*m.slot, room.publish_pointer(m.user, ray, msg.value("stamp", Json())));
  } else if (type == "scan_batch") {
    const Json& seq = field(msg, "batch_seq");
    if (!seq.is_number_unsigned()) throw ProtocolError(ProtocolErrc::InvalidField, "batch_seq must be a positive integer");
    deliver(*m.slot, room.publish_scan_batch(m.user, seq.get<std::uint64_t>(), points_from_json(field(msg, "points"))));
  } else {
    leave_locked(m.slot, m.user, conn.get());
  }
}

void Hub::join(const std::shared_ptr<Connection>& conn, const Json& msg) {
  const Json& room_field = field(msg, "room");
  const Json& name_field = field(msg, "name");
  if (!room_field.is_string() || room_field.get<std::string>().empty())
    throw ProtocolError(ProtocolErrc::InvalidField, "room must be a non-empty string");
  if (!name_field.is_string()) throw ProtocolError(ProtocolErrc::InvalidField, "name must be a string");
  const std::string room_id = room_field.get<std::string>();
  {
    std::lock_guard lock(mutex_);
    if (members_.count(conn.get())) throw ProtocolError(ProtocolErrc::InvalidField, "connection already joined a room");
  }

  for (;;) {
    std::shared_ptr<Slot> slot;
    {
      std::lock_guard lock(mutex_);
      auto& s = rooms_[room_id];
      if (!s) s = std::make_shared<Slot>(room_id, limits_);
      slot = s;
    }
    std::lock_guard room_lock(slot->mutex);
    if (slot->closed) continue;  // lost a race with the last member leaving
    try {
      Room::Joined joined = slot->room.join(name_field.get<std::string>());
      slot->sinks[joined.user_id] = conn;
      {
        std::lock_guard lock(mutex_);
        members_[conn.get()] = {slot, joined.user_id};
      }
      deliver(*slot, joined.out);
    } catch (...) {
      if (slot->room.empty()) {
        slot->closed = true;
        std::lock_guard lock(mutex_);
        const auto it = rooms_.find(room_id);
        if (it != rooms_.end() && it->second == slot) rooms_.erase(it);
      }
      throw;
    }
    return;
  }
}

void Hub::leave_locked(const std::shared_ptr<Slot>& slot, UserId user, const Connection* conn) {
  slot->sinks.erase(user);
  deliver(*slot, slot->room.leave(user));
  std::lock_guard lock(mutex_);
  members_.erase(conn);
  if (slot->room.empty()) {
    slot->closed = true;
    const auto it = rooms_.find(slot->room.id());
    if (it != rooms_.end() && it->second == slot) rooms_.erase(it);
  }
}

void Hub::on_disconnect(const Connection* conn) {
  Membership m;
  {
    std::lock_guard lock(mutex_);
    const auto it = members_.find(conn);
    if (it == members_.end()) return;
    m = it->second;
  }
  std::lock_guard room_lock(m.slot->mutex);
  leave_locked(m.slot, m.user, conn);
}

std::size_t Hub::room_count() const {
  std::lock_guard lock(mutex_);
  return rooms_.size();
}

std::optional<std::size_t> Hub::room_size(const std::string& room_id) const {
  std::shared_ptr<Slot> slot;
  {
    std::lock_guard lock(mutex_);
    const auto it = rooms_.find(room_id);
    if (it == rooms_.end()) return std::nullopt;
    slot = it->second;
  }
  std::lock_guard room_lock(slot->mutex);
  return slot->room.users().size();
}

std::optional<SessionState> Hub::room_state(const std::string& room_id) const {
  std::shared_ptr<Slot> slot;
  {
    std::lock_guard lock(mutex_);
    const auto it = rooms_.find(room_id);
    if (it == rooms_.end()) return std::nullopt;
    slot = it->second;
  }
  std::lock_guard room_lock(slot->mutex);
  return slot->room.state();
}

}  // namespace shm::session
