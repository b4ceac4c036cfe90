#include "shm/session/room.hpp"

namespace shm::session {

std::array<std::uint8_t, 3> presence_color(UserId id) {
  static constexpr std::array<std::array<std::uint8_t, 3>, 10> palette{{{230, 25, 75},
                                                                        {60, 180, 75},
                                                                        {255, 225, 25},
                                                                        {0, 130, 200},
                                                                        {245, 130, 48},
                                                                        {145, 30, 180},
                                                                        {70, 240, 240},
                                                                        {240, 50, 230},
                                                                        {210, 245, 60},
                                                                        {250, 190, 212}}};
  return palette[(id - 1) % palette.size()];
}

Message make_message(const Json& j) { return std::make_shared<const std::string>(j.dump()); }

Room::Room(std::string id, RoomLimits limits) : id_(std::move(id)), limits_(limits) {}

void Room::require_member(UserId u) const {
  if (!is_member(u)) throw ProtocolError(ProtocolErrc::NotAMember, "user " + std::to_string(u) + " is not in room " + id_);
}

Json Room::roster_json() const {
  Json users = Json::array();
  for (const auto& [id, u] : users_) users.push_back(to_json(u));
  return users;
}

void Room::to_all(Outbox& out, const Message& m) const {
  for (const auto& [id, u] : users_) out.push_back({id, m});
}

void Room::to_others(Outbox& out, UserId except, const Message& m) const {
  for (const auto& [id, u] : users_)
    if (id != except) out.push_back({id, m});
}

Room::Joined Room::join(std::string_view name) {
  if (name.empty()) throw ProtocolError(ProtocolErrc::InvalidField, "name must not be empty");
  if (users_.size() >= limits_.max_users)
    throw ProtocolError(ProtocolErrc::RoomFull, "room " + id_ + " is full (" + std::to_string(limits_.max_users) + ")");

  Joined result;
  const UserId id = next_id_++;
  users_.emplace(id, UserPresence{id, std::string(name), presence_color(id), std::nullopt});
  result.user_id = id;

  const Json roster = roster_json();
  result.out.push_back(
      {id, make_message({{"type", "welcome"}, {"room", id_}, {"user_id", id}, {"state", to_json(state_)}, {"roster", roster}})});
  for (const auto& m : scan_messages_) result.out.push_back({id, m});
  to_others(result.out, id, make_message({{"type", "roster"}, {"room", id_}, {"users", roster}}));
  return result;
}

Outbox Room::leave(UserId user) {
  Outbox out;
  if (users_.erase(user) == 0) return out;
  last_batch_.erase(user);
  to_all(out, make_message({{"type", "roster"}, {"room", id_}, {"users", roster_json()}}));
  return out;
}

Outbox Room::apply_state_update(UserId from, const Json& update) {
  require_member(from);
  SessionState next = merge_update(state_, update);
  next.seq = state_.seq + 1;
  state_ = std::move(next);
  Outbox out;
  to_all(out, make_message({{"type", "state"}, {"from", from}, {"state", to_json(state_)}}));
  return out;
}

Outbox Room::publish_pointer(UserId from, const Ray& ray, const Json& stamp) {
  require_member(from);
  users_.at(from).pointer = ray;
  Json msg{{"type", "pointer"}, {"user_id", from}, {"origin", ray.origin}, {"direction", ray.direction}};
  if (!stamp.is_null()) msg["stamp"] = stamp;
  Outbox out;
  to_others(out, from, make_message(msg));
  return out;
}

Outbox Room::publish_scan_batch(UserId from, std::uint64_t batch_seq, Points3d points) {
  require_member(from);
  const auto it = last_batch_.find(from);
  const std::uint64_t expected = it == last_batch_.end() ? 1 : it->second + 1;
  if (batch_seq != expected)
    throw ProtocolError(ProtocolErrc::OutOfOrderBatch,
                        "expected batch_seq " + std::to_string(expected) + ", got " + std::to_string(batch_seq));
  if (!points.allFinite()) throw ProtocolError(ProtocolErrc::InvalidField, "scan points must be finite");
  last_batch_[from] = batch_seq;

  Json pts = Json::array();
  for (Eigen::Index i = 0; i < points.cols(); ++i) pts.push_back({points(0, i), points(1, i), points(2, i)});
  const Message msg =
      make_message({{"type", "scan_batch"}, {"publisher", from}, {"batch_seq", batch_seq}, {"points", std::move(pts)}});

  buffered_points_ += static_cast<std::size_t>(points.cols());
  scan_buffer_.push_back({from, batch_seq, std::move(points)});
  scan_messages_.push_back(msg);
  // Whole batches are evicted oldest first; a batch larger than the cap evicts itself.
  while (buffered_points_ > limits_.scan_buffer_points && !scan_buffer_.empty()) {
    buffered_points_ -= static_cast<std::size_t>(scan_buffer_.front().points.cols());
    scan_buffer_.pop_front();
    scan_messages_.pop_front();
  }

  Outbox out;
  to_others(out, from, msg);
  return out;
}

}  // namespace shm::session
