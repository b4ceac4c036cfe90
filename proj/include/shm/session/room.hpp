#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "shm/pointcloud.hpp"
#include "shm/session/protocol.hpp"

namespace shm::session {

struct RoomLimits {
  std::size_t max_users = 20;
  std::size_t scan_buffer_points = 500000;
};

struct ScanBatch {
  UserId publisher = 0;
  std::uint64_t batch_seq = 0;
  Points3d points;
};

using Message = std::shared_ptr<const std::string>;

struct Delivery {
  UserId to = 0;
  Message message;
};

using Outbox = std::vector<Delivery>;

/// Single-room state machine. Not thread-safe: callers serialize access.
/// Operations return the messages to deliver, in delivery order. Errors are
/// thrown as ProtocolError and leave the room untouched.
class Room {
 public:
  explicit Room(std::string id, RoomLimits limits = {});

  struct Joined {
    UserId user_id = 0;
    Outbox out;
  };

  Joined join(std::string_view name);
  Outbox leave(UserId user);
  Outbox apply_state_update(UserId from, const Json& update);
  Outbox publish_pointer(UserId from, const Ray& ray, const Json& stamp = Json());
  Outbox publish_scan_batch(UserId from, std::uint64_t batch_seq, Points3d points);

  const std::string& id() const noexcept { return id_; }
  const SessionState& state() const noexcept { return state_; }
  const std::map<UserId, UserPresence>& users() const noexcept { return users_; }
  const std::deque<ScanBatch>& scan_buffer() const noexcept { return scan_buffer_; }
  std::size_t buffered_points() const noexcept { return buffered_points_; }
  bool empty() const noexcept { return users_.empty(); }
  bool is_member(UserId u) const { return users_.count(u) != 0; }

 private:
  void require_member(UserId u) const;
  Json roster_json() const;
  void to_all(Outbox& out, const Message& m) const;
  void to_others(Outbox& out, UserId except, const Message& m) const;

  std::string id_;
  RoomLimits limits_;
  SessionState state_;
  std::map<UserId, UserPresence> users_;
  std::map<UserId, std::uint64_t> last_batch_;
  std::deque<ScanBatch> scan_buffer_;
  std::deque<Message> scan_messages_;
  std::size_t buffered_points_ = 0;
  UserId next_id_ = 1;
};

std::array<std::uint8_t, 3> presence_color(UserId id);

Message make_message(const Json& j);

}  // namespace shm::session
