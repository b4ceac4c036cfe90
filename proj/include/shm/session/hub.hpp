#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "shm/session/room.hpp"

namespace shm::session {

/// Outbound half of a client connection. send() must not block and must
/// preserve call order.
class Connection {
 public:
  virtual ~Connection() = default;
  virtual void send(Message message) = 0;
};

/// Routes decoded wire messages to rooms. Each room is guarded by its own
/// mutex and deliveries are queued while it is held, so every member sees
/// one total order per room. Rooms are created on first join and dropped
/// when their last member leaves.
class Hub {
 public:
  explicit Hub(RoomLimits limits = {});

  // One inbound text frame from `conn`. Errors are answered to `conn` only.
  void on_message(const std::shared_ptr<Connection>& conn, std::string_view text);
  // Idempotent; behaves like `leave`.
  void on_disconnect(const Connection* conn);

  std::size_t room_count() const;
  std::optional<std::size_t> room_size(const std::string& room_id) const;
  std::optional<SessionState> room_state(const std::string& room_id) const;

 private:
  struct Slot {
    Slot(std::string id, RoomLimits limits) : room(std::move(id), limits) {}
    std::mutex mutex;
    Room room;
    bool closed = false;
    std::map<UserId, std::weak_ptr<Connection>> sinks;
  };
  struct Membership {
    std::shared_ptr<Slot> slot;
    UserId user = 0;
  };

  void join(const std::shared_ptr<Connection>& conn, const Json& msg);
  void dispatch(const std::shared_ptr<Connection>& conn, const std::string& type, const Json& msg);
  // Caller holds slot->mutex.
  void leave_locked(const std::shared_ptr<Slot>& slot, UserId user, const Connection* conn);
  static void deliver(const Slot& slot, const Outbox& out);

  RoomLimits limits_;
  mutable std::mutex mutex_;  // guards rooms_ and members_; never held while taking a slot mutex
  std::map<std::string, std::shared_ptr<Slot>> rooms_;
  std::map<const Connection*, Membership> members_;
};

}  // namespace shm::session
