#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "shm/session/hub.hpp"

namespace shm::session {

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8765;  // 0 picks a free port
  RoomLimits limits;
  // A client that sends nothing for missed_heartbeats * heartbeat_interval is dropped.
  std::chrono::milliseconds heartbeat_interval{5000};
  int missed_heartbeats = 3;
  int threads = 2;
  bool stop_on_signal = false;  // SIGINT/SIGTERM stop the server
};

/// WebSocket front end for a Hub. One text frame carries one JSON message.
class Server {
 public:
  explicit Server(ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds, listens and starts the worker threads. Returns the bound port.
  unsigned short start();
  void stop();
  // Blocks until the server is stopped (by stop() or a signal).
  void wait();

  Hub& hub();
  unsigned short port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace shm::session
