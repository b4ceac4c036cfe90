#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <json.hpp>

namespace wsclient {

using Json = nlohmann::json;
using namespace std::chrono_literals;

/// Minimal headless WebSocket client for protocol tests. Inbound messages are
/// queued by a background thread; sends are serialized on the same thread.
class Client {
 public:
  Client(const std::string& host, unsigned short port);
  ~Client();
  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  void send(const Json& message);
  void send_raw(const std::string& text);

  // Next inbound message in arrival order.
  std::optional<Json> next(std::chrono::milliseconds timeout = 5s);
  // Next message of `type`; messages of other types are discarded.
  Json expect(const std::string& type, std::chrono::milliseconds timeout = 5s);

  // Sends join and waits for welcome (or error, which is returned instead).
  Json join(const std::string& room, const std::string& name);

  void close();   // polite websocket close
  bool closed() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace wsclient
