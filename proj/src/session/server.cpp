#include "shm/session/server.hpp"

#include <deque>
#include <thread>
#include <vector>

#include <boost/asio/signal_set.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "shm/error.hpp"

namespace shm::session {
namespace {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using Clock = std::chrono::steady_clock;

class WsSession : public Connection, public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, Hub& hub, const ServerOptions& opts)
      : ws_(std::move(socket)),
        timer_(ws_.get_executor()),
        hub_(hub),
        interval_(opts.heartbeat_interval),
        missed_(opts.missed_heartbeats) {}

  void run() {
    net::dispatch(ws_.get_executor(), [self = shared_from_this()] { self->on_run(); });
  }

  void send(Message message) override {
    net::post(ws_.get_executor(), [self = shared_from_this(), message = std::move(message)] {
      if (self->closed_) return;
      self->queue_.push_back(message);
      if (self->queue_.size() == 1) self->do_write();
    });
  }

 private:
  void on_run() {
    websocket::stream_base::timeout t{};
    t.handshake_timeout = std::chrono::seconds(30);
    t.idle_timeout = websocket::stream_base::none();  // liveness is the application heartbeat
    t.keep_alive_pings = false;
    ws_.set_option(t);
    ws_.async_accept(beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

  void on_accept(beast::error_code ec) {
    if (ec) return;
    ws_.text(true);
    last_seen_ = Clock::now();
    arm_timer();
    do_read();
  }

  void do_read() { ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this())); }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return shutdown();
    last_seen_ = Clock::now();
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    hub_.on_message(shared_from_this(), text);
    do_read();
  }

  void do_write() {
    ws_.async_write(net::buffer(*queue_.front()), beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) return shutdown();
    queue_.pop_front();
    if (!queue_.empty()) do_write();
  }

  void arm_timer() {
    timer_.expires_after(interval_);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || self->closed_) return;
      if (Clock::now() - self->last_seen_ > self->interval_ * self->missed_) return self->shutdown();
      self->arm_timer();
    });
  }

  void shutdown() {
    if (closed_) return;
    closed_ = true;
    timer_.cancel();
    queue_.clear();
    hub_.on_disconnect(this);
    beast::error_code ignored;
    beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both, ignored);
    beast::get_lowest_layer(ws_).close();
  }

  websocket::stream<beast::tcp_stream> ws_;
  net::steady_timer timer_;
  beast::flat_buffer buffer_;
  std::deque<Message> queue_;
  Hub& hub_;
  std::chrono::milliseconds interval_;
  int missed_;
  Clock::time_point last_seen_ = Clock::now();
  bool closed_ = false;
};

class Listener : public std::enable_shared_from_this<Listener> {
 public:
  Listener(net::io_context& ioc, tcp::acceptor& acceptor, Hub& hub, const ServerOptions& opts)
      : ioc_(ioc), acceptor_(acceptor), hub_(hub), opts_(opts) {}

  void accept() {
    acceptor_.async_accept(net::make_strand(ioc_), beast::bind_front_handler(&Listener::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec, tcp::socket socket) {
    if (ec == net::error::operation_aborted || !acceptor_.is_open()) return;
    if (!ec) std::make_shared<WsSession>(std::move(socket), hub_, opts_)->run();
    accept();
  }

  net::io_context& ioc_;
  tcp::acceptor& acceptor_;
  Hub& hub_;
  const ServerOptions& opts_;
};

}  // namespace

struct Server::Impl {
  explicit Impl(ServerOptions o) : opts(std::move(o)), hub(opts.limits), ioc(std::max(1, opts.threads)), acceptor(ioc) {}

  ServerOptions opts;
  Hub hub;  // outlives ioc, whose pending handlers still reference it
  net::io_context ioc;
  tcp::acceptor acceptor;
  std::unique_ptr<net::signal_set> signals;
  std::vector<std::thread> threads;
  unsigned short port = 0;
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Server::~Server() { stop(); }

unsigned short Server::start() {
  auto& m = *impl_;
  beast::error_code ec;
  const auto address = net::ip::make_address(m.opts.address, ec);
  if (ec) throw Error(Errc::Io, "bad bind address '" + m.opts.address + "'");
  const tcp::endpoint endpoint(address, m.opts.port);
  m.acceptor.open(endpoint.protocol(), ec);
  if (!ec) m.acceptor.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) m.acceptor.bind(endpoint, ec);
  if (!ec) m.acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec) throw Error(Errc::Io, "cannot listen on " + m.opts.address + ":" + std::to_string(m.opts.port) + ": " + ec.message());
  m.port = m.acceptor.local_endpoint().port();

  if (m.opts.stop_on_signal) {
    m.signals = std::make_unique<net::signal_set>(m.ioc, SIGINT, SIGTERM);
    m.signals->async_wait([this](beast::error_code, int) { impl_->ioc.stop(); });
  }
  std::make_shared<Listener>(m.ioc, m.acceptor, m.hub, m.opts)->accept();
  for (int i = 0; i < std::max(1, m.opts.threads); ++i) m.threads.emplace_back([&m] { m.ioc.run(); });
  return m.port;
}

void Server::stop() {
  impl_->ioc.stop();
  wait();
}

void Server::wait() {
  for (auto& t : impl_->threads)
    if (t.joinable()) t.join();
  impl_->threads.clear();
}

Hub& Server::hub() { return impl_->hub; }

unsigned short Server::port() const { return impl_->port; }

}  // namespace shm::session
