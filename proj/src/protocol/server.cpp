#include "bubblelab/protocol/server.hpp"

#include <chrono>
#include <condition_variable>
#include <array>
#include <deque>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <unordered_map>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace bubblelab::protocol {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using asio::ip::tcp;

namespace {

using WallTime = std::chrono::system_clock::time_point;

WallTime wall_time_at(double epoch_seconds) {
  return WallTime(std::chrono::duration_cast<std::chrono::system_clock::duration>(
      std::chrono::duration<double>(epoch_seconds)));
}

struct Inbound {
  enum class Kind { Frame, Closed, Oversized };
  ConnId conn = 0;
  Kind kind = Kind::Frame;
  std::string frame;
};

class InboundQueue {
 public:
  void push(Inbound item) {
    {
      std::lock_guard lock(mutex_);
      items_.push_back(std::move(item));
    }
    cv_.notify_one();
  }

  std::optional<Inbound> pop_until(WallTime until) {
    std::unique_lock lock(mutex_);
    if (!cv_.wait_until(lock, until, [&] { return !items_.empty(); })) return std::nullopt;
    Inbound item = std::move(items_.front());
    items_.pop_front();
    return item;
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<Inbound> items_;
};

using Registry = std::unordered_map<ConnId, std::shared_ptr<class Link>>;

/// One client connection. Lives on the I/O thread only.
class Link : public std::enable_shared_from_this<Link> {
 public:
  Link(ConnId id, InboundQueue& inbound, Registry& registry) : id_(id), inbound_(inbound), registry_(registry) {}
  virtual ~Link() = default;

  virtual void start() = 0;

  void send(std::string bytes) {
    if (closed_) return;
    queue_.push_back(std::move(bytes));
    if (queue_.size() == 1) write();
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    shutdown();
    registry_.erase(id_);
    inbound_.push({id_, Inbound::Kind::Closed, {}});
  }

  bool idle() const { return queue_.empty(); }

 protected:
  virtual void write() = 0;
  virtual void shutdown() = 0;

  /// Splits received bytes into frames and queues them for the sequencer.
  /// Returns false once the connection had to be closed.
  bool deliver(std::string_view bytes) {
    frames_.feed(bytes);
    while (auto frame = frames_.next()) {
      if (frame->size() > kMaxFrameBytes) {
        oversized();
        continue;
      }
      inbound_.push({id_, Inbound::Kind::Frame, std::move(*frame)});
    }
    if (frames_.pending() > kMaxFrameBytes) {
      oversized();
      close();
      return false;
    }
    return true;
  }

  void oversized() { inbound_.push({id_, Inbound::Kind::Oversized, {}}); }

  void written(boost::system::error_code ec) {
    if (ec) {
      close();
      return;
    }
    queue_.pop_front();
    if (!queue_.empty()) write();
  }

  ConnId id_;
  InboundQueue& inbound_;
  Registry& registry_;
  FrameReader frames_;
  std::deque<std::string> queue_;
  bool closed_ = false;
};

class TcpLink final : public Link {
 public:
  TcpLink(tcp::socket socket, ConnId id, InboundQueue& inbound, Registry& registry)
      : Link(id, inbound, registry), socket_(std::move(socket)) {}

  void start() override { read(); }

 private:
  void read() {
    socket_.async_read_some(asio::buffer(chunk_), [self = shared_from_this(), this](boost::system::error_code ec,
                                                                                   std::size_t n) {
      if (ec) {
        close();
        return;
      }
      if (deliver(std::string_view(chunk_.data(), n))) read();
    });
  }

  void write() override {
    asio::async_write(socket_, asio::buffer(queue_.front()),
                      [self = shared_from_this(), this](boost::system::error_code ec, std::size_t) { written(ec); });
  }

  void shutdown() override {
    boost::system::error_code ec;
    socket_.shutdown(tcp::socket::shutdown_both, ec);
    socket_.close(ec);
  }

  tcp::socket socket_;
  std::array<char, 4096> chunk_{};
};

/// Same frames carried in WebSocket text messages, for browsers.
class WsLink final : public Link {
 public:
  WsLink(tcp::socket socket, ConnId id, InboundQueue& inbound, Registry& registry)
      : Link(id, inbound, registry), ws_(std::move(socket)) {}

  void start() override {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.read_message_max(kMaxFrameBytes + 1);
    ws_.text(true);
    ws_.async_accept([self = shared_from_this(), this](boost::system::error_code ec) {
      if (ec) {
        close();
        return;
      }
      read();
    });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this(), this](boost::system::error_code ec, std::size_t) {
      if (ec == websocket::error::message_too_big) oversized();
      if (ec) {
        close();
        return;
      }
      std::string message = beast::buffers_to_string(buffer_.data());
      buffer_.consume(buffer_.size());
      // a message is one frame; the newline is optional
      if (message.empty() || message.back() != '\n') message.push_back('\n');
      if (deliver(message)) read();
    });
  }

  void write() override {
    ws_.async_write(asio::buffer(queue_.front()),
                    [self = shared_from_this(), this](boost::system::error_code ec, std::size_t) { written(ec); });
  }

  void shutdown() override {
    boost::system::error_code ec;
    beast::get_lowest_layer(ws_).shutdown(tcp::socket::shutdown_both, ec);
    beast::get_lowest_layer(ws_).close(ec);
  }

  websocket::stream<tcp::socket> ws_;
  beast::flat_buffer buffer_;
};

class Network {
 public:
  Network(const std::string& bind, const std::string& ws_bind, InboundQueue& inbound)
      : inbound_(inbound), tcp_(io_), ws_(io_) {
    listen(tcp_, bind);
    accept(tcp_, false);
    if (!ws_bind.empty()) {
      listen(ws_, ws_bind);
      accept(ws_, true);
    }
    thread_ = std::thread([this] { io_.run(); });
  }

  ~Network() { stop(); }

  unsigned short port() const { return tcp_.local_endpoint().port(); }
  std::optional<unsigned short> ws_port() const {
    if (!ws_.is_open()) return std::nullopt;
    return ws_.local_endpoint().port();
  }

  void send(const std::vector<Outbound>& out) {
    for (const auto& o : out) {
      asio::post(io_, [this, conn = o.conn, bytes = encode(o.message)]() mutable {
        if (auto it = connections_.find(conn); it != connections_.end()) it->second->send(std::move(bytes));
      });
    }
  }

  void drop(ConnId conn) {
    asio::post(io_, [this, conn] {
      if (auto it = connections_.find(conn); it != connections_.end()) it->second->close();
    });
  }

  /// Waits (bounded) until queued writes have left, then closes everything.
  void stop() {
    if (!thread_.joinable()) return;
    const auto give_up = std::chrono::steady_clock::now() + std::chrono::seconds(2);
    while (std::chrono::steady_clock::now() < give_up) {
      std::promise<bool> idle;
      auto done = idle.get_future();
      asio::post(io_, [this, &idle] {
        bool all = true;
        for (const auto& [_, c] : connections_) all = all && c->idle();
        idle.set_value(all);
      });
      if (done.get()) break;
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    asio::post(io_, [this] {
      boost::system::error_code ec;
      tcp_.close(ec);
      ws_.close(ec);
      auto open = connections_;
      for (auto& [_, c] : open) c->close();
    });
    asio::post(io_, [this] { io_.stop(); });
    thread_.join();
  }

 private:
  static void listen(tcp::acceptor& acceptor, const std::string& bind) {
    const auto [host, port] = parse_bind(bind);
    try {
      const tcp::endpoint endpoint(asio::ip::make_address(host), port);
      acceptor.open(endpoint.protocol());
      acceptor.set_option(tcp::acceptor::reuse_address(true));
      acceptor.bind(endpoint);
      acceptor.listen();
    } catch (const boost::system::system_error& e) {
      throw BindFailure("cannot listen on " + bind + ": " + e.what());
    }
  }

  void accept(tcp::acceptor& acceptor, bool websocket) {
    acceptor.async_accept([this, &acceptor, websocket](boost::system::error_code ec, tcp::socket socket) {
      if (ec) return;
      const ConnId id = next_id_++;
      std::shared_ptr<Link> link;
      if (websocket)
        link = std::make_shared<WsLink>(std::move(socket), id, inbound_, connections_);
      else
        link = std::make_shared<TcpLink>(std::move(socket), id, inbound_, connections_);
      connections_.emplace(id, link);
      link->start();
      accept(acceptor, websocket);
    });
  }

  InboundQueue& inbound_;
  asio::io_context io_;
  tcp::acceptor tcp_;
  tcp::acceptor ws_;
  Registry connections_;
  ConnId next_id_ = 1;
  std::thread thread_;
};

class Sequencer final : public session::CommandSource {
 public:
  Sequencer(SessionHost& host, Network& net, InboundQueue& inbound, const ServerOptions& options)
      : host_(host), net_(net), inbound_(inbound), options_(options) {}

  bool stop_requested() const { return options_.stop && options_.stop->load(); }

  /// Handles everything that arrives until `until`, or until `done` holds.
  template <class Done>
  bool pump_until(WallTime until, Done done) {
    while (!done()) {
      if (stop_requested()) return false;
      const auto step = std::min(until, std::chrono::system_clock::now() + std::chrono::milliseconds(100));
      auto item = inbound_.pop_until(step);
      if (!item) {
        if (std::chrono::system_clock::now() >= until) return done();
        continue;
      }
      std::vector<Outbound> out;
      if (auto command = admit(*item, out)) {
        const Seq first_new = host_.session().log().last_seq() + 1;
        const auto result = host_.session().apply(*command);
        host_.on_result(item->conn, *command, result, first_new, out);
      }
      net_.send(out);
    }
    return true;
  }

  std::optional<session::Command> next(const session::Session& session, double deadline) override {
    const WallTime until = wall_time_at(deadline);
    for (;;) {
      if (stop_requested()) return std::nullopt;
      if (std::chrono::system_clock::now() >= until) return std::nullopt;
      const auto step = std::min(until, std::chrono::system_clock::now() + std::chrono::milliseconds(100));
      auto item = inbound_.pop_until(step);
      if (!item) continue;
      if (session.clock().now() >= deadline) {
        // arrived too late for this period: answered once the period is closed
        late_.push_back(std::move(*item));
        return std::nullopt;
      }
      std::vector<Outbound> out;
      auto command = admit(*item, out);
      net_.send(out);
      if (command) {
        sender_ = item->conn;
        return command;
      }
    }
  }

  void on_period_open(const session::Session&) override {
    std::vector<Outbound> out;
    host_.announce_period_start(out);
    net_.send(out);
  }

  void on_result(const session::Session&, const session::Command& command, const session::CommandResult& result,
                 Seq first_new) override {
    std::vector<Outbound> out;
    host_.on_result(sender_, command, result, first_new, out);
    net_.send(out);
  }

  void on_period_close(const session::Session&, const session::PeriodResult& result) override {
    std::vector<Outbound> out;
    host_.announce_period_end(result, out);
    net_.send(out);
    for (auto& item : late_) {
      std::vector<Outbound> late_out;
      if (auto command = admit(item, late_out)) {
        const Seq first_new = host_.session().log().last_seq() + 1;
        host_.on_result(item.conn, *command, host_.session().apply(*command), first_new, late_out);
      }
      net_.send(late_out);
    }
    late_.clear();
  }

 private:
  std::optional<session::Command> admit(const Inbound& item, std::vector<Outbound>& out) {
    switch (item.kind) {
      case Inbound::Kind::Closed: host_.disconnect(item.conn); return std::nullopt;
      case Inbound::Kind::Oversized:
        out.push_back({item.conn, Error{"malformed_message", "frame exceeds 65536 bytes", std::nullopt}});
        return std::nullopt;
      case Inbound::Kind::Frame: break;
    }
    try {
      return host_.interpret(item.conn, decode_client(item.frame), out);
    } catch (const DecodeError& e) {
      auto r = host_.malformed(item.conn, e);
      out.insert(out.end(), r.begin(), r.end());
    } catch (const ProtocolViolation& e) {
      auto r = host_.violation(item.conn, e);
      out.insert(out.end(), r.begin(), r.end());
    }
    return std::nullopt;
  }

  SessionHost& host_;
  Network& net_;
  InboundQueue& inbound_;
  const ServerOptions& options_;
  ConnId sender_ = 0;
  std::vector<Inbound> late_;
};

WallTime after(double seconds) {
  return std::chrono::system_clock::now() +
         std::chrono::duration_cast<std::chrono::system_clock::duration>(std::chrono::duration<double>(seconds));
}

}  // namespace

std::pair<std::string, unsigned short> parse_bind(const std::string& bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos || colon == 0) throw BindFailure("bind address must be host:port, got " + bind);
  const std::string port = bind.substr(colon + 1);
  try {
    std::size_t used = 0;
    const unsigned long p = std::stoul(port, &used);
    if (used != port.size() || p > 65535) throw std::out_of_range(port);
    return {bind.substr(0, colon), static_cast<unsigned short>(p)};
  } catch (const std::logic_error&) {
    throw BindFailure("bad port in bind address " + bind);
  }
}

ServeResult serve(const session::SessionConfig& config, const ServerOptions& options) {
  config.validate();
  session::SystemClock clock;
  SessionHost host(config, clock, options.host);
  InboundQueue inbound;
  Network net(options.bind, options.ws_bind, inbound);
  if (options.on_listening) options.on_listening(net.port());
  if (options.on_ws_listening && net.ws_port()) options.on_ws_listening(*net.ws_port());
  Sequencer sequencer(host, net, inbound, options);

  ServeResult result;
  auto finish_log = [&] {
    result.log = host.session().log().records();
    if (!options.log_path.empty()) session::write_log(result.log, options.log_path);
  };
  auto abort = [&](const std::string& reason) {
    net.send(host.abort(reason));
    net.stop();
    result.aborted = true;
    finish_log();
    return result;
  };

  const WallTime join_deadline = options.join_timeout_seconds > 0 ? after(options.join_timeout_seconds)
                                                                  : WallTime::max();
  const bool started = sequencer.pump_until(join_deadline, [&] {
    return host.all_seated() && (!options.require_questionnaire || host.questionnaires_complete());
  });
  if (!started) return abort(sequencer.stop_requested() ? "stopped" : "join timeout");

  for (int t = 1; t <= config.n_periods; ++t) {
    session::run_period(host.session(), sequencer);
    if (sequencer.stop_requested()) return abort("stopped");
    if (t < config.n_periods && options.summary_seconds > 0) {
      sequencer.pump_until(after(options.summary_seconds), [] { return false; });
      if (sequencer.stop_requested()) return abort("stopped");
    }
  }
  net.send(host.finish());
  net.stop();
  finish_log();
  return result;
}

}  // namespace bubblelab::protocol
