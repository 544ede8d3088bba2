#include "bubblelab/protocol/client.hpp"

#include <chrono>

#include <boost/asio.hpp>

namespace bubblelab::protocol {

namespace asio = boost::asio;
using asio::ip::tcp;

struct BotClient::Impl {
  asio::io_context io;
  tcp::socket socket{io};
  FrameReader frames;
  std::array<char, 4096> chunk{};
};

BotClient::BotClient(const std::string& host, unsigned short port) : impl_(std::make_unique<Impl>()) {
  try {
    tcp::resolver resolver(impl_->io);
    asio::connect(impl_->socket, resolver.resolve(host, std::to_string(port)));
  } catch (const boost::system::system_error& e) {
    throw ClientError("cannot connect to " + host + ":" + std::to_string(port) + ": " + e.what());
  }
}

BotClient::~BotClient() { close(); }

void BotClient::close() {
  boost::system::error_code ec;
  impl_->socket.shutdown(tcp::socket::shutdown_both, ec);
  impl_->socket.close(ec);
}

void BotClient::send(const ClientMessage& message) { send_raw(encode(message)); }

void BotClient::send_raw(const std::string& bytes) {
  boost::system::error_code ec;
  asio::write(impl_->socket, asio::buffer(bytes), ec);
  if (ec) throw ClientError("send failed: " + ec.message());
}

ServerMessage BotClient::receive(double timeout_seconds) {
  for (;;) {
    if (auto frame = impl_->frames.next()) {
      history_.push_back(decode_server(*frame));
      return history_.back();
    }
    boost::system::error_code result = asio::error::would_block;
    std::size_t n = 0;
    impl_->socket.async_read_some(asio::buffer(impl_->chunk), [&](boost::system::error_code ec, std::size_t got) {
      result = ec;
      n = got;
    });
    impl_->io.restart();
    impl_->io.run_for(std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::duration<double>(timeout_seconds)));
    if (result == asio::error::would_block) {
      impl_->socket.cancel();
      impl_->io.restart();
      impl_->io.run();
      throw ClientError("timed out waiting for the server");
    }
    if (result) throw ClientError("connection closed: " + result.message());
    impl_->frames.feed(std::string_view(impl_->chunk.data(), n));
  }
}

}  // namespace bubblelab::protocol
