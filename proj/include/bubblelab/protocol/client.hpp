#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "bubblelab/protocol/messages.hpp"

namespace bubblelab::protocol {

class ClientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Blocking client for bots and tests. Every message received is kept in
/// `history()` in arrival order.
class BotClient {
 public:
  BotClient(const std::string& host, unsigned short port);
  ~BotClient();
  BotClient(const BotClient&) = delete;
  BotClient& operator=(const BotClient&) = delete;

  void send(const ClientMessage& message);
  void send_raw(const std::string& bytes);

  /// Next message; throws ClientError on timeout or a closed connection.
  ServerMessage receive(double timeout_seconds = 10.0);

  /// Receives until a message of type T arrives and returns it.
  template <class T>
  T expect(double timeout_seconds = 10.0) {
    for (;;) {
      ServerMessage m = receive(timeout_seconds);
      if (auto* t = std::get_if<T>(&m)) return *t;
    }
  }

  const std::vector<ServerMessage>& history() const noexcept { return history_; }
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::vector<ServerMessage> history_;
};

}  // namespace bubblelab::protocol
