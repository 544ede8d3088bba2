#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bubblelab/protocol/messages.hpp"
#include "bubblelab/session/period.hpp"

namespace bubblelab::protocol {

using ConnId = std::uint64_t;

struct Outbound {
  ConnId conn = 0;
  ServerMessage message;
};

struct HostOptions {
  /// Join token of seat i + 1. Empty means open seating: the first n
  /// distinct tokens claim seats in arrival order.
  std::vector<std::string> tokens;
  /// Anonymous TRADE_NOTICE to every seat; when off only the two parties hear of a trade.
  bool broadcast_trades = true;
};

/// Protocol logic of one live session, free of any networking. Every reply is
/// addressed to a connection; each seat's view is built separately so no
/// message carries another trader's identity, holdings or answers.
class SessionHost {
 public:
  SessionHost(session::SessionConfig config, const session::Clock& clock, HostOptions options = {});

  session::Session& session() noexcept { return session_; }
  const session::Session& session() const noexcept { return session_; }

  std::optional<TraderId> seat_of(ConnId conn) const;
  std::optional<ConnId> conn_of(TraderId seat) const;
  bool all_seated() const;  // every seat claimed and currently connected
  bool questionnaires_complete() const;

  /// Handles one message completely; order commands are applied at once.
  std::vector<Outbound> handle_message(ConnId conn, const ClientMessage& message);

  /// First half of handle_message: returns the order command to sequence, or
  /// handles the message itself and appends any replies.
  std::optional<session::Command> interpret(ConnId conn, const ClientMessage& message, std::vector<Outbound>& out);
  /// Second half: replies and broadcasts for an applied command.
  void on_result(ConnId conn, const session::Command& command, const session::CommandResult& result, Seq first_new,
                 std::vector<Outbound>& out) const;

  std::vector<Outbound> malformed(ConnId conn, const DecodeError& e) const;
  std::vector<Outbound> violation(ConnId conn, const ProtocolViolation& e) const;
  /// Resting orders of the seat survive; the seat can be reclaimed with its token.
  void disconnect(ConnId conn);

  void announce_period_start(std::vector<Outbound>& out) const;
  void announce_period_end(const session::PeriodResult& result, std::vector<Outbound>& out) const;
  void announce_payouts(std::vector<Outbound>& out) const;
  void announce_abort(const std::string& reason, std::vector<Outbound>& out) const;

  /// Drive the session and return the resulting announcements.
  std::vector<Outbound> open_period();
  std::vector<Outbound> close_period();
  std::vector<Outbound> finish();
  std::vector<Outbound> abort(const std::string& reason);

  SessionInfo info_for(TraderId seat) const;
  BookUpdate book_for(TraderId seat) const;

 private:
  void join(ConnId conn, const Hello& hello, std::vector<Outbound>& out);
  void submit(ConnId conn, TraderId seat, const SubmitQuestionnaire& q, std::vector<Outbound>& out);
  void to_all(const std::function<std::optional<ServerMessage>(TraderId)>& make, std::vector<Outbound>& out) const;

  session::Session session_;
  HostOptions options_;
  std::map<TraderId, std::string> seat_tokens_;
  std::map<TraderId, ConnId> seat_conn_;
  std::map<ConnId, TraderId> conn_seat_;
};

}  // namespace bubblelab::protocol
