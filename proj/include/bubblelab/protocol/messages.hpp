#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bubblelab/common/types.hpp"
#include "bubblelab/session/questionnaire.hpp"

namespace bubblelab::protocol {

// Client to server. There is deliberately no free-text message.

struct Hello {
  std::string token;
  friend bool operator==(const Hello&, const Hello&) = default;
};

struct AssessmentItem {
  std::string item_id;
  session::ItemGroup item_group = session::ItemGroup::SelfPrecision;
  int rating = 0;
  friend bool operator==(const AssessmentItem&, const AssessmentItem&) = default;
};

struct SubmitQuestionnaire {
  std::vector<Cents> declared;  // one value per period
  std::vector<AssessmentItem> responses;
  friend bool operator==(const SubmitQuestionnaire&, const SubmitQuestionnaire&) = default;
};

struct PostOrder {
  Side side = Side::Bid;
  Cents price_cents = 0;
  Shares quantity = 1;
  friend bool operator==(const PostOrder&, const PostOrder&) = default;
};

struct CancelOrder {
  OrderId order_id = 0;
  friend bool operator==(const CancelOrder&, const CancelOrder&) = default;
};

struct Ping {
  friend bool operator==(const Ping&, const Ping&) = default;
};

using ClientMessage = std::variant<Hello, SubmitQuestionnaire, PostOrder, CancelOrder, Ping>;

// Server to client.

/// Public market parameters; the dividend seed is never sent.
struct MarketParams {
  int n_traders = 0;
  int n_periods = 0;
  int period_seconds = 0;
  Cents dividend_value = 0;
  std::string dividend_prob;  // "num/den"
  Shares endowment_shares = 0;
  Cents endowment_cash = 0;
  Cents showup_fee = 0;
  friend bool operator==(const MarketParams&, const MarketParams&) = default;
};

struct Welcome {
  TraderId trader_id = 0;
  std::string session_id;
  MarketParams market;
  friend bool operator==(const Welcome&, const Welcome&) = default;
};

enum class ClientPhase { Questionnaire, Trading, Summary, Payout, Aborted };

struct SessionInfo {
  ClientPhase phase = ClientPhase::Questionnaire;
  int period = 0;
  double seconds_remaining = 0.0;
  Cents cash = 0;
  Shares shares = 0;
  bool questionnaire_submitted = false;
  friend bool operator==(const SessionInfo&, const SessionInfo&) = default;
};

struct PeriodStart {
  int period = 0;
  int period_seconds = 0;
  double server_time = 0.0;
  Cents intrinsic_value = 0;
  Cents max_present_value = 0;
  friend bool operator==(const PeriodStart&, const PeriodStart&) = default;
};

struct BookLevel {
  Cents price = 0;
  Shares quantity = 0;
  bool own = false;
  std::optional<OrderId> order_id;  // own orders only
  friend bool operator==(const BookLevel&, const BookLevel&) = default;
};

struct BookUpdate {
  Seq seq = 0;
  int period = 0;
  std::optional<Cents> best_bid;
  std::optional<Cents> best_ask;
  std::vector<BookLevel> bids;  // priority order
  std::vector<BookLevel> asks;
  friend bool operator==(const BookUpdate&, const BookUpdate&) = default;
};

/// Never names either party. The two parties get their own side and deltas.
struct TradeNotice {
  Seq seq = 0;
  int period = 0;
  Cents price_cents = 0;
  Shares quantity = 0;
  double seconds_into_period = 0.0;
  std::optional<Side> your_side;
  std::optional<Cents> cash_delta;
  std::optional<Shares> shares_delta;
  friend bool operator==(const TradeNotice&, const TradeNotice&) = default;
};

enum class OrderAction { Post, Cancel };

struct OrderAck {
  OrderAction action = OrderAction::Post;
  OrderId order_id = 0;
  Shares filled = 0;
  Shares resting = 0;
  friend bool operator==(const OrderAck&, const OrderAck&) = default;
};

struct OrderReject {
  OrderAction action = OrderAction::Post;
  std::string reason;  // reject reason or cancel result wire name
  std::optional<OrderId> order_id;
  friend bool operator==(const OrderReject&, const OrderReject&) = default;
};

struct OwnTrade {
  Side side = Side::Bid;
  Cents price_cents = 0;
  Shares quantity = 0;
  friend bool operator==(const OwnTrade&, const OwnTrade&) = default;
};

struct PeriodSummary {
  int period = 0;
  Cents dividend_per_share = 0;
  Cents dividend_income = 0;
  Cents cash = 0;
  Shares shares = 0;
  int market_trade_count = 0;
  std::vector<OwnTrade> own_trades;
  friend bool operator==(const PeriodSummary&, const PeriodSummary&) = default;
};

struct FinalPayout {
  TraderId trader_id = 0;
  Cents cash = 0;
  Cents showup_fee = 0;
  Cents payout = 0;
  friend bool operator==(const FinalPayout&, const FinalPayout&) = default;
};

struct Error {
  std::string code;
  std::string message;
  std::optional<std::size_t> offset;  // byte offset within the offending frame
  friend bool operator==(const Error&, const Error&) = default;
};

using ServerMessage = std::variant<Welcome, SessionInfo, PeriodStart, BookUpdate, TradeNotice, OrderAck, OrderReject,
                                   PeriodSummary, FinalPayout, Error>;

/// Malformed frame: not JSON, truncated, or a known type with bad fields.
class DecodeError : public std::runtime_error {
 public:
  DecodeError(std::size_t offset, const std::string& what)
      : std::runtime_error("byte " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Well-formed frame with a type that is not part of the protocol.
class ProtocolViolation : public std::runtime_error {
 public:
  explicit ProtocolViolation(const std::string& type)
      : std::runtime_error("unknown message type: " + type), type_(type) {}
  const std::string& type() const noexcept { return type_; }

 private:
  std::string type_;
};

std::string_view type_name(const ClientMessage& m) noexcept;
std::string_view type_name(const ServerMessage& m) noexcept;
std::string_view to_string(ClientPhase p) noexcept;
std::string_view to_string(OrderAction a) noexcept;

/// One frame: compact JSON followed by a single newline.
std::string encode(const ClientMessage& m);
std::string encode(const ServerMessage& m);

/// Decodes one frame, with or without its trailing newline. Unknown fields are ignored.
ClientMessage decode_client(std::string_view frame);
ServerMessage decode_server(std::string_view frame);

/// Splits a byte stream into frames.
class FrameReader {
 public:
  void feed(std::string_view bytes) { buffer_.append(bytes); }
  /// Next complete line without its newline, if any.
  std::optional<std::string> next();
  /// Throws DecodeError if the stream ended inside a frame.
  void finish() const;
  bool empty() const noexcept { return buffer_.empty(); }
  std::size_t pending() const noexcept { return buffer_.size(); }

 private:
  std::string buffer_;
};

}  // namespace bubblelab::protocol
