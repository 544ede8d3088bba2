#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "bubblelab/common/types.hpp"

namespace bubblelab::exchange {

/// Upper bounds that keep price * quantity well inside int64.
inline constexpr Cents kMaxPrice = 1'000'000'000;
inline constexpr Shares kMaxQuantity = 1'000'000;

/// What a trader asks the book to do; ids and sequence numbers are assigned on acceptance.
struct OrderRequest {
  TraderId trader_id = 0;
  Side side = Side::Bid;
  Cents price = 0;
  Shares quantity = 1;

  friend bool operator==(const OrderRequest&, const OrderRequest&) = default;
};

struct Order {
  OrderId order_id = 0;
  TraderId trader_id = 0;
  Side side = Side::Bid;
  Cents price = 0;
  Shares quantity = 1;  // remaining
  Seq submitted_seq = 0;

  friend bool operator==(const Order&, const Order&) = default;
};

struct Trade {
  TradeId trade_id = 0;
  int period = 0;
  Cents price = 0;
  Shares quantity = 0;
  TraderId buyer_id = 0;
  TraderId seller_id = 0;
  OrderId resting_order_id = 0;
  OrderId aggressor_order_id = 0;
  double timestamp = 0.0;  // seconds into the period

  friend bool operator==(const Trade&, const Trade&) = default;
};

enum class RejectReason {
  InvalidPrice,
  InvalidQuantity,
  InsufficientCash,
  InsufficientShares,
  SelfCross,
  UnknownTrader,
  WrongPhase,
};

std::string_view to_string(RejectReason r) noexcept;
std::optional<RejectReason> parse_reject_reason(std::string_view s) noexcept;

struct PostOutcome {
  enum class Status { Resting, Executed, Rejected };

  Status status = Status::Rejected;
  OrderId order_id = 0;               // 0 when rejected
  Seq submitted_seq = 0;
  std::vector<Trade> trades;          // non-empty iff Executed
  std::optional<OrderId> remainder;   // set when part of an executed order rests
  std::optional<RejectReason> reject;

  static PostOutcome rejected(RejectReason r) {
    PostOutcome o;
    o.reject = r;
    return o;
  }
  bool accepted() const noexcept { return status != Status::Rejected; }
};

enum class CancelResult { Cancelled, NotFound, NotOwner, WrongPhase };

std::string_view to_string(CancelResult r) noexcept;

}  // namespace bubblelab::exchange
