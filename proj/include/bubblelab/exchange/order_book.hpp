#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "bubblelab/exchange/accounts.hpp"
#include "bubblelab/exchange/order.hpp"

namespace bubblelab::exchange {

/// Checks an order against the owner's balances net of their other resting orders.
/// Bids need price * quantity + committed bid value <= cash; asks need
/// quantity + committed ask quantity <= shares. Returns nullopt when valid.
std::optional<RejectReason> validate_order(const TraderAccount& account, const Exposure& resting,
                                           const OrderRequest& order);

struct DepthEntry {
  OrderId order_id = 0;
  Cents price = 0;
  Shares quantity = 0;
  bool own = false;

  friend bool operator==(const DepthEntry&, const DepthEntry&) = default;
};

struct Snapshot {
  int period = 0;
  std::optional<Cents> best_bid;
  std::optional<Cents> best_ask;
  std::vector<DepthEntry> bids;  // priority order
  std::vector<DepthEntry> asks;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

/// Continuous double auction for a single asset.
///
/// Bids are kept price-descending and asks price-ascending, FIFO within a
/// price. An incoming order that crosses executes against resting orders in
/// priority order at each resting order's price; any remainder rests. Every
/// execution settles cash and shares immediately. Orders that would trade
/// against their owner's own resting orders are rejected before anything
/// executes. Order ids, trade ids and sequence numbers keep counting across
/// reset() so they stay unique within a session.
class OrderBook {
 public:
  explicit OrderBook(int period = 1) : period_(period) {}

  PostOutcome post(const OrderRequest& request, Accounts& accounts, double timestamp = 0.0);
  CancelResult cancel(TraderId trader, OrderId order_id);

  Snapshot snapshot(std::optional<TraderId> viewer = std::nullopt) const;
  Exposure exposure(TraderId trader) const;
  std::vector<Order> orders_of(TraderId trader) const;
  std::optional<Order> find(OrderId order_id) const;

  std::optional<Cents> best_bid() const;
  std::optional<Cents> best_ask() const;
  std::size_t size() const { return index_.size(); }
  bool empty() const { return index_.empty(); }
  int period() const { return period_; }

  /// Drops every resting order and starts a new period.
  void reset(int period);

 private:
  using Level = std::deque<Order>;
  using BidLevels = std::map<Cents, Level, std::greater<>>;
  using AskLevels = std::map<Cents, Level, std::less<>>;

  template <class Levels>
  bool would_self_cross(const Levels& opposite, const OrderRequest& request) const;
  template <class Levels>
  void match(Levels& opposite, Order& incoming, Accounts& accounts, double timestamp, std::vector<Trade>& trades);
  void rest(const Order& order);

  BidLevels bids_;
  AskLevels asks_;
  std::unordered_map<OrderId, std::pair<Side, Cents>> index_;
  OrderId next_order_id_ = 1;
  TradeId next_trade_id_ = 1;
  Seq next_seq_ = 1;
  int period_;
};

}  // namespace bubblelab::exchange
