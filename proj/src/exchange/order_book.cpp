#include "bubblelab/exchange/order_book.hpp"

#include <algorithm>
#include <cassert>

namespace bubblelab::exchange {

namespace {

bool crosses(Side incoming, Cents incoming_price, Cents resting_price) {
  return incoming == Side::Bid ? incoming_price >= resting_price : incoming_price <= resting_price;
}

template <class Levels>
void append_depth(const Levels& levels, std::optional<TraderId> viewer, std::vector<DepthEntry>& out) {
  for (const auto& [price, level] : levels)
    for (const auto& o : level) out.push_back({o.order_id, o.price, o.quantity, viewer && *viewer == o.trader_id});
}

}  // namespace

std::optional<RejectReason> validate_order(const TraderAccount& account, const Exposure& resting,
                                           const OrderRequest& order) {
  if (order.price < 1 || order.price > kMaxPrice) return RejectReason::InvalidPrice;
  if (order.quantity < 1 || order.quantity > kMaxQuantity) return RejectReason::InvalidQuantity;
  if (order.side == Side::Bid) {
    if (order.price * order.quantity + resting.bid_value > account.cash) return RejectReason::InsufficientCash;
  } else {
    if (order.quantity + resting.ask_quantity > account.shares) return RejectReason::InsufficientShares;
  }
  return std::nullopt;
}

template <class Levels>
bool OrderBook::would_self_cross(const Levels& opposite, const OrderRequest& request) const {
  Shares remaining = request.quantity;
  for (const auto& [price, level] : opposite) {
    if (remaining == 0 || !crosses(request.side, request.price, price)) break;
    for (const auto& resting : level) {
      if (resting.trader_id == request.trader_id) return true;
      remaining -= std::min(remaining, resting.quantity);
      if (remaining == 0) break;
    }
  }
  return false;
}

template <class Levels>
void OrderBook::match(Levels& opposite, Order& incoming, Accounts& accounts, double timestamp,
                      std::vector<Trade>& trades) {
  while (incoming.quantity > 0 && !opposite.empty()) {
    auto level_it = opposite.begin();
    if (!crosses(incoming.side, incoming.price, level_it->first)) break;
    Level& level = level_it->second;
    Order& resting = level.front();
    assert(resting.trader_id != incoming.trader_id);

    const Shares qty = std::min(incoming.quantity, resting.quantity);
    const Cents price = resting.price;
    const bool incoming_buys = incoming.side == Side::Bid;
    const TraderId buyer = incoming_buys ? incoming.trader_id : resting.trader_id;
    const TraderId seller = incoming_buys ? resting.trader_id : incoming.trader_id;

    auto& b = accounts.at(buyer);
    auto& s = accounts.at(seller);
    b.cash -= price * qty;
    b.shares += qty;
    b.trading_pnl -= price * qty;
    s.cash += price * qty;
    s.shares -= qty;
    s.trading_pnl += price * qty;
    assert(b.cash >= 0 && s.shares >= 0);

    trades.push_back(Trade{next_trade_id_++, period_, price, qty, buyer, seller, resting.order_id,
                           incoming.order_id, timestamp});

    incoming.quantity -= qty;
    resting.quantity -= qty;
    if (resting.quantity == 0) {
      index_.erase(resting.order_id);
      level.pop_front();
      if (level.empty()) opposite.erase(level_it);
    }
  }
}

void OrderBook::rest(const Order& order) {
  index_.emplace(order.order_id, std::make_pair(order.side, order.price));
  if (order.side == Side::Bid)
    bids_[order.price].push_back(order);
  else
    asks_[order.price].push_back(order);
}

PostOutcome OrderBook::post(const OrderRequest& request, Accounts& accounts, double timestamp) {
  if (request.price < 1 || request.price > kMaxPrice) return PostOutcome::rejected(RejectReason::InvalidPrice);
  if (request.quantity < 1 || request.quantity > kMaxQuantity)
    return PostOutcome::rejected(RejectReason::InvalidQuantity);
  if (!accounts.contains(request.trader_id)) return PostOutcome::rejected(RejectReason::UnknownTrader);
  if (auto violation = validate_order(accounts.at(request.trader_id), exposure(request.trader_id), request))
    return PostOutcome::rejected(*violation);
  const bool self_cross =
      request.side == Side::Bid ? would_self_cross(asks_, request) : would_self_cross(bids_, request);
  if (self_cross) return PostOutcome::rejected(RejectReason::SelfCross);

  Order incoming{next_order_id_++, request.trader_id, request.side, request.price, request.quantity, next_seq_++};
  PostOutcome outcome;
  outcome.order_id = incoming.order_id;
  outcome.submitted_seq = incoming.submitted_seq;
  if (incoming.side == Side::Bid)
    match(asks_, incoming, accounts, timestamp, outcome.trades);
  else
    match(bids_, incoming, accounts, timestamp, outcome.trades);

  if (incoming.quantity > 0) {
    rest(incoming);
    if (!outcome.trades.empty()) outcome.remainder = incoming.order_id;
  }
  outcome.status = outcome.trades.empty() ? PostOutcome::Status::Resting : PostOutcome::Status::Executed;
  return outcome;
}

CancelResult OrderBook::cancel(TraderId trader, OrderId order_id) {
  auto it = index_.find(order_id);
  if (it == index_.end()) return CancelResult::NotFound;
  const auto [side, price] = it->second;

  auto remove_from = [&](auto& levels) {
    auto level_it = levels.find(price);
    assert(level_it != levels.end());
    Level& level = level_it->second;
    auto pos = std::find_if(level.begin(), level.end(), [&](const Order& o) { return o.order_id == order_id; });
    assert(pos != level.end());
    if (pos->trader_id != trader) return CancelResult::NotOwner;
    level.erase(pos);
    if (level.empty()) levels.erase(level_it);
    index_.erase(it);
    return CancelResult::Cancelled;
  };
  return side == Side::Bid ? remove_from(bids_) : remove_from(asks_);
}

Snapshot OrderBook::snapshot(std::optional<TraderId> viewer) const {
  Snapshot snap;
  snap.period = period_;
  snap.best_bid = best_bid();
  snap.best_ask = best_ask();
  append_depth(bids_, viewer, snap.bids);
  append_depth(asks_, viewer, snap.asks);
  return snap;
}

Exposure OrderBook::exposure(TraderId trader) const {
  Exposure e;
  for (const auto& o : orders_of(trader)) {
    if (o.side == Side::Bid)
      e.bid_value += o.price * o.quantity;
    else
      e.ask_quantity += o.quantity;
  }
  return e;
}

std::vector<Order> OrderBook::orders_of(TraderId trader) const {
  std::vector<Order> out;
  auto collect = [&](const auto& levels) {
    for (const auto& [price, level] : levels)
      for (const auto& o : level)
        if (o.trader_id == trader) out.push_back(o);
  };
  collect(bids_);
  collect(asks_);
  return out;
}

std::optional<Order> OrderBook::find(OrderId order_id) const {
  auto it = index_.find(order_id);
  if (it == index_.end()) return std::nullopt;
  const auto [side, price] = it->second;
  auto search = [&](const auto& levels) -> std::optional<Order> {
    const auto& level = levels.at(price);
    for (const auto& o : level)
      if (o.order_id == order_id) return o;
    return std::nullopt;
  };
  return side == Side::Bid ? search(bids_) : search(asks_);
}

std::optional<Cents> OrderBook::best_bid() const {
  if (bids_.empty()) return std::nullopt;
  return bids_.begin()->first;
}

std::optional<Cents> OrderBook::best_ask() const {
  if (asks_.empty()) return std::nullopt;
  return asks_.begin()->first;
}

void OrderBook::reset(int period) {
  bids_.clear();
  asks_.clear();
  index_.clear();
  period_ = period;
}

}  // namespace bubblelab::exchange
