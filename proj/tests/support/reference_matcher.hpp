#pragma once

// Brute-force reference matcher used as an independent oracle for the order
// book. It keeps resting orders in one flat vector and rescans all of it for
// the best counter-order on every fill; no price levels, no index.

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "bubblelab/exchange/order.hpp"

namespace bubblelab::testing {

struct RefAccount {
  Cents cash = 0;
  Shares shares = 0;
  friend bool operator==(const RefAccount&, const RefAccount&) = default;
};

struct RefFill {
  Cents price = 0;
  Shares quantity = 0;
  TraderId buyer = 0;
  TraderId seller = 0;
  OrderId resting = 0;
  OrderId aggressor = 0;
  friend bool operator==(const RefFill&, const RefFill&) = default;
};

struct RefOutcome {
  bool accepted = false;
  std::optional<exchange::RejectReason> reject;
  OrderId order_id = 0;
  std::vector<RefFill> fills;
};

class ReferenceMatcher {
 public:
  ReferenceMatcher(int n_traders, Cents cash, Shares shares) {
    for (TraderId t = 1; t <= n_traders; ++t) accounts_[t] = RefAccount{cash, shares};
  }

  RefOutcome post(TraderId trader, Side side, Cents price, Shares qty) {
    using exchange::RejectReason;
    RefOutcome out;
    if (price < 1 || price > exchange::kMaxPrice) return reject(RejectReason::InvalidPrice);
    if (qty < 1 || qty > exchange::kMaxQuantity) return reject(RejectReason::InvalidQuantity);
    if (!accounts_.contains(trader)) return reject(RejectReason::UnknownTrader);

    Cents committed_cash = 0;
    Shares committed_shares = 0;
    for (const auto& o : resting_) {
      if (o.trader_id != trader) continue;
      if (o.side == Side::Bid) committed_cash += o.price * o.quantity;
      else committed_shares += o.quantity;
    }
    if (side == Side::Bid && price * qty + committed_cash > accounts_[trader].cash)
      return reject(RejectReason::InsufficientCash);
    if (side == Side::Ask && qty + committed_shares > accounts_[trader].shares)
      return reject(RejectReason::InsufficientShares);

    // Dry run on copies; commit only if no own order would be hit.
    auto book = resting_;
    auto accounts = accounts_;
    exchange::Order incoming{next_id_, trader, side, price, qty, next_seq_};
    std::vector<RefFill> fills;
    while (incoming.quantity > 0) {
      std::optional<std::size_t> best;
      for (std::size_t i = 0; i < book.size(); ++i) {
        const auto& o = book[i];
        if (o.side == side) continue;
        const bool crossing = side == Side::Bid ? price >= o.price : price <= o.price;
        if (!crossing) continue;
        if (!best) {
          best = i;
          continue;
        }
        const auto& b = book[*best];
        const bool better_price = side == Side::Bid ? o.price < b.price : o.price > b.price;
        if (better_price || (o.price == b.price && o.submitted_seq < b.submitted_seq)) best = i;
      }
      if (!best) break;
      auto& r = book[*best];
      if (r.trader_id == trader) return reject(RejectReason::SelfCross);
      const Shares q = std::min(r.quantity, incoming.quantity);
      const TraderId buyer = side == Side::Bid ? trader : r.trader_id;
      const TraderId seller = side == Side::Bid ? r.trader_id : trader;
      accounts[buyer].cash -= r.price * q;
      accounts[buyer].shares += q;
      accounts[seller].cash += r.price * q;
      accounts[seller].shares -= q;
      fills.push_back(RefFill{r.price, q, buyer, seller, r.order_id, incoming.order_id});
      r.quantity -= q;
      incoming.quantity -= q;
      if (r.quantity == 0) book.erase(book.begin() + static_cast<std::ptrdiff_t>(*best));
    }
    if (incoming.quantity > 0) book.push_back(incoming);
    resting_ = std::move(book);
    accounts_ = std::move(accounts);
    ++next_id_;
    ++next_seq_;
    out.accepted = true;
    out.order_id = incoming.order_id;
    out.fills = std::move(fills);
    return out;
  }

  exchange::CancelResult cancel(TraderId trader, OrderId id) {
    for (auto it = resting_.begin(); it != resting_.end(); ++it) {
      if (it->order_id != id) continue;
      if (it->trader_id != trader) return exchange::CancelResult::NotOwner;
      resting_.erase(it);
      return exchange::CancelResult::Cancelled;
    }
    return exchange::CancelResult::NotFound;
  }

  const std::map<TraderId, RefAccount>& accounts() const { return accounts_; }
  const std::vector<exchange::Order>& resting() const { return resting_; }

 private:
  static RefOutcome reject(exchange::RejectReason r) {
    RefOutcome o;
    o.reject = r;
    return o;
  }

  std::map<TraderId, RefAccount> accounts_;
  std::vector<exchange::Order> resting_;
  OrderId next_id_ = 1;
  Seq next_seq_ = 1;
};

}  // namespace bubblelab::testing
