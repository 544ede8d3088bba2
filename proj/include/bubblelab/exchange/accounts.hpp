#pragma once

#include <map>
#include <vector>

#include "bubblelab/common/types.hpp"

namespace bubblelab::exchange {

struct TraderAccount {
  TraderId trader_id = 0;
  Cents cash = 0;
  Shares shares = 0;
  Cents dividend_income = 0;
  Cents trading_pnl = 0;  // sale proceeds minus purchase costs

  friend bool operator==(const TraderAccount&, const TraderAccount&) = default;
};

/// Cash and share balances for every seat of one session, keyed by trader id.
class Accounts {
 public:
  Accounts() = default;
  Accounts(int n_traders, Cents cash, Shares shares);

  bool contains(TraderId id) const { return accounts_.contains(id); }
  TraderAccount& at(TraderId id);
  const TraderAccount& at(TraderId id) const;

  Cents total_cash() const;
  Shares total_shares() const;
  std::size_t size() const { return accounts_.size(); }

  auto begin() const { return accounts_.begin(); }
  auto end() const { return accounts_.end(); }

  friend bool operator==(const Accounts&, const Accounts&) = default;

 private:
  std::map<TraderId, TraderAccount> accounts_;
};

/// Value committed by a trader's resting orders.
struct Exposure {
  Cents bid_value = 0;    // sum of price * quantity over resting bids
  Shares ask_quantity = 0;

  friend bool operator==(const Exposure&, const Exposure&) = default;
};

}  // namespace bubblelab::exchange
