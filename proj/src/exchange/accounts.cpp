#include "bubblelab/exchange/accounts.hpp"

#include <stdexcept>
#include <string>

namespace bubblelab::exchange {

Accounts::Accounts(int n_traders, Cents cash, Shares shares) {
  for (TraderId id = 1; id <= n_traders; ++id) accounts_.emplace(id, TraderAccount{id, cash, shares, 0, 0});
}

TraderAccount& Accounts::at(TraderId id) {
  auto it = accounts_.find(id);
  if (it == accounts_.end()) throw std::out_of_range("unknown trader " + std::to_string(id));
  return it->second;
}

const TraderAccount& Accounts::at(TraderId id) const {
  auto it = accounts_.find(id);
  if (it == accounts_.end()) throw std::out_of_range("unknown trader " + std::to_string(id));
  return it->second;
}

Cents Accounts::total_cash() const {
  Cents sum = 0;
  for (const auto& [id, a] : accounts_) sum += a.cash;
  return sum;
}

Shares Accounts::total_shares() const {
  Shares sum = 0;
  for (const auto& [id, a] : accounts_) sum += a.shares;
  return sum;
}

}  // namespace bubblelab::exchange
