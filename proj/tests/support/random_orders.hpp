#pragma once

// Random command sequences for the order-book property tests.

#include <variant>
#include <vector>

#include "bubblelab/common/rng.hpp"
#include "bubblelab/exchange/order.hpp"

namespace bubblelab::testing {

struct RandomPost {
  exchange::OrderRequest request;
};
struct RandomCancel {
  TraderId trader = 0;
  OrderId order_id = 0;  // may name a missing or foreign order
};
using RandomCommand = std::variant<RandomPost, RandomCancel>;

/// Up to max_len commands over n_traders, prices clustered so orders cross often.
inline std::vector<RandomCommand> random_sequence(Rng& rng, int max_len, int n_traders) {
  std::vector<RandomCommand> out;
  const auto len = rng.uniform_int(1, max_len);
  for (std::int64_t i = 0; i < len; ++i) {
    const auto trader = static_cast<TraderId>(rng.uniform_int(1, n_traders));
    if (rng.uniform_int(0, 9) == 0) {
      out.push_back(RandomCancel{trader, rng.uniform_int(1, static_cast<std::int64_t>(i) + 1)});
      continue;
    }
    const Side side = rng.uniform_int(0, 1) == 0 ? Side::Bid : Side::Ask;
    // Occasionally invalid prices exercise the rejection path.
    const Cents price = rng.uniform_int(0, 49) == 0 ? 0 : rng.uniform_int(90, 110);
    const Shares qty = rng.uniform_int(1, 3);
    out.push_back(RandomPost{{trader, side, price, qty}});
  }
  return out;
}

}  // namespace bubblelab::testing
