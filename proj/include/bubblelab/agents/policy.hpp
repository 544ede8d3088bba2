#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "bubblelab/common/rng.hpp"
#include "bubblelab/common/types.hpp"
#include "bubblelab/exchange/order.hpp"

namespace bubblelab::agents {

class PolicyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// What an agent may see when it acts: public market data and its own account.
struct MarketView {
  int period = 0;
  double seconds_remaining = 0.0;
  Cents intrinsic = 0;          // f_t
  Cents initial_intrinsic = 0;  // f_1
  std::optional<Cents> best_bid;
  std::optional<Cents> best_ask;
  std::optional<Cents> last_trade_price;  // carries over between periods
  Cents cash = 0;
  Shares shares = 0;
  std::vector<exchange::Order> own_orders;
};

enum class PolicyKind { Fundamentalist, Zic, AnchorSpeculator };

std::string_view to_string(PolicyKind k) noexcept;
std::optional<PolicyKind> parse_policy_kind(std::string_view s) noexcept;

/// Parameters are shared across kinds; each kind reads the ones it documents.
struct AgentPolicy {
  PolicyKind kind = PolicyKind::Fundamentalist;
  Cents noise = 4;             // sigma, 0..10000; all kinds except ZIC
  Cents margin = 0;            // epsilon, 0..10000; FUNDAMENTALIST quotes stay this far from f_t
  double concession = 0.005;   // 0..1; FUNDAMENTALIST chance of selling into a bid within sigma below f_t
  double anchor_weight = 0.9;  // lambda, 0..1; ANCHOR_SPECULATOR
  Cents markup = 5;            // m, 0..10000; ANCHOR_SPECULATOR

  static AgentPolicy fundamentalist();
  static AgentPolicy zic();
  static AgentPolicy anchor_speculator(double anchor_weight = 0.9, Cents markup = 5);

  void validate() const;  // throws PolicyError

  friend bool operator==(const AgentPolicy&, const AgentPolicy&) = default;
};

struct OrderIntent {
  Side side = Side::Bid;
  Cents price = 0;
  Shares quantity = 1;

  friend bool operator==(const OrderIntent&, const OrderIntent&) = default;
};

/// One decision. The simulation withdraws the agent's resting orders before
/// the intent is posted, so feasibility is judged against full balances.
/// Infeasible intents come back as nullopt (hold).
///
/// FUNDAMENTALIST: buys any ask at or below f_t, sells into any bid at or above f_t,
/// occasionally concedes to a bid within sigma below f_t, and otherwise quotes
/// a bid at f_t - epsilon - U{0..sigma} or an ask at f_t + epsilon + U{0..sigma}.
/// It never bids above f_t.
/// ZIC: random side, price U{1..2 f_1}.
/// ANCHOR_SPECULATOR: r = lambda * (last trade, else f_t) + (1 - lambda) * f_t;
/// quotes either side at round(r) + m + U{-sigma..sigma}.
std::optional<OrderIntent> decide(const AgentPolicy& policy, const MarketView& view, Rng& rng);

}  // namespace bubblelab::agents
