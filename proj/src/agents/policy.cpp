#include "bubblelab/agents/policy.hpp"

#include <cmath>

namespace bubblelab::agents {

std::string_view to_string(PolicyKind k) noexcept {
  switch (k) {
    case PolicyKind::Fundamentalist: return "FUNDAMENTALIST";
    case PolicyKind::Zic: return "ZIC";
    case PolicyKind::AnchorSpeculator: return "ANCHOR_SPECULATOR";
  }
  return "?";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view s) noexcept {
  if (s == "FUNDAMENTALIST") return PolicyKind::Fundamentalist;
  if (s == "ZIC") return PolicyKind::Zic;
  if (s == "ANCHOR_SPECULATOR") return PolicyKind::AnchorSpeculator;
  return std::nullopt;
}

AgentPolicy AgentPolicy::fundamentalist() { return AgentPolicy{}; }

AgentPolicy AgentPolicy::zic() {
  AgentPolicy p;
  p.kind = PolicyKind::Zic;
  return p;
}

AgentPolicy AgentPolicy::anchor_speculator(double anchor_weight, Cents markup) {
  AgentPolicy p;
  p.kind = PolicyKind::AnchorSpeculator;
  p.noise = 2;
  p.anchor_weight = anchor_weight;
  p.markup = markup;
  return p;
}

void AgentPolicy::validate() const {
  auto in = [](Cents v) { return v >= 0 && v <= 10000; };
  if (!in(noise)) throw PolicyError("noise must be in [0, 10000]");
  if (!in(margin)) throw PolicyError("margin must be in [0, 10000]");
  if (!in(markup)) throw PolicyError("markup must be in [0, 10000]");
  if (!(concession >= 0.0 && concession <= 1.0)) throw PolicyError("concession must be in [0, 1]");
  if (!(anchor_weight >= 0.0 && anchor_weight <= 1.0)) throw PolicyError("anchor_weight must be in [0, 1]");
}

namespace {

std::optional<OrderIntent> feasible(const MarketView& view, Side side, Cents price) {
  if (price < 1 || price > exchange::kMaxPrice) return std::nullopt;
  if (side == Side::Bid && price > view.cash) return std::nullopt;
  if (side == Side::Ask && view.shares < 1) return std::nullopt;
  return OrderIntent{side, price, 1};
}

Side random_side(const MarketView& view, Rng& rng) {
  if (view.shares < 1) return Side::Bid;
  if (view.cash < 1) return Side::Ask;
  return rng.uniform_int(0, 1) == 0 ? Side::Bid : Side::Ask;
}

std::optional<OrderIntent> fundamentalist(const AgentPolicy& p, const MarketView& v, Rng& rng) {
  const Cents f = v.intrinsic;
  if (v.best_ask && *v.best_ask <= f && *v.best_ask <= v.cash) return feasible(v, Side::Bid, *v.best_ask);
  if (v.best_bid && v.shares > 0) {
    if (*v.best_bid >= f) return feasible(v, Side::Ask, *v.best_bid);
    if (*v.best_bid >= f - p.noise && rng.uniform01() < p.concession) return feasible(v, Side::Ask, *v.best_bid);
  }
  const Side side = random_side(v, rng);
  const Cents u = rng.uniform_int(0, p.noise);
  const Cents price = side == Side::Bid ? f - p.margin - u : f + p.margin + u;
  return feasible(v, side, price);
}

std::optional<OrderIntent> zic(const MarketView& v, Rng& rng) {
  const Side side = rng.uniform_int(0, 1) == 0 ? Side::Bid : Side::Ask;
  const Cents price = rng.uniform_int(1, std::max<Cents>(1, 2 * v.initial_intrinsic));
  return feasible(v, side, price);
}

std::optional<OrderIntent> speculator(const AgentPolicy& p, const MarketView& v, Rng& rng) {
  const double f = static_cast<double>(v.intrinsic);
  const double anchor = v.last_trade_price ? static_cast<double>(*v.last_trade_price) : f;
  const double r = p.anchor_weight * anchor + (1.0 - p.anchor_weight) * f;
  const Side side = random_side(v, rng);
  const Cents price = static_cast<Cents>(std::llround(r)) + p.markup + rng.uniform_int(-p.noise, p.noise);
  return feasible(v, side, price);
}

}  // namespace

std::optional<OrderIntent> decide(const AgentPolicy& policy, const MarketView& view, Rng& rng) {
  switch (policy.kind) {
    case PolicyKind::Fundamentalist: return fundamentalist(policy, view, rng);
    case PolicyKind::Zic: return zic(view, rng);
    case PolicyKind::AnchorSpeculator: return speculator(policy, view, rng);
  }
  return std::nullopt;
}

}  // namespace bubblelab::agents
