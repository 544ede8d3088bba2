#include "bubblelab/agents/simulation.hpp"

#include <algorithm>
#include <fstream>

#include "bubblelab/session/schedule.hpp"
#include "bubblelab/session/scripted.hpp"

namespace bubblelab::agents {

using session::Command;
using session::Session;

namespace {

constexpr std::uint64_t kSchedulerStream = 0;
constexpr std::uint64_t kQuestionnaireStream = 1;
constexpr std::uint64_t kAgentStreamBase = 100;
constexpr int kAssessmentItems = 3;

}  // namespace

bool is_preset(std::string_view name) noexcept {
  return name == "all-fundamentalist" || name == "all-zic" || name == "speculator-majority";
}

Roster preset_roster(std::string_view name, int n_traders) {
  if (n_traders < 1) throw RosterError("roster needs at least one seat");
  const auto n = static_cast<std::size_t>(n_traders);
  if (name == "all-fundamentalist") return Roster(n, AgentPolicy::fundamentalist());
  if (name == "all-zic") return Roster(n, AgentPolicy::zic());
  if (name == "speculator-majority") {
    Roster r(n - 1, AgentPolicy::anchor_speculator(0.9));
    r.push_back(AgentPolicy::fundamentalist());
    return r;
  }
  throw RosterError("unknown roster preset: " + std::string(name));
}

Roster roster_from_json(const nlohmann::json& j) {
  const nlohmann::json& agents = j.is_object() ? j.at("agents") : j;
  if (!agents.is_array() || agents.empty()) throw RosterError("roster must list agents");
  Roster roster(agents.size());
  std::vector<bool> seen(agents.size(), false);
  try {
    for (const auto& a : agents) {
      const auto kind = parse_policy_kind(a.at("kind").get<std::string>());
      if (!kind) throw RosterError("unknown agent kind: " + a.at("kind").get<std::string>());
      AgentPolicy p = *kind == PolicyKind::Zic              ? AgentPolicy::zic()
                      : *kind == PolicyKind::AnchorSpeculator ? AgentPolicy::anchor_speculator()
                                                              : AgentPolicy::fundamentalist();
      p.noise = a.value("noise", p.noise);
      p.margin = a.value("margin", p.margin);
      p.concession = a.value("concession", p.concession);
      p.anchor_weight = a.value("anchor_weight", p.anchor_weight);
      p.markup = a.value("markup", p.markup);
      p.validate();
      const int seat = a.at("seat").get<int>();
      if (seat < 1 || seat > static_cast<int>(roster.size())) {
        throw RosterError("seat out of range: " + std::to_string(seat));
      }
      if (seen[seat - 1]) throw RosterError("seat listed twice: " + std::to_string(seat));
      seen[seat - 1] = true;
      roster[seat - 1] = p;
    }
  } catch (const nlohmann::json::exception& e) {
    throw RosterError(std::string("bad roster: ") + e.what());
  } catch (const PolicyError& e) {
    throw RosterError(std::string("bad roster: ") + e.what());
  }
  return roster;
}

Roster load_roster(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RosterError("cannot open roster " + path.string());
  try {
    return roster_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw RosterError("bad roster " + path.string() + ": " + e.what());
  }
}

nlohmann::ordered_json to_json(const Roster& roster) {
  nlohmann::ordered_json agents = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < roster.size(); ++i) {
    const auto& p = roster[i];
    agents.push_back({{"seat", i + 1},
                      {"kind", std::string(to_string(p.kind))},
                      {"noise", p.noise},
                      {"margin", p.margin},
                      {"concession", p.concession},
                      {"anchor_weight", p.anchor_weight},
                      {"markup", p.markup}});
  }
  return {{"agents", agents}};
}

Roster resolve_roster(const std::string& preset_or_path, int n_traders) {
  if (is_preset(preset_or_path)) return preset_roster(preset_or_path, n_traders);
  return load_roster(preset_or_path);
}

AgentSource::AgentSource(session::VirtualClock& clock, const Roster& roster, std::vector<Rng>& agent_rngs,
                         Rng& scheduler, int ticks)
    : clock_(clock), roster_(roster), rngs_(agent_rngs), scheduler_(scheduler), ticks_(ticks) {}

void AgentSource::on_period_open(const Session&) {
  tick_ = 0;
  turn_ = 0;
  order_.clear();
  pending_.clear();
  deciding_.reset();
}

MarketView AgentSource::view_of(const Session& session, TraderId trader) const {
  const auto& config = session.config();
  const auto& book = session.book();
  const auto& account = session.accounts().at(trader);
  MarketView v;
  v.period = session.current_period();
  v.seconds_remaining = session.period_deadline() - session.clock().now();
  v.intrinsic = session::intrinsic_value(config, v.period);
  v.initial_intrinsic = session::intrinsic_value(config, 1);
  v.best_bid = book.best_bid();
  v.best_ask = book.best_ask();
  v.last_trade_price = session.last_trade_price();
  v.cash = account.cash;
  v.shares = account.shares;
  v.own_orders = book.orders_of(trader);
  return v;
}

std::optional<Command> AgentSource::next(const Session& session, double deadline) {
  const double start = deadline - session.config().period_seconds;
  for (;;) {
    if (!pending_.empty()) {
      Command c = pending_.front();
      pending_.pop_front();
      return c;
    }
    if (deciding_) {
      const TraderId trader = *deciding_;
      deciding_.reset();
      const auto intent = decide(roster_[trader - 1], view_of(session, trader), rngs_[trader - 1]);
      if (intent) return session::PostCommand{{trader, intent->side, intent->price, intent->quantity}};
      continue;
    }
    if (turn_ >= order_.size()) {
      if (tick_ >= ticks_) {
        clock_.set(deadline);
        return std::nullopt;
      }
      order_.resize(roster_.size());
      for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<TraderId>(i + 1);
      for (std::size_t i = order_.size(); i > 1; --i) {
        std::swap(order_[i - 1], order_[scheduler_.uniform_int(0, static_cast<std::int64_t>(i) - 1)]);
      }
      turn_ = 0;
      ++tick_;
      clock_.set(start + session.config().period_seconds * tick_ / (ticks_ + 1));
    }
    const TraderId trader = order_[turn_++];
    for (const auto& o : session.book().orders_of(trader)) pending_.push_back(session::CancelCommand{trader, o.order_id});
    deciding_ = trader;
  }
}

namespace {

session::QuestionnaireSubmission agent_questionnaire(const session::SessionConfig& config, TraderId trader, Rng& rng) {
  session::QuestionnaireSubmission q;
  q.prices.trader_id = trader;
  for (int t = 1; t <= config.n_periods; ++t) {
    q.prices.declared_value_per_period.push_back(
        std::max<Cents>(0, session::intrinsic_value(config, t) + rng.uniform_int(-5, 5)));
  }
  for (auto group : {session::ItemGroup::SelfPrecision, session::ItemGroup::OthersPrecision}) {
    const int base = static_cast<int>(rng.uniform_int(3, 6));
    const std::string prefix = group == session::ItemGroup::SelfPrecision ? "self_" : "others_";
    for (int i = 1; i <= kAssessmentItems; ++i) {
      const int rating = std::clamp(base + static_cast<int>(rng.uniform_int(-1, 1)), session::kLikertMin,
                                    session::kLikertMax);
      q.assessments.push_back({trader, prefix + std::to_string(i), group, rating});
    }
  }
  return q;
}

}  // namespace

std::vector<session::EventRecord> run_simulation(session::SessionConfig config, const Roster& roster,
                                                 std::uint64_t seed, const SimulationOptions& options) {
  if (roster.size() != static_cast<std::size_t>(config.n_traders)) {
    throw RosterSizeMismatch(roster.size(), config.n_traders);
  }
  for (const auto& p : roster) p.validate();
  config.rng_seed = seed;

  session::VirtualClock clock;
  Session session(config, clock);
  Rng scheduler(mix_seed(seed, kSchedulerStream));
  std::vector<Rng> rngs;
  for (std::size_t i = 0; i < roster.size(); ++i) rngs.emplace_back(mix_seed(seed, kAgentStreamBase + i));

  if (options.questionnaires) {
    Rng qrng(mix_seed(seed, kQuestionnaireStream));
    for (TraderId t = 1; t <= config.n_traders; ++t) {
      session::record_submission(session, agent_questionnaire(config, t, qrng));
    }
  }
  AgentSource source(clock, roster, rngs, scheduler, options.ticks);
  for (int t = 1; t <= config.n_periods; ++t) session::run_period(session, source);
  session.finish();
  return session.log().records();
}

}  // namespace bubblelab::agents
