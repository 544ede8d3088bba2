#include "bubblelab/session/session.hpp"

#include <algorithm>

#include "bubblelab/session/schedule.hpp"

namespace bubblelab::session {

nlohmann::ordered_json to_payload(const TraderSummary& s) {
  nlohmann::ordered_json j;
  j["trader_id"] = s.trader_id;
  j["trades"] = s.trades;
  j["dividend_income"] = s.dividend_income;
  j["cash"] = s.cash;
  j["shares"] = s.shares;
  return j;
}

TraderSummary summary_from_payload(const nlohmann::json& j) {
  return TraderSummary{j.at("trader_id").get<TraderId>(), j.at("trades").get<int>(),
                       j.at("dividend_income").get<Cents>(), j.at("cash").get<Cents>(),
                       j.at("shares").get<Shares>()};
}

Cents final_payout(const exchange::TraderAccount& account, const SessionConfig& config) {
  return account.cash + config.showup_fee;
}

Session::Session(SessionConfig config, const Clock& clock)
    : config_(std::move(config)),
      clock_(clock),
      log_(config_.session_id),
      accounts_(config_.n_traders, config_.endowment_cash, config_.endowment_shares),
      dividend_rng_(config_.rng_seed) {
  config_.validate();
  nlohmann::ordered_json payload;
  payload["config"] = to_json(config_);
  log_.append(EventKind::SessionStart, 0, clock_.now(), std::move(payload));
}

PeriodState Session::period_state() const {
  PeriodState s;
  s.t = period_;
  if (phase_ == Phase::Trading) {
    s.phase = PeriodState::Phase::Trading;
    s.clock_remaining = std::max(0.0, period_deadline() - clock_.now());
  } else {
    s.phase = PeriodState::Phase::Settled;
    s.dividend_realized = last_dividend_;
  }
  return s;
}

double Session::period_deadline() const { return period_opened_at_ + config_.period_seconds; }

double Session::seconds_into_period() const { return clock_.now() - period_opened_at_; }

void Session::require_trader(TraderId trader) const {
  if (!accounts_.contains(trader)) throw InvalidQuestionnaire("unknown trader " + std::to_string(trader));
}

Seq Session::record_questionnaire(const DeclaredPrices& prices) {
  if (phase_ != Phase::PreTrade) throw WrongPhase("questionnaires are only accepted before trading");
  require_trader(prices.trader_id);
  if (prices.declared_value_per_period.size() != static_cast<std::size_t>(config_.n_periods))
    throw InvalidQuestionnaire("expected " + std::to_string(config_.n_periods) + " declared values, got " +
                               std::to_string(prices.declared_value_per_period.size()));
  if (std::ranges::any_of(prices.declared_value_per_period, [](Cents v) { return v < 0; }))
    throw InvalidQuestionnaire("declared values must be >= 0");
  if (declared_.contains(prices.trader_id)) throw InvalidQuestionnaire("price questionnaire already submitted");
  declared_.insert(prices.trader_id);
  return log_.append(EventKind::QuestionnaireResponse, 0, clock_.now(), to_payload(prices));
}

Seq Session::record_questionnaire(const AssessmentResponse& response) {
  if (phase_ != Phase::PreTrade) throw WrongPhase("questionnaires are only accepted before trading");
  require_trader(response.trader_id);
  if (response.rating < kLikertMin || response.rating > kLikertMax)
    throw InvalidQuestionnaire("rating " + std::to_string(response.rating) + " outside " +
                               std::to_string(kLikertMin) + ".." + std::to_string(kLikertMax));
  if (response.item_id.empty()) throw InvalidQuestionnaire("item_id must not be empty");
  if (!assessed_.emplace(response.trader_id, response.item_id).second)
    throw InvalidQuestionnaire("item " + response.item_id + " already answered");
  return log_.append(EventKind::QuestionnaireResponse, 0, clock_.now(), to_payload(response));
}

std::size_t Session::assessment_count(TraderId trader) const {
  return static_cast<std::size_t>(
      std::ranges::count_if(assessed_, [&](const auto& entry) { return entry.first == trader; }));
}

void Session::open_period() {
  if (phase_ != Phase::PreTrade && phase_ != Phase::Settled) throw WrongPhase("cannot open a period now");
  if (period_ >= config_.n_periods) throw WrongPhase("all periods have been played");
  ++period_;
  phase_ = Phase::Trading;
  period_opened_at_ = clock_.now();
  period_trades_.clear();
  last_dividend_.reset();
  book_.reset(period_);
  nlohmann::ordered_json payload;
  payload["period_seconds"] = config_.period_seconds;
  payload["server_time"] = period_opened_at_;
  payload["intrinsic_value"] = intrinsic_value(config_, period_);
  payload["max_present_value"] = max_present_value(config_, period_);
  log_.append(EventKind::PeriodStart, period_, period_opened_at_, std::move(payload));
}

exchange::PostOutcome Session::post_order(const exchange::OrderRequest& request) {
  if (phase_ != Phase::Trading) return exchange::PostOutcome::rejected(exchange::RejectReason::WrongPhase);
  const double now = clock_.now();
  auto outcome = book_.post(request, accounts_, now - period_opened_at_);
  if (!outcome.accepted()) return outcome;

  const exchange::Order posted{outcome.order_id, request.trader_id, request.side,
                               request.price,    request.quantity,  outcome.submitted_seq};
  log_.append(EventKind::OrderPosted, period_, now, order_payload(posted));
  for (const auto& trade : outcome.trades) {
    log_.append(EventKind::Trade, period_, now, trade_payload(trade));
    period_trades_.push_back(trade);
    last_trade_price_ = trade.price;
  }
  return outcome;
}

exchange::CancelResult Session::cancel_order(TraderId trader, OrderId order_id) {
  if (phase_ != Phase::Trading) return exchange::CancelResult::WrongPhase;
  const auto result = book_.cancel(trader, order_id);
  if (result == exchange::CancelResult::Cancelled) {
    nlohmann::ordered_json payload;
    payload["order_id"] = order_id;
    payload["trader_id"] = trader;
    log_.append(EventKind::OrderCancelled, period_, clock_.now(), std::move(payload));
  }
  return result;
}

CommandResult Session::apply(const Command& command) {
  return std::visit(
      [this](const auto& c) -> CommandResult {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, PostCommand>)
          return post_order(c.request);
        else
          return cancel_order(c.trader_id, c.order_id);
      },
      command);
}

PeriodResult Session::close_period() {
  if (phase_ != Phase::Trading) throw WrongPhase("no period is open");
  const double now = clock_.now();
  book_.reset(period_);

  const Cents dividend = draw_dividend(dividend_rng_, config_);
  nlohmann::ordered_json credits = nlohmann::ordered_json::array();
  std::map<TraderId, Cents> income;
  for (const auto& [id, account] : accounts_) {
    const Cents amount = dividend * account.shares;
    income[id] = amount;
    nlohmann::ordered_json c;
    c["trader_id"] = id;
    c["shares"] = account.shares;
    c["amount"] = amount;
    credits.push_back(std::move(c));
  }
  for (const auto& [id, amount] : income) {
    auto& account = accounts_.at(id);
    account.cash += amount;
    account.dividend_income += amount;
  }
  nlohmann::ordered_json div;
  div["dividend_per_share"] = dividend;
  div["credits"] = std::move(credits);
  log_.append(EventKind::Dividend, period_, now, std::move(div));

  PeriodResult result;
  result.period = period_;
  result.trades = period_trades_;
  result.dividend = dividend;
  nlohmann::ordered_json summaries = nlohmann::ordered_json::array();
  for (const auto& [id, account] : accounts_) {
    const int n = static_cast<int>(std::ranges::count_if(
        period_trades_, [id = id](const exchange::Trade& t) { return t.buyer_id == id || t.seller_id == id; }));
    TraderSummary s{id, n, income[id], account.cash, account.shares};
    summaries.push_back(to_payload(s));
    result.summaries.push_back(s);
  }
  nlohmann::ordered_json end;
  end["dividend_per_share"] = dividend;
  end["trade_count"] = period_trades_.size();
  end["summaries"] = std::move(summaries);
  log_.append(EventKind::PeriodEnd, period_, now, std::move(end));

  phase_ = Phase::Settled;
  last_dividend_ = dividend;
  return result;
}

void Session::finish() {
  if (phase_ != Phase::Settled || period_ != config_.n_periods)
    throw WrongPhase("session can only finish after the last period settles");
  const double now = clock_.now();
  for (const auto& [id, account] : accounts_) {
    nlohmann::ordered_json p;
    p["trader_id"] = id;
    p["cash"] = account.cash;
    p["showup_fee"] = config_.showup_fee;
    p["payout"] = session::final_payout(account, config_);
    log_.append(EventKind::Payout, 0, now, std::move(p));
  }
  nlohmann::ordered_json end;
  end["aborted"] = false;
  log_.append(EventKind::SessionEnd, 0, now, std::move(end));
  phase_ = Phase::Ended;
}

void Session::abort(const std::string& reason) {
  if (phase_ == Phase::Ended || phase_ == Phase::Aborted) return;
  book_.reset(period_);
  nlohmann::ordered_json end;
  end["aborted"] = true;
  end["reason"] = reason;
  log_.append(EventKind::SessionEnd, period_, clock_.now(), std::move(end));
  phase_ = Phase::Aborted;
}

Cents Session::final_payout(TraderId trader) const {
  if (phase_ != Phase::Ended) throw SessionNotEnded("payouts are only known once the session has ended");
  return session::final_payout(accounts_.at(trader), config_);
}

}  // namespace bubblelab::session
