#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bubblelab/common/rng.hpp"
#include "bubblelab/exchange/order_book.hpp"
#include "bubblelab/session/clock.hpp"
#include "bubblelab/session/config.hpp"
#include "bubblelab/session/events.hpp"
#include "bubblelab/session/questionnaire.hpp"

namespace bubblelab::session {

class SessionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class WrongPhase : public SessionError {
 public:
  using SessionError::SessionError;
};

class InvalidQuestionnaire : public SessionError {
 public:
  using SessionError::SessionError;
};

class SessionNotEnded : public SessionError {
 public:
  using SessionError::SessionError;
};

class SessionAborted : public SessionError {
 public:
  using SessionError::SessionError;
};

enum class Phase { PreTrade, Trading, Settled, Ended, Aborted };

struct PeriodState {
  enum class Phase { Trading, Settled };
  int t = 0;
  Phase phase = Phase::Trading;
  double clock_remaining = 0.0;
  std::optional<Cents> dividend_realized;  // present iff Settled
};

/// What each trader sees on the end-of-period summary screen.
struct TraderSummary {
  TraderId trader_id = 0;
  int trades = 0;
  Cents dividend_income = 0;
  Cents cash = 0;
  Shares shares = 0;

  friend bool operator==(const TraderSummary&, const TraderSummary&) = default;
};

nlohmann::ordered_json to_payload(const TraderSummary& s);
TraderSummary summary_from_payload(const nlohmann::json& j);

struct PeriodResult {
  int period = 0;
  std::vector<exchange::Trade> trades;
  Cents dividend = 0;
  std::vector<TraderSummary> summaries;
};

struct PostCommand {
  exchange::OrderRequest request;
};

struct CancelCommand {
  TraderId trader_id = 0;
  OrderId order_id = 0;
};

using Command = std::variant<PostCommand, CancelCommand>;
using CommandResult = std::variant<exchange::PostOutcome, exchange::CancelResult>;

/// show-up fee plus the cash balance; shares expire worthless after the last period.
Cents final_payout(const exchange::TraderAccount& account, const SessionConfig& config);

/// One experimental session: the single writer for its book, accounts and
/// event log. Every state change is appended to the log before the call returns.
class Session {
 public:
  Session(SessionConfig config, const Clock& clock);

  const SessionConfig& config() const noexcept { return config_; }
  const EventLog& log() const noexcept { return log_; }
  const exchange::Accounts& accounts() const noexcept { return accounts_; }
  const exchange::OrderBook& book() const noexcept { return book_; }
  const Clock& clock() const noexcept { return clock_; }
  Phase phase() const noexcept { return phase_; }
  bool ended() const noexcept { return phase_ == Phase::Ended; }

  /// 0 before the first period opens.
  int current_period() const noexcept { return period_; }
  PeriodState period_state() const;
  double period_deadline() const;
  double seconds_into_period() const;
  std::optional<Cents> last_trade_price() const noexcept { return last_trade_price_; }

  // Pre-trade questionnaires. Throw WrongPhase or InvalidQuestionnaire.
  Seq record_questionnaire(const DeclaredPrices& prices);
  Seq record_questionnaire(const AssessmentResponse& response);
  bool has_declared_prices(TraderId trader) const { return declared_.contains(trader); }
  std::size_t assessment_count(TraderId trader) const;

  void open_period();
  /// Rejected with WrongPhase outside a trading period.
  exchange::PostOutcome post_order(const exchange::OrderRequest& request);
  exchange::CancelResult cancel_order(TraderId trader, OrderId order_id);
  CommandResult apply(const Command& command);
  /// Expires resting orders, draws and pays the dividend, logs the summary.
  PeriodResult close_period();

  /// Logs payouts and ends the session. Requires every period to be settled.
  void finish();
  void abort(const std::string& reason);
  Cents final_payout(TraderId trader) const;

 private:
  void require_trader(TraderId trader) const;

  SessionConfig config_;
  const Clock& clock_;
  EventLog log_;
  exchange::Accounts accounts_;
  exchange::OrderBook book_;
  Rng dividend_rng_;
  Phase phase_ = Phase::PreTrade;
  int period_ = 0;
  double period_opened_at_ = 0.0;
  std::optional<Cents> last_dividend_;
  std::optional<Cents> last_trade_price_;
  std::vector<exchange::Trade> period_trades_;
  std::set<TraderId> declared_;
  std::set<std::pair<TraderId, std::string>> assessed_;
};

}  // namespace bubblelab::session
