#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bubblelab/exchange/accounts.hpp"
#include "bubblelab/exchange/order.hpp"
#include "bubblelab/session/config.hpp"
#include "bubblelab/session/events.hpp"
#include "bubblelab/session/questionnaire.hpp"

namespace bubblelab::session {

class CorruptLog : public std::runtime_error {
 public:
  CorruptLog(Seq seq, const std::string& what)
      : std::runtime_error("event " + std::to_string(seq) + ": " + what), seq_(seq) {}
  Seq seq() const noexcept { return seq_; }

 private:
  Seq seq_;
};

/// State rebuilt from a log by re-executing it.
struct ReplayResult {
  SessionConfig config;
  exchange::Accounts accounts;
  std::vector<exchange::Trade> trades;  // in log order
  std::map<int, Cents> dividends;       // per settled period
  std::map<TraderId, Cents> payouts;
  std::vector<DeclaredPrices> declared;
  std::vector<AssessmentResponse> assessments;
  int periods_settled = 0;
  bool ended = false;
  bool aborted = false;
};

/// Re-runs every order through a fresh book, redraws dividends from the
/// logged seed and checks each logged trade, dividend, summary and payout
/// against the recomputation. Throws CorruptLog at the first mismatch.
ReplayResult replay(const std::vector<EventRecord>& records);

/// Canonical serialized account state (one JSON object, keys in trader order).
std::string serialize_accounts(const exchange::Accounts& accounts);

/// CSV with header session_id,period,trade_seq,price_cents,quantity,buyer_id,seller_id,seconds_into_period.
void write_trades_csv(const std::vector<EventRecord>& records, std::ostream& out);

}  // namespace bubblelab::session
