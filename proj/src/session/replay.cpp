#include "bubblelab/session/replay.hpp"

#include <charconv>
#include <deque>
#include <ostream>

#include "bubblelab/common/rng.hpp"
#include "bubblelab/exchange/order_book.hpp"
#include "bubblelab/session/schedule.hpp"
#include "bubblelab/session/session.hpp"

namespace bubblelab::session {

namespace {

class Replayer {
 public:
  ReplayResult run(const std::vector<EventRecord>& records) {
    if (records.empty()) throw CorruptLog(0, "empty log");
    Seq expected_seq = 1;
    for (const auto& r : records) {
      if (r.seq != expected_seq) throw CorruptLog(r.seq, "expected seq " + std::to_string(expected_seq));
      ++expected_seq;
      if (result_.ended || result_.aborted) throw CorruptLog(r.seq, "event after SESSION_END");
      try {
        apply(r);
      } catch (const CorruptLog&) {
        throw;
      } catch (const std::exception& e) {
        throw CorruptLog(r.seq, std::string("malformed payload: ") + e.what());
      }
    }
    if (!pending_.empty()) throw CorruptLog(records.back().seq, "log ends with unlogged trades");
    result_.accounts = accounts_;
    return std::move(result_);
  }

 private:
  void apply(const EventRecord& r) {
    if (r.seq == 1) {
      if (r.kind != EventKind::SessionStart) throw CorruptLog(r.seq, "log must start with SESSION_START");
      result_.config = config_from_json(r.payload.at("config"));
      session_id_ = r.session_id;
      accounts_ = exchange::Accounts(result_.config.n_traders, result_.config.endowment_cash,
                                     result_.config.endowment_shares);
      rng_.emplace(result_.config.rng_seed);
      return;
    }
    if (r.session_id != session_id_) throw CorruptLog(r.seq, "session_id changed");
    if (r.kind != EventKind::Trade && !pending_.empty())
      throw CorruptLog(r.seq, "expected TRADE, found " + std::string(to_string(r.kind)));

    switch (r.kind) {
      case EventKind::SessionStart: throw CorruptLog(r.seq, "duplicate SESSION_START");
      case EventKind::QuestionnaireResponse: on_questionnaire(r); break;
      case EventKind::PeriodStart: on_period_start(r); break;
      case EventKind::OrderPosted: on_order(r); break;
      case EventKind::Trade: on_trade(r); break;
      case EventKind::OrderCancelled: on_cancel(r); break;
      case EventKind::Dividend: on_dividend(r); break;
      case EventKind::PeriodEnd: on_period_end(r); break;
      case EventKind::Payout: on_payout(r); break;
      case EventKind::SessionEnd: on_session_end(r); break;
    }
  }

  void require_trading(const EventRecord& r) const {
    if (!trading_ || r.period != period_) throw CorruptLog(r.seq, "event outside the open period");
  }

  void on_questionnaire(const EventRecord& r) {
    if (period_ != 0) throw CorruptLog(r.seq, "questionnaire after trading began");
    if (is_price_form(r.payload))
      result_.declared.push_back(declared_from_payload(r.payload));
    else
      result_.assessments.push_back(assessment_from_payload(r.payload));
  }

  void on_period_start(const EventRecord& r) {
    if (trading_ || r.period != period_ + 1) throw CorruptLog(r.seq, "unexpected PERIOD_START");
    if (r.period > result_.config.n_periods) throw CorruptLog(r.seq, "period beyond n_periods");
    if (r.payload.at("intrinsic_value").get<Cents>() != intrinsic_value(result_.config, r.period))
      throw CorruptLog(r.seq, "intrinsic value mismatch");
    period_ = r.period;
    period_opened_at_ = r.wall_time;
    trading_ = true;
    book_.reset(period_);
  }

  void on_order(const EventRecord& r) {
    require_trading(r);
    const auto order = order_from_payload(r.payload);
    const exchange::OrderRequest request{order.trader_id, order.side, order.price, order.quantity};
    auto outcome = book_.post(request, accounts_, r.wall_time - period_opened_at_);
    if (!outcome.accepted())
      throw CorruptLog(r.seq, "order rejected on replay: " + std::string(to_string(*outcome.reject)));
    if (outcome.order_id != order.order_id || outcome.submitted_seq != order.submitted_seq)
      throw CorruptLog(r.seq, "order id/sequence mismatch");
    for (auto& t : outcome.trades) pending_.push_back(t);
  }

  void on_trade(const EventRecord& r) {
    require_trading(r);
    if (pending_.empty()) throw CorruptLog(r.seq, "TRADE not produced by replayed matching");
    auto logged = trade_from_payload(r.payload);
    logged.period = r.period;
    if (!(logged == pending_.front())) throw CorruptLog(r.seq, "trade differs from replayed matching");
    result_.trades.push_back(pending_.front());
    pending_.pop_front();
  }

  void on_cancel(const EventRecord& r) {
    require_trading(r);
    const auto result = book_.cancel(r.payload.at("trader_id").get<TraderId>(), r.payload.at("order_id").get<OrderId>());
    if (result != exchange::CancelResult::Cancelled)
      throw CorruptLog(r.seq, "cancel failed on replay: " + std::string(to_string(result)));
  }

  void on_dividend(const EventRecord& r) {
    require_trading(r);
    book_.reset(period_);
    const Cents drawn = draw_dividend(*rng_, result_.config);
    if (r.payload.at("dividend_per_share").get<Cents>() != drawn)
      throw CorruptLog(r.seq, "dividend differs from seeded draw");
    const auto& credits = r.payload.at("credits");
    if (credits.size() != accounts_.size()) throw CorruptLog(r.seq, "dividend credits do not cover every trader");
    std::map<TraderId, Cents> due;
    for (const auto& [id, account] : accounts_) due[id] = drawn * account.shares;
    for (const auto& c : credits) {
      const auto id = c.at("trader_id").get<TraderId>();
      if (!due.contains(id) || c.at("amount").get<Cents>() != due[id] ||
          c.at("shares").get<Shares>() != accounts_.at(id).shares)
        throw CorruptLog(r.seq, "dividend credit mismatch for trader " + std::to_string(id));
    }
    for (const auto& [id, amount] : due) {
      accounts_.at(id).cash += amount;
      accounts_.at(id).dividend_income += amount;
    }
    period_income_ = std::move(due);
    result_.dividends[period_] = drawn;
    trading_ = false;
    dividend_seen_ = true;
  }

  void on_period_end(const EventRecord& r) {
    if (trading_ || !dividend_seen_ || r.period != period_) throw CorruptLog(r.seq, "PERIOD_END without DIVIDEND");
    const auto& summaries = r.payload.at("summaries");
    if (summaries.size() != accounts_.size()) throw CorruptLog(r.seq, "summary does not cover every trader");
    for (const auto& s : summaries) {
      const auto logged = summary_from_payload(s);
      const auto& account = accounts_.at(logged.trader_id);
      int n = 0;
      for (const auto& t : result_.trades)
        if (t.period == period_ && (t.buyer_id == logged.trader_id || t.seller_id == logged.trader_id)) ++n;
      const TraderSummary expected{logged.trader_id, n, period_income_.at(logged.trader_id), account.cash,
                                   account.shares};
      if (!(logged == expected))
        throw CorruptLog(r.seq, "period summary mismatch for trader " + std::to_string(logged.trader_id));
    }
    dividend_seen_ = false;
    result_.periods_settled = period_;
  }

  void on_payout(const EventRecord& r) {
    if (trading_ || period_ != result_.config.n_periods || dividend_seen_)
      throw CorruptLog(r.seq, "PAYOUT before the last period settled");
    const auto id = r.payload.at("trader_id").get<TraderId>();
    const Cents expected = final_payout(accounts_.at(id), result_.config);
    if (r.payload.at("payout").get<Cents>() != expected || r.payload.at("cash").get<Cents>() != accounts_.at(id).cash)
      throw CorruptLog(r.seq, "payout mismatch for trader " + std::to_string(id));
    result_.payouts[id] = expected;
  }

  void on_session_end(const EventRecord& r) {
    if (r.payload.value("aborted", false)) {
      result_.aborted = true;
      return;
    }
    if (result_.payouts.size() != accounts_.size()) throw CorruptLog(r.seq, "SESSION_END before every payout");
    result_.ended = true;
  }

  ReplayResult result_;
  std::string session_id_;
  exchange::Accounts accounts_;
  exchange::OrderBook book_;
  std::optional<Rng> rng_;
  std::deque<exchange::Trade> pending_;
  std::map<TraderId, Cents> period_income_;
  int period_ = 0;
  double period_opened_at_ = 0.0;
  bool trading_ = false;
  bool dividend_seen_ = false;
};

}  // namespace

ReplayResult replay(const std::vector<EventRecord>& records) {
  return Replayer{}.run(records);
}

std::string serialize_accounts(const exchange::Accounts& accounts) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& [id, a] : accounts) {
    nlohmann::ordered_json row;
    row["trader_id"] = a.trader_id;
    row["cash"] = a.cash;
    row["shares"] = a.shares;
    row["dividend_income"] = a.dividend_income;
    row["trading_pnl"] = a.trading_pnl;
    j.push_back(std::move(row));
  }
  return j.dump();
}

void write_trades_csv(const std::vector<EventRecord>& records, std::ostream& out) {
  out << "session_id,period,trade_seq,price_cents,quantity,buyer_id,seller_id,seconds_into_period\n";
  for (const auto& r : records) {
    if (r.kind != EventKind::Trade) continue;
    const auto t = trade_from_payload(r.payload);
    char seconds[32];
    const auto end = std::to_chars(seconds, seconds + sizeof seconds, t.timestamp).ptr;
    out << r.session_id << ',' << r.period << ',' << t.trade_id << ',' << t.price << ',' << t.quantity << ','
        << t.buyer_id << ',' << t.seller_id << ',' << std::string_view(seconds, end - seconds) << '\n';
  }
}

}  // namespace bubblelab::session
