#include "bubblelab/protocol/host.hpp"

#include <algorithm>
#include <set>

#include "bubblelab/session/schedule.hpp"

namespace bubblelab::protocol {

using session::Command;
using session::EventKind;

namespace {

Error error(std::string code, std::string message) { return Error{std::move(code), std::move(message), std::nullopt}; }

MarketParams market_params(const session::SessionConfig& c) {
  return MarketParams{c.n_traders,
                      c.n_periods,
                      c.period_seconds,
                      c.dividend_value,
                      std::to_string(c.dividend_prob.num) + "/" + std::to_string(c.dividend_prob.den),
                      c.endowment_shares,
                      c.endowment_cash,
                      c.showup_fee};
}

}  // namespace

SessionHost::SessionHost(session::SessionConfig config, const session::Clock& clock, HostOptions options)
    : session_(std::move(config), clock), options_(std::move(options)) {
  if (!options_.tokens.empty() && options_.tokens.size() != static_cast<std::size_t>(session_.config().n_traders)) {
    throw std::invalid_argument("need one join token per seat");
  }
  for (std::size_t i = 0; i < options_.tokens.size(); ++i) {
    seat_tokens_[static_cast<TraderId>(i + 1)] = options_.tokens[i];
  }
}

std::optional<TraderId> SessionHost::seat_of(ConnId conn) const {
  auto it = conn_seat_.find(conn);
  if (it == conn_seat_.end()) return std::nullopt;
  return it->second;
}

std::optional<ConnId> SessionHost::conn_of(TraderId seat) const {
  auto it = seat_conn_.find(seat);
  if (it == seat_conn_.end()) return std::nullopt;
  return it->second;
}

bool SessionHost::all_seated() const {
  return seat_conn_.size() == static_cast<std::size_t>(session_.config().n_traders);
}

bool SessionHost::questionnaires_complete() const {
  for (TraderId t = 1; t <= session_.config().n_traders; ++t) {
    if (!session_.has_declared_prices(t)) return false;
  }
  return true;
}

SessionInfo SessionHost::info_for(TraderId seat) const {
  SessionInfo info;
  switch (session_.phase()) {
    case session::Phase::PreTrade: info.phase = ClientPhase::Questionnaire; break;
    case session::Phase::Trading: info.phase = ClientPhase::Trading; break;
    case session::Phase::Settled: info.phase = ClientPhase::Summary; break;
    case session::Phase::Ended: info.phase = ClientPhase::Payout; break;
    case session::Phase::Aborted: info.phase = ClientPhase::Aborted; break;
  }
  info.period = session_.current_period();
  if (session_.phase() == session::Phase::Trading) {
    info.seconds_remaining = std::max(0.0, session_.period_deadline() - session_.clock().now());
  }
  const auto& account = session_.accounts().at(seat);
  info.cash = account.cash;
  info.shares = account.shares;
  info.questionnaire_submitted = session_.has_declared_prices(seat);
  return info;
}

BookUpdate SessionHost::book_for(TraderId seat) const {
  const auto snap = session_.book().snapshot(seat);
  BookUpdate b;
  b.seq = session_.log().last_seq();
  b.period = session_.current_period();
  b.best_bid = snap.best_bid;
  b.best_ask = snap.best_ask;
  auto convert = [](const std::vector<exchange::DepthEntry>& in, std::vector<BookLevel>& out) {
    for (const auto& e : in) {
      out.push_back({e.price, e.quantity, e.own, e.own ? std::optional<OrderId>(e.order_id) : std::nullopt});
    }
  };
  convert(snap.bids, b.bids);
  convert(snap.asks, b.asks);
  return b;
}

void SessionHost::to_all(const std::function<std::optional<ServerMessage>(TraderId)>& make,
                         std::vector<Outbound>& out) const {
  for (const auto& [seat, conn] : seat_conn_) {
    if (auto m = make(seat)) out.push_back({conn, std::move(*m)});
  }
}

std::vector<Outbound> SessionHost::handle_message(ConnId conn, const ClientMessage& message) {
  std::vector<Outbound> out;
  if (auto command = interpret(conn, message, out)) {
    const Seq first_new = session_.log().last_seq() + 1;
    const auto result = session_.apply(*command);
    on_result(conn, *command, result, first_new, out);
  }
  return out;
}

std::optional<Command> SessionHost::interpret(ConnId conn, const ClientMessage& message, std::vector<Outbound>& out) {
  if (const auto* hello = std::get_if<Hello>(&message)) {
    join(conn, *hello, out);
    return std::nullopt;
  }
  const auto seat = seat_of(conn);
  if (!seat) {
    out.push_back({conn, error("not_joined", "send HELLO with a seat token first")});
    return std::nullopt;
  }
  return std::visit(
      [&](const auto& m) -> std::optional<Command> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PostOrder>) {
          return session::PostCommand{{*seat, m.side, m.price_cents, m.quantity}};
        } else if constexpr (std::is_same_v<T, CancelOrder>) {
          return session::CancelCommand{*seat, m.order_id};
        } else if constexpr (std::is_same_v<T, SubmitQuestionnaire>) {
          submit(conn, *seat, m, out);
          return std::nullopt;
        } else {
          out.push_back({conn, info_for(*seat)});
          return std::nullopt;
        }
      },
      message);
}

void SessionHost::join(ConnId conn, const Hello& hello, std::vector<Outbound>& out) {
  if (seat_of(conn)) {
    out.push_back({conn, error("already_joined", "this connection already holds a seat")});
    return;
  }
  std::optional<TraderId> seat;
  for (const auto& [s, token] : seat_tokens_) {
    if (token == hello.token) seat = s;
  }
  if (!seat) {
    if (!options_.tokens.empty()) {
      out.push_back({conn, error("unknown_token", "no seat has this token")});
      return;
    }
    if (hello.token.empty()) {
      out.push_back({conn, error("unknown_token", "token must not be empty")});
      return;
    }
    if (seat_tokens_.size() >= static_cast<std::size_t>(session_.config().n_traders)) {
      out.push_back({conn, error("seat_exhausted", "all seats are taken")});
      return;
    }
    seat = static_cast<TraderId>(seat_tokens_.size() + 1);
    seat_tokens_[*seat] = hello.token;
  }
  if (seat_conn_.contains(*seat)) {
    out.push_back({conn, error("seat_taken", "this seat is connected elsewhere")});
    return;
  }
  seat_conn_[*seat] = conn;
  conn_seat_[conn] = *seat;
  out.push_back({conn, Welcome{*seat, session_.config().session_id, market_params(session_.config())}});
  out.push_back({conn, info_for(*seat)});
  if (session_.phase() == session::Phase::Trading) out.push_back({conn, book_for(*seat)});
}

void SessionHost::submit(ConnId conn, TraderId seat, const SubmitQuestionnaire& q, std::vector<Outbound>& out) {
  if (session_.phase() != session::Phase::PreTrade) {
    out.push_back({conn, error("wrong_phase", "questionnaires are only accepted before trading")});
    return;
  }
  std::string problem;
  if (session_.has_declared_prices(seat)) problem = "questionnaire already submitted";
  else if (q.declared.size() != static_cast<std::size_t>(session_.config().n_periods))
    problem = "expected " + std::to_string(session_.config().n_periods) + " declared values";
  else if (std::ranges::any_of(q.declared, [](Cents v) { return v < 0; }))
    problem = "declared values must be >= 0";
  std::set<std::string> items;
  for (const auto& r : q.responses) {
    if (!problem.empty()) break;
    if (r.rating < session::kLikertMin || r.rating > session::kLikertMax) problem = "rating outside 1..7";
    else if (r.item_id.empty()) problem = "item_id must not be empty";
    else if (!items.insert(r.item_id).second) problem = "item " + r.item_id + " answered twice";
  }
  if (!problem.empty()) {
    out.push_back({conn, error("invalid_questionnaire", problem)});
    return;
  }
  session_.record_questionnaire(session::DeclaredPrices{seat, q.declared});
  for (const auto& r : q.responses) {
    session_.record_questionnaire(session::AssessmentResponse{seat, r.item_id, r.item_group, r.rating});
  }
  out.push_back({conn, info_for(seat)});
}

void SessionHost::on_result(ConnId conn, const Command& command, const session::CommandResult& result,
                            Seq first_new, std::vector<Outbound>& out) const {
  bool changed = false;
  if (const auto* post = std::get_if<exchange::PostOutcome>(&result)) {
    if (!post->accepted()) {
      out.push_back({conn, OrderReject{OrderAction::Post, std::string(exchange::to_string(*post->reject)), {}}});
      return;
    }
    Shares filled = 0;
    for (const auto& t : post->trades) filled += t.quantity;
    const Shares requested = std::get<session::PostCommand>(command).request.quantity;
    const bool rests = post->status == exchange::PostOutcome::Status::Resting || post->remainder.has_value();
    out.push_back({conn, OrderAck{OrderAction::Post, post->order_id, filled, rests ? requested - filled : 0}});
    changed = true;
  } else {
    const auto cancel = std::get<exchange::CancelResult>(result);
    const OrderId id = std::get<session::CancelCommand>(command).order_id;
    if (cancel != exchange::CancelResult::Cancelled) {
      out.push_back({conn, OrderReject{OrderAction::Cancel, std::string(exchange::to_string(cancel)), id}});
      return;
    }
    out.push_back({conn, OrderAck{OrderAction::Cancel, id, 0, 0}});
    changed = true;
  }

  const auto& records = session_.log().records();
  for (Seq seq = first_new; seq <= session_.log().last_seq(); ++seq) {
    const auto& rec = records.at(seq - 1);
    if (rec.kind != EventKind::Trade) continue;
    auto trade = session::trade_from_payload(rec.payload);
    trade.period = rec.period;
    to_all(
        [&](TraderId seat) -> std::optional<ServerMessage> {
          TradeNotice n{seq, trade.period, trade.price, trade.quantity, trade.timestamp, {}, {}, {}};
          if (seat == trade.buyer_id) {
            n.your_side = Side::Bid;
            n.cash_delta = -trade.price * trade.quantity;
            n.shares_delta = trade.quantity;
          } else if (seat == trade.seller_id) {
            n.your_side = Side::Ask;
            n.cash_delta = trade.price * trade.quantity;
            n.shares_delta = -trade.quantity;
          } else if (!options_.broadcast_trades) {
            return std::nullopt;
          }
          return n;
        },
        out);
  }
  if (changed) to_all([&](TraderId seat) { return std::optional<ServerMessage>(book_for(seat)); }, out);
}

std::vector<Outbound> SessionHost::malformed(ConnId conn, const DecodeError& e) const {
  return {{conn, Error{"malformed_message", e.what(), e.offset()}}};
}

std::vector<Outbound> SessionHost::violation(ConnId conn, const ProtocolViolation& e) const {
  return {{conn, error("protocol_violation", e.what())}};
}

void SessionHost::disconnect(ConnId conn) {
  auto it = conn_seat_.find(conn);
  if (it == conn_seat_.end()) return;
  seat_conn_.erase(it->second);
  conn_seat_.erase(it);
}

void SessionHost::announce_period_start(std::vector<Outbound>& out) const {
  const auto& rec = session_.log().records().back();
  const PeriodStart start{session_.current_period(), rec.payload.at("period_seconds").get<int>(),
                          rec.payload.at("server_time").get<double>(), rec.payload.at("intrinsic_value").get<Cents>(),
                          rec.payload.at("max_present_value").get<Cents>()};
  to_all([&](TraderId) { return std::optional<ServerMessage>(start); }, out);
  to_all([&](TraderId seat) { return std::optional<ServerMessage>(book_for(seat)); }, out);
}

void SessionHost::announce_period_end(const session::PeriodResult& result, std::vector<Outbound>& out) const {
  to_all(
      [&](TraderId seat) -> std::optional<ServerMessage> {
        PeriodSummary s;
        s.period = result.period;
        s.dividend_per_share = result.dividend;
        s.market_trade_count = static_cast<int>(result.trades.size());
        for (const auto& sum : result.summaries) {
          if (sum.trader_id != seat) continue;
          s.dividend_income = sum.dividend_income;
          s.cash = sum.cash;
          s.shares = sum.shares;
        }
        for (const auto& t : result.trades) {
          if (t.buyer_id == seat) s.own_trades.push_back({Side::Bid, t.price, t.quantity});
          if (t.seller_id == seat) s.own_trades.push_back({Side::Ask, t.price, t.quantity});
        }
        return s;
      },
      out);
}

void SessionHost::announce_payouts(std::vector<Outbound>& out) const {
  to_all(
      [&](TraderId seat) -> std::optional<ServerMessage> {
        return FinalPayout{seat, session_.accounts().at(seat).cash, session_.config().showup_fee,
                           session_.final_payout(seat)};
      },
      out);
}

void SessionHost::announce_abort(const std::string& reason, std::vector<Outbound>& out) const {
  to_all([&](TraderId seat) { return std::optional<ServerMessage>(info_for(seat)); }, out);
  to_all([&](TraderId) { return std::optional<ServerMessage>(error("session_aborted", reason)); }, out);
}

std::vector<Outbound> SessionHost::open_period() {
  session_.open_period();
  std::vector<Outbound> out;
  announce_period_start(out);
  return out;
}

std::vector<Outbound> SessionHost::close_period() {
  const auto result = session_.close_period();
  std::vector<Outbound> out;
  announce_period_end(result, out);
  return out;
}

std::vector<Outbound> SessionHost::finish() {
  session_.finish();
  std::vector<Outbound> out;
  announce_payouts(out);
  return out;
}

std::vector<Outbound> SessionHost::abort(const std::string& reason) {
  session_.abort(reason);
  std::vector<Outbound> out;
  announce_abort(reason, out);
  return out;
}

}  // namespace bubblelab::protocol
