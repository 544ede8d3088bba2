#include "bubblelab/protocol/messages.hpp"

#include <json.hpp>

namespace bubblelab::protocol {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

/// Field access with errors pointing at the key inside the frame.
class Reader {
 public:
  Reader(const json& j, std::string_view frame) : j_(j), frame_(frame) {}

  [[noreturn]] void fail(const char* key, const std::string& what) const {
    const auto at = frame_.find("\"" + std::string(key) + "\"");
    throw DecodeError(at == std::string_view::npos ? 0 : at, std::string(key) + ": " + what);
  }

  const json& at(const char* key) const {
    auto it = j_.find(key);
    if (it == j_.end()) fail(key, "missing");
    return *it;
  }

  bool has(const char* key) const {
    auto it = j_.find(key);
    return it != j_.end() && !it->is_null();
  }

  std::int64_t integer(const char* key) const { return integer_value(key, at(key)); }

  std::int64_t integer_value(const char* key, const json& v) const {
    if (!v.is_number_integer()) fail(key, "must be an integer");
    return v.get<std::int64_t>();
  }

  double number(const char* key) const {
    const json& v = at(key);
    if (!v.is_number()) fail(key, "must be a number");
    return v.get<double>();
  }

  std::string string(const char* key) const {
    const json& v = at(key);
    if (!v.is_string()) fail(key, "must be a string");
    return v.get<std::string>();
  }

  bool boolean(const char* key) const {
    const json& v = at(key);
    if (!v.is_boolean()) fail(key, "must be a boolean");
    return v.get<bool>();
  }

  const json& array(const char* key) const {
    const json& v = at(key);
    if (!v.is_array()) fail(key, "must be an array");
    return v;
  }

  Side side(const char* key) const {
    const auto s = parse_side(string(key));
    if (!s) fail(key, "must be BID or ASK");
    return *s;
  }

  std::optional<std::int64_t> optional_integer(const char* key) const {
    if (!has(key)) return std::nullopt;
    return integer(key);
  }

  Reader sub(const json& j) const {
    if (!j.is_object()) fail("item", "must be an object");
    return Reader(j, frame_);
  }

 private:
  const json& j_;
  std::string_view frame_;
};

json parse_frame(std::string_view frame) {
  if (!frame.empty() && frame.back() == '\n') frame.remove_suffix(1);
  if (!frame.empty() && frame.back() == '\r') frame.remove_suffix(1);
  if (frame.find('\n') != std::string_view::npos) throw DecodeError(frame.find('\n'), "embedded newline");
  try {
    json j = json::parse(frame);
    if (!j.is_object()) throw DecodeError(0, "frame must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw DecodeError(e.byte > 0 ? e.byte - 1 : 0, "malformed JSON");
  }
}

std::string dump(const ordered_json& j) { return j.dump() + "\n"; }

ordered_json params_json(const MarketParams& m) {
  return {{"n_traders", m.n_traders},         {"n_periods", m.n_periods},
          {"period_seconds", m.period_seconds}, {"dividend_value", m.dividend_value},
          {"dividend_prob", m.dividend_prob},   {"endowment_shares", m.endowment_shares},
          {"endowment_cash", m.endowment_cash}, {"showup_fee", m.showup_fee}};
}

ordered_json level_json(const BookLevel& l) {
  ordered_json j{{"price", l.price}, {"quantity", l.quantity}, {"own", l.own}};
  if (l.order_id) j["order_id"] = *l.order_id;
  return j;
}

ordered_json optional_json(const std::optional<Cents>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

std::optional<ClientPhase> parse_phase(std::string_view s) {
  for (auto p : {ClientPhase::Questionnaire, ClientPhase::Trading, ClientPhase::Summary, ClientPhase::Payout,
                 ClientPhase::Aborted}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

OrderAction action_of(const Reader& r) {
  const std::string a = r.string("action");
  if (a == "POST") return OrderAction::Post;
  if (a == "CANCEL") return OrderAction::Cancel;
  r.fail("action", "must be POST or CANCEL");
}

}  // namespace

std::string_view to_string(ClientPhase p) noexcept {
  switch (p) {
    case ClientPhase::Questionnaire: return "QUESTIONNAIRE";
    case ClientPhase::Trading: return "TRADING";
    case ClientPhase::Summary: return "SUMMARY";
    case ClientPhase::Payout: return "PAYOUT";
    case ClientPhase::Aborted: return "ABORTED";
  }
  return "?";
}

std::string_view to_string(OrderAction a) noexcept { return a == OrderAction::Post ? "POST" : "CANCEL"; }

std::string_view type_name(const ClientMessage& m) noexcept {
  return std::visit(overloaded{[](const Hello&) { return "HELLO"; },
                               [](const SubmitQuestionnaire&) { return "SUBMIT_QUESTIONNAIRE"; },
                               [](const PostOrder&) { return "POST_ORDER"; },
                               [](const CancelOrder&) { return "CANCEL_ORDER"; }, [](const Ping&) { return "PING"; }},
                    m);
}

std::string_view type_name(const ServerMessage& m) noexcept {
  return std::visit(
      overloaded{[](const Welcome&) { return "WELCOME"; }, [](const SessionInfo&) { return "SESSION_INFO"; },
                 [](const PeriodStart&) { return "PERIOD_START"; }, [](const BookUpdate&) { return "BOOK_UPDATE"; },
                 [](const TradeNotice&) { return "TRADE_NOTICE"; }, [](const OrderAck&) { return "ORDER_ACK"; },
                 [](const OrderReject&) { return "ORDER_REJECT"; },
                 [](const PeriodSummary&) { return "PERIOD_SUMMARY"; },
                 [](const FinalPayout&) { return "FINAL_PAYOUT"; }, [](const Error&) { return "ERROR"; }},
      m);
}

std::string encode(const ClientMessage& m) {
  ordered_json j{{"type", std::string(type_name(m))}};
  std::visit(overloaded{[&](const Hello& h) { j["token"] = h.token; },
                        [&](const SubmitQuestionnaire& q) {
                          j["declared"] = q.declared;
                          ordered_json rs = ordered_json::array();
                          for (const auto& r : q.responses) {
                            rs.push_back({{"item_id", r.item_id},
                                          {"item_group", std::string(session::to_string(r.item_group))},
                                          {"rating", r.rating}});
                          }
                          j["responses"] = std::move(rs);
                        },
                        [&](const PostOrder& p) {
                          j["side"] = std::string(to_string(p.side));
                          j["price_cents"] = p.price_cents;
                          j["quantity"] = p.quantity;
                        },
                        [&](const CancelOrder& c) { j["order_id"] = c.order_id; }, [](const Ping&) {}},
             m);
  return dump(j);
}

std::string encode(const ServerMessage& m) {
  ordered_json j{{"type", std::string(type_name(m))}};
  std::visit(
      overloaded{
          [&](const Welcome& w) {
            j["trader_id"] = w.trader_id;
            j["session_id"] = w.session_id;
            j["market"] = params_json(w.market);
          },
          [&](const SessionInfo& s) {
            j["phase"] = std::string(to_string(s.phase));
            j["period"] = s.period;
            j["seconds_remaining"] = s.seconds_remaining;
            j["cash"] = s.cash;
            j["shares"] = s.shares;
            j["questionnaire_submitted"] = s.questionnaire_submitted;
          },
          [&](const PeriodStart& p) {
            j["period"] = p.period;
            j["period_seconds"] = p.period_seconds;
            j["server_time"] = p.server_time;
            j["intrinsic_value"] = p.intrinsic_value;
            j["max_present_value"] = p.max_present_value;
          },
          [&](const BookUpdate& b) {
            j["seq"] = b.seq;
            j["period"] = b.period;
            j["best_bid"] = optional_json(b.best_bid);
            j["best_ask"] = optional_json(b.best_ask);
            j["bids"] = ordered_json::array();
            for (const auto& l : b.bids) j["bids"].push_back(level_json(l));
            j["asks"] = ordered_json::array();
            for (const auto& l : b.asks) j["asks"].push_back(level_json(l));
          },
          [&](const TradeNotice& t) {
            j["seq"] = t.seq;
            j["period"] = t.period;
            j["price_cents"] = t.price_cents;
            j["quantity"] = t.quantity;
            j["seconds_into_period"] = t.seconds_into_period;
            if (t.your_side) j["your_side"] = std::string(to_string(*t.your_side));
            if (t.cash_delta) j["cash_delta"] = *t.cash_delta;
            if (t.shares_delta) j["shares_delta"] = *t.shares_delta;
          },
          [&](const OrderAck& a) {
            j["action"] = std::string(to_string(a.action));
            j["order_id"] = a.order_id;
            j["filled"] = a.filled;
            j["resting"] = a.resting;
          },
          [&](const OrderReject& r) {
            j["action"] = std::string(to_string(r.action));
            j["reason"] = r.reason;
            if (r.order_id) j["order_id"] = *r.order_id;
          },
          [&](const PeriodSummary& s) {
            j["period"] = s.period;
            j["dividend_per_share"] = s.dividend_per_share;
            j["dividend_income"] = s.dividend_income;
            j["cash"] = s.cash;
            j["shares"] = s.shares;
            j["market_trade_count"] = s.market_trade_count;
            j["own_trades"] = ordered_json::array();
            for (const auto& t : s.own_trades) {
              j["own_trades"].push_back(
                  {{"side", std::string(to_string(t.side))}, {"price_cents", t.price_cents}, {"quantity", t.quantity}});
            }
          },
          [&](const FinalPayout& f) {
            j["trader_id"] = f.trader_id;
            j["cash"] = f.cash;
            j["showup_fee"] = f.showup_fee;
            j["payout"] = f.payout;
          },
          [&](const Error& e) {
            j["code"] = e.code;
            j["message"] = e.message;
            if (e.offset) j["offset"] = *e.offset;
          }},
      m);
  return dump(j);
}

ClientMessage decode_client(std::string_view frame) {
  const json j = parse_frame(frame);
  const Reader r(j, frame);
  const std::string type = r.string("type");
  if (type == "HELLO") return Hello{r.string("token")};
  if (type == "SUBMIT_QUESTIONNAIRE") {
    SubmitQuestionnaire q;
    for (const auto& v : r.array("declared")) q.declared.push_back(r.integer_value("declared", v));
    for (const auto& item : r.array("responses")) {
      const Reader ir = r.sub(item);
      const auto group = session::parse_item_group(ir.string("item_group"));
      if (!group) ir.fail("item_group", "must be SELF_PRECISION or OTHERS_PRECISION");
      q.responses.push_back({ir.string("item_id"), *group, static_cast<int>(ir.integer("rating"))});
    }
    return q;
  }
  if (type == "POST_ORDER") {
    return PostOrder{r.side("side"), r.integer("price_cents"), r.optional_integer("quantity").value_or(1)};
  }
  if (type == "CANCEL_ORDER") return CancelOrder{static_cast<OrderId>(r.integer("order_id"))};
  if (type == "PING") return Ping{};
  throw ProtocolViolation(type);
}

ServerMessage decode_server(std::string_view frame) {
  const json j = parse_frame(frame);
  const Reader r(j, frame);
  const std::string type = r.string("type");
  if (type == "WELCOME") {
    const Reader m = r.sub(r.at("market"));
    return Welcome{static_cast<TraderId>(r.integer("trader_id")), r.string("session_id"),
                   MarketParams{static_cast<int>(m.integer("n_traders")), static_cast<int>(m.integer("n_periods")),
                                static_cast<int>(m.integer("period_seconds")), m.integer("dividend_value"), m.string("dividend_prob"),
                                m.integer("endowment_shares"), m.integer("endowment_cash"), m.integer("showup_fee")}};
  }
  if (type == "SESSION_INFO") {
    const auto phase = parse_phase(r.string("phase"));
    if (!phase) r.fail("phase", "unknown phase");
    return SessionInfo{*phase,           static_cast<int>(r.integer("period")), r.number("seconds_remaining"),
                       r.integer("cash"), r.integer("shares"),                  r.boolean("questionnaire_submitted")};
  }
  if (type == "PERIOD_START") {
    return PeriodStart{static_cast<int>(r.integer("period")), static_cast<int>(r.integer("period_seconds")), r.number("server_time"),
                       r.integer("intrinsic_value"), r.integer("max_present_value")};
  }
  if (type == "BOOK_UPDATE") {
    BookUpdate b;
    b.seq = static_cast<Seq>(r.integer("seq"));
    b.period = static_cast<int>(r.integer("period"));
    b.best_bid = r.optional_integer("best_bid");
    b.best_ask = r.optional_integer("best_ask");
    for (auto [key, out] : {std::pair{"bids", &b.bids}, std::pair{"asks", &b.asks}}) {
      for (const auto& l : r.array(key)) {
        const Reader lr = r.sub(l);
        auto id = lr.optional_integer("order_id");
        out->push_back({lr.integer("price"), lr.integer("quantity"), lr.boolean("own"),
                        id ? std::optional<OrderId>(static_cast<OrderId>(*id)) : std::nullopt});
      }
    }
    return b;
  }
  if (type == "TRADE_NOTICE") {
    TradeNotice t;
    t.seq = static_cast<Seq>(r.integer("seq"));
    t.period = static_cast<int>(r.integer("period"));
    t.price_cents = r.integer("price_cents");
    t.quantity = r.integer("quantity");
    t.seconds_into_period = r.number("seconds_into_period");
    if (r.has("your_side")) t.your_side = r.side("your_side");
    t.cash_delta = r.optional_integer("cash_delta");
    t.shares_delta = r.optional_integer("shares_delta");
    return t;
  }
  if (type == "ORDER_ACK") {
    return OrderAck{action_of(r), static_cast<OrderId>(r.integer("order_id")), r.integer("filled"),
                    r.integer("resting")};
  }
  if (type == "ORDER_REJECT") {
    auto id = r.optional_integer("order_id");
    return OrderReject{action_of(r), r.string("reason"),
                       id ? std::optional<OrderId>(static_cast<OrderId>(*id)) : std::nullopt};
  }
  if (type == "PERIOD_SUMMARY") {
    PeriodSummary s;
    s.period = static_cast<int>(r.integer("period"));
    s.dividend_per_share = r.integer("dividend_per_share");
    s.dividend_income = r.integer("dividend_income");
    s.cash = r.integer("cash");
    s.shares = r.integer("shares");
    s.market_trade_count = static_cast<int>(r.integer("market_trade_count"));
    for (const auto& t : r.array("own_trades")) {
      const Reader tr = r.sub(t);
      s.own_trades.push_back({tr.side("side"), tr.integer("price_cents"), tr.integer("quantity")});
    }
    return s;
  }
  if (type == "FINAL_PAYOUT") {
    return FinalPayout{static_cast<TraderId>(r.integer("trader_id")), r.integer("cash"), r.integer("showup_fee"),
                       r.integer("payout")};
  }
  if (type == "ERROR") {
    auto offset = r.optional_integer("offset");
    return Error{r.string("code"), r.string("message"),
                 offset ? std::optional<std::size_t>(static_cast<std::size_t>(*offset)) : std::nullopt};
  }
  throw ProtocolViolation(type);
}

std::optional<std::string> FrameReader::next() {
  const auto nl = buffer_.find('\n');
  if (nl == std::string::npos) return std::nullopt;
  std::string line = buffer_.substr(0, nl);
  buffer_.erase(0, nl + 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

void FrameReader::finish() const {
  if (!buffer_.empty()) throw DecodeError(buffer_.size(), "truncated frame");
}

}  // namespace bubblelab::protocol
