#include "bubblelab/session/events.hpp"

#include <array>
#include <fstream>
#include <sstream>
#include <utility>

namespace bubblelab::session {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 10> kKindNames{{
    {EventKind::SessionStart, "SESSION_START"},
    {EventKind::PeriodStart, "PERIOD_START"},
    {EventKind::OrderPosted, "ORDER_POSTED"},
    {EventKind::OrderCancelled, "ORDER_CANCELLED"},
    {EventKind::Trade, "TRADE"},
    {EventKind::Dividend, "DIVIDEND"},
    {EventKind::PeriodEnd, "PERIOD_END"},
    {EventKind::QuestionnaireResponse, "QUESTIONNAIRE_RESPONSE"},
    {EventKind::Payout, "PAYOUT"},
    {EventKind::SessionEnd, "SESSION_END"},
}};

}  // namespace

std::string_view to_string(EventKind kind) noexcept {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "UNKNOWN";
}

std::optional<EventKind> parse_event_kind(std::string_view s) noexcept {
  for (const auto& [k, name] : kKindNames)
    if (name == s) return k;
  return std::nullopt;
}

std::string to_json_line(const EventRecord& r) {
  nlohmann::ordered_json j;
  j["seq"] = r.seq;
  j["wall_time"] = r.wall_time;
  j["session_id"] = r.session_id;
  j["period"] = r.period;
  j["kind"] = std::string(to_string(r.kind));
  j["payload"] = r.payload;
  return j.dump();
}

EventRecord parse_json_line(std::string_view line, std::size_t line_number) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw LogFormatError(line_number, e.what());
  }
  try {
    EventRecord r;
    r.seq = j.at("seq").get<Seq>();
    r.wall_time = j.at("wall_time").get<double>();
    r.session_id = j.at("session_id").get<std::string>();
    r.period = j.at("period").get<int>();
    const auto kind_name = j.at("kind").get<std::string>();
    const auto kind = parse_event_kind(kind_name);
    if (!kind) throw LogFormatError(line_number, "unknown event kind '" + kind_name + "'");
    r.kind = *kind;
    r.payload = j.at("payload");
    if (!r.payload.is_object()) throw LogFormatError(line_number, "payload must be an object");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw LogFormatError(line_number, e.what());
  }
}

Seq EventLog::append(EventKind kind, int period, double wall_time, nlohmann::ordered_json payload) {
  EventRecord r;
  r.seq = last_seq() + 1;
  r.wall_time = wall_time;
  r.session_id = session_id_;
  r.period = period;
  r.kind = kind;
  r.payload = std::move(payload);
  records_.push_back(std::move(r));
  return records_.back().seq;
}

void EventLog::write(std::ostream& out) const {
  for (const auto& r : records_) out << to_json_line(r) << '\n';
}

std::string EventLog::to_string() const { return to_jsonl(records_); }

std::string to_jsonl(const std::vector<EventRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += to_json_line(r);
    out += '\n';
  }
  return out;
}

std::vector<EventRecord> read_log(std::istream& in) {
  std::vector<EventRecord> records;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    records.push_back(parse_json_line(line, n));
  }
  return records;
}

std::vector<EventRecord> read_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open log " + path.string());
  return read_log(in);
}

void write_log(const std::vector<EventRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write log " + path.string());
  out << to_jsonl(records);
}

EventRecord without_timing(EventRecord r) {
  r.wall_time = 0.0;
  if (r.kind == EventKind::Trade) r.payload["timestamp"] = 0.0;
  if (r.kind == EventKind::PeriodStart) r.payload["server_time"] = 0.0;
  return r;
}

nlohmann::ordered_json trade_payload(const exchange::Trade& t) {
  nlohmann::ordered_json j;
  j["trade_id"] = t.trade_id;
  j["price"] = t.price;
  j["quantity"] = t.quantity;
  j["buyer_id"] = t.buyer_id;
  j["seller_id"] = t.seller_id;
  j["resting_order_id"] = t.resting_order_id;
  j["aggressor_order_id"] = t.aggressor_order_id;
  j["timestamp"] = t.timestamp;
  return j;
}

exchange::Trade trade_from_payload(const nlohmann::json& j) {
  exchange::Trade t;
  t.trade_id = j.at("trade_id").get<TradeId>();
  t.price = j.at("price").get<Cents>();
  t.quantity = j.at("quantity").get<Shares>();
  t.buyer_id = j.at("buyer_id").get<TraderId>();
  t.seller_id = j.at("seller_id").get<TraderId>();
  t.resting_order_id = j.at("resting_order_id").get<OrderId>();
  t.aggressor_order_id = j.at("aggressor_order_id").get<OrderId>();
  t.timestamp = j.at("timestamp").get<double>();
  return t;
}

nlohmann::ordered_json order_payload(const exchange::Order& o) {
  nlohmann::ordered_json j;
  j["order_id"] = o.order_id;
  j["trader_id"] = o.trader_id;
  j["side"] = std::string(to_string(o.side));
  j["price"] = o.price;
  j["quantity"] = o.quantity;
  j["submitted_seq"] = o.submitted_seq;
  return j;
}

exchange::Order order_from_payload(const nlohmann::json& j) {
  exchange::Order o;
  o.order_id = j.at("order_id").get<OrderId>();
  o.trader_id = j.at("trader_id").get<TraderId>();
  const auto side = parse_side(j.at("side").get<std::string>());
  if (!side) throw std::invalid_argument("bad side");
  o.side = *side;
  o.price = j.at("price").get<Cents>();
  o.quantity = j.at("quantity").get<Shares>();
  o.submitted_seq = j.at("submitted_seq").get<Seq>();
  return o;
}

}  // namespace bubblelab::session

namespace bubblelab::session {

std::vector<EventRecord> without_timing(std::vector<EventRecord> records) {
  for (auto& r : records) r = without_timing(std::move(r));
  return records;
}

}  // namespace bubblelab::session
