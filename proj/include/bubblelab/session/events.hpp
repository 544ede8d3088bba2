#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bubblelab/common/types.hpp"
#include "bubblelab/exchange/order.hpp"

namespace bubblelab::session {

enum class EventKind {
  SessionStart,
  PeriodStart,
  OrderPosted,
  OrderCancelled,
  Trade,
  Dividend,
  PeriodEnd,
  QuestionnaireResponse,
  Payout,
  SessionEnd,
};

std::string_view to_string(EventKind kind) noexcept;
std::optional<EventKind> parse_event_kind(std::string_view s) noexcept;

/// One line of the append-only session log. Session-level events carry period 0.
struct EventRecord {
  Seq seq = 0;
  double wall_time = 0.0;
  std::string session_id;
  int period = 0;
  EventKind kind = EventKind::SessionStart;
  nlohmann::ordered_json payload = nlohmann::ordered_json::object();

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

class LogFormatError : public std::runtime_error {
 public:
  LogFormatError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Single JSON line, no trailing newline. Keys appear in declaration order.
std::string to_json_line(const EventRecord& record);
EventRecord parse_json_line(std::string_view line, std::size_t line_number = 0);

/// Append-only event log; sequence numbers start at 1.
class EventLog {
 public:
  explicit EventLog(std::string session_id = {}) : session_id_(std::move(session_id)) {}

  Seq append(EventKind kind, int period, double wall_time, nlohmann::ordered_json payload);

  const std::vector<EventRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  Seq last_seq() const noexcept { return records_.empty() ? 0 : records_.back().seq; }
  const std::string& session_id() const noexcept { return session_id_; }

  void write(std::ostream& out) const;
  std::string to_string() const;

 private:
  std::string session_id_;
  std::vector<EventRecord> records_;
};

std::vector<EventRecord> read_log(std::istream& in);
std::vector<EventRecord> read_log(const std::filesystem::path& path);
void write_log(const std::vector<EventRecord>& records, const std::filesystem::path& path);
std::string to_jsonl(const std::vector<EventRecord>& records);

/// Copy with wall-clock fields zeroed: wall_time, trade timestamps and
/// period-start server times. Used to compare a live session with an
/// in-process run of the same command schedule.
EventRecord without_timing(EventRecord record);
std::vector<EventRecord> without_timing(std::vector<EventRecord> records);

// Payload helpers shared by the session, replay and analytics.
nlohmann::ordered_json trade_payload(const exchange::Trade& trade);
exchange::Trade trade_from_payload(const nlohmann::json& payload);
nlohmann::ordered_json order_payload(const exchange::Order& order);
exchange::Order order_from_payload(const nlohmann::json& payload);

}  // namespace bubblelab::session
