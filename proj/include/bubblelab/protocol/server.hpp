#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bubblelab/protocol/host.hpp"
#include "bubblelab/session/events.hpp"

namespace bubblelab::protocol {

class BindFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMaxFrameBytes = 64 * 1024;

struct ServerOptions {
  std::string bind = "127.0.0.1:7400";  // host:port, port 0 picks a free one
  std::string ws_bind;                  // WebSocket listener for browsers; empty disables it
  HostOptions host;
  bool require_questionnaire = true;
  double join_timeout_seconds = 0.0;  // abort if the session has not started by then; 0 waits forever
  double summary_seconds = 5.0;       // pause between a period's summary and the next period
  std::filesystem::path log_path;     // event log, written when the session ends or aborts
  std::function<void(unsigned short port)> on_listening;
  std::function<void(unsigned short port)> on_ws_listening;
  const std::atomic<bool>* stop = nullptr;  // aborts the session when set
};

struct ServeResult {
  std::vector<session::EventRecord> log;
  bool aborted = false;
};

/// "host:port" into its parts; throws BindFailure on a malformed address.
std::pair<std::string, unsigned short> parse_bind(const std::string& bind);

/// Runs one live session: admits n_traders clients, collects questionnaires,
/// plays every period on the wall clock and sends the final payouts.
ServeResult serve(const session::SessionConfig& config, const ServerOptions& options);

}  // namespace bubblelab::protocol
