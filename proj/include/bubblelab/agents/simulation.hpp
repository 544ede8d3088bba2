#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bubblelab/agents/policy.hpp"
#include "bubblelab/session/period.hpp"

namespace bubblelab::agents {

class RosterSizeMismatch : public std::invalid_argument {
 public:
  RosterSizeMismatch(std::size_t roster, int traders)
      : std::invalid_argument("roster has " + std::to_string(roster) + " agents for " + std::to_string(traders) +
                              " seats") {}
};

class RosterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Seat i + 1 is played by roster[i].
using Roster = std::vector<AgentPolicy>;

inline constexpr int kDefaultTicks = 40;

/// Named rosters sized to n seats: all-fundamentalist, all-zic,
/// speculator-majority (n - 1 anchor speculators, lambda 0.9, then one fundamentalist).
Roster preset_roster(std::string_view name, int n_traders);
bool is_preset(std::string_view name) noexcept;

/// Roster file: {"agents": [{"seat": 1, "kind": "ZIC", ...parameters}, ...]}
/// covering every seat exactly once. Missing parameters take the kind's defaults.
Roster roster_from_json(const nlohmann::json& j);
Roster load_roster(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const Roster& roster);

/// Preset name or file path.
Roster resolve_roster(const std::string& preset_or_path, int n_traders);

/// Drives agents through one period: `ticks` rounds, each a fresh random
/// order of all seats. On its turn an agent's resting orders are withdrawn,
/// then it decides on the updated book.
class AgentSource final : public session::CommandSource {
 public:
  AgentSource(session::VirtualClock& clock, const Roster& roster, std::vector<Rng>& agent_rngs, Rng& scheduler,
              int ticks);

  std::optional<session::Command> next(const session::Session& session, double deadline) override;
  void on_period_open(const session::Session& session) override;

 private:
  MarketView view_of(const session::Session& session, TraderId trader) const;

  session::VirtualClock& clock_;
  const Roster& roster_;
  std::vector<Rng>& rngs_;
  Rng& scheduler_;
  int ticks_;
  int tick_ = 0;
  std::vector<TraderId> order_;
  std::size_t turn_ = 0;
  std::deque<session::Command> pending_;
  std::optional<TraderId> deciding_;
};

struct SimulationOptions {
  int ticks = kDefaultTicks;
  bool questionnaires = true;
};

/// Runs a whole session with the seed as the session's dividend seed and as
/// the root of every agent stream. Same inputs give a byte-identical log.
std::vector<session::EventRecord> run_simulation(session::SessionConfig config, const Roster& roster,
                                                 std::uint64_t seed, const SimulationOptions& options = {});

}  // namespace bubblelab::agents
