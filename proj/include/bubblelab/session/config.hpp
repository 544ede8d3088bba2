#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "bubblelab/common/rng.hpp"
#include "bubblelab/common/types.hpp"

namespace bubblelab::session {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SessionConfig {
  int n_traders = 6;
  int n_periods = 10;
  int period_seconds = 120;
  Cents dividend_value = 20;
  Probability dividend_prob{1, 2};
  Shares endowment_shares = 3;
  Cents endowment_cash = 600;
  Cents showup_fee = 500;
  std::uint64_t rng_seed = 1;
  std::string session_id = "session";

  /// Throws ConfigError naming the first violated bound.
  void validate() const;

  friend bool operator==(const SessionConfig&, const SessionConfig&) = default;
};

nlohmann::ordered_json to_json(const SessionConfig& config);
/// Missing keys keep their defaults; unknown keys are ignored. The probability
/// may be a number or a "num/den" string. Throws ConfigError.
SessionConfig config_from_json(const nlohmann::json& j);
SessionConfig load_config(const std::filesystem::path& path);

}  // namespace bubblelab::session
