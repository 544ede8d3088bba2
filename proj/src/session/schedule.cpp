#include "bubblelab/session/schedule.hpp"

#include <string>

namespace bubblelab::session {

namespace {

void check_period(const SessionConfig& config, int t) {
  if (t < 1 || t > config.n_periods)
    throw PeriodOutOfRange("period " + std::to_string(t) + " outside 1.." + std::to_string(config.n_periods));
}

}  // namespace

Cents intrinsic_value(const SessionConfig& config, int t) {
  check_period(config, t);
  const auto remaining = static_cast<__int128>(config.n_periods - t + 1);
  const __int128 num = static_cast<__int128>(config.dividend_prob.num) * config.dividend_value * remaining;
  const __int128 den = config.dividend_prob.den;
  return static_cast<Cents>((2 * num + den) / (2 * den));
}

Cents max_present_value(const SessionConfig& config, int t) {
  check_period(config, t);
  return config.dividend_value * (config.n_periods - t + 1);
}

Cents draw_dividend(Rng& rng, const SessionConfig& config) {
  return rng.bernoulli(config.dividend_prob) ? config.dividend_value : 0;
}

}  // namespace bubblelab::session
