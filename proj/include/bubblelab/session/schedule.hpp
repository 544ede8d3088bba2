#pragma once

#include <stdexcept>

#include "bubblelab/common/rng.hpp"
#include "bubblelab/session/config.hpp"

namespace bubblelab::session {

class PeriodOutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Expected remaining dividends at the start of period t: p * d * (T - t + 1),
/// computed exactly and rounded half-up to whole cents.
Cents intrinsic_value(const SessionConfig& config, int t);

/// Highest possible remaining dividends at the start of period t: d * (T - t + 1).
Cents max_present_value(const SessionConfig& config, int t);

/// d with probability p, else 0. Consumes exactly one draw.
Cents draw_dividend(Rng& rng, const SessionConfig& config);

}  // namespace bubblelab::session
