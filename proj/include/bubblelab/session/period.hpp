#pragma once

#include <optional>

#include "bubblelab/session/session.hpp"

namespace bubblelab::session {

/// Supplies the ordered command stream for one period. Live sessions block on
/// the network queue until the deadline; simulations advance a virtual clock.
class CommandSource {
 public:
  virtual ~CommandSource() = default;

  /// Next command to apply, or nullopt once the clock has reached the deadline.
  virtual std::optional<Command> next(const Session& session, double deadline) = 0;

  virtual void on_period_open(const Session&) {}
  /// `first_new` is the seq of the first event the command appended (if any).
  virtual void on_result(const Session&, const Command&, const CommandResult&, Seq /*first_new*/) {}
  virtual void on_period_close(const Session&, const PeriodResult&) {}
};

/// Opens period t, applies commands until the source reports the deadline,
/// then settles the period.
PeriodResult run_period(Session& session, CommandSource& source);

}  // namespace bubblelab::session
