#include "bubblelab/session/period.hpp"

namespace bubblelab::session {

PeriodResult run_period(Session& session, CommandSource& source) {
  session.open_period();
  source.on_period_open(session);
  while (auto command = source.next(session, session.period_deadline())) {
    const Seq first_new = session.log().last_seq() + 1;
    const auto result = session.apply(*command);
    source.on_result(session, *command, result, first_new);
  }
  auto result = session.close_period();
  source.on_period_close(session, result);
  return result;
}

}  // namespace bubblelab::session
