#include "bubblelab/session/scripted.hpp"

namespace bubblelab::session {

void record_submission(Session& session, const QuestionnaireSubmission& submission) {
  session.record_questionnaire(submission.prices);
  for (const auto& a : submission.assessments) session.record_questionnaire(a);
}

std::optional<Command> ScriptedSource::next(const Session& session, double deadline) {
  const double start = deadline - session.config().period_seconds;
  if (index_ >= commands_.size()) {
    clock_.set(deadline);
    return std::nullopt;
  }
  const double step = session.config().period_seconds / static_cast<double>(commands_.size() + 1);
  clock_.set(start + step * static_cast<double>(index_ + 1));
  return commands_[index_++];
}

std::vector<EventRecord> run_scripted_session(const SessionConfig& config, const Script& script) {
  VirtualClock clock;
  Session session(config, clock);
  for (const auto& q : script.questionnaires) record_submission(session, q);
  for (int t = 1; t <= config.n_periods; ++t) {
    std::vector<Command> commands;
    if (static_cast<std::size_t>(t) <= script.periods.size()) commands = script.periods[t - 1];
    ScriptedSource source(clock, std::move(commands));
    run_period(session, source);
  }
  session.finish();
  return session.log().records();
}

}  // namespace bubblelab::session
