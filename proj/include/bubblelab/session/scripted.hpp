#pragma once

#include <vector>

#include "bubblelab/session/period.hpp"

namespace bubblelab::session {

/// A fixed command schedule: questionnaires in submission order, then the
/// commands of each period in arrival order.
struct Script {
  std::vector<QuestionnaireSubmission> questionnaires;
  std::vector<std::vector<Command>> periods;
};

/// Records a submission the way the live server does: prices first, then
/// each assessment item in order.
void record_submission(Session& session, const QuestionnaireSubmission& submission);

/// Replays a script's commands for one period, spacing them evenly on a virtual clock.
class ScriptedSource final : public CommandSource {
 public:
  ScriptedSource(VirtualClock& clock, std::vector<Command> commands)
      : clock_(clock), commands_(std::move(commands)) {}

  std::optional<Command> next(const Session& session, double deadline) override;

 private:
  VirtualClock& clock_;
  std::vector<Command> commands_;
  std::size_t index_ = 0;
};

/// Runs a whole session in process on a virtual clock and returns its log.
std::vector<EventRecord> run_scripted_session(const SessionConfig& config, const Script& script);

}  // namespace bubblelab::session
