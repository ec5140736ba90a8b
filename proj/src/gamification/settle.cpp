#include "tca/gamification/settle.hpp"

#include "tca/core/error.hpp"
#include "tca/protocol/calendar.hpp"

namespace tca {

WeekLedger week_ledger_for(const ParticipantState& state, int week) {
  auto range = study_week_range(state.enrollment_date(), week);
  WeekLedger out;
  for (int sd = range.first_day; sd <= range.last_day; ++sd) {
    auto date = state.enrollment_date() + days(sd);
    WeekDay d{state.ledger_for(date), {}};
    if (const auto* r = state.day(date); r && r->diary) d.ba_done = r->diary->ba_done;
    out.days.push_back(std::move(d));
  }
  return out;
}

int regular_ema_in_week(const ParticipantState& state, int week) {
  auto range = study_week_range(state.enrollment_date(), week);
  auto first = state.enrollment_date() + days(range.first_day);
  return state.regular_ema_in(first, state.enrollment_date() + days(range.last_day));
}

SettlementRecorded settle_week(const ParticipantState& state, Timestamp at, int week) {
  require(state.in_intervention(), ErrorCode::state, "participant has no missions");
  auto s = compute_settlement(state.gamification, week, week_ledger_for(state, week), regular_ema_in_week(state, week));
  Transition t(state);
  t.append(at, MissionSettled{s});
  return {std::move(t), s};
}

std::vector<int> weeks_due_for_settlement(const ParticipantState& state, Timestamp now) {
  std::vector<int> out;
  if (!state.in_intervention()) return out;
  auto today = state.date_of(now);
  for (int w = static_cast<int>(state.gamification.settlements.size()) + 1; w <= kStudyWeeks; ++w) {
    auto range = study_week_range(state.enrollment_date(), w);
    if (today > state.enrollment_date() + days(range.last_day)) out.push_back(w);
  }
  return out;
}

}  // namespace tca
