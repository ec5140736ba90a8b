#pragma once

#include "tca/gamification/engine.hpp"
#include "tca/protocol/transition.hpp"

namespace tca {

/// Day ledgers and diary BA sets for one study week (short first week per enrollment weekday).
WeekLedger week_ledger_for(const ParticipantState& state, int week);

int regular_ema_in_week(const ParticipantState& state, int week);

struct SettlementRecorded {
  Transition transition;
  WeeklySettlement settlement;
};

/// Settles a closed week and appends MissionSettled. Throws state for a double settlement or
/// a week that has not ended at `at`.
SettlementRecorded settle_week(const ParticipantState& state, Timestamp at, int week);

/// Closed, unsettled weeks at `now`, in order.
std::vector<int> weeks_due_for_settlement(const ParticipantState& state, Timestamp now);

}  // namespace tca
