#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tca/assessments/instruments.hpp"
#include "tca/protocol/event.hpp"

namespace tca {

struct EmaRecord {
  std::uint64_t seq = 0;
  Timestamp at{};
  EmaClassification classification;
  EmaScores scores;
  bool operator==(const EmaRecord&) const = default;
};

struct EmiSatisfaction {
  EmiType type = EmiType::breathing;
  int score = 0;
  bool operator==(const EmiSatisfaction&) const = default;
};

/// Everything recorded for one participant on one local date.
struct DayRecord {
  Date date{};
  std::vector<EmaRecord> ema;
  std::set<Slot> regular_slots;
  int voluntary_ema = 0;
  std::optional<DailyPlan> plan;
  std::optional<DailyDiary> diary;
  std::array<bool, kRoutineItemCount> marked{};  // RoutineItemDone events
  RoutineDayLedger ledger;
  int emi_completed = 0;
  std::vector<EmiSatisfaction> emi_satisfaction;
  bool operator==(const DayRecord&) const = default;

  int regular_ema() const { return static_cast<int>(regular_slots.size()); }
};

struct EmaCounters {
  int regular = 0;
  int voluntary = 0;
  bool operator==(const EmaCounters&) const = default;
};

struct OpenEmiOffer {
  std::string offer_id;
  std::uint64_t ema_seq = 0;
  Date date{};
  std::vector<EmiOption> options;
  bool operator==(const OpenEmiOffer&) const = default;
};

struct SafetyFlag {
  std::string flag_id;
  Date date{};
  std::string text;
  Timestamp raised_at{};
  bool operator==(const SafetyFlag&) const = default;
};

/// Fold of one participant's event stream. Every field is derived from events only.
struct ParticipantState {
  std::uint64_t last_seq = 0;
  Timestamp last_at{};
  bool enrolled = false;

  ParticipantProfile profile;
  std::optional<OnboardingConfig> config;
  TimeZone timezone;
  int study_day = 0;

  GamificationState gamification;
  EmaCounters ema_counters;
  int emi_completed_total = 0;
  std::optional<std::uint64_t> awaiting_offer_for;
  std::map<std::string, OpenEmiOffer> open_offers;
  std::set<std::string> closed_offers;

  std::map<Date, DayRecord> days;
  std::map<std::pair<Instrument, Wave>, ScoredAssessment> assessment_log;

  std::map<std::string, SafetyFlag> open_safety_flags;
  std::set<std::string> acked_safety_flags;

  std::set<std::string> issued_messages;
  std::set<std::string> dispatched_messages;
  std::map<Date, std::string> reports_dispatched;

  bool operator==(const ParticipantState&) const = default;

  bool in_intervention() const { return config.has_value(); }
  Date date_of(Timestamp t) const { return timezone.local_date(t); }
  Date enrollment_date() const { return profile.enrollment_date; }
  const DayRecord* day(Date d) const;
  /// Ledger for a date; all items not done when nothing was recorded.
  RoutineDayLedger ledger_for(Date d) const;
  int regular_ema_in(Date first, Date last) const;
};

/// Applies one event. Pure: the result depends only on (state, event).
ParticipantState apply_event(ParticipantState state, const ProtocolEvent& event);

/// Left fold of apply_event from the empty state. Errors name the offending seq.
ParticipantState replay(std::span<const ProtocolEvent> events);

/// Next event skeleton for this participant (seq = last_seq + 1). Enrolled takes its id from
/// the profile.
ProtocolEvent next_event(const ParticipantState& state, Timestamp at, EventPayload payload);

/// Applies events in order, returning the final state; used by the record_* operations.
ParticipantState apply_all(ParticipantState state, std::span<const ProtocolEvent> events);

}  // namespace tca
