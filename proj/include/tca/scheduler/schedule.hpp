#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tca/ba/catalog.hpp"
#include "tca/core/time.hpp"
#include "tca/protocol/records.hpp"

namespace tca {

constexpr int kEmaValidityMinutes = 60;
constexpr int kReminderDelayMinutes = 30;
constexpr int kGridMinutes = 30;

/// Study-wide fixed times for prompts that participants do not choose.
struct ScheduleSettings {
  ClockTime greeting_time{8, 30};
  ClockTime weekly_feedback_time{9, 0};
  ClockTime daily_report_time{15, 0};

  bool operator==(const ScheduleSettings&) const = default;
};

struct ScheduledPrompt {
  PromptKind kind = PromptKind::MorningGreeting;
  std::optional<Slot> slot;  // EmaPrompt only
  Timestamp due_at{};
  std::optional<Timestamp> validity_until;
  std::optional<Timestamp> reminder_at;

  bool operator==(const ScheduledPrompt&) const = default;
};

struct DailySchedule {
  int study_day = 0;
  Date date{};
  std::vector<ScheduledPrompt> prompts;

  const ScheduledPrompt* ema_prompt(Slot slot) const;
  bool has(PromptKind kind) const;
};

enum class ViolationCode {
  morning_window,
  afternoon_window,
  evening_window,
  morning_grid,
  afternoon_grid,
  evening_grid,
  todo_grid,
  diary_grid,
  ba_count,
  ba_unknown,
  ba_duplicate,
  step_goal,
};

struct Violation {
  ViolationCode code;
  std::string detail;
};

/// Every violated onboarding constraint; empty when the config is valid.
std::vector<Violation> validate_onboarding_config(const OnboardingConfig& config,
                                                  const BaCatalog& catalog = BaCatalog::builtin());

/// Allowed [first, last] EMA times per slot, inclusive.
std::pair<ClockTime, ClockTime> ema_window(Slot slot);

DailySchedule build_daily_schedule(const OnboardingConfig& config, Date enrollment_date, int study_day,
                                   TimeZone tz, const ScheduleSettings& settings = {});

/// All days inside the participant's study window.
std::vector<DailySchedule> build_study_schedule(const OnboardingConfig& config, Date enrollment_date, TimeZone tz,
                                                const ScheduleSettings& settings = {});

/// Regular(slot) iff submitted_at falls in [due, due+60min] of exactly one EMA prompt whose slot
/// is not in `answered`; Voluntary otherwise.
EmaClassification classify_ema_submission(const DailySchedule& schedule, Timestamp submitted_at,
                                          std::span<const Slot> answered = {});

/// Deterministic outbox id: "<participant>/<local date>/<kind>[/<slot>][/reminder]".
std::string prompt_message_id(const ParticipantId& participant, const ScheduledPrompt& prompt, bool reminder,
                              TimeZone tz);

struct ParticipantSchedule {
  ParticipantId participant_id;
  std::vector<DailySchedule> days;
};

struct DueItem {
  ParticipantId participant_id;
  ScheduledPrompt prompt;
  bool reminder = false;
  Timestamp fire_at{};

  bool operator==(const DueItem&) const = default;
};

/// Tracks the last tick and yields every prompt or reminder whose fire time lies in
/// (last_tick, now]. Owned by a single dispatch loop.
class DueCursor {
 public:
  DueCursor() = default;
  explicit DueCursor(Timestamp last_tick) : last_tick_(last_tick) {}

  /// Throws clock_regression when now < last tick.
  std::vector<DueItem> due_items(std::span<const ParticipantSchedule> schedules, Timestamp now);

  std::optional<Timestamp> last_tick() const { return last_tick_; }

 private:
  std::optional<Timestamp> last_tick_;
};

/// Items with fire time in (after, until]; stateless helper behind DueCursor.
std::vector<DueItem> items_between(std::span<const ParticipantSchedule> schedules,
                                   std::optional<Timestamp> after, Timestamp until);

}  // namespace tca

TCA_ENUM_NAMES(tca::ViolationCode, "morning_window"sv, "afternoon_window"sv, "evening_window"sv, "morning_grid"sv,
               "afternoon_grid"sv, "evening_grid"sv, "todo_grid"sv, "diary_grid"sv, "ba_count"sv, "ba_unknown"sv,
               "ba_duplicate"sv, "step_goal"sv);
