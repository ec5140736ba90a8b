#include "tca/scheduler/schedule.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "tca/core/error.hpp"
#include "tca/protocol/calendar.hpp"

namespace tca {

namespace {

bool on_grid(ClockTime t) { return t.minutes_of_day() % kGridMinutes == 0; }

// Tie-break for prompts due at the same minute: greeting before wash, etc.
int kind_rank(const ScheduledPrompt& p) {
  int rank = static_cast<int>(p.kind) * 4;
  if (p.slot) rank += static_cast<int>(*p.slot);
  return rank;
}

}  // namespace

std::pair<ClockTime, ClockTime> ema_window(Slot slot) {
  switch (slot) {
    case Slot::morning: return {ClockTime{9, 0}, ClockTime{12, 0}};
    case Slot::afternoon: return {ClockTime{13, 0}, ClockTime{16, 0}};
    case Slot::evening: return {ClockTime{18, 0}, ClockTime{21, 0}};
  }
  return {};
}

const ScheduledPrompt* DailySchedule::ema_prompt(Slot slot) const {
  for (const auto& p : prompts) {
    if (p.kind == PromptKind::EmaPrompt && p.slot == slot) return &p;
  }
  return nullptr;
}

bool DailySchedule::has(PromptKind kind) const {
  return std::any_of(prompts.begin(), prompts.end(), [&](const auto& p) { return p.kind == kind; });
}

std::vector<Violation> validate_onboarding_config(const OnboardingConfig& config, const BaCatalog& catalog) {
  std::vector<Violation> out;
  static constexpr ViolationCode window_codes[] = {ViolationCode::morning_window, ViolationCode::afternoon_window,
                                                   ViolationCode::evening_window};
  static constexpr ViolationCode grid_codes[] = {ViolationCode::morning_grid, ViolationCode::afternoon_grid,
                                                 ViolationCode::evening_grid};
  for (int s = 0; s < 3; ++s) {
    auto slot = static_cast<Slot>(s);
    auto t = config.ema_times[s];
    auto [lo, hi] = ema_window(slot);
    if (t < lo || t > hi) {
      out.push_back({window_codes[s], std::string(to_string(slot)) + " EMA at " + t.str() + " outside " +
                                          lo.str() + "-" + hi.str()});
    }
    if (!on_grid(t)) out.push_back({grid_codes[s], t.str() + " is not on the 30-minute grid"});
  }
  if (!on_grid(config.todo_time)) {
    out.push_back({ViolationCode::todo_grid, config.todo_time.str() + " is not on the 30-minute grid"});
  }
  if (!on_grid(config.diary_time)) {
    out.push_back({ViolationCode::diary_grid, config.diary_time.str() + " is not on the 30-minute grid"});
  }
  auto n = config.ba_selected.size();
  if (n < 3 || n > 6) out.push_back({ViolationCode::ba_count, std::to_string(n) + " BA activities selected, need 3-6"});
  std::set<std::string> seen;
  for (const auto& id : config.ba_selected) {
    if (!catalog.contains(id)) out.push_back({ViolationCode::ba_unknown, "unknown BA activity '" + id + "'"});
    if (!seen.insert(id).second) out.push_back({ViolationCode::ba_duplicate, "BA activity '" + id + "' selected twice"});
  }
  if (config.step_goal <= 0) out.push_back({ViolationCode::step_goal, "step goal must be positive"});
  return out;
}

DailySchedule build_daily_schedule(const OnboardingConfig& config, Date enrollment_date, int study_day, TimeZone tz,
                                   const ScheduleSettings& settings) {
  if (study_day < 0 || study_day >= kStudyDays) {
    fail(ErrorCode::range, "study day " + std::to_string(study_day) + " outside 0..41");
  }
  if (auto v = validate_onboarding_config(config); !v.empty()) {
    fail(ErrorCode::validation, "invalid onboarding config: " + v.front().detail);
  }
  DailySchedule out;
  out.study_day = study_day;
  out.date = enrollment_date + days(study_day);
  auto at = [&](ClockTime t) { return tz.at(out.date, t); };
  auto add = [&](PromptKind kind, Timestamp due) {
    ScheduledPrompt p;
    p.kind = kind;
    p.due_at = due;
    out.prompts.push_back(p);
  };

  add(PromptKind::MorningGreeting, at(settings.greeting_time));
  add(PromptKind::WashPrompt, at(settings.greeting_time));
  add(PromptKind::TodoLink, at(config.todo_time));
  for (int s = 0; s < 3; ++s) {
    ScheduledPrompt p;
    p.kind = PromptKind::EmaPrompt;
    p.slot = static_cast<Slot>(s);
    p.due_at = at(config.ema_times[s]);
    p.validity_until = p.due_at + minutes(kEmaValidityMinutes);
    if (config.reminder_enabled) p.reminder_at = p.due_at + minutes(kReminderDelayMinutes);
    out.prompts.push_back(p);
  }
  if (study_day >= 1) add(PromptKind::DailyReport, at(settings.daily_report_time));
  add(PromptKind::StepPrompt, at(config.ema_time(Slot::afternoon)));
  add(PromptKind::DiaryLink, at(config.diary_time));
  if (weekday_index(out.date) == 0) add(PromptKind::WeeklyFeedback, at(settings.weekly_feedback_time));

  std::stable_sort(out.prompts.begin(), out.prompts.end(), [](const auto& a, const auto& b) {
    return std::tuple(a.due_at, kind_rank(a)) < std::tuple(b.due_at, kind_rank(b));
  });
  return out;
}

std::vector<DailySchedule> build_study_schedule(const OnboardingConfig& config, Date enrollment_date, TimeZone tz,
                                                const ScheduleSettings& settings) {
  std::vector<DailySchedule> out;
  int n = study_length_days(enrollment_date);
  out.reserve(n);
  for (int d = 0; d < n; ++d) out.push_back(build_daily_schedule(config, enrollment_date, d, tz, settings));
  return out;
}

EmaClassification classify_ema_submission(const DailySchedule& schedule, Timestamp submitted_at,
                                          std::span<const Slot> answered) {
  std::optional<Slot> match;
  int candidates = 0;
  for (const auto& p : schedule.prompts) {
    if (p.kind != PromptKind::EmaPrompt || !p.slot) continue;
    if (std::find(answered.begin(), answered.end(), *p.slot) != answered.end()) continue;
    if (submitted_at >= p.due_at && submitted_at <= *p.validity_until) {
      match = p.slot;
      ++candidates;
    }
  }
  if (candidates == 1) return EmaClassification::regular(*match);
  return EmaClassification::voluntary();
}

std::string prompt_message_id(const ParticipantId& participant, const ScheduledPrompt& prompt, bool reminder,
                              TimeZone tz) {
  auto id = participant + "/" + format_date(tz.local_date(prompt.due_at)) + "/" + std::string(to_string(prompt.kind));
  if (prompt.slot) id += "/" + std::string(to_string(*prompt.slot));
  if (reminder) id += "/reminder";
  return id;
}

std::vector<DueItem> items_between(std::span<const ParticipantSchedule> schedules, std::optional<Timestamp> after,
                                   Timestamp until) {
  std::vector<DueItem> out;
  auto in_range = [&](Timestamp t) { return (!after || t > *after) && t <= until; };
  for (const auto& ps : schedules) {
    for (const auto& day : ps.days) {
      for (const auto& p : day.prompts) {
        if (in_range(p.due_at)) out.push_back({ps.participant_id, p, false, p.due_at});
        if (p.reminder_at && in_range(*p.reminder_at)) out.push_back({ps.participant_id, p, true, *p.reminder_at});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const DueItem& a, const DueItem& b) {
    return std::tie(a.fire_at, a.participant_id) < std::tie(b.fire_at, b.participant_id);
  });
  return out;
}

std::vector<DueItem> DueCursor::due_items(std::span<const ParticipantSchedule> schedules, Timestamp now) {
  if (last_tick_ && now < *last_tick_) {
    fail(ErrorCode::clock_regression, "tick moved backwards");
  }
  auto out = items_between(schedules, last_tick_, now);
  last_tick_ = now;
  return out;
}

}  // namespace tca
