#include "tca/ba/ops.hpp"

#include <algorithm>

#include "tca/core/error.hpp"
#include "tca/core/template.hpp"
#include "tca/protocol/calendar.hpp"

namespace tca {

Transition record_daily_plan(const ParticipantState& state, Timestamp at, const DailyPlan& plan) {
  require(state.in_intervention(), ErrorCode::state, "participant does not keep daily plans");
  require(state.config->selected(plan.chosen_ba), ErrorCode::validation,
          "BA '" + plan.chosen_ba + "' is not among the participant's selections");
  Transition t(state);
  t.append(at, PlanRecorded{plan});
  return t;
}

std::string safety_flag_id(const ParticipantId& participant, Date date) {
  return participant + "-" + format_date(date);
}

DiaryOutcome record_diary(const ParticipantState& state, Timestamp at, const DailyDiary& diary) {
  require(diary.emotions.size() <= 3, ErrorCode::validation,
          "diary lists " + std::to_string(diary.emotions.size()) + " emotions, at most 3 allowed");
  DiaryOutcome out{Transition(state), {}};
  out.transition.append(at, DiaryRecorded{diary});
  if (diary.bad_points && !diary.bad_points->empty()) {
    auto id = safety_flag_id(state.profile.participant_id, diary.date);
    // A same-day resubmission keeps the original flag open.
    int n = 1;
    std::string candidate = id;
    while (out.transition.state.open_safety_flags.contains(candidate) ||
           out.transition.state.acked_safety_flags.contains(candidate)) {
      candidate = id + "-" + std::to_string(++n);
    }
    SafetyFlagRaised flag{candidate, diary.date, *diary.bad_points};
    out.transition.append(at, flag);
    out.safety_flags.push_back(std::move(flag));
  }
  return out;
}

EmaColor color_for(int score, bool high_is_bad, const ColorBands& b) {
  int s = high_is_bad ? score : 10 - score;
  if (s <= b.green_max) return EmaColor::green;
  if (s <= b.yellow_max) return EmaColor::yellow;
  return EmaColor::red;
}

std::string render_image_prompt(const ParticipantProfile& profile, const DailyDiary& diary) {
  std::string emotion;
  for (const auto& e : diary.emotions) {
    if (!emotion.empty()) emotion += ", ";
    emotion += e;
  }
  return render_template(prompt_template("diary_image"), {{"gender", std::string(to_string(profile.gender))},
                                                          {"age", std::to_string(profile.age)},
                                                          {"severity", std::string(to_string(profile.severity_cell))},
                                                          {"emotion", emotion},
                                                          {"event", diary.emotion_event},
                                                          {"gratitude", diary.gratitude},
                                                          {"praise", diary.self_praise}});
}

DailyReport assemble_daily_report(const ParticipantState& state, Date for_date, Date today, const ColorBands& bands) {
  auto enroll = state.enrollment_date();
  require(for_date >= enroll && for_date < enroll + days(study_length_days(enroll)), ErrorCode::range,
          "report date " + format_date(for_date) + " outside the study window");
  require(for_date < today, ErrorCode::validation, "report date " + format_date(for_date) + " has not ended");

  DailyReport r;
  r.participant_id = state.profile.participant_id;
  r.for_date = for_date;
  auto ledger = state.ledger_for(for_date);
  if (ledger.is_done(RoutineItem::wash)) r.stamps.insert(Stamp::wash);
  if (ledger.is_done(RoutineItem::steps_goal)) r.stamps.insert(Stamp::walk);
  if (ledger.is_done(RoutineItem::todo_list)) r.stamps.insert(Stamp::todo);
  if (ledger.is_done(RoutineItem::ba_activity)) r.stamps.insert(Stamp::ba);
  if (ledger.is_done(RoutineItem::diary)) r.stamps.insert(Stamp::diary);

  if (const auto* day = state.day(for_date)) {
    if (day->regular_ema() >= 1) r.stamps.insert(Stamp::ema);
    for (const auto& e : day->ema) {
      r.ema_colors.push_back({e.at, e.classification.slot, color_for(e.scores.negative_affect, true, bands),
                              color_for(e.scores.rumination, true, bands),
                              color_for(e.scores.pleasant_activity, false, bands)});
    }
    r.emi_satisfaction = day->emi_satisfaction;
    if (day->diary) {
      r.gratitude_text = day->diary->gratitude;
      r.praise_text = day->diary->self_praise;
      r.emotions = day->diary->emotions;
      try {
        r.image_prompt = render_image_prompt(state.profile, *day->diary);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::templating) throw;
      }
    }
  }
  return r;
}

}  // namespace tca
