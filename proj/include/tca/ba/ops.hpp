#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tca/protocol/transition.hpp"

namespace tca {

/// Transition plus the new PlanRecorded event.
Transition record_daily_plan(const ParticipantState& state, Timestamp at, const DailyPlan& plan);

struct DiaryOutcome {
  Transition transition;
  std::vector<SafetyFlagRaised> safety_flags;
};

/// Appends DiaryRecorded and, when bad_points is non-empty, SafetyFlagRaised.
DiaryOutcome record_diary(const ParticipantState& state, Timestamp at, const DailyDiary& diary);

/// Inclusive score ranges per color. Negative affect and rumination use `high_is_bad`; pleasant
/// activity uses the mirror image.
struct ColorBands {
  int green_max = 3;   // 0..green_max green for NA and rumination
  int yellow_max = 6;  // green_max+1..yellow_max yellow, above is red
  bool operator==(const ColorBands&) const = default;
};

EmaColor color_for(int score, bool high_is_bad, const ColorBands& bands = {});

struct EmaColors {
  Timestamp at{};
  std::optional<Slot> slot;
  EmaColor negative_affect = EmaColor::green;
  EmaColor rumination = EmaColor::green;
  EmaColor pleasant_activity = EmaColor::green;
  bool operator==(const EmaColors&) const = default;
};

struct DailyReport {
  ParticipantId participant_id;
  Date for_date{};
  std::set<Stamp> stamps;
  std::string gratitude_text;
  std::string praise_text;
  std::vector<std::string> emotions;
  std::vector<EmaColors> ema_colors;
  std::vector<EmiSatisfaction> emi_satisfaction;
  std::string image_prompt;
  bool operator==(const DailyReport&) const = default;
};

/// Report for the previous day. Throws range when for_date is outside the study window and
/// validation when the day has not ended yet relative to `today`.
DailyReport assemble_daily_report(const ParticipantState& state, Date for_date, Date today,
                                  const ColorBands& bands = {});

/// Image prompt for a diary entry; throws templating on a missing field.
std::string render_image_prompt(const ParticipantProfile& profile, const DailyDiary& diary);

/// Flag id for a diary's safety flag: "<participant>-<date>".
std::string safety_flag_id(const ParticipantId& participant, Date date);

}  // namespace tca
