#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "tca/core/enum_names.hpp"

namespace tca {

enum class MissionRule {
  routines_daily_1,
  routines_daily_2,
  routines_daily_3,
  three_daily_incl_ba,
  three_daily_distinct_ba,
  all_routines_distinct_ba,
};

struct Mission {
  int from_level = 0;
  MissionRule rule = MissionRule::routines_daily_1;

  /// Routine items that must be done on every day of the week.
  int required_items() const;
  bool requires_ba_daily() const;
  bool requires_distinct_ba() const;

  bool operator==(const Mission&) const = default;
};

enum class MileageSource { mission_reward, ema_point };

struct MileageEntry {
  int week_index = 0;
  MileageSource source = MileageSource::ema_point;
  int points = 0;

  bool operator==(const MileageEntry&) const = default;
};

struct MileageLedger {
  std::vector<MileageEntry> entries;

  int total() const;
  bool operator==(const MileageLedger&) const = default;
};

struct WeeklySettlement {
  int week_index = 0;
  bool passed = false;
  int previous_level = 0;
  int new_level = 0;
  int mission_points = 0;
  int ema_points = 0;

  int total_points() const { return mission_points + ema_points; }
  bool operator==(const WeeklySettlement&) const = default;
};

constexpr int kMaxLevel = 6;
constexpr int kMaxWeeklyEmaPoints = 21;

struct GamificationState {
  int level = 0;
  MileageLedger mileage;
  std::optional<Mission> current_mission;
  std::vector<WeeklySettlement> settlements;

  std::string_view level_name() const;
  bool operator==(const GamificationState&) const = default;
};

/// "Happy Novice" for level 1 through "Happy Master" for level 6; "Level 0" before the first pass.
std::string_view level_name(int level);

}  // namespace tca

TCA_ENUM_NAMES(tca::MissionRule, "routines_daily_1"sv, "routines_daily_2"sv, "routines_daily_3"sv,
               "three_daily_incl_ba"sv, "three_daily_distinct_ba"sv, "all_routines_distinct_ba"sv);
TCA_ENUM_NAMES(tca::MileageSource, "mission_reward"sv, "ema_point"sv);
