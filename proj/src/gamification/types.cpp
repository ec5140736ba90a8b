#include "tca/gamification/types.hpp"

#include <array>
#include <numeric>

namespace tca {

int Mission::required_items() const {
  switch (rule) {
    case MissionRule::routines_daily_1: return 1;
    case MissionRule::routines_daily_2: return 2;
    case MissionRule::routines_daily_3:
    case MissionRule::three_daily_incl_ba:
    case MissionRule::three_daily_distinct_ba: return 3;
    case MissionRule::all_routines_distinct_ba: return 5;
  }
  return 5;
}

bool Mission::requires_ba_daily() const {
  return rule == MissionRule::three_daily_incl_ba || requires_distinct_ba();
}

bool Mission::requires_distinct_ba() const {
  return rule == MissionRule::three_daily_distinct_ba || rule == MissionRule::all_routines_distinct_ba;
}

int MileageLedger::total() const {
  return std::accumulate(entries.begin(), entries.end(), 0,
                         [](int acc, const MileageEntry& e) { return acc + e.points; });
}

std::string_view level_name(int level) {
  static constexpr std::array<std::string_view, 7> names{
      "Level 0",          "Happy Novice", "Happy Beginner", "Happy Apprentice",
      "Happy Practitioner", "Happy Expert", "Happy Master"};
  if (level < 0 || level > kMaxLevel) return "?";
  return names[level];
}

std::string_view GamificationState::level_name() const { return tca::level_name(level); }

}  // namespace tca
