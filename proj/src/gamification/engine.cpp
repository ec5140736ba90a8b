#include "tca/gamification/engine.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>

#include "tca/core/error.hpp"

namespace tca {

namespace {

// Kuhn's augmenting-path matching: can every day be assigned a different BA activity
// from its own done set?
bool distinct_assignment_exists(const std::vector<std::vector<int>>& options, int activity_count) {
  std::vector<int> owner(activity_count, -1);
  std::function<bool(int, std::vector<bool>&)> augment = [&](int day, std::vector<bool>& seen) {
    for (int a : options[day]) {
      if (seen[a]) continue;
      seen[a] = true;
      if (owner[a] < 0 || augment(owner[a], seen)) {
        owner[a] = day;
        return true;
      }
    }
    return false;
  };
  for (int day = 0; day < static_cast<int>(options.size()); ++day) {
    std::vector<bool> seen(activity_count, false);
    if (!augment(day, seen)) return false;
  }
  return true;
}

}  // namespace

std::optional<Mission> mission_for_level(int level) {
  static constexpr std::array<MissionRule, 6> rules{
      MissionRule::routines_daily_1,        MissionRule::routines_daily_2,
      MissionRule::routines_daily_3,        MissionRule::three_daily_incl_ba,
      MissionRule::three_daily_distinct_ba, MissionRule::all_routines_distinct_ba};
  if (level < 0 || level > kMaxLevel) fail(ErrorCode::range, "level " + std::to_string(level) + " outside 0..6");
  if (level == kMaxLevel) return std::nullopt;
  return Mission{level, rules[level]};
}

bool evaluate_mission(const Mission& mission, const WeekLedger& week) {
  auto n = week.days.size();
  require(n >= 1 && n <= 7, ErrorCode::validation, "week ledger has " + std::to_string(n) + " days, need 1..7");
  for (const auto& d : week.days) {
    if (d.ledger.done_count() < mission.required_items()) return false;
    if (mission.requires_ba_daily() && !d.ledger.is_done(RoutineItem::ba_activity)) return false;
  }
  if (!mission.requires_distinct_ba()) return true;

  std::map<std::string, int> ids;
  std::vector<std::vector<int>> options;
  for (const auto& d : week.days) {
    std::vector<int> opts;
    for (const auto& id : d.ba_done) {
      auto [it, _] = ids.emplace(id, static_cast<int>(ids.size()));
      if (std::find(opts.begin(), opts.end(), it->second) == opts.end()) opts.push_back(it->second);
    }
    if (opts.empty()) return false;
    options.push_back(std::move(opts));
  }
  return distinct_assignment_exists(options, static_cast<int>(ids.size()));
}

WeeklySettlement compute_settlement(const GamificationState& state, int week_index, const WeekLedger& week,
                                    int regular_ema_count) {
  require(week_index >= 1 && week_index <= 6, ErrorCode::range,
          "week " + std::to_string(week_index) + " outside 1..6");
  require(regular_ema_count >= 0 && regular_ema_count <= kMaxWeeklyEmaPoints, ErrorCode::range,
          "regular EMA count " + std::to_string(regular_ema_count) + " outside 0..21");
  for (const auto& s : state.settlements) {
    if (s.week_index == week_index) fail(ErrorCode::state, "week " + std::to_string(week_index) + " already settled");
  }
  require(static_cast<int>(state.settlements.size()) + 1 == week_index, ErrorCode::state,
          "week " + std::to_string(week_index) + " settled out of order");

  WeeklySettlement s;
  s.week_index = week_index;
  s.previous_level = state.level;
  auto mission = mission_for_level(state.level);
  s.passed = mission && evaluate_mission(*mission, week);
  s.new_level = s.passed ? state.level + 1 : state.level;
  s.mission_points = s.passed ? 10 * s.new_level : 0;
  s.ema_points = regular_ema_count;
  return s;
}

GamificationState apply_settlement(GamificationState state, const WeeklySettlement& s) {
  state.level = s.new_level;
  if (s.mission_points > 0) state.mileage.entries.push_back({s.week_index, MileageSource::mission_reward, s.mission_points});
  if (s.ema_points > 0) state.mileage.entries.push_back({s.week_index, MileageSource::ema_point, s.ema_points});
  state.current_mission = mission_for_level(state.level);
  state.settlements.push_back(s);
  return state;
}

DonationSummary donation_summary(const MileageLedger& ledger) {
  int total = ledger.total();
  if (total < kDonationThreshold) return {false, 0};
  return {true, static_cast<long>(total) * kKrwPerPoint};
}

std::string_view illustration_for_level(int level) {
  static constexpr std::array<std::string_view, 7> keys{
      "",        "park_relaxing",    "pet_cafe",     "dog_swimming_pool",
      "pet_shop", "beach_sunbathing", "luxury_cruise"};
  if (level < 1 || level > kMaxLevel) return kCryingIllustration;
  return keys[level];
}

WeeklyFeedbackCard compose_feedback_card(const GamificationState& state, const WeeklySettlement& s) {
  WeeklyFeedbackCard card;
  card.level_name = std::string(level_name(s.new_level));
  card.mileage_total = state.mileage.total();
  card.week_points = s.total_points();
  card.message_kind = s.passed ? CardMessageKind::success : CardMessageKind::failure;
  card.illustration_key = std::string(s.passed ? illustration_for_level(s.new_level) : kCryingIllustration);
  card.next_mission = mission_for_level(s.new_level);
  return card;
}

}  // namespace tca
