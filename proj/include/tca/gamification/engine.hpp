#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tca/gamification/types.hpp"
#include "tca/protocol/records.hpp"

namespace tca {

/// Mission that moves a participant from `level` to level+1; nullopt at the terminal level.
/// Throws range for levels outside 0..6.
std::optional<Mission> mission_for_level(int level);

struct WeekDay {
  RoutineDayLedger ledger;
  std::vector<std::string> ba_done;
};

/// One study week: 7 days, or fewer for a short first week.
struct WeekLedger {
  std::vector<WeekDay> days;
};

/// Throws validation unless the week has 1..7 days.
bool evaluate_mission(const Mission& mission, const WeekLedger& week);

/// Pure settlement for a closed week. Throws state on double settlement and range on an
/// EMA count above the weekly cap.
WeeklySettlement compute_settlement(const GamificationState& state, int week_index, const WeekLedger& week,
                                    int regular_ema_count);

/// Folds a settlement into the gamification state (level, mileage, next mission).
GamificationState apply_settlement(GamificationState state, const WeeklySettlement& settlement);

struct DonationSummary {
  bool eligible = false;
  long amount_krw = 0;
  bool operator==(const DonationSummary&) const = default;
};

constexpr int kDonationThreshold = 100;
constexpr int kKrwPerPoint = 100;

DonationSummary donation_summary(const MileageLedger& ledger);

enum class CardMessageKind { success, failure };

struct WeeklyFeedbackCard {
  std::string level_name;
  int mileage_total = 0;
  int week_points = 0;
  std::string illustration_key;
  CardMessageKind message_kind = CardMessageKind::success;
  std::optional<Mission> next_mission;
  bool operator==(const WeeklyFeedbackCard&) const = default;
};

/// Scene key for a level's success card ("park_relaxing" ... "luxury_cruise").
std::string_view illustration_for_level(int level);
constexpr std::string_view kCryingIllustration = "happy_crying";

WeeklyFeedbackCard compose_feedback_card(const GamificationState& state, const WeeklySettlement& settlement);

}  // namespace tca

TCA_ENUM_NAMES(tca::CardMessageKind, "success"sv, "failure"sv);
