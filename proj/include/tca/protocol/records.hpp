#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tca/core/time.hpp"
#include "tca/protocol/types.hpp"

namespace tca {

using ParticipantId = std::string;

struct ParticipantProfile {
  ParticipantId participant_id;
  std::string nickname;
  Gender gender = Gender::female;
  int age = 0;
  Arm arm = Arm::intervention;
  Date enrollment_date{};
  int phq9_total = 0;
  Severity severity_cell = Severity::mild;

  bool operator==(const ParticipantProfile&) const = default;
};

/// Severity cell used for content tailoring: PHQ-9 totals 5-9 are mild, 10-19 moderate.
/// Throws range for totals outside the enrollable 5-19 band.
Severity severity_for_phq9(int phq9_total);
AgeBand age_band_for(int age);

/// Throws validation if the profile breaks an enrollment invariant.
void validate_profile(const ParticipantProfile& profile);

struct OnboardingConfig {
  std::array<ClockTime, 3> ema_times{};  // morning, afternoon, evening
  bool reminder_enabled = false;
  ClockTime todo_time{10, 0};
  ClockTime diary_time{22, 0};
  int step_goal = 6000;
  std::vector<std::string> ba_selected;
  std::string affirmation_text;

  ClockTime ema_time(Slot slot) const { return ema_times[static_cast<std::size_t>(slot)]; }
  bool selected(const std::string& ba_id) const;

  bool operator==(const OnboardingConfig&) const = default;
};

/// Three visual-analog self-report indicators, each an integer 0-10.
struct EmaScores {
  int negative_affect = 0;
  int rumination = 0;
  int pleasant_activity = 0;

  bool operator==(const EmaScores&) const = default;
};

void validate_ema_scores(const EmaScores& scores);

/// Regular(slot) when answered inside a live validity window, otherwise voluntary.
struct EmaClassification {
  std::optional<Slot> slot;

  static EmaClassification regular(Slot s) { return {s}; }
  static EmaClassification voluntary() { return {}; }
  bool is_regular() const { return slot.has_value(); }

  bool operator==(const EmaClassification&) const = default;
};

struct EmiOption {
  EmiType type = EmiType::breathing;
  EmiFormat format = EmiFormat::short_text;

  bool operator==(const EmiOption&) const = default;
};

/// Short text exists only for breathing, rumination journaling and body scan.
bool is_legal_emi_option(const EmiOption& option);

struct DailyPlan {
  Date date{};
  std::vector<std::string> todo_items;
  std::string chosen_ba;

  bool operator==(const DailyPlan&) const = default;
};

struct DailyDiary {
  Date date{};
  std::vector<std::string> emotions;
  std::string emotion_event;
  std::string gratitude;
  std::string self_praise;
  bool washed = false;
  int steps = 0;
  std::vector<std::string> ba_done;
  std::optional<std::string> good_points;
  std::optional<std::string> bad_points;

  bool operator==(const DailyDiary&) const = default;
};

/// Done/not-done status of the five routine items on one day.
struct RoutineDayLedger {
  Date date{};
  std::array<bool, kRoutineItemCount> done{};

  bool is_done(RoutineItem item) const { return done[static_cast<std::size_t>(item)]; }
  void set(RoutineItem item, bool value) { done[static_cast<std::size_t>(item)] = value; }
  int done_count() const;

  bool operator==(const RoutineDayLedger&) const = default;
};

}  // namespace tca
