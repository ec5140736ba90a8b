#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "tca/protocol/event.hpp"

namespace tca {

struct MeanSd {
  double mean = 0;
  double sd = 1;
  bool operator==(const MeanSd&) const = default;
};

using ScoreTrajectory = std::array<MeanSd, 4>;  // W0, W2, W4, W6

struct WeekTargets {
  int week = 1;
  double rema = 0;
  double tema = 0;
  double emi = 0;
  double routine = 0;
};

struct BehaviorModel {
  std::array<double, 6> weekly_rema_prob{};
  std::array<double, 6> voluntary_rate{};  // expected voluntary EMAs per week
  std::array<double, 6> emi_propensity{};
  std::array<double, 6> routine_item_prob{};
  std::map<Instrument, ScoreTrajectory> score_trajectory;
  double within_subject_corr = 0.7;
  /// Beta concentration of per-participant engagement around each weekly mean.
  double engagement_concentration = 10.0;
  /// Probability that a diary entry reports a bad point (raises a safety flag).
  double bad_point_prob = 0.03;

  /// Throws validation when a probability leaves [0,1], a rate is negative, or a dispersion
  /// is not positive.
  void validate() const;
};

/// Behavior model from weekly compliance percentages and per-wave score targets.
/// Throws validation for percentages outside 0..200 or tEMA below rEMA.
BehaviorModel calibrate_from_targets(const std::vector<WeekTargets>& weeks,
                                     const std::map<Instrument, ScoreTrajectory>& trajectories,
                                     double within_subject_corr = 0.7);

struct Calibration {
  std::vector<WeekTargets> weeks;
  WeekTargets total;
  std::map<Instrument, ScoreTrajectory> intervention_scores;
  std::map<Instrument, ScoreTrajectory> control_scores;
  double within_subject_corr = 0.7;

  BehaviorModel intervention_model() const;
  BehaviorModel control_model() const;
};

Calibration load_calibration(std::string_view json_text);
const Calibration& builtin_calibration();

struct SimConfig {
  std::uint64_t seed = 1;
  int n_intervention = 29;
  int n_control = 29;
  int weeks = 6;
  BehaviorModel intervention_model;
  BehaviorModel control_model;
  Date enrollment_date = Date{std::chrono::year{2024} / 6 / 3};  // a Monday
  /// Spread enrollments over the week following enrollment_date.
  bool staggered = false;
  TimeZone timezone;

  static SimConfig with_n_per_arm(std::uint64_t seed, int n_per_arm, const Calibration& calibration);
  void validate() const;
};

struct SimParticipant {
  ParticipantProfile profile;
  std::vector<ProtocolEvent> events;
};

struct SimResult {
  std::vector<SimParticipant> participants;
};

/// Deterministic in config.seed; each participant draws from its own sub-seed, so results do
/// not depend on generation order. Every event is validated by apply_event on emission.
SimResult simulate_cohort(const SimConfig& config);

/// Only the assessment draws (same per-participant seeds and values as simulate_cohort).
std::vector<SimParticipant> simulate_assessments(const SimConfig& config);

}  // namespace tca
