#pragma once

#include <span>
#include <vector>

#include "tca/analytics/stats.hpp"
#include "tca/protocol/state.hpp"

namespace tca {

/// Outcome totals at W0..W6 per participant with baseline covariate totals. Participants
/// missing any required assessment are dropped.
AncovaInput assessment_ancova_input(std::span<const ParticipantState> participants, Instrument outcome,
                                    std::vector<Instrument> covariates = {Instrument::BDI2, Instrument::GAD7});

/// Mean observed total per arm and wave; NaN where nobody was assessed.
struct WaveMeans {
  std::array<double, 4> intervention{};
  std::array<double, 4> control{};
};

WaveMeans observed_wave_means(std::span<const ParticipantState> participants, Instrument outcome);

/// Age, PHQ-9 and baseline instrument totals as t-test fields; gender and severity cell as
/// chi-square fields.
BaselineComparison baseline_for(std::span<const ParticipantState> participants);

/// Mixed ANCOVA, per-wave ANCOVA, observed means and the baseline comparison as one JSON
/// document (the `stats` command output).
std::string outcome_report_json(std::span<const ParticipantState> participants, Instrument outcome);

}  // namespace tca
