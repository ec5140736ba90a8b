#pragma once

#include <array>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tca/core/time.hpp"
#include "tca/protocol/types.hpp"

namespace tca {

struct InstrumentSpec {
  Instrument instrument;
  int item_count;
  int item_min;
  int item_max;
  int scored_items;  // leading items that enter the total
};

const InstrumentSpec& instrument_spec(Instrument instrument);

struct ScoredAssessment {
  Instrument instrument = Instrument::BDI2;
  Wave wave = Wave::W0;
  std::vector<int> items;
  int total = 0;
  std::optional<SeverityBand> band;

  bool operator==(const ScoredAssessment&) const = default;
};

/// Band for a total; nullopt for instruments without severity bands (Q-LES-Q-SF).
/// Throws range when the total is outside the instrument's possible range.
std::optional<SeverityBand> severity_band(Instrument instrument, int total);

ScoredAssessment score_instrument(Instrument instrument, std::span<const int> items, Wave wave = Wave::W0);

/// Study day on which each assessment wave falls (0, 14, 28, 42).
constexpr int wave_study_day(Wave wave) { return static_cast<int>(wave) * 14; }

std::array<std::pair<Wave, Date>, 4> wave_calendar(Date enrollment_date);

}  // namespace tca
