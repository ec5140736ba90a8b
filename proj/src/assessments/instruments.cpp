#include "tca/assessments/instruments.hpp"

#include <numeric>
#include <string>

#include "tca/core/error.hpp"

namespace tca {

namespace {

constexpr std::array<InstrumentSpec, 4> kSpecs{{
    {Instrument::PHQ9, 9, 0, 3, 9},
    {Instrument::BDI2, 21, 0, 3, 21},
    {Instrument::GAD7, 7, 0, 3, 7},
    {Instrument::QLESQ_SF, 16, 1, 5, 14},
}};

struct Cut {
  int upper;  // inclusive
  SeverityBand band;
};

// PHQ-9 banding follows the content cells: 5-9 mild, 10-19 moderate; 20+ is outside enrollment.
constexpr std::array<Cut, 4> kPhq9Cuts{{{4, SeverityBand::normal},
                                        {9, SeverityBand::mild},
                                        {19, SeverityBand::moderate},
                                        {27, SeverityBand::severe}}};
constexpr std::array<Cut, 4> kBdi2Cuts{{{13, SeverityBand::normal},
                                        {19, SeverityBand::mild},
                                        {28, SeverityBand::moderate},
                                        {63, SeverityBand::severe}}};
constexpr std::array<Cut, 4> kGad7Cuts{{{4, SeverityBand::normal},
                                        {9, SeverityBand::mild},
                                        {14, SeverityBand::moderate},
                                        {21, SeverityBand::severe}}};

std::optional<SeverityBand> lookup(const std::array<Cut, 4>& cuts, int total) {
  for (const auto& cut : cuts) {
    if (total <= cut.upper) return cut.band;
  }
  return std::nullopt;
}

}  // namespace

const InstrumentSpec& instrument_spec(Instrument instrument) {
  return kSpecs[static_cast<std::size_t>(instrument)];
}

std::optional<SeverityBand> severity_band(Instrument instrument, int total) {
  const auto& spec = instrument_spec(instrument);
  int lo = spec.scored_items * spec.item_min;
  int hi = spec.scored_items * spec.item_max;
  if (total < lo || total > hi) {
    fail(ErrorCode::range, std::string(to_string(instrument)) + " total " + std::to_string(total) +
                               " outside [" + std::to_string(lo) + "," + std::to_string(hi) + "]");
  }
  switch (instrument) {
    case Instrument::PHQ9: return lookup(kPhq9Cuts, total);
    case Instrument::BDI2: return lookup(kBdi2Cuts, total);
    case Instrument::GAD7: return lookup(kGad7Cuts, total);
    case Instrument::QLESQ_SF: return std::nullopt;
  }
  return std::nullopt;
}

ScoredAssessment score_instrument(Instrument instrument, std::span<const int> items, Wave wave) {
  const auto& spec = instrument_spec(instrument);
  const std::string name{to_string(instrument)};
  if (static_cast<int>(items.size()) != spec.item_count) {
    fail(ErrorCode::validation, name + " expects " + std::to_string(spec.item_count) + " items, got " +
                                    std::to_string(items.size()));
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i] < spec.item_min || items[i] > spec.item_max) {
      fail(ErrorCode::validation, name + " item " + std::to_string(i + 1) + " = " + std::to_string(items[i]) +
                                      " outside [" + std::to_string(spec.item_min) + "," +
                                      std::to_string(spec.item_max) + "]");
    }
  }
  ScoredAssessment out;
  out.instrument = instrument;
  out.wave = wave;
  out.items.assign(items.begin(), items.end());
  out.total = std::accumulate(items.begin(), items.begin() + spec.scored_items, 0);
  out.band = severity_band(instrument, out.total);
  return out;
}

std::array<std::pair<Wave, Date>, 4> wave_calendar(Date enrollment_date) {
  std::array<std::pair<Wave, Date>, 4> out{};
  for (int w = 0; w < 4; ++w) {
    auto wave = static_cast<Wave>(w);
    out[w] = {wave, enrollment_date + days(wave_study_day(wave))};
  }
  return out;
}

}  // namespace tca
