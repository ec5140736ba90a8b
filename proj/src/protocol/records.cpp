#include "tca/protocol/records.hpp"

#include <algorithm>
#include <string>

#include "tca/core/error.hpp"

namespace tca {

Severity severity_for_phq9(int phq9_total) {
  if (phq9_total >= 5 && phq9_total <= 9) return Severity::mild;
  if (phq9_total >= 10 && phq9_total <= 19) return Severity::moderate;
  fail(ErrorCode::range, "PHQ-9 total " + std::to_string(phq9_total) + " has no severity cell");
}

AgeBand age_band_for(int age) {
  if (age < 19) fail(ErrorCode::range, "age " + std::to_string(age) + " below 19");
  if (age <= 24) return AgeBand::age_19_24;
  if (age <= 34) return AgeBand::age_25_34;
  return AgeBand::age_35_plus;
}

void validate_profile(const ParticipantProfile& p) {
  require(!p.participant_id.empty(), ErrorCode::validation, "participant_id is empty");
  require(p.age >= 19 && p.age <= 39, ErrorCode::validation,
          "age " + std::to_string(p.age) + " outside 19..39");
  require(p.phq9_total >= 5 && p.phq9_total <= 19, ErrorCode::validation,
          "phq9_total " + std::to_string(p.phq9_total) + " outside 5..19");
  require(p.severity_cell == severity_for_phq9(p.phq9_total), ErrorCode::validation,
          "severity_cell does not match phq9_total");
}

bool OnboardingConfig::selected(const std::string& ba_id) const {
  return std::find(ba_selected.begin(), ba_selected.end(), ba_id) != ba_selected.end();
}

void validate_ema_scores(const EmaScores& s) {
  auto check = [](int v, const char* name) {
    require(v >= 0 && v <= 10, ErrorCode::validation,
            std::string(name) + " = " + std::to_string(v) + " outside 0..10");
  };
  check(s.negative_affect, "negative_affect");
  check(s.rumination, "rumination");
  check(s.pleasant_activity, "pleasant_activity");
}

bool is_legal_emi_option(const EmiOption& o) {
  if (o.format == EmiFormat::long_video) return true;
  return o.type == EmiType::breathing || o.type == EmiType::rumination_journaling || o.type == EmiType::body_scan;
}

int RoutineDayLedger::done_count() const {
  return static_cast<int>(std::count(done.begin(), done.end(), true));
}

}  // namespace tca
