#pragma once

#include <array>
#include <optional>
#include <span>

#include "tca/core/enum_names.hpp"

namespace tca {

struct ScreeningForm {
  int age = 0;
  std::array<int, 9> phq9_items{};
  bool meds_stable_30d = true;
  bool cbt_last_6mo = false;
  bool inpatient_risk = false;
};

enum class IneligibleReason {
  age_out_of_range,
  phq_below_min,
  phq_at_or_above_max,
  meds_unstable,
  recent_cbt,
  inpatient_risk,
};

struct EligibilityDecision {
  std::optional<IneligibleReason> reason;  // nullopt = eligible
  int phq9_total = 0;

  bool eligible() const { return !reason; }
};

/// Throws validation for an item outside 0..3.
EligibilityDecision screen_applicant(const ScreeningForm& form);
/// Same, for a raw item list; throws validation unless there are exactly 9 items.
EligibilityDecision screen_applicant(int age, std::span<const int> phq9_items, bool meds_stable_30d,
                                     bool cbt_last_6mo, bool inpatient_risk);

}  // namespace tca

TCA_ENUM_NAMES(tca::IneligibleReason, "age_out_of_range"sv, "phq_below_min"sv, "phq_at_or_above_max"sv,
               "meds_unstable"sv, "recent_cbt"sv, "inpatient_risk"sv);
