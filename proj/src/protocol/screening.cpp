#include "tca/protocol/screening.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace tca {

EligibilityDecision screen_applicant(const ScreeningForm& f) {
  for (int v : f.phq9_items) {
    require(v >= 0 && v <= 3, ErrorCode::validation, "PHQ-9 item " + std::to_string(v) + " outside 0..3");
  }
  EligibilityDecision d;
  d.phq9_total = std::accumulate(f.phq9_items.begin(), f.phq9_items.end(), 0);
  if (f.age < 19 || f.age > 39) d.reason = IneligibleReason::age_out_of_range;
  else if (d.phq9_total < 5) d.reason = IneligibleReason::phq_below_min;
  else if (d.phq9_total >= 20) d.reason = IneligibleReason::phq_at_or_above_max;
  else if (!f.meds_stable_30d) d.reason = IneligibleReason::meds_unstable;
  else if (f.cbt_last_6mo) d.reason = IneligibleReason::recent_cbt;
  else if (f.inpatient_risk) d.reason = IneligibleReason::inpatient_risk;
  return d;
}

EligibilityDecision screen_applicant(int age, std::span<const int> phq9_items, bool meds_stable_30d,
                                     bool cbt_last_6mo, bool inpatient_risk) {
  require(phq9_items.size() == 9, ErrorCode::validation,
          "PHQ-9 needs 9 items, got " + std::to_string(phq9_items.size()));
  ScreeningForm f{age, {}, meds_stable_30d, cbt_last_6mo, inpatient_risk};
  std::copy(phq9_items.begin(), phq9_items.end(), f.phq9_items.begin());
  return screen_applicant(f);
}

}  // namespace tca
