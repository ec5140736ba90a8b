#include "tca/protocol/calendar.hpp"

#include <algorithm>
#include <string>

#include "tca/core/error.hpp"
#include "tca/protocol/types.hpp"

namespace tca {

int study_length_days(Date enrollment_date) {
  return kStudyDays - weekday_index(enrollment_date);
}

int study_week_of(Date enrollment_date, int study_day) {
  return 1 + (study_day + weekday_index(enrollment_date)) / 7;
}

StudyWeekRange study_week_range(Date enrollment_date, int week) {
  if (week < 1 || week > kStudyWeeks) fail(ErrorCode::range, "study week " + std::to_string(week) + " outside 1..6");
  int offset = weekday_index(enrollment_date);
  StudyWeekRange r;
  r.first_day = std::max(0, 7 * (week - 1) - offset);
  r.last_day = std::min(study_length_days(enrollment_date) - 1, 7 * week - 1 - offset);
  return r;
}

int study_day_of(Date enrollment_date, Date date) {
  auto d = static_cast<int>((date - enrollment_date).count());
  return std::clamp(d, 0, kStudyDays - 1);
}

}  // namespace tca
