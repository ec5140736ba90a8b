#pragma once

#include "tca/core/time.hpp"

namespace tca {

// Study weeks run Monday to Sunday. A participant enrolled mid-week gets a short first week,
// and the window ends on the sixth Sunday so that every participant has exactly six weeks.

/// Number of study days in the window: 42 for a Monday enrollment, fewer otherwise.
int study_length_days(Date enrollment_date);

/// 1-based study week containing the study day.
int study_week_of(Date enrollment_date, int study_day);

struct StudyWeekRange {
  int first_day = 0;  // inclusive study days
  int last_day = 0;
  int length() const { return last_day - first_day + 1; }
};

/// Throws range for weeks outside 1..6.
StudyWeekRange study_week_range(Date enrollment_date, int week);

/// Days since enrollment, clamped to 0..41.
int study_day_of(Date enrollment_date, Date date);

}  // namespace tca
