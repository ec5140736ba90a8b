#include <doctest.h>

#include <nlohmann/json.hpp>

#include "support.hpp"
#include "tca/analytics/compliance.hpp"
#include "tca/core/error.hpp"
#include "tca/ema_emi/ops.hpp"

using namespace tca;
using namespace tca::test;

namespace {

ComplianceWeekSummary summary(int week, double rema, double tema, double emi, double routine) {
  ComplianceWeekSummary s;
  s.participant_id = "I01";
  s.week = week;
  s.days = 7;
  s.rema_rate = rema;
  s.tema_rate = tema;
  s.emi_rate = emi;
  s.routine_rate = routine;
  return s;
}

}  // namespace

TEST_CASE("rates from counts") {
  auto s = compliance_from_counts("I01", 1, 7, 15, 7, 11, 33);
  CHECK(s.rema_rate == doctest::Approx(71.43).epsilon(1e-4));
  CHECK(s.tema_rate == doctest::Approx(104.76).epsilon(1e-4));
  CHECK(s.routine_rate == doctest::Approx(94.29).epsilon(1e-4));
  CHECK(s.emi_rate == doctest::Approx(11.0 / 22 * 100));

  // The EMI denominator is completed EMAs of either kind.
  auto e = compliance_from_counts("I01", 1, 7, 6, 2, 11, 0);
  CHECK(e.emi_rate == doctest::Approx(137.5));
  auto none = compliance_from_counts("I01", 1, 7, 0, 0, 0, 0);
  CHECK(none.emi_rate == 0);

  // A short first week rates against its own days.
  auto short_week = compliance_from_counts("I01", 1, 3, 9, 0, 0, 15);
  CHECK(short_week.rema_rate == 100);
  CHECK(short_week.routine_rate == 100);
}

TEST_CASE("cohort table") {
  const double weekly[] = {79.66, 72.30, 67.97, 63.91, 61.26, 59.65};
  std::vector<ComplianceWeekSummary> rows;
  for (int w = 1; w <= 6; ++w) {
    rows.push_back(summary(w, weekly[w - 1] - 5, weekly[w - 1], 50, 60));
    rows.push_back(summary(w, weekly[w - 1] + 5, weekly[w - 1] + 10, 70, 80));
  }
  auto t = cohort_table(rows);
  REQUIRE(t.weeks.size() == 6);
  for (int w = 0; w < 6; ++w) {
    CHECK(t.weeks[w][ComplianceMetric::rEMA].mean == doctest::Approx(weekly[w]));
    CHECK(t.weeks[w].participants == 2);
  }
  CHECK(t.total[ComplianceMetric::rEMA].mean == doctest::Approx(67.46).epsilon(1e-4));
  CHECK(t.total[ComplianceMetric::rEMA].min == doctest::Approx(59.65 - 5));
  CHECK(t.total[ComplianceMetric::rEMA].max == doctest::Approx(79.66 + 5));
  CHECK(t.total[ComplianceMetric::routine].mean == doctest::Approx(70));

  auto csv = cohort_table_csv(t);
  CHECK(csv.rfind("week,metric,mean,min,max\n", 0) == 0);
  CHECK(csv.find("total,rEMA,") != std::string::npos);
  auto js = nlohmann::json::parse(cohort_table_json(t));
  CHECK(js.is_array());
}

TEST_CASE("identical summaries give a degenerate range") {
  std::vector<ComplianceWeekSummary> rows(5, summary(2, 80, 90, 60, 70));
  auto t = cohort_table(rows);
  for (auto m : {ComplianceMetric::rEMA, ComplianceMetric::tEMA, ComplianceMetric::EMI, ComplianceMetric::routine}) {
    const auto& st = t.weeks[0][m];
    CHECK(st.min == st.mean);
    CHECK(st.max == st.mean);
  }
  CHECK_THROWS_AS(cohort_table(std::vector<ComplianceWeekSummary>{}), Error);
  std::vector<ComplianceWeekSummary> gap{summary(1, 1, 1, 1, 1), summary(3, 1, 1, 1, 1)};
  CHECK_THROWS_AS(cohort_table(gap), Error);
}

TEST_CASE("week compliance from a participant state") {
  TimeZone tz;
  auto st = enrolled_state();
  for (int d = 0; d < 7; ++d) {
    for (auto [h, m] : {std::pair{9, 5}, {11, 0}, {13, 35}}) {
      auto rec = record_ema_submission(st, {local(tz, d, h, m), {2, 2, 8}, std::nullopt});
      st = rec.transition.state;
      auto decision = d % 2 == 0 ? EmiDecision::completed : EmiDecision::declined;
      EmiOutcome in{rec.offer.offer_id, decision, std::nullopt, std::nullopt};
      if (decision == EmiDecision::completed) {
        in.choice = EmiOption{EmiType::breathing, EmiFormat::short_text};
        in.satisfaction = 5;
      }
      st = record_emi_outcome(st, local(tz, d, h, m + 2), in).transition.state;
    }
  }
  CHECK_THROWS_AS(week_compliance(st, 1), Error);
  auto s = week_compliance(st, 1, local(tz, 7, 0));
  CHECK(s.regular == 14);
  CHECK(s.voluntary == 7);
  CHECK(s.emi_completed == 12);
  CHECK(s.rema_rate == doctest::Approx(14.0 / 21 * 100));
  CHECK(s.tema_rate == doctest::Approx(100));
  CHECK(s.emi_rate == doctest::Approx(12.0 / 21 * 100));
  CHECK_THROWS_AS(week_compliance(st, 7, local(tz, 7, 0)), Error);
}
