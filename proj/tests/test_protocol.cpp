#include <doctest.h>

#include <numeric>

#include "support.hpp"
#include "tca/core/error.hpp"
#include "tca/ema_emi/ops.hpp"
#include "tca/protocol/json.hpp"
#include "tca/protocol/screening.hpp"
#include "tca/simulator/simulator.hpp"

using namespace tca;
using namespace tca::test;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::internal;
}

std::array<int, 9> items_summing(int total) {
  std::array<int, 9> items{};
  for (auto& v : items) {
    v = std::min(3, total);
    total -= v;
  }
  return items;
}

}  // namespace

TEST_CASE("screening decisions") {
  ScreeningForm form;
  form.age = 24;
  form.phq9_items = items_summing(12);
  auto ok = screen_applicant(form);
  CHECK(ok.eligible());
  CHECK(ok.phq9_total == 12);

  form.phq9_items = items_summing(4);
  CHECK(screen_applicant(form).reason == IneligibleReason::phq_below_min);
  form.phq9_items = items_summing(20);
  CHECK(screen_applicant(form).reason == IneligibleReason::phq_at_or_above_max);

  form.phq9_items = items_summing(12);
  form.cbt_last_6mo = true;
  CHECK(screen_applicant(form).reason == IneligibleReason::recent_cbt);

  // The first failing rule is reported.
  form.age = 40;
  CHECK(screen_applicant(form).reason == IneligibleReason::age_out_of_range);
}

TEST_CASE("screening is total over every PHQ-9 sum") {
  for (int age : {18, 19, 39, 40}) {
    for (int total = 0; total <= 27; ++total) {
      ScreeningForm form;
      form.age = age;
      form.phq9_items = items_summing(total);
      auto d = screen_applicant(form);
      bool expect = age >= 19 && age <= 39 && total >= 5 && total < 20;
      CHECK(d.eligible() == expect);
      CHECK(d.phq9_total == total);
      for (bool meds : {true, false}) {
        for (bool inpatient : {true, false}) {
          form.meds_stable_30d = meds;
          form.inpatient_risk = inpatient;
          CHECK(screen_applicant(form).eligible() == (expect && meds && !inpatient));
        }
      }
    }
  }
}

TEST_CASE("screening rejects malformed items") {
  ScreeningForm form;
  form.age = 25;
  form.phq9_items[3] = 4;
  CHECK(code_of([&] { screen_applicant(form); }) == ErrorCode::validation);
  std::vector<int> eight(8, 1);
  CHECK(code_of([&] { screen_applicant(25, eight, true, false, false); }) == ErrorCode::validation);
}

TEST_CASE("severity cell follows the PHQ-9 total") {
  for (int s = 5; s <= 9; ++s) CHECK(severity_for_phq9(s) == Severity::mild);
  for (int s = 10; s <= 19; ++s) CHECK(severity_for_phq9(s) == Severity::moderate);
  CHECK(code_of([] { severity_for_phq9(4); }) == ErrorCode::range);
  CHECK(code_of([] { severity_for_phq9(20); }) == ErrorCode::range);

  auto p = sample_profile();
  p.severity_cell = Severity::moderate;
  CHECK(code_of([&] { validate_profile(p); }) == ErrorCode::validation);
  p = sample_profile();
  p.age = 40;
  CHECK(code_of([&] { validate_profile(p); }) == ErrorCode::validation);
}

TEST_CASE("fold of Enrolled gives the day-0 state") {
  auto s = enrolled_state();
  CHECK(s.enrolled);
  CHECK(s.last_seq == 1);
  CHECK(s.study_day == 0);
  CHECK(s.gamification.level == 0);
  CHECK(s.gamification.mileage.total() == 0);
  REQUIRE(s.gamification.current_mission);
  CHECK(s.gamification.current_mission->rule == MissionRule::routines_daily_1);
}

TEST_CASE("regular EMA bumps the regular counter") {
  TimeZone tz;
  auto s = enrolled_state();
  auto rec = record_ema_submission(s, EmaSubmission{local(tz, 0, 9, 20), {7, 6, 2}, std::nullopt});
  CHECK(rec.transition.state.ema_counters.regular == 1);
  CHECK(rec.transition.state.ema_counters.voluntary == 0);
  REQUIRE(rec.transition.events.size() == 2);
  CHECK(rec.transition.events[0].kind() == EventKind::EmaSubmitted);
  CHECK(rec.transition.events[1].kind() == EventKind::EmiOffered);
}

TEST_CASE("apply_event preconditions") {
  auto s = enrolled_state();
  TimeZone tz;
  auto e = next_event(s, local(tz, 0, 9), PlanRecorded{DailyPlan{date_of(2024, 6, 3), {"a"}, "special_meal"}});

  auto gap = e;
  gap.seq = 3;
  CHECK(code_of([&] { apply_event(s, gap); }) == ErrorCode::ordering);
  auto regress = e;
  regress.seq = 1;
  CHECK(code_of([&] { apply_event(s, regress); }) == ErrorCode::ordering);
  auto other = e;
  other.participant_id = "someone-else";
  CHECK(code_of([&] { apply_event(s, other); }) == ErrorCode::validation);
  auto backwards = e;
  backwards.at = local(tz, 0, 0) - minutes(1);
  CHECK(code_of([&] { apply_event(s, backwards); }) == ErrorCode::ordering);

  // A second Enrolled is a state error.
  auto again = next_event(s, local(tz, 0, 1), Enrolled{sample_profile(), sample_config(), tz});
  CHECK_THROWS_AS(apply_event(s, again), Error);

  // EmaSubmitted must be followed by its offer.
  auto ema = next_event(s, local(tz, 0, 9, 10), EmaSubmitted{EmaClassification::regular(Slot::morning), {1, 1, 1}});
  auto s2 = apply_event(s, ema);
  auto plan = next_event(s2, local(tz, 0, 9, 11), PlanRecorded{DailyPlan{date_of(2024, 6, 3), {}, "special_meal"}});
  CHECK_THROWS_AS(apply_event(s2, plan), Error);
}

TEST_CASE("replay") {
  CHECK(code_of([] { replay(std::span<const ProtocolEvent>{}); }) == ErrorCode::state);

  TimeZone tz;
  Transition t{ParticipantState{}};
  t.append(local(tz, 0, 0), Enrolled{sample_profile(), sample_config(), tz});
  auto one = replay(t.events);
  CHECK(one == enrolled_state());

  auto rec = record_ema_submission(t.state, EmaSubmission{local(tz, 0, 9, 5), {3, 3, 8}, std::nullopt});
  std::vector<ProtocolEvent> all = t.events;
  all.insert(all.end(), rec.transition.events.begin(), rec.transition.events.end());
  CHECK(replay(all) == rec.transition.state);

  // Errors name the offending seq.
  all[2].seq = 9;
  try {
    replay(all);
    FAIL("expected ordering error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ordering);
    CHECK(std::string(e.what()).find("seq 9") != std::string::npos);
  }
}

TEST_CASE("replay determinism and prefix monotonicity on simulated streams") {
  auto cfg = SimConfig::with_n_per_arm(11, 4, builtin_calibration());
  auto cohort = simulate_cohort(cfg);
  for (const auto& p : cohort.participants) {
    auto a = replay(p.events);
    auto b = replay(p.events);
    CHECK(a == b);

    ParticipantState s;
    int level = 0, mileage = 0;
    for (const auto& e : p.events) {
      s = apply_event(std::move(s), e);
      CHECK(s.gamification.level >= level);
      CHECK(s.gamification.mileage.total() >= mileage);
      level = s.gamification.level;
      mileage = s.gamification.mileage.total();
    }
  }
}

TEST_CASE("event JSON round trip") {
  auto cohort = simulate_cohort(SimConfig::with_n_per_arm(5, 2, builtin_calibration()));
  TimeZone tz;
  for (const auto& p : cohort.participants) {
    for (const auto& e : p.events) {
      auto j = event_to_json(e, tz);
      CHECK(j.contains("seq"));
      CHECK(j.contains("participant_id"));
      CHECK(j.at("at").get<std::string>().ends_with("+09:00"));
      CHECK(j.at("kind").get<std::string>() == to_string(e.kind()));
      auto back = event_from_json(Json::parse(j.dump()));
      CHECK(back == e);
    }
  }
}

TEST_CASE("event JSON schema errors") {
  Json j = {{"seq", 1},
            {"participant_id", "X"},
            {"at", "2024-06-03T00:00:00+09:00"},
            {"kind", "Teleported"},
            {"payload", Json::object()}};
  CHECK(code_of([&] { event_from_json(j); }) == ErrorCode::schema);
  j["kind"] = "EmaSubmitted";
  CHECK(code_of([&] { event_from_json(j); }) == ErrorCode::schema);
  j["payload"] = {{"classification", {{"slot", nullptr}}}, {"scores", {{"negative_affect", "high"}}}};
  CHECK(code_of([&] { event_from_json(j); }) == ErrorCode::schema);
}

TEST_CASE("time parsing") {
  auto t = parse_iso("2024-06-03T09:30:00+09:00");
  CHECK(format_iso(t, TimeZone{}) == "2024-06-03T09:30:00+09:00");
  CHECK(format_iso(t, TimeZone{0}) == "2024-06-03T00:30:00+00:00");
  CHECK(parse_iso("2024-06-03T00:30Z") == t);
  CHECK(code_of([] { parse_iso("2024-06-03 09:30"); }) == ErrorCode::schema);
  CHECK(code_of([] { parse_date("2024-02-30"); }) == ErrorCode::schema);
  CHECK(code_of([] { ClockTime::parse("24:00"); }) == ErrorCode::schema);
  CHECK(weekday_index(date_of(2024, 6, 3)) == 0);
  CHECK(weekday_index(date_of(2024, 6, 9)) == 6);
}
