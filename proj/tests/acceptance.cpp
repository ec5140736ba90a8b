// Acceptance runner: one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/core.h>
#include <sys/wait.h>
#include <unistd.h>

#include "gamification_cases.hpp"
#include "properties.hpp"
#include "stats_fixtures.hpp"
#include "support.hpp"
#include "tca/analytics/compliance.hpp"
#include "tca/analytics/outcomes.hpp"
#include "tca/analytics/stats.hpp"
#include "tca/assessments/instruments.hpp"
#include "tca/gamification/settle.hpp"
#include "tca/protocol/json.hpp"
#include "tca/protocol/screening.hpp"
#include "tca/service/service.hpp"
#include "tca/simulator/simulator.hpp"

using namespace tca;
using namespace tca::test;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && pass) detail = what;
    pass = pass && cond;
  }
};

struct Criterion {
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

// Band cut points restated as step functions, independent of the library tables.
SeverityBand band_by_cuts(Instrument ins, int t) {
  auto pick = [&](int mild, int moderate, int severe) {
    return t >= severe ? SeverityBand::severe
           : t >= moderate ? SeverityBand::moderate
           : t >= mild ? SeverityBand::mild
                       : SeverityBand::normal;
  };
  return ins == Instrument::BDI2 ? pick(14, 20, 29) : pick(5, 10, 15);
}

std::vector<int> items_summing_to(int n_items, int lo, int hi, int total, std::mt19937_64& rng) {
  std::vector<int> items(n_items, lo);
  int left = total - n_items * lo;
  while (left > 0) {
    auto& v = items[rng() % n_items];
    if (v < hi) {
      ++v;
      --left;
    }
  }
  return items;
}

Outcome scoring_bands() {
  Outcome o;
  std::mt19937_64 rng(1);
  int checked = 0;
  for (auto ins : {Instrument::BDI2, Instrument::GAD7}) {
    int hi = instrument_spec(ins).item_count * 3;
    for (int t = 0; t <= hi; ++t, ++checked) {
      o.expect(severity_band(ins, t) == band_by_cuts(ins, t), fmt::format("{} total {}", to_string(ins), t));
      auto s = score_instrument(ins, items_summing_to(instrument_spec(ins).item_count, 0, 3, t, rng));
      o.expect(s.total == t && s.band == band_by_cuts(ins, t), fmt::format("{} scored total {}", to_string(ins), t));
    }
  }
  for (int t = 0; t <= 27; ++t, ++checked) {
    auto items = items_summing_to(9, 0, 3, t, rng);
    auto d = screen_applicant(25, items, true, false, false);
    o.expect(d.phq9_total == t && d.eligible() == (t >= 5 && t < 20), fmt::format("PHQ-9 eligibility at {}", t));
  }
  for (int t = 14; t <= 70; ++t, ++checked) {
    auto first = items_summing_to(14, 1, 5, t, rng);
    for (int tail : {1, 3, 5}) {
      auto items = first;
      items.push_back(tail);
      items.push_back(6 - tail);
      auto s = score_instrument(Instrument::QLESQ_SF, items);
      o.expect(s.total == t && !s.band, fmt::format("Q-LES-Q-SF total {}", t));
    }
  }
  if (o.pass) o.detail = fmt::format("{} totals", checked);
  return o;
}

Outcome eta_identity() {
  Outcome o;
  std::string shown;
  for (auto [F, want] : {std::pair{3.75, 0.066}, {7.67, 0.126}, {8.564, 0.139}}) {
    double got = partial_eta_sq(F, 3, 165);
    o.expect(std::fabs(got - want) <= 0.005, fmt::format("F={} gives {:.4f}, want {}", F, got, want));
    shown += fmt::format("{}->{:.4f} ", F, got);
  }
  if (o.pass) o.detail = shown;
  return o;
}

Outcome stats_oracle() {
  Outcome o;
  double worst_f = 0, worst_t = 0;
  const std::vector<std::pair<AncovaInput, const std::vector<Expected>*>> sets{
      {anc_a(), &expected_a()}, {anc_b(), &expected_b()}, {anc_c(), &expected_c()}};
  for (const auto& [in, expected] : sets) {
    auto r = mixed_ancova(in);
    for (const auto& e : *expected) {
      const auto& eff = r.effect(e.term);
      worst_f = std::max(worst_f, std::fabs(eff.F - e.F));
      o.expect(eff.df_effect == e.df_effect && eff.df_error == e.df_error, fmt::format("df of {}", e.term));
    }
  }
  std::vector<ContinuousField> fields;
  for (std::size_t i = 0; i < welch_cases().size(); ++i) {
    fields.push_back({fmt::format("x{}", i), welch_cases()[i].a, welch_cases()[i].b});
  }
  auto base = baseline_comparison(fields, {});
  for (std::size_t i = 0; i < fields.size(); ++i) {
    worst_t = std::max(worst_t, std::fabs(base.t_tests[i].second.t - welch_cases()[i].t));
  }
  o.expect(worst_f < 1e-6, fmt::format("max |dF| = {:.3g}", worst_f));
  o.expect(worst_t < 1e-9, fmt::format("max |dt| = {:.3g}", worst_t));
  if (o.pass) o.detail = fmt::format("max |dF| {:.2g}, max |dt| {:.2g}", worst_f, worst_t);
  return o;
}

std::vector<ParticipantState> replay_all(const std::vector<SimParticipant>& ps) {
  std::vector<ParticipantState> out;
  for (const auto& p : ps) out.push_back(replay(p.events));
  return out;
}

Outcome compliance_reproduction() {
  // Weekly rEMA, tEMA, EMI, routine means followed by the all-week row.
  const double target[7][4] = {{82.59, 87.85, 49.28, 75.07}, {74.06, 85.06, 50.46, 67.49},
                               {67.32, 78.33, 52.70, 64.93}, {63.88, 76.03, 51.97, 59.21},
                               {59.77, 73.07, 52.89, 63.84}, {57.14, 70.44, 53.88, 59.70},
                               {67.46, 78.46, 51.49, 65.04}};
  Outcome o;
  auto sim = simulate_cohort(SimConfig::with_n_per_arm(2024, 28, builtin_calibration()));
  std::vector<ComplianceWeekSummary> rows;
  for (const auto& s : replay_all(sim.participants)) {
    if (!s.in_intervention()) continue;
    for (const auto& w : elapsed_week_compliance(s)) {
      o.expect(w.tema_rate >= w.rema_rate, fmt::format("{} week {} tEMA < rEMA", w.participant_id, w.week));
      rows.push_back(w);
    }
  }
  auto table = cohort_table(rows);
  o.expect(table.weeks.size() == 6, "six weeks");
  double worst = 0;
  for (int r = 0; r < 7 && table.weeks.size() == 6; ++r) {
    const auto& row = r < 6 ? table.weeks[r] : table.total;
    for (int m = 0; m < 4; ++m) {
      double got = row[static_cast<ComplianceMetric>(m)].mean;
      double diff = std::fabs(got - target[r][m]);
      worst = std::max(worst, diff);
      o.expect(diff <= 5, fmt::format("{} {} = {:.2f}, target {}", r < 6 ? fmt::format("week {}", r + 1) : "total",
                                      to_string(static_cast<ComplianceMetric>(m)), got, target[r][m]));
    }
  }
  if (table.weeks.size() == 6) {
    o.expect(table.weeks[0][ComplianceMetric::rEMA].mean > table.weeks[5][ComplianceMetric::rEMA].mean,
             "week-1 rEMA not above week 6");
  }
  if (o.pass) {
    o.detail = fmt::format("{} participant-weeks, max cell deviation {:.2f} pp, total rEMA {:.2f}", rows.size(), worst,
                           table.total[ComplianceMetric::rEMA].mean);
  }
  return o;
}

Outcome bdi_direction() {
  Outcome o;
  int significant = 0, favours = 0;
  const int runs = 50;
  for (int run = 0; run < runs; ++run) {
    auto cfg = SimConfig::with_n_per_arm(1000 + run, 28, builtin_calibration());
    cfg.n_control = 29;
    auto states = replay_all(simulate_assessments(cfg));
    auto in = assessment_ancova_input(states, Instrument::BDI2);
    if (mixed_ancova(in).effect("time:group").p < 0.05) ++significant;
    if (per_wave_ancova(in)[3].difference.estimate < 0) ++favours;
  }
  o.expect(significant * 2 > runs, fmt::format("significant in {}/{}", significant, runs));
  o.expect(favours * 10 >= runs * 9, fmt::format("week 6 favours intervention in {}/{}", favours, runs));
  if (o.pass) o.detail = fmt::format("time:group p<.05 in {}/{}, week 6 favours intervention in {}/{}", significant, runs,
                                     favours, runs);
  return o;
}

Outcome scheduler_compliance() {
  Outcome o;
  auto sched = scheduler_properties(424242, 1000);
  auto comp = compliance_oracle_properties(515151, 1000);
  o.expect(sched.ok(), "scheduler: " + sched.first_failure);
  o.expect(comp.ok(), "compliance: " + comp.first_failure);
  o.expect(sched.cases >= 1000 && comp.cases >= 1000, "fewer than 1000 cases");
  if (o.pass) {
    o.detail = fmt::format("{} configs / {} checks, {} logs / {} checks", sched.cases, sched.checks, comp.cases,
                           comp.checks);
  }
  return o;
}

Outcome gamification() {
  Outcome o;
  auto cases = mission_cases();
  o.expect(cases.size() == 12, "expected 12 ledgers");
  for (const auto& c : cases) o.expect(evaluate_mission(mission_with(c.rule), c.week) == c.passed, c.name);

  WeekLedger perfect;
  for (int d = 0; d < 7; ++d) perfect.days.push_back(make_day("wtsdb", {"act" + std::to_string(d)}));
  GamificationState best;
  for (int w = 1; w <= 6; ++w) {
    auto st = compute_settlement(best, w, perfect, 21);
    o.expect(st.total_points() == 10 * w + 21, fmt::format("perfect week {}", w));
    best = apply_settlement(best, st);
  }
  o.expect(best.mileage.total() == 336 && best.level == 6, "perfect study should reach 336 at level 6");

  std::mt19937_64 rng(99);
  auto empty = repeat_day(make_day(""));
  int sequences = 0;
  for (; sequences < 5000; ++sequences) {
    GamificationState g;
    for (int w = 1; w <= 6; ++w) {
      int prev = g.level;
      auto st = compute_settlement(g, w, rng() % 2 ? perfect : empty, static_cast<int>(rng() % 22));
      o.expect(st.total_points() <= 81, "weekly cap");
      g = apply_settlement(g, st);
      o.expect(g.level >= prev, "level decreased");
    }
    o.expect(g.mileage.total() <= 336, "study cap");
  }
  for (int total : {0, 99, 100, 101, 336}) {
    auto d = donation_summary(MileageLedger{{{1, MileageSource::ema_point, total}}});
    o.expect(d.eligible == (total >= 100) && d.amount_krw == (total >= 100 ? total * 100 : 0),
             fmt::format("donation at {}", total));
  }
  if (o.pass) o.detail = fmt::format("12 ledgers, {} random six-week sequences", sequences);
  return o;
}

Outcome replay_and_crash() {
  Outcome o;
  auto cfg = SimConfig::with_n_per_arm(31, 28, builtin_calibration());
  cfg.n_control = 29;
  auto a = simulate_cohort(cfg);
  auto b = simulate_cohort(cfg);
  std::size_t events = 0;
  for (std::size_t i = 0; i < a.participants.size(); ++i) {
    const auto& ev = a.participants[i].events;
    events += ev.size();
    o.expect(ev == b.participants[i].events, "simulation not deterministic");
    auto s = replay(ev);
    o.expect(s == replay(ev), "replay not deterministic");
    o.expect(s.last_seq == ev.size(), "replay dropped events");
    std::vector<ProtocolEvent> round;
    for (const auto& e : ev) round.push_back(event_from_json(Json::parse(event_to_json(e, cfg.timezone).dump())));
    o.expect(replay(round) == s, "JSON round trip changed the state");
  }

  TempDir dir;
  TimeZone tz;
  SimulatedClock clock{local(tz, 0, 0)};
  StudySettings settings;
  settings.timezone = tz;
  settings.start = local(tz, 0, 0);
  init_study(dir.path(), settings);
  {
    FileAdapter file(dir / "deliveries.jsonl");
    StudyService svc(dir.path(), clock, file);
    svc.enroll(sample_profile(), sample_config());
  }
  int kills = 0;
  for (int day = 0; day < 4; ++day) {
    for (bool after_outbox : {true, false}) {
      pid_t child = fork();
      if (child == 0) {
        FileAdapter file(dir / "deliveries.jsonl");
        ServiceHooks hooks;
        if (after_outbox) hooks.after_outbox_write = [](const OutboxMessage&) { _exit(9); };
        else hooks.after_deliver = [](const OutboxMessage&) { _exit(9); };
        StudyService svc(dir.path(), clock, file, hooks);
        svc.tick(local(tz, day, after_outbox ? 10 : 16, 0));
        _exit(0);
      }
      int status = 0;
      waitpid(child, &status, 0);
      kills += WIFEXITED(status) && WEXITSTATUS(status) == 9;
    }
  }
  FileAdapter file(dir / "deliveries.jsonl");
  StudyService svc(dir.path(), clock, file);
  svc.tick(local(tz, 4, 0, 0));
  auto streams = svc.all_events();
  auto rows = dispatch_rows(streams);
  int dispatched = 0;
  std::set<std::string> ids;
  for (const auto& e : streams[0]) {
    if (const auto* m = e.as<MessageDispatched>()) {
      ++dispatched;
      ids.insert(m->message_id);
    }
  }
  o.expect(kills == 8, fmt::format("only {} of 8 children were killed", kills));
  o.expect(dispatched == static_cast<int>(ids.size()), "duplicate MessageDispatched events");
  o.expect(rows.size() == ids.size(), "analytics rows differ from dispatch events");
  o.expect(file.delivered_count() == rows.size(), "deliveries differ from dispatch rows");
  o.expect(replay(streams[0]) == svc.state("I01"), "restarted state differs from replay");
  if (o.pass) {
    o.detail = fmt::format("{} participants / {} events replayed; {} kills, {} dispatch rows, no duplicates",
                           a.participants.size(), events, kills, rows.size());
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"scoring bands exhaustive", 1, scoring_bands},
      {"partial eta squared identity", 1, eta_identity},
      {"statistics oracle equivalence", 5, stats_oracle},
      {"weekly compliance table reproduction", 30, compliance_reproduction},
      {"BDI-II trajectory direction over 50 runs", 120, bdi_direction},
      {"scheduler and compliance invariants", 30, scheduler_compliance},
      {"gamification conformance", 1, gamification},
      {"replay determinism and crash safety", 30, replay_and_crash},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) o = {false, fmt::format("over budget ({:.0f} s); {}", c.budget_s, o.detail)};
    failures += !o.pass;
    fmt::print("{} {:<42} {:7.2f} s  {}\n", o.pass ? "PASS" : "FAIL", c.name, secs, o.detail);
    std::fflush(stdout);
  }
  return failures;
}
