#pragma once

// Randomized property suites shared by the unit tests and the acceptance runner. Each returns
// the number of cases checked and a description of the first violation, if any.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "tca/analytics/compliance.hpp"
#include "tca/ba/catalog.hpp"
#include "tca/ba/ops.hpp"
#include "tca/ema_emi/ops.hpp"
#include "tca/protocol/calendar.hpp"
#include "tca/scheduler/schedule.hpp"

namespace tca::test {

struct PropertyReport {
  int cases = 0;
  int checks = 0;
  int failures = 0;
  std::string first_failure;

  bool ok() const { return failures == 0 && cases > 0; }

  void check(bool cond, const std::string& what) {
    ++checks;
    if (cond) return;
    if (failures++ == 0) first_failure = what;
  }
};

inline int rand_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

inline OnboardingConfig random_config(std::mt19937_64& rng) {
  OnboardingConfig c;
  for (int s = 0; s < 3; ++s) {
    auto [lo, hi] = ema_window(static_cast<Slot>(s));
    int steps = (hi.minutes_of_day() - lo.minutes_of_day()) / 30;
    c.ema_times[s] = ClockTime::from_minutes(lo.minutes_of_day() + 30 * rand_int(rng, 0, steps));
  }
  c.reminder_enabled = coin(rng, 0.5);
  c.todo_time = ClockTime::from_minutes(30 * rand_int(rng, 12, 24));
  c.diary_time = ClockTime::from_minutes(30 * rand_int(rng, 38, 47));
  c.step_goal = rand_int(rng, 1000, 12000);
  auto acts = BaCatalog::builtin().activities();
  std::vector<std::string> ids;
  for (const auto& a : acts) ids.push_back(a.id);
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(rand_int(rng, 3, 6));
  c.ba_selected = ids;
  return c;
}

inline Date random_enrollment(std::mt19937_64& rng) {
  return Date{std::chrono::year{2024} / 1 / 1} + days(rand_int(rng, 0, 360));
}

// Fixed-duration scheduling rules, the 30-minute grid, and at most one Regular per slot-day.
inline PropertyReport scheduler_properties(std::uint64_t seed, int configs) {
  PropertyReport r;
  std::mt19937_64 rng(seed);
  ScheduleSettings settings;
  for (int c = 0; c < configs; ++c) {
    ++r.cases;
    TimeZone tz{60 * rand_int(rng, -5, 10)};
    auto config = random_config(rng);
    auto enroll = random_enrollment(rng);
    auto label = fmt::format("config {} enrolled {}", c, format_date(enroll));
    r.check(validate_onboarding_config(config).empty(), label + ": generated config invalid");

    auto days_all = build_study_schedule(config, enroll, tz, settings);
    r.check(static_cast<int>(days_all.size()) == study_length_days(enroll), label + ": study length");

    std::map<int, int> ema_per_week;
    for (const auto& day : days_all) {
      auto dl = fmt::format("{} day {}", label, day.study_day);
      int emas = 0;
      Timestamp prev{};
      for (std::size_t i = 0; i < day.prompts.size(); ++i) {
        const auto& p = day.prompts[i];
        if (i > 0) r.check(p.due_at >= prev, dl + ": prompts out of order");
        prev = p.due_at;
        r.check(tz.local_date(p.due_at) == day.date, dl + ": prompt on another date");
        r.check(tz.local_time(p.due_at).minutes_of_day() % 30 == 0, dl + ": prompt off the 30-minute grid");
        if (p.kind == PromptKind::EmaPrompt) {
          ++emas;
          auto [lo, hi] = ema_window(*p.slot);
          auto t = tz.local_time(p.due_at);
          r.check(t >= lo && t <= hi, dl + ": EMA outside its window");
          r.check(p.validity_until && *p.validity_until - p.due_at == minutes(60), dl + ": validity is not 60 min");
          if (config.reminder_enabled) {
            r.check(p.reminder_at && *p.reminder_at - p.due_at == minutes(30), dl + ": reminder is not +30 min");
          } else {
            r.check(!p.reminder_at, dl + ": reminder present while disabled");
          }
        } else {
          r.check(!p.validity_until && !p.reminder_at, dl + ": non-EMA prompt has a window");
        }
      }
      r.check(emas == 3, dl + ": EMA prompts per day");
      r.check(day.has(PromptKind::DailyReport) == (day.study_day >= 1), dl + ": daily report presence");
      for (const auto& p : day.prompts) {
        if (p.kind == PromptKind::DailyReport) {
          r.check(tz.local_time(p.due_at) == ClockTime(15, 0), dl + ": daily report not at 15:00");
        }
      }
      r.check(day.has(PromptKind::WeeklyFeedback) == (weekday_index(day.date) == 0), dl + ": weekly feedback");
      ema_per_week[study_week_of(enroll, day.study_day)] += emas;

      // Random submissions through the day: at most one Regular per slot, three per day.
      int n = rand_int(rng, 0, 12);
      std::vector<Timestamp> times;
      for (int k = 0; k < n; ++k) times.push_back(tz.midnight(day.date) + minutes(rand_int(rng, 0, 24 * 60 - 1)));
      std::sort(times.begin(), times.end());
      std::vector<Slot> answered;
      for (auto t : times) {
        auto cls = classify_ema_submission(day, t, answered);
        int live = 0;
        std::optional<Slot> only;
        for (int s = 0; s < 3; ++s) {
          auto slot = static_cast<Slot>(s);
          if (std::find(answered.begin(), answered.end(), slot) != answered.end()) continue;
          auto due = tz.at(day.date, config.ema_times[s]);
          if (t >= due && t <= due + minutes(60)) {
            ++live;
            only = slot;
          }
        }
        r.check(cls.slot == (live == 1 ? only : std::nullopt), dl + ": classification disagrees with the windows");
        if (cls.slot) answered.push_back(*cls.slot);
      }
      r.check(answered.size() <= 3, dl + ": more than 3 Regular");
    }
    for (auto [week, count] : ema_per_week) {
      auto range = study_week_range(enroll, week);
      r.check(count == 3 * range.length(), label + fmt::format(": week {} has {} EMA prompts", week, count));
      if (range.length() == 7) r.check(count == 21, label + ": full week without 21 EMA prompts");
    }
    if (weekday_index(enroll) == 0) {
      int total = 0;
      for (auto [_, count] : ema_per_week) total += count;
      r.check(total == 126, label + ": 42-day study without 126 EMA prompts");
    }

    // due_items over a random partition equals due_items over the whole range.
    std::vector<ParticipantSchedule> sched{{"P", days_all}};
    auto start = tz.midnight(enroll) - minutes(1);
    auto end = tz.midnight(enroll + days(days_all.size()));
    auto whole = items_between(sched, start, end);
    DueCursor cursor(start);
    std::vector<DueItem> parts;
    auto t = start;
    while (t < end) {
      t = std::min(end, t + minutes(rand_int(rng, 1, 3000)));
      auto got = cursor.due_items(sched, t);
      parts.insert(parts.end(), got.begin(), got.end());
      r.check(cursor.due_items(sched, t).empty(), label + ": repeated tick not empty");
    }
    r.check(parts == whole, label + ": partitioned due_items differ from the whole range");
  }
  return r;
}

struct EventLog {
  ParticipantState state;
  std::vector<ProtocolEvent> events;

  void take(const Transition& t) {
    events.insert(events.end(), t.events.begin(), t.events.end());
    state = t.state;
  }
};

// Extends a valid event log over the first `n_days` study days through the record_* operations.
inline void random_log(std::mt19937_64& rng, EventLog& log, int n_days) {
  const auto& catalog = BaCatalog::builtin();
  auto panas = catalog.panas_labels();
  const auto& s = log.state;
  auto tz = s.timezone;
  const auto cfg = *s.config;
  for (int d = 0; d < n_days; ++d) {
    auto date = s.enrollment_date() + days(d);
    struct Act {
      int minute;
      int kind;
    };
    std::vector<Act> acts;
    for (int k = rand_int(rng, 0, 5); k > 0; --k) acts.push_back({rand_int(rng, 420, 1380), 0});
    for (int slot = 0; slot < 3; ++slot) {
      if (coin(rng, 0.5)) acts.push_back({cfg.ema_times[slot].minutes_of_day() + rand_int(rng, 0, 70), 0});
    }
    if (coin(rng, 0.2)) acts.push_back({rand_int(rng, 420, 1380), 1});
    if (coin(rng, 0.6)) acts.push_back({rand_int(rng, 420, 1380), 2});
    for (int k = rand_int(rng, 0, 2); k > 0; --k) acts.push_back({rand_int(rng, 420, 1380), 3});
    if (coin(rng, 0.15)) acts.push_back({rand_int(rng, 420, 1380), 4});
    std::sort(acts.begin(), acts.end(), [](const Act& a, const Act& b) { return a.minute < b.minute; });

    log.take(expire_open_offers(s, tz.midnight(date)));
    for (const auto& a : acts) {
      auto at = std::max(s.last_at, tz.midnight(date) + minutes(a.minute));
      if (tz.local_date(at) != date) continue;
      switch (a.kind) {
        case 0: {
          EmaScores sc{rand_int(rng, 0, 10), rand_int(rng, 0, 10), rand_int(rng, 0, 10)};
          auto rec = record_ema_submission(s, EmaSubmission{at, sc, std::nullopt});
          log.take(rec.transition);
          int choice = rand_int(rng, 0, 2);
          if (choice == 0) {
            auto opt = rec.offer.options[rand_int(rng, 0, static_cast<int>(rec.offer.options.size()) - 1)];
            log.take(record_emi_outcome(s, at, EmiOutcome{rec.offer.offer_id, EmiDecision::completed, opt,
                                                          rand_int(rng, 1, 7)})
                         .transition);
          } else if (choice == 1) {
            log.take(record_emi_outcome(s, at, EmiOutcome{rec.offer.offer_id, EmiDecision::declined, std::nullopt,
                                                          std::nullopt})
                         .transition);
          }
          break;
        }
        case 1: {
          auto opts = emi_options_for(s.profile);
          auto opt = opts[rand_int(rng, 0, static_cast<int>(opts.size()) - 1)];
          log.take(record_self_initiated_emi(s, at, opt, rand_int(rng, 1, 7)).transition);
          break;
        }
        case 2: {
          auto ba = cfg.ba_selected[rand_int(rng, 0, static_cast<int>(cfg.ba_selected.size()) - 1)];
          log.take(record_daily_plan(s, at, DailyPlan{date, {"tidy desk"}, ba}));
          break;
        }
        case 3: {
          DailyDiary diary;
          diary.date = date;
          diary.emotions = {panas[rand_int(rng, 0, static_cast<int>(panas.size()) - 1)]};
          diary.emotion_event = "event";
          diary.gratitude = "gratitude";
          diary.self_praise = "praise";
          diary.washed = coin(rng, 0.6);
          diary.steps = rand_int(rng, 0, 2 * cfg.step_goal);
          if (coin(rng, 0.5)) diary.ba_done = {cfg.ba_selected[0]};
          log.take(record_diary(s, at, diary).transition);
          break;
        }
        case 4: {
          Transition t{s};
          t.append(at, RoutineItemDone{date, static_cast<RoutineItem>(rand_int(rng, 0, 4))});
          log.take(t);
          break;
        }
      }
    }
  }
}

// Naive recount straight from the raw events; shares nothing with the fold's aggregates.
inline ComplianceWeekSummary recount_week(const std::vector<ProtocolEvent>& events, int week) {
  const Enrolled* enrolled = events.front().as<Enrolled>();
  auto tz = enrolled->timezone;
  auto enroll = enrolled->profile.enrollment_date;
  int offset = weekday_index(enroll);
  int first = std::max(0, 7 * (week - 1) - offset);
  int last = std::min(41 - offset, 7 * week - 1 - offset);
  auto first_date = enroll + days(first), last_date = enroll + days(last);
  auto in_week = [&](Date d) { return d >= first_date && d <= last_date; };

  int regular = 0, voluntary = 0, emi = 0;
  std::map<Date, std::set<int>> done;
  std::map<Date, const DailyDiary*> last_diary;
  for (const auto& e : events) {
    auto d = tz.local_date(e.at);
    if (const auto* x = e.as<EmaSubmitted>(); x && in_week(d)) (x->classification.slot ? regular : voluntary)++;
    if (e.as<EmiCompleted>() && in_week(d)) ++emi;
    if (const auto* x = e.as<PlanRecorded>()) done[x->plan.date].insert(1);
    if (const auto* x = e.as<RoutineItemDone>()) done[x->date].insert(static_cast<int>(x->item));
    if (const auto* x = e.as<DiaryRecorded>()) last_diary[x->diary.date] = &x->diary;
  }
  for (auto [d, diary] : last_diary) {
    done[d].insert(3);
    if (diary->washed) done[d].insert(0);
    if (diary->steps >= enrolled->config->step_goal) done[d].insert(2);
    if (!diary->ba_done.empty()) done[d].insert(4);
  }
  int routine = 0;
  for (const auto& [d, items] : done) {
    if (in_week(d)) routine += static_cast<int>(items.size());
  }
  int n = last - first + 1;
  ComplianceWeekSummary s;
  s.participant_id = enrolled->profile.participant_id;
  s.week = week;
  s.days = n;
  s.regular = regular;
  s.voluntary = voluntary;
  s.emi_completed = emi;
  s.routine_done = routine;
  s.rema_rate = regular * 100.0 / (3 * n);
  s.tema_rate = (regular + voluntary) * 100.0 / (3 * n);
  s.emi_rate = regular + voluntary ? emi * 100.0 / (regular + voluntary) : 0.0;
  s.routine_rate = routine * 100.0 / (5 * n);
  return s;
}

inline PropertyReport compliance_oracle_properties(std::uint64_t seed, int logs) {
  PropertyReport r;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < logs; ++i) {
    ++r.cases;
    ParticipantProfile p;
    p.participant_id = fmt::format("R{:04d}", i);
    auto cells = EmiCatalog::builtin().populated_cells();
    auto cell = cells[rand_int(rng, 0, static_cast<int>(cells.size()) - 1)];
    static constexpr std::pair<int, int> ages[] = {{19, 24}, {25, 34}, {35, 39}};
    auto [lo, hi] = ages[static_cast<int>(cell.age_band)];
    p.gender = cell.gender;
    p.age = rand_int(rng, lo, hi);
    p.arm = Arm::intervention;
    p.enrollment_date = Date{std::chrono::year{2024} / 6 / 3} + days(rand_int(rng, 0, 6));
    p.phq9_total = cell.severity == Severity::mild ? rand_int(rng, 5, 9) : rand_int(rng, 10, 19);
    p.severity_cell = cell.severity;

    Transition t{ParticipantState{}};
    TimeZone tz;
    t.append(tz.midnight(p.enrollment_date), Enrolled{p, random_config(rng), tz});
    EventLog log;
    log.take(t);
    int n_days = rand_int(rng, 1, 16);
    random_log(rng, log, n_days);
    auto as_of = tz.midnight(p.enrollment_date + days(n_days));
    auto label = fmt::format("log {} ({} days from {})", i, n_days, format_date(p.enrollment_date));
    r.check(replay(log.events) == log.state, label + ": replay differs from the built state");
    for (int week = 1; week <= 3; ++week) {
      auto range = study_week_range(p.enrollment_date, week);
      if (range.last_day >= n_days) break;
      auto got = week_compliance(log.state, week, as_of);
      auto want = recount_week(log.events, week);
      auto wl = fmt::format("{} week {}", label, week);
      r.check(got.days == want.days && got.regular == want.regular && got.voluntary == want.voluntary &&
                  got.emi_completed == want.emi_completed && got.routine_done == want.routine_done,
              wl + fmt::format(": counts {}/{}/{}/{} vs recount {}/{}/{}/{}", got.regular, got.voluntary,
                               got.emi_completed, got.routine_done, want.regular, want.voluntary,
                               want.emi_completed, want.routine_done));
      auto close = [](double a, double b) { return std::fabs(a - b) < 1e-9; };
      r.check(close(got.rema_rate, want.rema_rate) && close(got.tema_rate, want.tema_rate) &&
                  close(got.emi_rate, want.emi_rate) && close(got.routine_rate, want.routine_rate),
              wl + ": rates differ from the recount");
      r.check(got.tema_rate >= got.rema_rate, wl + ": tEMA below rEMA");
      r.check(got.rema_rate <= 100 && got.routine_rate <= 100, wl + ": rate above 100");
    }
  }
  return r;
}

}  // namespace tca::test
