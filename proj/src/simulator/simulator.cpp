#include "tca/simulator/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <random>

#include <boost/math/special_functions/beta.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "tca/assessments/instruments.hpp"
#include "tca/ba/catalog.hpp"
#include "tca/ba/ops.hpp"
#include "tca/core/embedded_data.hpp"
#include "tca/core/error.hpp"
#include "tca/ema_emi/ops.hpp"
#include "tca/gamification/settle.hpp"
#include "tca/protocol/calendar.hpp"
#include "tca/protocol/transition.hpp"
#include "tca/scheduler/schedule.hpp"

namespace tca {

namespace {

using Rng = std::mt19937_64;

enum class Stream : std::uint32_t { profile = 1, scores = 2, behavior = 3 };

Rng make_rng(std::uint64_t seed, Arm arm, int index, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(arm), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool chance(Rng& rng, double p) { return std::bernoulli_distribution(std::clamp(p, 0.0, 1.0))(rng); }

// Participant-specific probability: the u-quantile of a Beta with the given mean.
double engagement(double mean, double u, double kappa) {
  if (mean <= 0) return 0;
  if (mean >= 1) return 1;
  return boost::math::ibeta_inv(mean * kappa, (1 - mean) * kappa, u);
}

void check_prob(double p, const char* what) {
  require(p >= 0 && p <= 1, ErrorCode::validation, fmt::format("{} {} outside [0,1]", what, p));
}

std::pair<int, int> age_range(AgeBand band) {
  switch (band) {
    case AgeBand::age_19_24: return {19, 24};
    case AgeBand::age_25_34: return {25, 34};
    case AgeBand::age_35_plus: return {35, 39};
  }
  return {19, 39};
}

ParticipantProfile draw_profile(Rng& rng, Arm arm, int index, Date enrollment) {
  ParticipantProfile p;
  p.participant_id = fmt::format("{}{:02d}", arm == Arm::intervention ? 'I' : 'C', index + 1);
  p.nickname = "friend-" + p.participant_id;
  p.arm = arm;
  p.enrollment_date = enrollment;
  EmiCell cell;
  if (arm == Arm::intervention) {
    // Only cells with tailored content can receive the intervention.
    auto cells = EmiCatalog::builtin().populated_cells();
    cell = cells[uniform_int(rng, 0, static_cast<int>(cells.size()) - 1)];
  } else {
    cell.gender = static_cast<Gender>(uniform_int(rng, 0, 1));
    cell.age_band = static_cast<AgeBand>(uniform_int(rng, 0, 2));
    cell.severity = static_cast<Severity>(uniform_int(rng, 0, 1));
  }
  p.gender = cell.gender;
  auto [lo, hi] = age_range(cell.age_band);
  p.age = uniform_int(rng, lo, hi);
  p.phq9_total = cell.severity == Severity::mild ? uniform_int(rng, 5, 9) : uniform_int(rng, 10, 19);
  p.severity_cell = cell.severity;
  return p;
}

ClockTime grid_time(Rng& rng, ClockTime first, ClockTime last) {
  int steps = (last.minutes_of_day() - first.minutes_of_day()) / kGridMinutes;
  return ClockTime::from_minutes(first.minutes_of_day() + kGridMinutes * uniform_int(rng, 0, steps));
}

OnboardingConfig draw_config(Rng& rng) {
  OnboardingConfig c;
  for (int s = 0; s < 3; ++s) {
    auto [lo, hi] = ema_window(static_cast<Slot>(s));
    c.ema_times[s] = grid_time(rng, lo, hi);
  }
  c.reminder_enabled = chance(rng, 0.5);
  c.todo_time = grid_time(rng, ClockTime{7, 0}, ClockTime{10, 0});
  c.diary_time = grid_time(rng, ClockTime{21, 0}, ClockTime{23, 30});
  c.step_goal = 1000 * uniform_int(rng, 5, 8);
  auto acts = BaCatalog::builtin().activities();
  std::vector<std::string> ids;
  for (const auto& a : acts) ids.push_back(a.id);
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(static_cast<std::size_t>(uniform_int(rng, 3, 6)));
  c.ba_selected = ids;
  c.affirmation_text = "I can take one small step today.";
  return c;
}

// Splits a total over items, each within [lo, hi].
std::vector<int> split_total(Rng& rng, int total, int count, int lo, int hi) {
  std::vector<int> items(count, lo);
  int remaining = total - lo * count;
  while (remaining > 0) {
    int i = uniform_int(rng, 0, count - 1);
    if (items[i] < hi) {
      ++items[i];
      --remaining;
    }
  }
  return items;
}

std::vector<int> draw_items(Rng& rng, Instrument inst, int total) {
  const auto& spec = instrument_spec(inst);
  auto items = split_total(rng, total, spec.scored_items, spec.item_min, spec.item_max);
  for (int i = spec.scored_items; i < spec.item_count; ++i) items.push_back(uniform_int(rng, spec.item_min, spec.item_max));
  return items;
}

std::array<int, 4> draw_trajectory(Rng& rng, Instrument inst, const ScoreTrajectory& traj, double rho) {
  const auto& spec = instrument_spec(inst);
  int lo = spec.item_min * spec.scored_items, hi = spec.item_max * spec.scored_items;
  std::normal_distribution<double> z;
  for (int attempt = 0; attempt < 100; ++attempt) {
    double shared = z(rng);
    std::array<int, 4> out{};
    bool ok = true;
    for (int w = 0; w < 4; ++w) {
      double e = std::sqrt(rho) * shared + std::sqrt(1 - rho) * z(rng);
      out[w] = static_cast<int>(std::lround(traj[w].mean + traj[w].sd * e));
      if (out[w] < lo || out[w] > hi) ok = false;
    }
    if (ok) return out;
  }
  fail(ErrorCode::range, fmt::format("{} draws stayed outside {}..{} after 100 attempts", to_string(inst), lo, hi));
}

struct AssessmentDraw {
  Timestamp at;
  AssessmentRecorded record;
};

std::vector<AssessmentDraw> draw_assessments(Rng& rng, const ParticipantProfile& profile, const BehaviorModel& model,
                                             int weeks, TimeZone tz) {
  std::vector<AssessmentDraw> out;
  std::map<Instrument, std::array<int, 4>> totals;
  for (const auto& [inst, traj] : model.score_trajectory) {
    totals[inst] = draw_trajectory(rng, inst, traj, model.within_subject_corr);
  }
  for (int w = 0; w < 4; ++w) {
    auto wave = static_cast<Wave>(w);
    int day = wave_study_day(wave);
    if (day > 7 * weeks) break;
    auto date = profile.enrollment_date + days(day);
    auto at = tz.at(date, w == 0 ? ClockTime{6, 30} : ClockTime{12, 0});
    if (w == 0) {
      out.push_back({at, {Instrument::PHQ9, wave, split_total(rng, profile.phq9_total, 9, 0, 3)}});
    }
    for (const auto& [inst, t] : totals) out.push_back({at, {inst, wave, draw_items(rng, inst, t[w])}});
  }
  return out;
}

// --- intervention behavior -------------------------------------------------------------

struct Action {
  Timestamp at;
  int order;
  std::function<void(Transition&)> run;
};

// Stochastic rounding: the expected value is x, the spread is at most one.
int quota(Rng& rng, double x) {
  int base = static_cast<int>(std::floor(x));
  return base + (chance(rng, x - base) ? 1 : 0);
}

template <class T>
std::vector<T> pick(Rng& rng, std::vector<T> pool, int k) {
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(static_cast<std::size_t>(std::clamp(k, 0, static_cast<int>(pool.size()))));
  return pool;
}

struct Engagement {
  double ema = 0.5;
  double emi = 0.5;
  double routine = 0.5;
};

struct ParticipantSim {
  const SimConfig& cfg;
  const BehaviorModel& model;
  Engagement u;
  Rng rng;
  std::vector<std::string> ba_pool;

  ParticipantSim(const SimConfig& c, Engagement e, Rng r)
      : cfg(c), model(c.intervention_model), u(e), rng(std::move(r)) {}

  std::string next_ba(const OnboardingConfig& config) {
    // Without replacement until the selection is exhausted, then with replacement.
    if (!ba_pool.empty()) {
      auto i = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(ba_pool.size()) - 1));
      auto id = ba_pool[i];
      ba_pool.erase(ba_pool.begin() + static_cast<std::ptrdiff_t>(i));
      return id;
    }
    return config.ba_selected[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(config.ba_selected.size()) - 1))];
  }

  EmaScores draw_scores() {
    std::normal_distribution<double> z;
    auto clamp10 = [](double v) { return static_cast<int>(std::clamp(std::lround(v), 0L, 10L)); };
    return {clamp10(5 + 2 * z(rng)), clamp10(5 + 2 * z(rng)), clamp10(4 + 2 * z(rng))};
  }

  void add_ema(std::vector<Action>& actions, Timestamp at, bool complete, const std::vector<EmiOption>& options) {
    auto offer_id = std::make_shared<std::string>();
    auto scores = draw_scores();
    actions.push_back({at, 30, [=](Transition& t) {
                         auto cls = classify_for_state(t.state, at);
                         const auto& ema = t.append(at, EmaSubmitted{cls, scores});
                         *offer_id = "offer-" + std::to_string(ema.seq);
                         t.append(at, EmiOffered{*offer_id, ema.seq, options});
                       }});
    if (complete) {
      auto choice = options[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(options.size()) - 1))];
      int satisfaction = uniform_int(rng, 3, 7);
      auto done_at = at + minutes(uniform_int(rng, 3, 15));
      actions.push_back({done_at, 40, [=](Transition& t) {
                           const auto& entry = select_emi_content(t.state.profile, choice.type, choice.format,
                                                                  t.state.emi_completed_total);
                           t.append(done_at, EmiCompleted{*offer_id, choice, entry.content_ref, satisfaction});
                         }});
    } else if (chance(rng, 0.6)) {
      auto declined_at = at + minutes(uniform_int(rng, 1, 5));
      actions.push_back({declined_at, 40, [=](Transition& t) {
                           t.append(declined_at, EmiDeclined{*offer_id, DeclineReason::participant});
                         }});
    } // otherwise the offer lapses and is expired at midnight
  }

  void add_prompts(std::vector<Action>& actions, const ParticipantProfile& profile, const DailySchedule& schedule) {
    auto tz = cfg.timezone;
    auto date = schedule.date;
    int rank = 0;
    for (const auto& prompt : schedule.prompts) {
      auto id = prompt_message_id(profile.participant_id, prompt, false, tz);
      auto kind = message_kind_for(prompt.kind);
      actions.push_back({prompt.due_at, 10 + rank++, [=](Transition& t) {
                           t.append(prompt.due_at, PromptIssued{prompt.kind, prompt.slot, prompt.due_at, id});
                           t.append(prompt.due_at, MessageDispatched{id, kind});
                           if (prompt.kind == PromptKind::DailyReport) {
                             t.append(prompt.due_at, ReportDispatched{date - days(1), id});
                           }
                         }});
    }
  }

  // Each week fixes how many prompts, offers and routine items get done (a quota around the
  // participant's engagement) and then places them at random.
  void add_week(std::vector<Action>& actions, const ParticipantState& initial, int week) {
    const auto& profile = initial.profile;
    const auto& config = *initial.config;
    auto tz = cfg.timezone;
    auto range = study_week_range(profile.enrollment_date, week);
    auto wi = static_cast<std::size_t>(week - 1);
    double kappa = model.engagement_concentration;
    double p_ema = engagement(model.weekly_rema_prob[wi], u.ema, kappa);
    double p_emi = engagement(model.emi_propensity[wi], u.emi, kappa);
    double r = engagement(model.routine_item_prob[wi], u.routine, kappa);
    auto options = emi_options_for(profile);

    std::vector<DailySchedule> schedules;
    for (int sd = range.first_day; sd <= range.last_day; ++sd) {
      schedules.push_back(build_daily_schedule(config, profile.enrollment_date, sd, tz));
      add_prompts(actions, profile, schedules.back());
    }
    int len = range.length();

    std::vector<std::pair<int, int>> slots;
    for (int d = 0; d < len; ++d) {
      for (int s = 0; s < 3; ++s) slots.emplace_back(d, s);
    }
    auto answered_slots = pick(rng, slots, quota(rng, p_ema * static_cast<double>(slots.size())));
    std::set<std::pair<int, int>> answered(answered_slots.begin(), answered_slots.end());

    std::vector<Timestamp> ema_times;
    for (auto [d, s] : slots) {
      const auto* prompt = schedules[d].ema_prompt(static_cast<Slot>(s));
      std::optional<Timestamp> at;
      if (answered.count({d, s})) {
        at = prompt->due_at + minutes(uniform_int(rng, 0, kEmaValidityMinutes - 1));
        ema_times.push_back(*at);
      }
      if (prompt->reminder_at && (!at || *at > *prompt->reminder_at)) {
        auto rid = prompt_message_id(profile.participant_id, *prompt, true, tz);
        auto rat = *prompt->reminder_at;
        auto slot = *prompt->slot;
        actions.push_back({rat, 25, [=](Transition& t) {
                             t.append(rat, ReminderIssued{slot, rat, rid});
                             t.append(rat, MessageDispatched{rid, MessageKind::EmaReminder});
                           }});
      }
    }

    // Voluntary EMAs fall in waking hours outside every EMA window.
    int n_vol = quota(rng, model.voluntary_rate[wi] * len / 7.0);
    for (int v = 0; v < n_vol; ++v) {
      const auto& schedule = schedules[static_cast<std::size_t>(uniform_int(rng, 0, len - 1))];
      for (int attempt = 0; attempt < 50; ++attempt) {
        auto at = tz.at(schedule.date, ClockTime{7, 0}) + minutes(uniform_int(rng, 0, 16 * 60 - 1));
        bool inside = false;
        for (int s = 0; s < 3; ++s) {
          const auto* p = schedule.ema_prompt(static_cast<Slot>(s));
          if (at >= p->due_at && at <= *p->validity_until) inside = true;
        }
        if (!inside) {
          ema_times.push_back(at);
          break;
        }
      }
    }

    std::vector<std::size_t> idx(ema_times.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    auto completed = pick(rng, idx, quota(rng, p_emi * static_cast<double>(idx.size())));
    std::set<std::size_t> completed_set(completed.begin(), completed.end());
    for (std::size_t i = 0; i < ema_times.size(); ++i) add_ema(actions, ema_times[i], completed_set.count(i) > 0, options);

    // The diary carries wash, steps and BA, so its probability q_d is raised and those items are
    // conditioned on it to keep every item's marginal at r.
    double q_d = std::min((1 + r) / 2, 2 * r);
    double p_todo = std::max(0.0, 2 * r - q_d);
    double cond = q_d > 0 ? std::min(1.0, r / q_d) : 0.0;
    std::vector<int> day_idx(static_cast<std::size_t>(len));
    for (int d = 0; d < len; ++d) day_idx[static_cast<std::size_t>(d)] = d;
    auto todo_days = pick(rng, day_idx, quota(rng, p_todo * len));
    auto diary_days = pick(rng, day_idx, quota(rng, q_d * len));
    int nd = static_cast<int>(diary_days.size());
    auto wash_days = pick(rng, diary_days, quota(rng, cond * nd));
    auto step_days = pick(rng, diary_days, quota(rng, cond * nd));
    auto ba_days = pick(rng, diary_days, quota(rng, cond * nd));
    auto has = [](const std::vector<int>& v, int d) { return std::find(v.begin(), v.end(), d) != v.end(); };

    for (int d = 0; d < len; ++d) {
      auto date = schedules[d].date;
      auto ba = next_ba(config);
      if (has(todo_days, d)) {
        auto at = tz.at(date, config.todo_time) + minutes(uniform_int(rng, 1, 20));
        DailyPlan plan{date, {"tidy desk", "reply to messages"}, ba};
        plan.todo_items.resize(static_cast<std::size_t>(uniform_int(rng, 1, 2)));
        actions.push_back({at, 35, [=](Transition& t) { t.append(at, PlanRecorded{plan}); }});
      }
      if (!has(diary_days, d)) continue;
      auto at = tz.at(date, config.diary_time) + minutes(uniform_int(rng, 1, 25));
      DailyDiary diary;
      diary.date = date;
      auto labels = BaCatalog::builtin().panas_labels();
      diary.emotions = pick(rng, std::vector<std::string>(labels.begin(), labels.end()), uniform_int(rng, 1, 3));
      diary.emotion_event = "talked with a friend after class";
      diary.gratitude = "a warm lunch";
      diary.self_praise = "I kept going today";
      diary.washed = has(wash_days, d);
      diary.steps = has(step_days, d) ? config.step_goal + uniform_int(rng, 0, 3000)
                                      : uniform_int(rng, 500, config.step_goal - 1);
      if (has(ba_days, d)) diary.ba_done = {ba};
      if (chance(rng, model.bad_point_prob)) diary.bad_points = "felt overwhelmed in the evening";
      if (chance(rng, 0.3)) diary.good_points = "finished an assignment";
      auto flag_id = safety_flag_id(profile.participant_id, date);
      if (diary.bad_points) pending_flags.emplace_back(date, flag_id);
      actions.push_back({at, 50, [=](Transition& t) {
                           t.append(at, DiaryRecorded{diary});
                           if (diary.bad_points) t.append(at, SafetyFlagRaised{flag_id, date, *diary.bad_points});
                         }});
    }
  }

  std::vector<std::pair<Date, std::string>> pending_flags;

  void add_midnight(std::vector<Action>& actions, Date date, bool final_day) {
    auto at = cfg.timezone.midnight(date);
    actions.push_back({at, 0, [at](Transition& t) {
                         std::vector<std::string> stale;
                         auto today = t.state.date_of(at);
                         for (const auto& [id, offer] : t.state.open_offers) {
                           if (offer.date < today) stale.push_back(id);
                         }
                         for (const auto& id : stale) t.append(at, EmiDeclined{id, DeclineReason::expired});
                       }});
    actions.push_back({at, 1, [at](Transition& t) {
                         for (int w : weeks_due_for_settlement(t.state, at)) {
                           auto s = compute_settlement(t.state.gamification, w, week_ledger_for(t.state, w),
                                                       regular_ema_in_week(t.state, w));
                           t.append(at, MissionSettled{s});
                         }
                       }});
    // The operator reviews the previous day's flags in the morning, or at the end of the study.
    std::vector<std::string> flags;
    std::erase_if(pending_flags, [&](const auto& f) {
      if (!final_day && f.first != date - days(1)) return false;
      flags.push_back(f.second);
      return true;
    });
    if (flags.empty()) return;
    auto ack_at = final_day ? at : cfg.timezone.at(date, ClockTime{9, 45});
    actions.push_back({ack_at, final_day ? 2 : 26, [ack_at, flags](Transition& t) {
                         for (const auto& f : flags) t.append(ack_at, SafetyFlagAcked{f, "followed up with the participant"});
                       }});
  }
};

int simulated_days(Date enrollment, int weeks) {
  auto range = study_week_range(enrollment, weeks);
  return range.last_day + 1;
}

Date enrollment_for(const SimConfig& cfg, int index) {
  return cfg.enrollment_date + days(cfg.staggered ? index % 7 : 0);
}

SimParticipant simulate_control(const SimConfig& cfg, int index) {
  auto prng = make_rng(cfg.seed, Arm::passive_control, index, Stream::profile);
  SimParticipant out;
  out.profile = draw_profile(prng, Arm::passive_control, index, enrollment_for(cfg, index));
  auto srng = make_rng(cfg.seed, Arm::passive_control, index, Stream::scores);
  auto draws = draw_assessments(srng, out.profile, cfg.control_model, cfg.weeks, cfg.timezone);
  Transition t{ParticipantState{}};
  t.append(cfg.timezone.midnight(out.profile.enrollment_date), Enrolled{out.profile, std::nullopt, cfg.timezone});
  for (const auto& d : draws) t.append(d.at, d.record);
  out.events = std::move(t.events);
  return out;
}

SimParticipant simulate_intervention(const SimConfig& cfg, int index, Engagement u) {
  auto prng = make_rng(cfg.seed, Arm::intervention, index, Stream::profile);
  SimParticipant out;
  out.profile = draw_profile(prng, Arm::intervention, index, enrollment_for(cfg, index));
  auto config = draw_config(prng);
  auto srng = make_rng(cfg.seed, Arm::intervention, index, Stream::scores);
  auto draws = draw_assessments(srng, out.profile, cfg.intervention_model, cfg.weeks, cfg.timezone);

  Transition t{ParticipantState{}};
  auto enroll = out.profile.enrollment_date;
  t.append(cfg.timezone.midnight(enroll), Enrolled{out.profile, config, cfg.timezone});

  ParticipantSim sim(cfg, u, make_rng(cfg.seed, Arm::intervention, index, Stream::behavior));
  sim.ba_pool = config.ba_selected;
  std::vector<Action> actions;
  for (const auto& d : draws) {
    auto rec = d.record;
    auto at = d.at;
    actions.push_back({at, 5, [=](Transition& tr) { tr.append(at, rec); }});
  }
  for (int w = 1; w <= cfg.weeks; ++w) sim.add_week(actions, t.state, w);
  int n_days = simulated_days(enroll, cfg.weeks);
  for (int sd = 1; sd < n_days; ++sd) sim.add_midnight(actions, enroll + days(sd), false);
  sim.add_midnight(actions, enroll + days(n_days), true);

  std::stable_sort(actions.begin(), actions.end(),
                   [](const Action& a, const Action& b) { return std::tie(a.at, a.order) < std::tie(b.at, b.order); });
  for (auto& a : actions) a.run(t);
  out.events = std::move(t.events);
  return out;
}

// Engagement quantiles are stratified across the arm (one per 1/n band) so the cohort means
// track the calibration targets at small n.
std::vector<Engagement> stratified_engagement(const SimConfig& cfg) {
  int n = cfg.n_intervention;
  auto rng = make_rng(cfg.seed, Arm::intervention, -1, Stream::behavior);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto column = [&] {
    std::vector<double> u(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) u[static_cast<std::size_t>(i)] = (i + unit(rng)) / n;
    std::shuffle(u.begin(), u.end(), rng);
    return u;
  };
  auto ema = column(), emi = column(), routine = column();
  std::vector<Engagement> out;
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) out.push_back({ema[i], emi[i], routine[i]});
  return out;
}

ScoreTrajectory parse_trajectory(const nlohmann::json& j) {
  ScoreTrajectory t;
  if (!j.is_array() || j.size() != 4) fail(ErrorCode::schema, "score trajectory needs 4 waves");
  for (int w = 0; w < 4; ++w) t[w] = {j[w].at(0).get<double>(), j[w].at(1).get<double>()};
  return t;
}

}  // namespace

void BehaviorModel::validate() const {
  for (int w = 0; w < 6; ++w) {
    check_prob(weekly_rema_prob[w], "rEMA probability");
    check_prob(emi_propensity[w], "EMI propensity");
    check_prob(routine_item_prob[w], "routine probability");
    require(voluntary_rate[w] >= 0, ErrorCode::validation, "voluntary rate must be non-negative");
  }
  for (const auto& [inst, traj] : score_trajectory) {
    for (const auto& ms : traj) require(ms.sd > 0, ErrorCode::validation, "score dispersion must be positive");
  }
  require(within_subject_corr >= 0 && within_subject_corr < 1, ErrorCode::validation,
          "within-subject correlation must be in [0,1)");
  require(engagement_concentration > 0, ErrorCode::validation, "engagement concentration must be positive");
  check_prob(bad_point_prob, "bad point probability");
}

BehaviorModel calibrate_from_targets(const std::vector<WeekTargets>& weeks,
                                     const std::map<Instrument, ScoreTrajectory>& trajectories,
                                     double within_subject_corr) {
  BehaviorModel m;
  std::array<bool, 6> seen{};
  for (const auto& w : weeks) {
    require(w.week >= 1 && w.week <= 6, ErrorCode::validation, fmt::format("target week {} outside 1..6", w.week));
    for (double v : {w.rema, w.tema, w.emi, w.routine}) {
      require(v >= 0 && v <= 200, ErrorCode::validation, fmt::format("target {} outside 0..200 percent", v));
    }
    require(w.rema <= 100 && w.routine <= 100, ErrorCode::validation, "rEMA and routine targets cannot exceed 100");
    require(w.tema >= w.rema, ErrorCode::validation, "tEMA target below rEMA target");
    auto i = static_cast<std::size_t>(w.week - 1);
    seen[i] = true;
    m.weekly_rema_prob[i] = w.rema / 100;
    m.voluntary_rate[i] = (w.tema - w.rema) / 100 * kEmaPerDay * 7;
    m.emi_propensity[i] = std::min(1.0, w.emi / 100);
    m.routine_item_prob[i] = w.routine / 100;
  }
  for (std::size_t i = 1; i < 6; ++i) {
    // Weeks without targets inherit the previous week.
    if (!seen[i] && seen[i - 1]) {
      m.weekly_rema_prob[i] = m.weekly_rema_prob[i - 1];
      m.voluntary_rate[i] = m.voluntary_rate[i - 1];
      m.emi_propensity[i] = m.emi_propensity[i - 1];
      m.routine_item_prob[i] = m.routine_item_prob[i - 1];
      seen[i] = true;
    }
  }
  m.score_trajectory = trajectories;
  m.within_subject_corr = within_subject_corr;
  m.validate();
  return m;
}

BehaviorModel Calibration::intervention_model() const {
  return calibrate_from_targets(weeks, intervention_scores, within_subject_corr);
}

BehaviorModel Calibration::control_model() const {
  BehaviorModel m;
  m.score_trajectory = control_scores;
  m.within_subject_corr = within_subject_corr;
  m.validate();
  return m;
}

Calibration load_calibration(std::string_view text) {
  Calibration c;
  try {
    auto j = nlohmann::json::parse(text);
    for (const auto& w : j.at("compliance_weeks")) {
      c.weeks.push_back({w.at("week").get<int>(), w.at("rema").get<double>(), w.at("tema").get<double>(),
                         w.at("emi").get<double>(), w.at("routine").get<double>()});
    }
    if (j.contains("compliance_total")) {
      const auto& t = j.at("compliance_total");
      c.total = {0, t.at("rema").get<double>(), t.at("tema").get<double>(), t.at("emi").get<double>(),
                 t.at("routine").get<double>()};
    }
    const auto& traj = j.at("score_trajectories");
    for (auto [arm, target] : {std::pair{"intervention", &c.intervention_scores},
                               std::pair{"passive_control", &c.control_scores}}) {
      for (const auto& [name, value] : traj.at(arm).items()) (*target)[parse_enum<Instrument>(name)] = parse_trajectory(value);
    }
    if (j.contains("within_subject_corr")) c.within_subject_corr = j.at("within_subject_corr").get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::schema, std::string("calibration: ") + e.what());
  }
  return c;
}

const Calibration& builtin_calibration() {
  static const Calibration c = load_calibration(data::calibration);
  return c;
}

SimConfig SimConfig::with_n_per_arm(std::uint64_t seed, int n_per_arm, const Calibration& calibration) {
  SimConfig c;
  c.seed = seed;
  c.n_intervention = n_per_arm;
  c.n_control = n_per_arm;
  c.intervention_model = calibration.intervention_model();
  c.control_model = calibration.control_model();
  return c;
}

void SimConfig::validate() const {
  require(n_intervention >= 2 && n_control >= 2, ErrorCode::validation, "each arm needs at least 2 participants");
  require(weeks >= 1 && weeks <= 6, ErrorCode::validation, "weeks must be 1..6");
  intervention_model.validate();
  control_model.validate();
}

SimResult simulate_cohort(const SimConfig& config) {
  config.validate();
  SimResult out;
  auto engagement = stratified_engagement(config);
  for (int i = 0; i < config.n_intervention; ++i) {
    out.participants.push_back(simulate_intervention(config, i, engagement[static_cast<std::size_t>(i)]));
  }
  for (int i = 0; i < config.n_control; ++i) out.participants.push_back(simulate_control(config, i));
  return out;
}

std::vector<SimParticipant> simulate_assessments(const SimConfig& config) {
  config.validate();
  std::vector<SimParticipant> out;
  for (auto arm : {Arm::intervention, Arm::passive_control}) {
    int n = arm == Arm::intervention ? config.n_intervention : config.n_control;
    const auto& model = arm == Arm::intervention ? config.intervention_model : config.control_model;
    for (int i = 0; i < n; ++i) {
      auto prng = make_rng(config.seed, arm, i, Stream::profile);
      SimParticipant p;
      p.profile = draw_profile(prng, arm, i, enrollment_for(config, i));
      auto srng = make_rng(config.seed, arm, i, Stream::scores);
      std::optional<OnboardingConfig> onboarding;
      if (arm == Arm::intervention) onboarding = draw_config(prng);
      Transition t{ParticipantState{}};
      t.append(config.timezone.midnight(p.profile.enrollment_date), Enrolled{p.profile, onboarding, config.timezone});
      for (const auto& d : draw_assessments(srng, p.profile, model, config.weeks, config.timezone)) t.append(d.at, d.record);
      p.events = std::move(t.events);
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace tca
