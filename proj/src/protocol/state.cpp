#include "tca/protocol/state.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "tca/ba/catalog.hpp"
#include "tca/core/error.hpp"
#include "tca/gamification/settle.hpp"
#include "tca/protocol/calendar.hpp"
#include "tca/scheduler/schedule.hpp"

namespace tca {

namespace {

std::string seq_str(std::uint64_t seq) { return std::to_string(seq); }

class Folder {
 public:
  Folder(ParticipantState& s, const ProtocolEvent& e) : s_(s), e_(e) {}

  Date today() const { return s_.date_of(e_.at); }

  void in_window(Date d, const char* what) const {
    auto first = s_.enrollment_date();
    auto last = first + days(study_length_days(first) - 1);
    require(d >= first && d <= last, ErrorCode::range,
            std::string(what) + " on " + format_date(d) + " outside the study window");
  }

  DayRecord& day(Date d) {
    auto [it, inserted] = s_.days.try_emplace(d);
    if (inserted) {
      it->second.date = d;
      it->second.ledger.date = d;
    }
    return it->second;
  }

  void refresh_ledger(DayRecord& r) const {
    RoutineDayLedger l;
    l.date = r.date;
    if (r.plan) l.set(RoutineItem::todo_list, true);
    if (r.diary) {
      l.set(RoutineItem::diary, true);
      l.set(RoutineItem::wash, r.diary->washed);
      l.set(RoutineItem::steps_goal, r.diary->steps >= s_.config->step_goal);
      l.set(RoutineItem::ba_activity, !r.diary->ba_done.empty());
    }
    for (std::size_t i = 0; i < r.marked.size(); ++i) {
      if (r.marked[i]) l.done[i] = true;
    }
    r.ledger = l;
  }

  void operator()(const Enrolled& p) {
    require(!s_.enrolled, ErrorCode::state, "participant already enrolled");
    validate_profile(p.profile);
    require(p.profile.participant_id == e_.participant_id, ErrorCode::validation,
            "profile id does not match event participant_id");
    if (p.profile.arm == Arm::intervention) {
      require(p.config.has_value(), ErrorCode::validation, "intervention participant needs an onboarding config");
      auto v = validate_onboarding_config(*p.config);
      require(v.empty(), ErrorCode::validation, v.empty() ? "" : "invalid onboarding config: " + v.front().detail);
    } else {
      require(!p.config.has_value(), ErrorCode::validation, "passive-control participant has an onboarding config");
    }
    require(p.timezone.local_date(e_.at) <= p.profile.enrollment_date, ErrorCode::validation,
            "enrollment recorded after the enrollment date");
    s_.enrolled = true;
    s_.profile = p.profile;
    s_.config = p.config;
    s_.timezone = p.timezone;
    if (s_.in_intervention()) s_.gamification.current_mission = mission_for_level(0);
  }

  void operator()(const PromptIssued& p) {
    require(!p.message_id.empty(), ErrorCode::validation, "prompt without message_id");
    require(p.prompt != PromptKind::EmaPrompt || p.slot.has_value(), ErrorCode::validation, "EMA prompt without slot");
    require(s_.issued_messages.insert(p.message_id).second, ErrorCode::state,
            "message " + p.message_id + " issued twice");
  }

  void operator()(const ReminderIssued& p) {
    require(!p.message_id.empty(), ErrorCode::validation, "reminder without message_id");
    require(s_.issued_messages.insert(p.message_id).second, ErrorCode::state,
            "message " + p.message_id + " issued twice");
  }

  void operator()(const EmaSubmitted& p) {
    validate_ema_scores(p.scores);
    auto d = today();
    in_window(d, "EMA");
    auto& rec = day(d);
    auto schedule = build_daily_schedule(*s_.config, s_.enrollment_date(), study_day_of(s_.enrollment_date(), d),
                                         s_.timezone);
    std::vector<Slot> answered(rec.regular_slots.begin(), rec.regular_slots.end());
    auto expected = classify_ema_submission(schedule, e_.at, answered);
    require(expected == p.classification, ErrorCode::validation,
            "EMA classification does not match the schedule");
    rec.ema.push_back({e_.seq, e_.at, p.classification, p.scores});
    if (p.classification.slot) {
      rec.regular_slots.insert(*p.classification.slot);
      ++s_.ema_counters.regular;
    } else {
      ++rec.voluntary_ema;
      ++s_.ema_counters.voluntary;
    }
    s_.awaiting_offer_for = e_.seq;
  }

  void operator()(const EmiOffered& p) {
    require(s_.awaiting_offer_for == p.ema_seq, ErrorCode::ordering,
            "EMI offer does not follow EMA seq " + seq_str(p.ema_seq));
    require(!p.offer_id.empty(), ErrorCode::validation, "offer without offer_id");
    require(!p.options.empty(), ErrorCode::validation, "offer lists no options");
    for (const auto& o : p.options) {
      require(is_legal_emi_option(o), ErrorCode::validation,
              std::string(to_string(o.type)) + " has no " + std::string(to_string(o.format)) + " format");
    }
    require(!s_.open_offers.contains(p.offer_id) && !s_.closed_offers.contains(p.offer_id), ErrorCode::state,
            "offer " + p.offer_id + " reused");
    s_.open_offers.emplace(p.offer_id, OpenEmiOffer{p.offer_id, p.ema_seq, today(), p.options});
    s_.awaiting_offer_for.reset();
  }

  void operator()(const EmiCompleted& p) {
    require(p.satisfaction >= 1 && p.satisfaction <= 7, ErrorCode::validation,
            "satisfaction " + std::to_string(p.satisfaction) + " outside 1..7");
    require(is_legal_emi_option(p.choice), ErrorCode::validation, "illegal EMI format");
    require(!p.content_ref.empty(), ErrorCode::validation, "EMI completion without content_ref");
    auto d = today();
    in_window(d, "EMI");
    if (!p.offer_id.empty()) {
      auto it = s_.open_offers.find(p.offer_id);
      require(it != s_.open_offers.end(), ErrorCode::state, "offer " + p.offer_id + " is not open");
      const auto& opts = it->second.options;
      require(std::find(opts.begin(), opts.end(), p.choice) != opts.end(), ErrorCode::validation,
              "choice was not offered");
      s_.open_offers.erase(it);
      s_.closed_offers.insert(p.offer_id);
    }
    auto& rec = day(d);
    ++rec.emi_completed;
    rec.emi_satisfaction.push_back({p.choice.type, p.satisfaction});
    ++s_.emi_completed_total;
  }

  void operator()(const EmiDeclined& p) {
    auto it = s_.open_offers.find(p.offer_id);
    require(it != s_.open_offers.end(), ErrorCode::state, "offer " + p.offer_id + " is not open");
    if (p.reason == DeclineReason::expired) {
      require(today() > it->second.date, ErrorCode::state, "offer " + p.offer_id + " expired before midnight");
    }
    s_.open_offers.erase(it);
    s_.closed_offers.insert(p.offer_id);
  }

  void operator()(const PlanRecorded& p) {
    require(p.plan.date == today(), ErrorCode::validation, "plan date is not today");
    in_window(p.plan.date, "plan");
    require(s_.config->selected(p.plan.chosen_ba), ErrorCode::validation,
            "BA '" + p.plan.chosen_ba + "' is not among the participant's selections");
    auto& rec = day(p.plan.date);
    rec.plan = p.plan;
    refresh_ledger(rec);
  }

  void operator()(const RoutineItemDone& p) {
    require(p.date <= today(), ErrorCode::validation, "routine item marked for a future date");
    in_window(p.date, "routine item");
    auto& rec = day(p.date);
    rec.marked[static_cast<std::size_t>(p.item)] = true;
    refresh_ledger(rec);
  }

  void operator()(const DiaryRecorded& p) {
    const auto& d = p.diary;
    require(d.date == today(), ErrorCode::validation, "diary date is not today");
    in_window(d.date, "diary");
    const auto& catalog = BaCatalog::builtin();
    require(!d.emotions.empty() && d.emotions.size() <= 3, ErrorCode::validation,
            "diary needs 1-3 emotions, got " + std::to_string(d.emotions.size()));
    for (std::size_t i = 0; i < d.emotions.size(); ++i) {
      require(catalog.is_panas_label(d.emotions[i]), ErrorCode::validation,
              "'" + d.emotions[i] + "' is not a PANAS label");
      require(std::find(d.emotions.begin(), d.emotions.begin() + i, d.emotions[i]) == d.emotions.begin() + i,
              ErrorCode::validation, "emotion '" + d.emotions[i] + "' listed twice");
    }
    require(d.steps >= 0, ErrorCode::validation, "negative step count");
    for (const auto& id : d.ba_done) {
      require(catalog.contains(id), ErrorCode::validation, "unknown BA activity '" + id + "'");
    }
    auto& rec = day(d.date);
    rec.diary = d;
    refresh_ledger(rec);
  }

  void operator()(const ReportDispatched& p) {
    require(p.for_date < today(), ErrorCode::validation, "report for a day that has not ended");
    in_window(p.for_date, "report");
    require(s_.dispatched_messages.contains(p.message_id), ErrorCode::state,
            "report message " + p.message_id + " was not dispatched");
    require(s_.reports_dispatched.emplace(p.for_date, p.message_id).second, ErrorCode::state,
            "report for " + format_date(p.for_date) + " dispatched twice");
  }

  void operator()(const MissionSettled& p) {
    const auto& st = p.settlement;
    auto range = study_week_range(s_.enrollment_date(), st.week_index);
    require(today() > s_.enrollment_date() + days(range.last_day), ErrorCode::state,
            "week " + std::to_string(st.week_index) + " has not ended");
    auto week = week_ledger_for(s_, st.week_index);
    int regular = regular_ema_in_week(s_, st.week_index);
    auto expected = compute_settlement(s_.gamification, st.week_index, week, regular);
    require(expected == st, ErrorCode::validation,
            "settlement for week " + std::to_string(st.week_index) + " does not match the routine ledger");
    s_.gamification = apply_settlement(std::move(s_.gamification), st);
  }

  void operator()(const AssessmentRecorded& p) {
    auto scored = score_instrument(p.instrument, p.items, p.wave);
    auto key = std::pair{p.instrument, p.wave};
    require(s_.assessment_log.emplace(key, std::move(scored)).second, ErrorCode::state,
            std::string(to_string(p.instrument)) + " already recorded for " + std::string(to_string(p.wave)));
  }

  void operator()(const MessageDispatched& p) {
    require(!p.message_id.empty(), ErrorCode::validation, "dispatch without message_id");
    require(s_.dispatched_messages.insert(p.message_id).second, ErrorCode::state,
            "message " + p.message_id + " dispatched twice");
  }

  void operator()(const SafetyFlagRaised& p) {
    require(!p.flag_id.empty() && !p.text.empty(), ErrorCode::validation, "safety flag needs an id and text");
    require(!s_.open_safety_flags.contains(p.flag_id) && !s_.acked_safety_flags.contains(p.flag_id),
            ErrorCode::state, "safety flag " + p.flag_id + " raised twice");
    s_.open_safety_flags.emplace(p.flag_id, SafetyFlag{p.flag_id, p.date, p.text, e_.at});
  }

  void operator()(const SafetyFlagAcked& p) {
    require(!p.note.empty(), ErrorCode::validation, "acknowledgement needs a note");
    auto it = s_.open_safety_flags.find(p.flag_id);
    require(it != s_.open_safety_flags.end(), ErrorCode::state, "safety flag " + p.flag_id + " is not open");
    s_.open_safety_flags.erase(it);
    s_.acked_safety_flags.insert(p.flag_id);
  }

 private:
  ParticipantState& s_;
  const ProtocolEvent& e_;
};

bool control_arm_allows(EventKind k) { return k == EventKind::AssessmentRecorded; }

}  // namespace

const DayRecord* ParticipantState::day(Date d) const {
  auto it = days.find(d);
  return it == days.end() ? nullptr : &it->second;
}

RoutineDayLedger ParticipantState::ledger_for(Date d) const {
  if (const auto* r = day(d)) return r->ledger;
  RoutineDayLedger l;
  l.date = d;
  return l;
}

int ParticipantState::regular_ema_in(Date first, Date last) const {
  int n = 0;
  for (auto it = days.lower_bound(first); it != days.end() && it->first <= last; ++it) n += it->second.regular_ema();
  return n;
}

ParticipantState apply_event(ParticipantState state, const ProtocolEvent& event) {
  if (event.seq != state.last_seq + 1) {
    fail(ErrorCode::ordering, "expected seq " + seq_str(state.last_seq + 1) + ", got " + seq_str(event.seq));
  }
  if (state.last_seq > 0 && event.at < state.last_at) fail(ErrorCode::ordering, "event time moved backwards");
  auto kind = event.kind();
  if (!state.enrolled && kind != EventKind::Enrolled) fail(ErrorCode::state, "no_enrollment");
  if (state.enrolled) {
    require(event.participant_id == state.profile.participant_id, ErrorCode::validation,
            "event for " + event.participant_id + " applied to " + state.profile.participant_id);
    if (!state.in_intervention() && !control_arm_allows(kind)) {
      fail(ErrorCode::state, std::string(to_string(kind)) + " is not part of the passive-control protocol");
    }
    if (state.awaiting_offer_for && kind != EventKind::EmiOffered) {
      fail(ErrorCode::ordering, "EMA seq " + seq_str(*state.awaiting_offer_for) + " must be followed by its EMI offer");
    }
    auto today = state.date_of(event.at);
    const auto* decline = event.as<EmiDeclined>();
    bool expiring = decline && decline->reason == DeclineReason::expired;
    for (const auto& [id, offer] : state.open_offers) {
      if (offer.date < today && !expiring) {
        fail(ErrorCode::state, "offer " + id + " must expire before later events");
      }
    }
  }

  Folder folder(state, event);
  std::visit(folder, event.payload);

  state.last_seq = event.seq;
  state.last_at = event.at;
  state.study_day = study_day_of(state.enrollment_date(), state.date_of(event.at));
  return state;
}

ParticipantState replay(std::span<const ProtocolEvent> events) {
  if (events.empty()) fail(ErrorCode::state, "no_enrollment");
  return apply_all(ParticipantState{}, events);
}

ParticipantState apply_all(ParticipantState state, std::span<const ProtocolEvent> events) {
  for (const auto& e : events) {
    try {
      state = apply_event(std::move(state), e);
    } catch (const Error& err) {
      throw Error(err.code(), "seq " + seq_str(e.seq) + ": " + err.what());
    }
  }
  return state;
}

ProtocolEvent next_event(const ParticipantState& state, Timestamp at, EventPayload payload) {
  ProtocolEvent e;
  e.seq = state.last_seq + 1;
  e.participant_id = state.profile.participant_id;
  if (const auto* enrolled = std::get_if<Enrolled>(&payload)) e.participant_id = enrolled->profile.participant_id;
  e.at = at;
  e.payload = std::move(payload);
  return e;
}

}  // namespace tca
