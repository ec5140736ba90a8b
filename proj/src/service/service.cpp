#include "tca/service/service.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "tca/core/error.hpp"
#include "tca/core/template.hpp"
#include "tca/gamification/settle.hpp"

namespace tca {

namespace fs = std::filesystem;

void to_json(Json& j, const StudySettings& s) {
  ScopedWireTimezone wire(s.timezone);
  j = Json{{"mode", s.mode},
           {"clock", s.clock},
           {"timezone", s.timezone},
           {"start", s.start},
           {"operator_token", s.operator_token},
           {"schedule",
            {{"greeting_time", s.schedule.greeting_time},
             {"weekly_feedback_time", s.schedule.weekly_feedback_time},
             {"daily_report_time", s.schedule.daily_report_time}}}};
}

void from_json(const Json& j, StudySettings& s) {
  s.mode = j.value("mode", Json("autopilot")).get<RunMode>();
  s.clock = j.value("clock", Json("simulated")).get<ClockKind>();
  s.timezone = j.value("timezone", Json("+09:00")).get<TimeZone>();
  s.start = j.at("start").get<Timestamp>();
  s.operator_token = j.value("operator_token", Json()).get<std::optional<std::string>>();
  if (j.contains("schedule")) {
    const auto& sc = j.at("schedule");
    s.schedule.greeting_time = sc.value("greeting_time", Json("08:30")).get<ClockTime>();
    s.schedule.weekly_feedback_time = sc.value("weekly_feedback_time", Json("09:00")).get<ClockTime>();
    s.schedule.daily_report_time = sc.value("daily_report_time", Json("15:00")).get<ClockTime>();
  }
}

namespace {

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::storage, "cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::storage, path.string() + ": " + e.what());
  }
}

// Whole-file replace via rename so a crash leaves either the old or the new content.
void write_json_file(const fs::path& path, const Json& j) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << j.dump(2) << '\n';
    out.flush();
    require(out.good(), ErrorCode::storage, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  require(!ec, ErrorCode::storage, "cannot replace " + path.string() + ": " + ec.message());
}

Timestamp stamp(const ParticipantState& state, Timestamp at) { return std::max(at, state.last_at); }

std::string followup_message_id(const ParticipantId& id, const std::string& offer_id) {
  return fmt::format("{}/{}/followup", id, offer_id);
}

}  // namespace

void init_study(const fs::path& dir, const StudySettings& settings) {
  StudyPaths paths{dir};
  require(!fs::exists(paths.settings()), ErrorCode::conflict, "study already initialized at " + dir.string());
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorCode::storage, "cannot create " + dir.string() + ": " + ec.message());
  write_json_file(paths.settings(), Json(settings));
}

StudySettings load_study_settings(const fs::path& dir) {
  StudyPaths paths{dir};
  require(fs::exists(paths.settings()), ErrorCode::not_found, "no study at " + dir.string());
  auto j = read_json_file(paths.settings());
  try {
    return j.get<StudySettings>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::schema, std::string("study.json: ") + e.what());
  }
}

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::not_found: return 404;
    case ErrorCode::state:
    case ErrorCode::conflict:
    case ErrorCode::clock_regression:
    case ErrorCode::ordering: return 409;
    case ErrorCode::storage:
    case ErrorCode::internal: return 500;
    default: return 400;
  }
}

Json prompt_body(const ParticipantState& state, const ScheduledPrompt& prompt, bool reminder) {
  ScopedWireTimezone wire(state.timezone);
  std::string key = reminder ? "msg_EmaReminder" : "msg_" + std::string(to_string(prompt.kind));
  std::map<std::string, std::string> values{{"nickname", state.profile.nickname}};
  if (state.config) values["step_goal"] = std::to_string(state.config->step_goal);
  Json body{{"text", render_template(prompt_template(key), values)}, {"prompt", prompt.kind}, {"due_at", prompt.due_at}};
  if (prompt.slot) body["slot"] = *prompt.slot;
  if (prompt.validity_until && !reminder) body["valid_until"] = *prompt.validity_until;
  if (prompt.kind == PromptKind::MorningGreeting && state.config && !state.config->affirmation_text.empty()) {
    body["affirmation"] = state.config->affirmation_text;
  }
  if (prompt.kind == PromptKind::WeeklyFeedback) {
    const auto& g = state.gamification;
    if (!g.settlements.empty()) body["card"] = compose_feedback_card(g, g.settlements.back());
    body["mission"] = g.current_mission ? Json(*g.current_mission) : Json();
  }
  return body;
}

Json daily_report_json(const DailyReport& r) {
  Json colors = Json::array();
  for (const auto& c : r.ema_colors) {
    colors.push_back({{"at", c.at},
                      {"slot", c.slot},
                      {"negative_affect", c.negative_affect},
                      {"rumination", c.rumination},
                      {"pleasant_activity", c.pleasant_activity}});
  }
  Json satisfaction = Json::array();
  for (const auto& s : r.emi_satisfaction) satisfaction.push_back({{"type", s.type}, {"score", s.score}});
  return Json{{"participant_id", r.participant_id},
              {"for_date", r.for_date},
              {"stamps", r.stamps},
              {"gratitude_text", r.gratitude_text},
              {"praise_text", r.praise_text},
              {"emotions", r.emotions},
              {"ema_colors", colors},
              {"emi_satisfaction", satisfaction},
              {"image_prompt", r.image_prompt}};
}

StudyService::StudyService(fs::path dir, Clock& clock, ChannelAdapter& adapter, ServiceHooks hooks)
    : paths_{std::move(dir)},
      settings_(load_study_settings(paths_.dir)),
      clock_(clock),
      adapter_(adapter),
      hooks_(std::move(hooks)),
      store_(paths_.events(), settings_.timezone),
      outbox_(paths_.outbox(), settings_.timezone) {
  cursor_ = settings_.start - seconds(1);
  if (fs::exists(paths_.cursor())) cursor_ = read_json_file(paths_.cursor()).at("cursor").get<Timestamp>();
  reconcile();
}

Timestamp StudyService::cursor() const {
  std::lock_guard lock(mutex_);
  return cursor_;
}

std::optional<Timestamp> StudyService::saved_clock() const {
  if (!fs::exists(paths_.cursor())) return std::nullopt;
  return read_json_file(paths_.cursor()).at("clock").get<Timestamp>();
}

void StudyService::save_cursor() {
  ScopedWireTimezone wire(settings_.timezone);
  write_json_file(paths_.cursor(), Json{{"cursor", cursor_}, {"clock", clock_.now()}});
}

// Repairs the effects of a crash between the outbox write and the event append.
void StudyService::reconcile() {
  for (const auto& row : outbox_.list()) {
    if (!store_.contains(row.participant_id)) continue;
    auto state = store_.state(row.participant_id);
    if (row.scheduled) ensure_issued(row, nullptr);
    bool sent = state.dispatched_messages.count(row.message_id) > 0;
    if (sent && row.status != OutboxStatus::dispatched) {
      outbox_.update(row.message_id, [&](OutboxMessage& m) {
        m.status = OutboxStatus::dispatched;
        m.dispatched_at = m.last_attempt_at.value_or(state.last_at);
      });
    }
  }
}

ParticipantState StudyService::commit(const ParticipantId& id, const Build& build) {
  std::lock_guard lock(mutex_);
  for (int attempt = 0;; ++attempt) {
    ParticipantState base = store_.contains(id) ? store_.state(id) : ParticipantState{};
    Transition t{base};
    build(t);
    try {
      return store_.append(id, base.last_seq, t.events);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::conflict || attempt >= 2) throw;
    }
  }
}

const ParticipantSchedule* StudyService::schedule_for(const ParticipantState& state) {
  if (!state.config) return nullptr;
  auto id = state.profile.participant_id;
  auto it = schedules_.find(id);
  if (it == schedules_.end()) {
    ParticipantSchedule s{id, build_study_schedule(*state.config, state.enrollment_date(), state.timezone,
                                                   settings_.schedule)};
    it = schedules_.emplace(id, std::move(s)).first;
  }
  return &it->second;
}

void StudyService::housekeeping(const ParticipantId& id, Timestamp at, TickReport* report) {
  auto state = store_.state(id);
  if (!state.in_intervention()) return;
  auto today = state.date_of(at);
  bool stale = std::any_of(state.open_offers.begin(), state.open_offers.end(),
                           [&](const auto& o) { return o.second.date < today; });
  auto due = weeks_due_for_settlement(state, at);
  if (!stale && due.empty()) return;
  commit(id, [&](Transition& t) {
    auto when = stamp(t.state, at);
    auto expired = expire_open_offers(t.state, when);
    for (const auto& e : expired.events) {
      t.append(e.at, e.payload);
      if (report) ++report->expired_offers;
    }
    for (int w : weeks_due_for_settlement(t.state, when)) {
      auto s = compute_settlement(t.state.gamification, w, week_ledger_for(t.state, w), regular_ema_in_week(t.state, w));
      t.append(when, MissionSettled{s});
      if (report) ++report->settlements;
    }
  });
}

ParticipantState StudyService::enroll(const ParticipantProfile& profile, const std::optional<OnboardingConfig>& config,
                                      std::optional<Timestamp> at) {
  std::lock_guard lock(mutex_);
  require(!profile.participant_id.empty(), ErrorCode::validation, "participant_id is required");
  require(!store_.contains(profile.participant_id), ErrorCode::conflict,
          "participant already enrolled: " + profile.participant_id);
  auto when = at.value_or(clock_.now());
  return commit(profile.participant_id,
                [&](Transition& t) { t.append(when, Enrolled{profile, config, settings_.timezone}); });
}

EmiOffered StudyService::submit_ema(const ParticipantId& id, const EmaScores& scores, std::optional<Timestamp> at) {
  std::lock_guard lock(mutex_);
  auto when = at.value_or(clock_.now());
  housekeeping(id, when, nullptr);
  EmiOffered offer;
  commit(id, [&](Transition& t) {
    auto r = record_ema_submission(t.state, {when, scores, std::nullopt});
    for (const auto& e : r.transition.events) t.append(e.at, e.payload);
    offer = r.offer;
  });
  return offer;
}

void StudyService::queue_followup(const ParticipantState& state, const std::string& message_id, MessageKind kind,
                                  Json body, Timestamp at) {
  OutboxMessage row;
  row.message_id = message_id;
  row.participant_id = state.profile.participant_id;
  row.kind = kind;
  row.body = std::move(body);
  row.status = settings_.mode == RunMode::autopilot ? OutboxStatus::approved : OutboxStatus::pending_approval;
  row.created_at = at;
  row.due_at = at;
  outbox_.insert(row);
}

EmiReply StudyService::record_emi(const ParticipantId& id, const EmiOutcome& outcome, std::optional<Timestamp> at) {
  std::lock_guard lock(mutex_);
  auto when = at.value_or(clock_.now());
  housekeeping(id, when, nullptr);
  EmiReply reply;
  auto state = commit(id, [&](Transition& t) {
    auto r = record_emi_outcome(t.state, when, outcome);
    for (const auto& e : r.transition.events) t.append(e.at, e.payload);
    reply.followup = r.followup;
    reply.content = r.content;
  });
  reply.message_id = followup_message_id(id, outcome.offer_id);
  auto kind = message_kind_for(reply.followup);
  auto text = render_template(prompt_template("msg_" + std::string(to_string(kind))),
                              {{"nickname", state.profile.nickname}});
  Json body{{"text", text}, {"followup", reply.followup}, {"offer_id", outcome.offer_id}};
  if (reply.content) body["content_ref"] = reply.content->content_ref;
  queue_followup(state, reply.message_id, kind, body, when);
  return reply;
}

void StudyService::record_plan(const ParticipantId& id, const DailyPlan& plan, std::optional<Timestamp> at) {
  std::lock_guard lock(mutex_);
  auto when = at.value_or(clock_.now());
  housekeeping(id, when, nullptr);
  commit(id, [&](Transition& t) {
    for (const auto& e : record_daily_plan(t.state, when, plan).events) t.append(e.at, e.payload);
  });
}

std::vector<SafetyFlagRaised> StudyService::record_diary(const ParticipantId& id, const DailyDiary& diary,
                                                         std::optional<Timestamp> at) {
  std::lock_guard lock(mutex_);
  auto when = at.value_or(clock_.now());
  housekeeping(id, when, nullptr);
  std::vector<SafetyFlagRaised> flags;
  commit(id, [&](Transition& t) {
    auto r = tca::record_diary(t.state, when, diary);
    for (const auto& e : r.transition.events) t.append(e.at, e.payload);
    flags = r.safety_flags;
  });
  return flags;
}

ScoredAssessment StudyService::record_assessment(const ParticipantId& id, const AssessmentRecorded& record,
                                                 std::optional<Timestamp> at) {
  std::lock_guard lock(mutex_);
  auto when = at.value_or(clock_.now());
  housekeeping(id, when, nullptr);
  auto state = commit(id, [&](Transition& t) { t.append(when, record); });
  return state.assessment_log.at({record.instrument, record.wave});
}

void StudyService::ensure_issued(const OutboxMessage& row, const DueItem* item) {
  auto state = store_.state(row.participant_id);
  if (state.issued_messages.count(row.message_id)) return;
  commit(row.participant_id, [&](Transition& t) {
    auto when = stamp(t.state, item ? item->fire_at : row.created_at);
    if (row.kind == MessageKind::EmaReminder) {
      require(row.slot.has_value(), ErrorCode::internal, "reminder row without slot: " + row.message_id);
      t.append(when, ReminderIssued{*row.slot, row.due_at, row.message_id});
    } else {
      auto due = item ? item->prompt.due_at : row.due_at;
      t.append(when, PromptIssued{static_cast<PromptKind>(row.kind), row.slot, due, row.message_id});
    }
  });
}

void StudyService::materialize(const DueItem& item, Timestamp at, TickReport& report) {
  auto state = store_.state(item.participant_id);
  auto id = prompt_message_id(item.participant_id, item.prompt, item.reminder, state.timezone);
  if (auto existing = outbox_.get(id)) {
    ensure_issued(*existing, &item);
    return;
  }
  if (item.reminder) {
    const auto* day = state.day(state.date_of(item.prompt.due_at));
    if (day && item.prompt.slot && day->regular_slots.count(*item.prompt.slot)) return;  // already answered
  }
  OutboxMessage row;
  row.message_id = id;
  row.participant_id = item.participant_id;
  row.kind = item.reminder ? MessageKind::EmaReminder : message_kind_for(item.prompt.kind);
  row.body = prompt_body(state, item.prompt, item.reminder);
  row.status = settings_.mode == RunMode::autopilot ? OutboxStatus::approved : OutboxStatus::pending_approval;
  row.created_at = at;
  row.due_at = item.fire_at;
  row.scheduled = true;
  row.slot = item.prompt.slot;
  if (item.prompt.kind == PromptKind::DailyReport) {
    auto today = state.date_of(item.prompt.due_at);
    auto report = assemble_daily_report(state, today - days(1), today);
    ScopedWireTimezone wire(state.timezone);
    row.body["report"] = daily_report_json(report);
    row.report_for = report.for_date;
  }
  outbox_.insert(row);
  ++report.materialized;
  if (hooks_.after_outbox_write) hooks_.after_outbox_write(row);
  ensure_issued(row, &item);
}

void StudyService::dispatch_ready(Timestamp at, bool retries, TickReport& report) {
  for (const auto& row : outbox_.list()) {
    bool ready = row.status == OutboxStatus::approved ||
                 (retries && row.retryable() && (!row.last_attempt_at || *row.last_attempt_at < at));
    if (!ready || row.due_at > at) continue;
    auto state = store_.state(row.participant_id);
    if (state.dispatched_messages.count(row.message_id)) {
      outbox_.update(row.message_id, [&](OutboxMessage& m) {
        m.status = OutboxStatus::dispatched;
        m.dispatched_at = at;
      });
      continue;
    }
    auto result = adapter_.deliver(row);
    if (result != DeliveryResult::ok) {
      outbox_.update(row.message_id, [&](OutboxMessage& m) {
        m.status = OutboxStatus::failed;
        ++m.attempts;
        m.last_attempt_at = at;
        m.permanent_failure = result == DeliveryResult::permanent_failure || m.attempts >= kMaxDeliveryAttempts;
        m.last_error = std::string(to_string(result));
      });
      ++report.failed;
      continue;
    }
    if (hooks_.after_deliver) hooks_.after_deliver(row);
    commit(row.participant_id, [&](Transition& t) {
      auto when = stamp(t.state, at);
      t.append(when, MessageDispatched{row.message_id, row.kind});
      if (row.report_for) t.append(when, ReportDispatched{*row.report_for, row.message_id});
    });
    outbox_.update(row.message_id, [&](OutboxMessage& m) {
      m.status = OutboxStatus::dispatched;
      ++m.attempts;
      m.last_attempt_at = at;
      m.dispatched_at = at;
    });
    ++report.dispatched;
  }
}

TickReport StudyService::tick(std::optional<Timestamp> now_arg) {
  std::lock_guard lock(mutex_);
  auto now = now_arg.value_or(clock_.now());
  require(now >= cursor_, ErrorCode::clock_regression,
          fmt::format("tick at {} is before the cursor {}", format_iso(now, settings_.timezone),
                      format_iso(cursor_, settings_.timezone)));
  TickReport report;
  report.now = now;
  dispatch_ready(now, true, report);

  std::vector<ParticipantSchedule> schedules;
  for (const auto& [id, state] : store_.snapshot()) {
    if (const auto* s = schedule_for(state)) schedules.push_back(*s);
  }
  auto items = items_between(schedules, cursor_, now);
  auto tz = settings_.timezone;
  std::set<Timestamp> midnights;
  for (auto d = tz.local_date(cursor_) + days(1); d <= tz.local_date(now); d += days(1)) {
    if (tz.midnight(d) > cursor_ && tz.midnight(d) <= now) midnights.insert(tz.midnight(d));
  }
  std::set<Timestamp> checkpoints(midnights.begin(), midnights.end());
  for (const auto& item : items) checkpoints.insert(item.fire_at);
  checkpoints.insert(now);

  auto next = items.begin();
  for (auto t : checkpoints) {
    if (midnights.count(t) || t == now) {
      for (const auto& id : store_.participants()) housekeeping(id, t, &report);
    }
    for (; next != items.end() && next->fire_at == t; ++next) materialize(*next, t, report);
    dispatch_ready(t, false, report);
  }
  cursor_ = now;
  save_cursor();
  return report;
}

std::vector<OutboxMessage> StudyService::outbox(std::optional<OutboxStatus> status) const {
  return outbox_.list(status);
}

OutboxMessage StudyService::approve(const std::string& message_id) {
  std::lock_guard lock(mutex_);
  return outbox_.update(message_id, [&](OutboxMessage& m) {
    require(outbox_transition_allowed(m.status, OutboxStatus::approved), ErrorCode::state,
            fmt::format("{} is {} and cannot be approved", message_id, to_string(m.status)));
    m.status = OutboxStatus::approved;
  });
}

OutboxMessage StudyService::hold(const std::string& message_id) {
  std::lock_guard lock(mutex_);
  return outbox_.update(message_id, [&](OutboxMessage& m) {
    require(outbox_transition_allowed(m.status, OutboxStatus::held), ErrorCode::state,
            fmt::format("{} is {} and cannot be held", message_id, to_string(m.status)));
    m.status = OutboxStatus::held;
  });
}

OutboxMessage StudyService::edit_body(const std::string& message_id, const Json& body) {
  std::lock_guard lock(mutex_);
  require(body.is_object(), ErrorCode::validation, "body must be a JSON object");
  return outbox_.update(message_id, [&](OutboxMessage& m) {
    require(m.status == OutboxStatus::pending_approval || m.status == OutboxStatus::held, ErrorCode::state,
            fmt::format("{} is {}; only unapproved messages can be edited", message_id, to_string(m.status)));
    m.body = body;
  });
}

std::vector<SafetyFlagView> StudyService::safety_flags() const {
  std::vector<SafetyFlagView> out;
  for (const auto& [id, state] : store_.snapshot()) {
    for (const auto& [fid, flag] : state.open_safety_flags) out.push_back({id, flag, false});
    for (const auto& fid : state.acked_safety_flags) {
      SafetyFlag f;
      f.flag_id = fid;
      out.push_back({id, f, true});
    }
  }
  return out;
}

bool StudyService::ack_safety_flag(const std::string& flag_id, const std::string& note) {
  std::lock_guard lock(mutex_);
  require(!note.empty(), ErrorCode::validation, "an acknowledgement note is required");
  for (const auto& [id, state] : store_.snapshot()) {
    if (state.acked_safety_flags.count(flag_id)) return false;
    if (state.open_safety_flags.count(flag_id)) {
      auto when = clock_.now();
      commit(id, [&](Transition& t) { t.append(stamp(t.state, when), SafetyFlagAcked{flag_id, note}); });
      return true;
    }
  }
  fail(ErrorCode::not_found, "unknown safety flag " + flag_id);
}

DailyReport StudyService::daily_report(const ParticipantId& id, Date for_date) const {
  auto state = store_.state(id);
  return assemble_daily_report(state, for_date, state.date_of(clock_.now()));
}

std::vector<ComplianceWeekSummary> StudyService::compliance() const {
  std::vector<ComplianceWeekSummary> rows;
  auto now = clock_.now();
  for (const auto& [id, state] : store_.snapshot()) {
    if (!state.in_intervention()) continue;
    for (const auto& w : elapsed_week_compliance(state, std::max(now, state.last_at))) rows.push_back(w);
  }
  return rows;
}

}  // namespace tca
