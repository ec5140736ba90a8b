#include "tca/protocol/json.hpp"

#include <type_traits>

#include "tca/core/error.hpp"

namespace tca {

namespace {

thread_local TimeZone g_wire_tz{};

template <class T>
void get_if_present(const Json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) it->get_to(out);
}

template <class T>
void get_optional(const Json& j, const char* key, std::optional<T>& out) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) out.reset();
  else out = it->get<T>();
}

}  // namespace

ScopedWireTimezone::ScopedWireTimezone(TimeZone tz) : previous_(g_wire_tz) { g_wire_tz = tz; }
ScopedWireTimezone::~ScopedWireTimezone() { g_wire_tz = previous_; }
TimeZone ScopedWireTimezone::current() { return g_wire_tz; }

void to_json(Json& j, const ParticipantProfile& v) {
  j = Json{{"participant_id", v.participant_id}, {"nickname", v.nickname},   {"gender", v.gender},
           {"age", v.age},                       {"arm", v.arm},             {"enrollment_date", v.enrollment_date},
           {"phq9_total", v.phq9_total},         {"severity_cell", v.severity_cell}};
}

void from_json(const Json& j, ParticipantProfile& v) {
  j.at("participant_id").get_to(v.participant_id);
  get_if_present(j, "nickname", v.nickname);
  j.at("gender").get_to(v.gender);
  j.at("age").get_to(v.age);
  j.at("arm").get_to(v.arm);
  j.at("enrollment_date").get_to(v.enrollment_date);
  j.at("phq9_total").get_to(v.phq9_total);
  if (j.contains("severity_cell")) j.at("severity_cell").get_to(v.severity_cell);
  else if (v.phq9_total >= 5 && v.phq9_total <= 19) v.severity_cell = severity_for_phq9(v.phq9_total);
}

void to_json(Json& j, const OnboardingConfig& v) {
  j = Json{{"ema_times", v.ema_times}, {"reminder_enabled", v.reminder_enabled},
           {"todo_time", v.todo_time}, {"diary_time", v.diary_time},
           {"step_goal", v.step_goal}, {"ba_selected", v.ba_selected},
           {"affirmation_text", v.affirmation_text}};
}

void from_json(const Json& j, OnboardingConfig& v) {
  const auto& times = j.at("ema_times");
  if (!times.is_array() || times.size() != 3) fail(ErrorCode::schema, "ema_times needs 3 entries");
  for (std::size_t i = 0; i < 3; ++i) times[i].get_to(v.ema_times[i]);
  get_if_present(j, "reminder_enabled", v.reminder_enabled);
  j.at("todo_time").get_to(v.todo_time);
  j.at("diary_time").get_to(v.diary_time);
  j.at("step_goal").get_to(v.step_goal);
  j.at("ba_selected").get_to(v.ba_selected);
  get_if_present(j, "affirmation_text", v.affirmation_text);
}

void to_json(Json& j, const EmaScores& v) {
  j = Json{{"negative_affect", v.negative_affect}, {"rumination", v.rumination},
           {"pleasant_activity", v.pleasant_activity}};
}

void from_json(const Json& j, EmaScores& v) {
  j.at("negative_affect").get_to(v.negative_affect);
  j.at("rumination").get_to(v.rumination);
  j.at("pleasant_activity").get_to(v.pleasant_activity);
}

void to_json(Json& j, const EmaClassification& v) {
  if (v.slot) j = Json{{"type", "regular"}, {"slot", *v.slot}};
  else j = Json{{"type", "voluntary"}};
}

void from_json(const Json& j, EmaClassification& v) {
  auto type = j.at("type").get<std::string>();
  if (type == "regular") v = EmaClassification::regular(j.at("slot").get<Slot>());
  else if (type == "voluntary") v = EmaClassification::voluntary();
  else fail(ErrorCode::schema, "unknown EMA classification '" + type + "'");
}

void to_json(Json& j, const EmiOption& v) { j = Json{{"type", v.type}, {"format", v.format}}; }

void from_json(const Json& j, EmiOption& v) {
  j.at("type").get_to(v.type);
  j.at("format").get_to(v.format);
}

void to_json(Json& j, const DailyPlan& v) {
  j = Json{{"date", v.date}, {"todo_items", v.todo_items}, {"chosen_ba", v.chosen_ba}};
}

void from_json(const Json& j, DailyPlan& v) {
  j.at("date").get_to(v.date);
  j.at("todo_items").get_to(v.todo_items);
  j.at("chosen_ba").get_to(v.chosen_ba);
}

void to_json(Json& j, const DailyDiary& v) {
  j = Json{{"date", v.date},           {"emotions", v.emotions},       {"emotion_event", v.emotion_event},
           {"gratitude", v.gratitude}, {"self_praise", v.self_praise}, {"washed", v.washed},
           {"steps", v.steps},         {"ba_done", v.ba_done},         {"good_points", v.good_points},
           {"bad_points", v.bad_points}};
}

void from_json(const Json& j, DailyDiary& v) {
  j.at("date").get_to(v.date);
  j.at("emotions").get_to(v.emotions);
  get_if_present(j, "emotion_event", v.emotion_event);
  get_if_present(j, "gratitude", v.gratitude);
  get_if_present(j, "self_praise", v.self_praise);
  j.at("washed").get_to(v.washed);
  j.at("steps").get_to(v.steps);
  get_if_present(j, "ba_done", v.ba_done);
  get_optional(j, "good_points", v.good_points);
  get_optional(j, "bad_points", v.bad_points);
}

void to_json(Json& j, const RoutineDayLedger& v) {
  j = Json{{"date", v.date}};
  Json items = Json::object();
  for (std::size_t i = 0; i < v.done.size(); ++i) {
    items[std::string(to_string(static_cast<RoutineItem>(i)))] = v.done[i] ? "done" : "not_done";
  }
  j["item_status"] = items;
}

void to_json(Json& j, const WeeklySettlement& v) {
  j = Json{{"week_index", v.week_index},         {"passed", v.passed},     {"previous_level", v.previous_level},
           {"new_level", v.new_level},           {"mission_points", v.mission_points},
           {"ema_points", v.ema_points}};
}

void from_json(const Json& j, WeeklySettlement& v) {
  j.at("week_index").get_to(v.week_index);
  j.at("passed").get_to(v.passed);
  j.at("previous_level").get_to(v.previous_level);
  j.at("new_level").get_to(v.new_level);
  j.at("mission_points").get_to(v.mission_points);
  j.at("ema_points").get_to(v.ema_points);
}

void to_json(Json& j, const Mission& v) { j = Json{{"from_level", v.from_level}, {"rule", v.rule}}; }

void to_json(Json& j, const MileageEntry& v) {
  j = Json{{"week_index", v.week_index}, {"source", v.source}, {"points", v.points}};
}

void to_json(Json& j, const GamificationState& v) {
  j = Json{{"level", v.level},
           {"level_name", v.level_name()},
           {"mileage_total", v.mileage.total()},
           {"mileage", v.mileage.entries},
           {"current_mission", v.current_mission},
           {"settlements", v.settlements}};
}

void to_json(Json& j, const ScoredAssessment& v) {
  j = Json{{"instrument", v.instrument}, {"wave", v.wave}, {"items", v.items}, {"total", v.total},
           {"band", v.band}};
}

void to_json(Json& j, const WeeklyFeedbackCard& v) {
  j = Json{{"level_name", v.level_name},     {"mileage_total", v.mileage_total},
           {"week_points", v.week_points},   {"illustration_key", v.illustration_key},
           {"message_kind", v.message_kind}, {"next_mission", v.next_mission}};
}

Json payload_to_json(const EventPayload& payload) {
  return std::visit(
      [](const auto& p) -> Json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Enrolled>) {
          return {{"profile", p.profile}, {"config", p.config}, {"timezone", p.timezone}};
        } else if constexpr (std::is_same_v<T, PromptIssued>) {
          return {{"prompt", p.prompt}, {"slot", p.slot}, {"due_at", p.due_at}, {"message_id", p.message_id}};
        } else if constexpr (std::is_same_v<T, ReminderIssued>) {
          return {{"slot", p.slot}, {"due_at", p.due_at}, {"message_id", p.message_id}};
        } else if constexpr (std::is_same_v<T, EmaSubmitted>) {
          return {{"classification", p.classification}, {"scores", p.scores}};
        } else if constexpr (std::is_same_v<T, EmiOffered>) {
          return {{"offer_id", p.offer_id}, {"ema_seq", p.ema_seq}, {"options", p.options}};
        } else if constexpr (std::is_same_v<T, EmiCompleted>) {
          return {{"offer_id", p.offer_id},
                  {"choice", p.choice},
                  {"content_ref", p.content_ref},
                  {"satisfaction", p.satisfaction}};
        } else if constexpr (std::is_same_v<T, EmiDeclined>) {
          return {{"offer_id", p.offer_id}, {"reason", p.reason}};
        } else if constexpr (std::is_same_v<T, PlanRecorded>) {
          return {{"plan", p.plan}};
        } else if constexpr (std::is_same_v<T, RoutineItemDone>) {
          return {{"date", p.date}, {"item", p.item}};
        } else if constexpr (std::is_same_v<T, DiaryRecorded>) {
          return {{"diary", p.diary}};
        } else if constexpr (std::is_same_v<T, ReportDispatched>) {
          return {{"for_date", p.for_date}, {"message_id", p.message_id}};
        } else if constexpr (std::is_same_v<T, MissionSettled>) {
          return {{"settlement", p.settlement}};
        } else if constexpr (std::is_same_v<T, AssessmentRecorded>) {
          return {{"instrument", p.instrument}, {"wave", p.wave}, {"items", p.items}};
        } else if constexpr (std::is_same_v<T, MessageDispatched>) {
          return {{"message_id", p.message_id}, {"kind", p.kind}};
        } else if constexpr (std::is_same_v<T, SafetyFlagRaised>) {
          return {{"flag_id", p.flag_id}, {"date", p.date}, {"text", p.text}};
        } else {
          static_assert(std::is_same_v<T, SafetyFlagAcked>);
          return {{"flag_id", p.flag_id}, {"note", p.note}};
        }
      },
      payload);
}

EventPayload payload_from_json(EventKind kind, const Json& j) {
  if (!j.is_object()) fail(ErrorCode::schema, "payload must be an object");
  switch (kind) {
    case EventKind::Enrolled: {
      Enrolled p;
      j.at("profile").get_to(p.profile);
      get_optional(j, "config", p.config);
      j.at("timezone").get_to(p.timezone);
      return p;
    }
    case EventKind::PromptIssued: {
      PromptIssued p;
      j.at("prompt").get_to(p.prompt);
      get_optional(j, "slot", p.slot);
      j.at("due_at").get_to(p.due_at);
      j.at("message_id").get_to(p.message_id);
      return p;
    }
    case EventKind::ReminderIssued: {
      ReminderIssued p;
      j.at("slot").get_to(p.slot);
      j.at("due_at").get_to(p.due_at);
      j.at("message_id").get_to(p.message_id);
      return p;
    }
    case EventKind::EmaSubmitted:
      return EmaSubmitted{j.at("classification").get<EmaClassification>(), j.at("scores").get<EmaScores>()};
    case EventKind::EmiOffered:
      return EmiOffered{j.at("offer_id").get<std::string>(), j.at("ema_seq").get<std::uint64_t>(),
                        j.at("options").get<std::vector<EmiOption>>()};
    case EventKind::EmiCompleted:
      return EmiCompleted{j.at("offer_id").get<std::string>(), j.at("choice").get<EmiOption>(),
                          j.at("content_ref").get<std::string>(), j.at("satisfaction").get<int>()};
    case EventKind::EmiDeclined:
      return EmiDeclined{j.at("offer_id").get<std::string>(), j.at("reason").get<DeclineReason>()};
    case EventKind::PlanRecorded:
      return PlanRecorded{j.at("plan").get<DailyPlan>()};
    case EventKind::RoutineItemDone:
      return RoutineItemDone{j.at("date").get<Date>(), j.at("item").get<RoutineItem>()};
    case EventKind::DiaryRecorded:
      return DiaryRecorded{j.at("diary").get<DailyDiary>()};
    case EventKind::ReportDispatched:
      return ReportDispatched{j.at("for_date").get<Date>(), j.at("message_id").get<std::string>()};
    case EventKind::MissionSettled:
      return MissionSettled{j.at("settlement").get<WeeklySettlement>()};
    case EventKind::AssessmentRecorded:
      return AssessmentRecorded{j.at("instrument").get<Instrument>(), j.at("wave").get<Wave>(),
                                j.at("items").get<std::vector<int>>()};
    case EventKind::MessageDispatched:
      return MessageDispatched{j.at("message_id").get<std::string>(), j.at("kind").get<MessageKind>()};
    case EventKind::SafetyFlagRaised:
      return SafetyFlagRaised{j.at("flag_id").get<std::string>(), j.at("date").get<Date>(),
                              j.at("text").get<std::string>()};
    case EventKind::SafetyFlagAcked:
      return SafetyFlagAcked{j.at("flag_id").get<std::string>(), j.at("note").get<std::string>()};
  }
  fail(ErrorCode::schema, "unknown event kind");
}

Json event_to_json(const ProtocolEvent& e, TimeZone tz) {
  ScopedWireTimezone scope(tz);
  return Json{{"seq", e.seq},
              {"participant_id", e.participant_id},
              {"at", e.at},
              {"kind", e.kind()},
              {"payload", payload_to_json(e.payload)}};
}

ProtocolEvent event_from_json(const Json& j) {
  try {
    if (!j.is_object()) fail(ErrorCode::schema, "event must be an object");
    ProtocolEvent e;
    j.at("seq").get_to(e.seq);
    j.at("participant_id").get_to(e.participant_id);
    j.at("at").get_to(e.at);
    auto kind = j.at("kind").get<EventKind>();
    e.payload = payload_from_json(kind, j.at("payload"));
    return e;
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorCode::schema, std::string("malformed event: ") + ex.what());
  }
}

Json state_to_json(const ParticipantState& s) {
  ScopedWireTimezone scope(s.timezone);
  Json days = Json::array();
  for (const auto& [date, rec] : s.days) {
    Json emas = Json::array();
    for (const auto& e : rec.ema) {
      emas.push_back({{"seq", e.seq}, {"at", e.at}, {"classification", e.classification}, {"scores", e.scores}});
    }
    days.push_back({{"date", date},
                    {"ema", emas},
                    {"regular_ema", rec.regular_ema()},
                    {"voluntary_ema", rec.voluntary_ema},
                    {"plan", rec.plan},
                    {"diary", rec.diary},
                    {"ledger", rec.ledger},
                    {"emi_completed", rec.emi_completed}});
  }
  Json assessments = Json::array();
  for (const auto& [key, a] : s.assessment_log) assessments.push_back(a);
  Json flags = Json::array();
  for (const auto& [id, f] : s.open_safety_flags) {
    flags.push_back({{"flag_id", f.flag_id}, {"date", f.date}, {"text", f.text}, {"raised_at", f.raised_at}});
  }
  Json offers = Json::array();
  for (const auto& [id, o] : s.open_offers) {
    offers.push_back({{"offer_id", o.offer_id}, {"ema_seq", o.ema_seq}, {"date", o.date}, {"options", o.options}});
  }
  return Json{{"participant_id", s.profile.participant_id},
              {"last_seq", s.last_seq},
              {"profile", s.profile},
              {"config", s.config},
              {"timezone", s.timezone},
              {"study_day", s.study_day},
              {"gamification", s.gamification},
              {"ema_counters", {{"regular", s.ema_counters.regular}, {"voluntary", s.ema_counters.voluntary}}},
              {"emi_completed", s.emi_completed_total},
              {"open_offers", offers},
              {"days", days},
              {"assessments", assessments},
              {"open_safety_flags", flags},
              {"acked_safety_flags", s.acked_safety_flags},
              {"dispatched_messages", s.dispatched_messages.size()}};
}

}  // namespace tca
