#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "tca/assessments/instruments.hpp"
#include "tca/core/enum_names.hpp"
#include "tca/core/time.hpp"
#include "tca/gamification/engine.hpp"
#include "tca/protocol/event.hpp"
#include "tca/protocol/state.hpp"

namespace tca {

using Json = nlohmann::json;

/// Timestamps are written with the offset of the innermost live scope (default +09:00).
class ScopedWireTimezone {
 public:
  explicit ScopedWireTimezone(TimeZone tz);
  ~ScopedWireTimezone();
  ScopedWireTimezone(const ScopedWireTimezone&) = delete;
  ScopedWireTimezone& operator=(const ScopedWireTimezone&) = delete;

  static TimeZone current();

 private:
  TimeZone previous_;
};

void to_json(Json& j, const ParticipantProfile& v);
void from_json(const Json& j, ParticipantProfile& v);
void to_json(Json& j, const OnboardingConfig& v);
void from_json(const Json& j, OnboardingConfig& v);
void to_json(Json& j, const EmaScores& v);
void from_json(const Json& j, EmaScores& v);
void to_json(Json& j, const EmaClassification& v);
void from_json(const Json& j, EmaClassification& v);
void to_json(Json& j, const EmiOption& v);
void from_json(const Json& j, EmiOption& v);
void to_json(Json& j, const DailyPlan& v);
void from_json(const Json& j, DailyPlan& v);
void to_json(Json& j, const DailyDiary& v);
void from_json(const Json& j, DailyDiary& v);
void to_json(Json& j, const RoutineDayLedger& v);
void to_json(Json& j, const WeeklySettlement& v);
void from_json(const Json& j, WeeklySettlement& v);
void to_json(Json& j, const Mission& v);
void to_json(Json& j, const MileageEntry& v);
void to_json(Json& j, const GamificationState& v);
void to_json(Json& j, const ScoredAssessment& v);
void to_json(Json& j, const WeeklyFeedbackCard& v);

Json payload_to_json(const EventPayload& payload);
EventPayload payload_from_json(EventKind kind, const Json& j);

/// {seq, participant_id, at, kind, payload}; `at` carries the given offset.
Json event_to_json(const ProtocolEvent& event, TimeZone tz);
/// Throws schema for unknown kinds, missing fields or wrong types.
ProtocolEvent event_from_json(const Json& j);

/// Read-only projection used by the HTTP state endpoint.
Json state_to_json(const ParticipantState& state);

/// Wraps nlohmann parse/type errors as schema errors.
template <class T>
T decode(const Json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::schema, std::string(what) + ": " + e.what());
  }
}

}  // namespace tca

namespace nlohmann {

template <class E>
  requires tca::NamedEnum<E>
struct adl_serializer<E> {
  static void to_json(json& j, E v) { j = std::string(tca::to_string(v)); }
  static void from_json(const json& j, E& v) { v = tca::parse_enum<E>(j.get<std::string>()); }
};

template <class T>
struct adl_serializer<std::optional<T>> {
  static void to_json(json& j, const std::optional<T>& v) {
    if (v) j = *v;
    else j = nullptr;
  }
  static void from_json(const json& j, std::optional<T>& v) {
    if (j.is_null()) v.reset();
    else v = j.get<T>();
  }
};

template <>
struct adl_serializer<tca::Timestamp> {
  static void to_json(json& j, tca::Timestamp v) { j = tca::format_iso(v, tca::ScopedWireTimezone::current()); }
  static void from_json(const json& j, tca::Timestamp& v) { v = tca::parse_iso(j.get<std::string>()); }
};

template <>
struct adl_serializer<tca::Date> {
  static void to_json(json& j, tca::Date v) { j = tca::format_date(v); }
  static void from_json(const json& j, tca::Date& v) { v = tca::parse_date(j.get<std::string>()); }
};

template <>
struct adl_serializer<tca::ClockTime> {
  static void to_json(json& j, tca::ClockTime v) { j = v.str(); }
  static void from_json(const json& j, tca::ClockTime& v) { v = tca::ClockTime::parse(j.get<std::string>()); }
};

template <>
struct adl_serializer<tca::TimeZone> {
  static void to_json(json& j, tca::TimeZone v) { j = v.offset_str(); }
  static void from_json(const json& j, tca::TimeZone& v) { v = tca::TimeZone::parse(j.get<std::string>()); }
};

}  // namespace nlohmann
