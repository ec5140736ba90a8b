#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tca/core/time.hpp"
#include "tca/gamification/types.hpp"
#include "tca/protocol/records.hpp"

namespace tca {

// One payload struct per event kind. The variant index is the kind.

struct Enrolled {
  ParticipantProfile profile;
  std::optional<OnboardingConfig> config;  // absent for the passive-control arm
  TimeZone timezone;
  bool operator==(const Enrolled&) const = default;
};

struct PromptIssued {
  PromptKind prompt = PromptKind::MorningGreeting;
  std::optional<Slot> slot;
  Timestamp due_at{};
  std::string message_id;
  bool operator==(const PromptIssued&) const = default;
};

struct ReminderIssued {
  Slot slot = Slot::morning;
  Timestamp due_at{};
  std::string message_id;
  bool operator==(const ReminderIssued&) const = default;
};

struct EmaSubmitted {
  EmaClassification classification;
  EmaScores scores;
  bool operator==(const EmaSubmitted&) const = default;
};

struct EmiOffered {
  std::string offer_id;
  std::uint64_t ema_seq = 0;
  std::vector<EmiOption> options;
  bool operator==(const EmiOffered&) const = default;
};

/// An empty offer_id marks a self-initiated EMI that was not triggered by an offer.
struct EmiCompleted {
  std::string offer_id;
  EmiOption choice;
  std::string content_ref;
  int satisfaction = 0;
  bool operator==(const EmiCompleted&) const = default;
};

struct EmiDeclined {
  std::string offer_id;
  DeclineReason reason = DeclineReason::participant;
  bool operator==(const EmiDeclined&) const = default;
};

struct PlanRecorded {
  DailyPlan plan;
  bool operator==(const PlanRecorded&) const = default;
};

struct RoutineItemDone {
  Date date{};
  RoutineItem item = RoutineItem::wash;
  bool operator==(const RoutineItemDone&) const = default;
};

struct DiaryRecorded {
  DailyDiary diary;
  bool operator==(const DiaryRecorded&) const = default;
};

struct ReportDispatched {
  Date for_date{};
  std::string message_id;
  bool operator==(const ReportDispatched&) const = default;
};

struct MissionSettled {
  WeeklySettlement settlement;
  bool operator==(const MissionSettled&) const = default;
};

struct AssessmentRecorded {
  Instrument instrument = Instrument::BDI2;
  Wave wave = Wave::W0;
  std::vector<int> items;
  bool operator==(const AssessmentRecorded&) const = default;
};

struct MessageDispatched {
  std::string message_id;
  MessageKind kind = MessageKind::MorningGreeting;
  bool operator==(const MessageDispatched&) const = default;
};

struct SafetyFlagRaised {
  std::string flag_id;
  Date date{};
  std::string text;
  bool operator==(const SafetyFlagRaised&) const = default;
};

struct SafetyFlagAcked {
  std::string flag_id;
  std::string note;
  bool operator==(const SafetyFlagAcked&) const = default;
};

enum class EventKind {
  Enrolled,
  PromptIssued,
  ReminderIssued,
  EmaSubmitted,
  EmiOffered,
  EmiCompleted,
  EmiDeclined,
  PlanRecorded,
  RoutineItemDone,
  DiaryRecorded,
  ReportDispatched,
  MissionSettled,
  AssessmentRecorded,
  MessageDispatched,
  SafetyFlagRaised,
  SafetyFlagAcked,
};

using EventPayload =
    std::variant<Enrolled, PromptIssued, ReminderIssued, EmaSubmitted, EmiOffered, EmiCompleted, EmiDeclined,
                 PlanRecorded, RoutineItemDone, DiaryRecorded, ReportDispatched, MissionSettled,
                 AssessmentRecorded, MessageDispatched, SafetyFlagRaised, SafetyFlagAcked>;

struct ProtocolEvent {
  std::uint64_t seq = 0;
  ParticipantId participant_id;
  Timestamp at{};
  EventPayload payload;

  EventKind kind() const { return static_cast<EventKind>(payload.index()); }

  template <class T>
  const T* as() const {
    return std::get_if<T>(&payload);
  }

  bool operator==(const ProtocolEvent&) const = default;
};

}  // namespace tca

TCA_ENUM_NAMES(tca::EventKind, "Enrolled"sv, "PromptIssued"sv, "ReminderIssued"sv, "EmaSubmitted"sv,
               "EmiOffered"sv, "EmiCompleted"sv, "EmiDeclined"sv, "PlanRecorded"sv, "RoutineItemDone"sv,
               "DiaryRecorded"sv, "ReportDispatched"sv, "MissionSettled"sv, "AssessmentRecorded"sv,
               "MessageDispatched"sv, "SafetyFlagRaised"sv, "SafetyFlagAcked"sv);
