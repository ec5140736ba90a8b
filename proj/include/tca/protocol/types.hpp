#pragma once

#include <string_view>

#include "tca/core/enum_names.hpp"

namespace tca {

enum class Gender { female, male };
enum class Arm { intervention, passive_control };
enum class Severity { mild, moderate };
enum class AgeBand { age_19_24, age_25_34, age_35_plus };
enum class Slot { morning, afternoon, evening };

/// The five daily routine items tracked per day.
enum class RoutineItem { wash, todo_list, steps_goal, diary, ba_activity };

enum class EmiType { walking, body_scan, mindful_eating, breathing, rumination_journaling };
enum class EmiFormat { short_text, long_video };
enum class EmiDecision { completed, declined };
enum class EmiFollowup { praise_with_smile_image, encouragement_with_cry_image };
enum class DeclineReason { participant, expired };

enum class Instrument { PHQ9, BDI2, GAD7, QLESQ_SF };
enum class Wave { W0, W2, W4, W6 };
enum class SeverityBand { normal, mild, moderate, severe };

enum class PromptKind {
  MorningGreeting,
  WashPrompt,
  TodoLink,
  StepPrompt,
  EmaPrompt,
  DiaryLink,
  DailyReport,
  WeeklyFeedback,
};

/// Outbound message kinds: every scheduled prompt plus replies the engine generates.
enum class MessageKind {
  MorningGreeting,
  WashPrompt,
  TodoLink,
  StepPrompt,
  EmaPrompt,
  DiaryLink,
  DailyReport,
  WeeklyFeedback,
  EmaReminder,
  EmiPraise,
  EmiEncouragement,
};

enum class EmaColor { green, yellow, red };
enum class Stamp { wash, walk, todo, ba, diary, ema };

constexpr MessageKind message_kind_for(PromptKind k) { return static_cast<MessageKind>(k); }

constexpr int kRoutineItemCount = 5;
constexpr int kStudyWeeks = 6;
constexpr int kStudyDays = 42;
constexpr int kEmaPerDay = 3;

}  // namespace tca

TCA_ENUM_NAMES(tca::Gender, "female"sv, "male"sv);
TCA_ENUM_NAMES(tca::Arm, "intervention"sv, "passive_control"sv);
TCA_ENUM_NAMES(tca::Severity, "mild"sv, "moderate"sv);
TCA_ENUM_NAMES(tca::AgeBand, "19-24"sv, "25-34"sv, "35+"sv);
TCA_ENUM_NAMES(tca::Slot, "morning"sv, "afternoon"sv, "evening"sv);
TCA_ENUM_NAMES(tca::RoutineItem, "wash"sv, "todo_list"sv, "steps_goal"sv, "diary"sv, "ba_activity"sv);
TCA_ENUM_NAMES(tca::EmiType, "walking"sv, "body_scan"sv, "mindful_eating"sv, "breathing"sv,
               "rumination_journaling"sv);
TCA_ENUM_NAMES(tca::EmiFormat, "short_text"sv, "long_video"sv);
TCA_ENUM_NAMES(tca::EmiDecision, "completed"sv, "declined"sv);
TCA_ENUM_NAMES(tca::EmiFollowup, "praise_with_smile_image"sv, "encouragement_with_cry_image"sv);
TCA_ENUM_NAMES(tca::DeclineReason, "participant"sv, "expired"sv);
TCA_ENUM_NAMES(tca::Instrument, "PHQ9"sv, "BDI2"sv, "GAD7"sv, "QLESQ_SF"sv);
TCA_ENUM_NAMES(tca::Wave, "W0"sv, "W2"sv, "W4"sv, "W6"sv);
TCA_ENUM_NAMES(tca::SeverityBand, "normal"sv, "mild"sv, "moderate"sv, "severe"sv);
TCA_ENUM_NAMES(tca::PromptKind, "MorningGreeting"sv, "WashPrompt"sv, "TodoLink"sv, "StepPrompt"sv,
               "EmaPrompt"sv, "DiaryLink"sv, "DailyReport"sv, "WeeklyFeedback"sv);
TCA_ENUM_NAMES(tca::MessageKind, "MorningGreeting"sv, "WashPrompt"sv, "TodoLink"sv, "StepPrompt"sv,
               "EmaPrompt"sv, "DiaryLink"sv, "DailyReport"sv, "WeeklyFeedback"sv, "EmaReminder"sv,
               "EmiPraise"sv, "EmiEncouragement"sv);
TCA_ENUM_NAMES(tca::EmaColor, "green"sv, "yellow"sv, "red"sv);
TCA_ENUM_NAMES(tca::Stamp, "wash"sv, "walk"sv, "todo"sv, "ba"sv, "diary"sv, "ema"sv);
