#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tca/analytics/compliance.hpp"
#include "tca/ba/ops.hpp"
#include "tca/ema_emi/ops.hpp"
#include "tca/scheduler/schedule.hpp"
#include "tca/service/channel.hpp"
#include "tca/service/clock.hpp"
#include "tca/service/event_store.hpp"
#include "tca/service/outbox.hpp"

namespace tca {

enum class RunMode { autopilot, wizard };
enum class ClockKind { system, simulated };

/// Contents of study.json.
struct StudySettings {
  RunMode mode = RunMode::autopilot;
  ClockKind clock = ClockKind::simulated;
  TimeZone timezone;
  /// Simulated clock start; also the initial tick cursor.
  Timestamp start{};
  std::optional<std::string> operator_token;
  ScheduleSettings schedule;
};

void to_json(Json& j, const StudySettings& s);
void from_json(const Json& j, StudySettings& s);

/// File layout of a study directory.
struct StudyPaths {
  std::filesystem::path dir;
  std::filesystem::path settings() const { return dir / "study.json"; }
  std::filesystem::path events() const { return dir / "events.jsonl"; }
  std::filesystem::path outbox() const { return dir / "outbox.jsonl"; }
  std::filesystem::path cursor() const { return dir / "cursor.json"; }
  std::filesystem::path deliveries() const { return dir / "deliveries.jsonl"; }
};

/// Creates the study directory. Throws conflict when study.json already exists.
void init_study(const std::filesystem::path& dir, const StudySettings& settings);
StudySettings load_study_settings(const std::filesystem::path& dir);

/// Test hooks around dispatch; a hook that throws aborts the tick at that point.
struct ServiceHooks {
  /// The adapter accepted the message; MessageDispatched is not yet appended.
  std::function<void(const OutboxMessage&)> after_deliver;
  /// The outbox row was written; the matching PromptIssued is not yet appended.
  std::function<void(const OutboxMessage&)> after_outbox_write;
};

struct TickReport {
  Timestamp now{};
  int materialized = 0;
  int dispatched = 0;
  int failed = 0;
  int expired_offers = 0;
  int settlements = 0;
};

struct EmiReply {
  EmiFollowup followup = EmiFollowup::praise_with_smile_image;
  std::optional<EmiCatalogEntry> content;
  std::string message_id;
};

struct SafetyFlagView {
  ParticipantId participant_id;
  SafetyFlag flag;
  bool acked = false;
};

/// Engine facade over one study directory. Appends are serialized; the tick cursor is owned by
/// whichever thread calls tick().
class StudyService {
 public:
  StudyService(std::filesystem::path dir, Clock& clock, ChannelAdapter& adapter, ServiceHooks hooks = {});

  const StudySettings& settings() const { return settings_; }
  /// Mode for messages created from now on (serve --mode); study.json is not rewritten.
  void set_mode(RunMode mode) { settings_.mode = mode; }
  Timestamp now() const { return clock_.now(); }
  Clock& clock() { return clock_; }
  Timestamp cursor() const;
  /// Simulated-clock time saved with the last tick, if any.
  std::optional<Timestamp> saved_clock() const;

  // Ingestion. `at` defaults to the clock. Each call first expires stale offers and settles
  // closed weeks for the participant.
  ParticipantState enroll(const ParticipantProfile& profile, const std::optional<OnboardingConfig>& config,
                          std::optional<Timestamp> at = std::nullopt);
  EmiOffered submit_ema(const ParticipantId& id, const EmaScores& scores, std::optional<Timestamp> at = std::nullopt);
  EmiReply record_emi(const ParticipantId& id, const EmiOutcome& outcome, std::optional<Timestamp> at = std::nullopt);
  void record_plan(const ParticipantId& id, const DailyPlan& plan, std::optional<Timestamp> at = std::nullopt);
  std::vector<SafetyFlagRaised> record_diary(const ParticipantId& id, const DailyDiary& diary,
                                             std::optional<Timestamp> at = std::nullopt);
  ScoredAssessment record_assessment(const ParticipantId& id, const AssessmentRecorded& record,
                                     std::optional<Timestamp> at = std::nullopt);

  /// Materializes due prompts into the outbox and dispatches approved rows. Repeating the same
  /// `now` dispatches nothing new. Throws clock_regression for `now` before the cursor.
  TickReport tick(std::optional<Timestamp> now = std::nullopt);

  std::vector<OutboxMessage> outbox(std::optional<OutboxStatus> status = std::nullopt) const;
  OutboxMessage approve(const std::string& message_id);
  OutboxMessage hold(const std::string& message_id);
  /// Only before approval. Throws state otherwise.
  OutboxMessage edit_body(const std::string& message_id, const Json& body);

  std::vector<SafetyFlagView> safety_flags() const;
  /// False when the flag was already acknowledged.
  bool ack_safety_flag(const std::string& flag_id, const std::string& note);

  std::vector<ParticipantId> participants() const { return store_.participants(); }
  ParticipantState state(const ParticipantId& id) const { return store_.state(id); }
  std::vector<ProtocolEvent> events(const ParticipantId& id) const { return store_.events(id); }
  std::vector<std::vector<ProtocolEvent>> all_events() const { return store_.all_events(); }
  DailyReport daily_report(const ParticipantId& id, Date for_date) const;
  std::vector<ComplianceWeekSummary> compliance() const;

 private:
  using Build = std::function<void(Transition&)>;
  ParticipantState commit(const ParticipantId& id, const Build& build);
  void housekeeping(const ParticipantId& id, Timestamp at, TickReport* report);
  void reconcile();
  void materialize(const DueItem& item, Timestamp at, TickReport& report);
  void ensure_issued(const OutboxMessage& row, const DueItem* item);
  void dispatch_ready(Timestamp at, bool retries, TickReport& report);
  void queue_followup(const ParticipantState& state, const std::string& message_id, MessageKind kind, Json body,
                      Timestamp at);
  const ParticipantSchedule* schedule_for(const ParticipantState& state);
  void save_cursor();

  StudyPaths paths_;
  StudySettings settings_;
  Clock& clock_;
  ChannelAdapter& adapter_;
  ServiceHooks hooks_;
  EventStore store_;
  OutboxStore outbox_;
  mutable std::recursive_mutex mutex_;
  Timestamp cursor_{};
  std::map<ParticipantId, ParticipantSchedule> schedules_;
};

/// Message text and fields for a scheduled prompt.
Json prompt_body(const ParticipantState& state, const ScheduledPrompt& prompt, bool reminder);
Json daily_report_json(const DailyReport& report);

/// Maps an error to its HTTP status (400, 404, 409, 500).
int http_status_for(ErrorCode code);

}  // namespace tca

TCA_ENUM_NAMES(tca::RunMode, "autopilot"sv, "wizard"sv);
TCA_ENUM_NAMES(tca::ClockKind, "system"sv, "simulated"sv);
