#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tca/protocol/json.hpp"

namespace tca {

enum class OutboxStatus { pending_approval, approved, held, dispatched, failed };

/// Allowed status moves; failed -> dispatched|failed is a retry.
bool outbox_transition_allowed(OutboxStatus from, OutboxStatus to);

constexpr int kMaxDeliveryAttempts = 3;

struct OutboxMessage {
  std::string message_id;
  ParticipantId participant_id;
  MessageKind kind = MessageKind::MorningGreeting;
  Json body = Json::object();
  OutboxStatus status = OutboxStatus::pending_approval;
  Timestamp created_at{};
  Timestamp due_at{};
  std::optional<Timestamp> dispatched_at;
  std::optional<Date> report_for;  // DailyReport rows
  bool scheduled = false;           // materialized from the schedule (PromptIssued/ReminderIssued)
  std::optional<Slot> slot;
  int attempts = 0;
  std::optional<Timestamp> last_attempt_at;
  bool permanent_failure = false;
  std::string last_error;

  bool retryable() const {
    return status == OutboxStatus::failed && !permanent_failure && attempts < kMaxDeliveryAttempts;
  }
};

void to_json(Json& j, const OutboxMessage& m);
void from_json(const Json& j, OutboxMessage& m);

/// Outbox rows persisted as JSON Lines of full row snapshots; the last line per message wins.
class OutboxStore {
 public:
  OutboxStore(std::filesystem::path file, TimeZone wire_tz);

  std::optional<OutboxMessage> get(const std::string& message_id) const;
  /// Ordered by (due_at, message_id).
  std::vector<OutboxMessage> list(std::optional<OutboxStatus> status = std::nullopt) const;

  /// Throws conflict when the id exists.
  void insert(const OutboxMessage& message);
  /// Throws not_found for unknown ids and state for a disallowed status move.
  OutboxMessage update(const std::string& message_id, const std::function<void(OutboxMessage&)>& change);

 private:
  void write(const OutboxMessage& m);

  std::filesystem::path path_;
  TimeZone wire_tz_;
  mutable std::mutex mutex_;
  std::ofstream out_;
  std::map<std::string, OutboxMessage> rows_;
};

}  // namespace tca

TCA_ENUM_NAMES(tca::OutboxStatus, "pending_approval"sv, "approved"sv, "held"sv, "dispatched"sv, "failed"sv);
