#include "tca/service/outbox.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "tca/core/error.hpp"
#include "jsonl.hpp"

namespace tca {

namespace fs = std::filesystem;

bool outbox_transition_allowed(OutboxStatus from, OutboxStatus to) {
  using S = OutboxStatus;
  switch (from) {
    case S::pending_approval: return to == S::approved || to == S::held;
    case S::held: return to == S::approved;
    case S::approved: return to == S::dispatched || to == S::failed;
    case S::failed: return to == S::dispatched || to == S::failed;
    case S::dispatched: return false;
  }
  return false;
}

void to_json(Json& j, const OutboxMessage& m) {
  j = Json{{"message_id", m.message_id},
           {"participant_id", m.participant_id},
           {"kind", m.kind},
           {"body", m.body},
           {"status", m.status},
           {"created_at", m.created_at},
           {"due_at", m.due_at},
           {"dispatched_at", m.dispatched_at},
           {"report_for", m.report_for},
           {"scheduled", m.scheduled},
           {"slot", m.slot},
           {"attempts", m.attempts},
           {"last_attempt_at", m.last_attempt_at},
           {"permanent_failure", m.permanent_failure},
           {"last_error", m.last_error}};
}

void from_json(const Json& j, OutboxMessage& m) {
  j.at("message_id").get_to(m.message_id);
  j.at("participant_id").get_to(m.participant_id);
  j.at("kind").get_to(m.kind);
  m.body = j.value("body", Json::object());
  j.at("status").get_to(m.status);
  j.at("created_at").get_to(m.created_at);
  j.at("due_at").get_to(m.due_at);
  m.dispatched_at = j.value("dispatched_at", Json()).get<std::optional<Timestamp>>();
  m.report_for = j.value("report_for", Json()).get<std::optional<Date>>();
  m.scheduled = j.value("scheduled", false);
  m.slot = j.value("slot", Json()).get<std::optional<Slot>>();
  m.attempts = j.value("attempts", 0);
  m.last_attempt_at = j.value("last_attempt_at", Json()).get<std::optional<Timestamp>>();
  m.permanent_failure = j.value("permanent_failure", false);
  m.last_error = j.value("last_error", std::string());
}

OutboxStore::OutboxStore(fs::path file, TimeZone wire_tz) : path_(std::move(file)), wire_tz_(wire_tz) {
  int line_no = 0;
  for (const auto& line : detail::read_complete_lines(path_)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto row = Json::parse(line).get<OutboxMessage>();
      rows_[row.message_id] = row;
    } catch (const std::exception& e) {
      fail(ErrorCode::storage, fmt::format("outbox {} line {}: {}", path_.string(), line_no, e.what()));
    }
  }
  out_.open(path_, std::ios::app | std::ios::binary);
  require(out_.good(), ErrorCode::storage, "cannot open outbox " + path_.string());
}

void OutboxStore::write(const OutboxMessage& m) {
  ScopedWireTimezone wire(wire_tz_);
  out_ << Json(m).dump() << '\n';
  out_.flush();
  require(out_.good(), ErrorCode::storage, "write to outbox failed: " + path_.string());
}

std::optional<OutboxMessage> OutboxStore::get(const std::string& message_id) const {
  std::lock_guard lock(mutex_);
  auto it = rows_.find(message_id);
  if (it == rows_.end()) return std::nullopt;
  return it->second;
}

std::vector<OutboxMessage> OutboxStore::list(std::optional<OutboxStatus> status) const {
  std::lock_guard lock(mutex_);
  std::vector<OutboxMessage> out;
  for (const auto& [id, row] : rows_) {
    if (!status || row.status == *status) out.push_back(row);
  }
  std::stable_sort(out.begin(), out.end(), [](const OutboxMessage& a, const OutboxMessage& b) {
    return std::tie(a.due_at, a.message_id) < std::tie(b.due_at, b.message_id);
  });
  return out;
}

void OutboxStore::insert(const OutboxMessage& message) {
  std::lock_guard lock(mutex_);
  require(!rows_.count(message.message_id), ErrorCode::conflict, "outbox already has " + message.message_id);
  write(message);
  rows_[message.message_id] = message;
}

OutboxMessage OutboxStore::update(const std::string& message_id, const std::function<void(OutboxMessage&)>& change) {
  std::lock_guard lock(mutex_);
  auto it = rows_.find(message_id);
  require(it != rows_.end(), ErrorCode::not_found, "unknown outbox message " + message_id);
  auto row = it->second;
  change(row);
  require(row.message_id == message_id, ErrorCode::internal, "outbox update changed the message id");
  if (row.status != it->second.status) {
    require(outbox_transition_allowed(it->second.status, row.status), ErrorCode::state,
            fmt::format("{}: cannot move from {} to {}", message_id, to_string(it->second.status),
                        to_string(row.status)));
  }
  write(row);
  it->second = row;
  return row;
}

}  // namespace tca
