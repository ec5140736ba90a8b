#include "tca/service/event_store.hpp"

#include <fmt/format.h>

#include "tca/core/error.hpp"
#include "tca/protocol/json.hpp"
#include "jsonl.hpp"

namespace tca {

namespace fs = std::filesystem;

EventStore::EventStore(fs::path file, TimeZone wire_tz) : path_(std::move(file)), wire_tz_(wire_tz) {
  load();
  out_.open(path_, std::ios::app | std::ios::binary);
  require(out_.good(), ErrorCode::storage, "cannot open event log " + path_.string());
}

void EventStore::load() {
  int line_no = 0;
  for (const auto& line : detail::read_complete_lines(path_)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto event = event_from_json(Json::parse(line));
      auto& entry = entries_[event.participant_id];
      entry.state = apply_event(std::move(entry.state), event);
      entry.events.push_back(std::move(event));
    } catch (const std::exception& e) {
      fail(ErrorCode::storage, fmt::format("event log {} line {}: {}", path_.string(), line_no, e.what()));
    }
  }
}

std::vector<ParticipantId> EventStore::participants() const {
  std::lock_guard lock(mutex_);
  std::vector<ParticipantId> out;
  for (const auto& [id, _] : entries_) out.push_back(id);
  return out;
}

bool EventStore::contains(const ParticipantId& id) const {
  std::lock_guard lock(mutex_);
  return entries_.count(id) > 0;
}

ParticipantState EventStore::state(const ParticipantId& id) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(id);
  require(it != entries_.end(), ErrorCode::not_found, "unknown participant " + id);
  return it->second.state;
}

std::vector<ProtocolEvent> EventStore::events(const ParticipantId& id) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(id);
  require(it != entries_.end(), ErrorCode::not_found, "unknown participant " + id);
  return it->second.events;
}

std::map<ParticipantId, ParticipantState> EventStore::snapshot() const {
  std::lock_guard lock(mutex_);
  std::map<ParticipantId, ParticipantState> out;
  for (const auto& [id, entry] : entries_) out.emplace(id, entry.state);
  return out;
}

std::vector<std::vector<ProtocolEvent>> EventStore::all_events() const {
  std::lock_guard lock(mutex_);
  std::vector<std::vector<ProtocolEvent>> out;
  for (const auto& [id, entry] : entries_) out.push_back(entry.events);
  return out;
}

ParticipantState EventStore::append(const ParticipantId& id, std::uint64_t expected_last_seq,
                                    std::span<const ProtocolEvent> events) {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(id);
  std::uint64_t last = it == entries_.end() ? 0 : it->second.state.last_seq;
  require(last == expected_last_seq, ErrorCode::conflict,
          fmt::format("{}: expected last seq {} but store has {}", id, expected_last_seq, last));
  if (events.empty()) return it == entries_.end() ? ParticipantState{} : it->second.state;

  ParticipantState next = it == entries_.end() ? ParticipantState{} : it->second.state;
  std::string lines;
  for (const auto& e : events) {
    require(e.participant_id == id, ErrorCode::validation, "event participant_id does not match the stream");
    next = apply_event(std::move(next), e);
    lines += event_to_json(e, wire_tz_).dump();
    lines += '\n';
  }
  out_ << lines;
  out_.flush();
  require(out_.good(), ErrorCode::storage, "write to event log failed: " + path_.string());

  auto& entry = entries_[id];
  entry.state = next;
  entry.events.insert(entry.events.end(), events.begin(), events.end());
  return next;
}

}  // namespace tca
