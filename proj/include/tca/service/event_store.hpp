#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "tca/protocol/state.hpp"

namespace tca {

/// Append-only JSON Lines event log for one study with an in-memory index rebuilt by replay.
/// A torn final line (no trailing newline) left by a crash is truncated on open.
class EventStore {
 public:
  EventStore(std::filesystem::path file, TimeZone wire_tz);

  std::vector<ParticipantId> participants() const;
  bool contains(const ParticipantId& id) const;
  /// Throws not_found.
  ParticipantState state(const ParticipantId& id) const;
  std::vector<ProtocolEvent> events(const ParticipantId& id) const;
  std::map<ParticipantId, ParticipantState> snapshot() const;
  std::vector<std::vector<ProtocolEvent>> all_events() const;

  /// Appends a batch for one participant atomically. Throws conflict when the stored last seq is
  /// not `expected_last_seq`, the fold's error (nothing written) when an event is invalid, and
  /// storage when the write fails.
  ParticipantState append(const ParticipantId& id, std::uint64_t expected_last_seq,
                          std::span<const ProtocolEvent> events);

  const std::filesystem::path& path() const { return path_; }

 private:
  struct Entry {
    ParticipantState state;
    std::vector<ProtocolEvent> events;
  };

  void load();

  std::filesystem::path path_;
  TimeZone wire_tz_;
  mutable std::mutex mutex_;
  std::ofstream out_;
  std::map<ParticipantId, Entry> entries_;
};

}  // namespace tca
