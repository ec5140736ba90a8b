#pragma once

#include <vector>

#include "tca/protocol/state.hpp"

namespace tca {

/// A state together with the events that produced it from the caller's state.
/// Each appended event is validated by applying it immediately.
struct Transition {
  ParticipantState state;
  std::vector<ProtocolEvent> events;

  explicit Transition(ParticipantState s) : state(std::move(s)) {}

  const ProtocolEvent& append(Timestamp at, EventPayload payload) {
    auto e = next_event(state, at, std::move(payload));
    state = apply_event(std::move(state), e);
    events.push_back(std::move(e));
    return events.back();
  }
};

}  // namespace tca
