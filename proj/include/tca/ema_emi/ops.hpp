#pragma once

#include <optional>

#include "tca/ema_emi/catalog.hpp"
#include "tca/protocol/transition.hpp"

namespace tca {

struct EmaSubmission {
  Timestamp at{};
  EmaScores scores;
  /// Computed from the schedule when absent.
  std::optional<EmaClassification> classification;
};

struct EmaRecorded {
  Transition transition;
  EmiOffered offer;
};

/// Appends EmaSubmitted and its EmiOffered. Throws validation for scores outside 0..10 and
/// catalog_gap if the participant's cell resolves no EMI content.
EmaRecorded record_ema_submission(const ParticipantState& state, const EmaSubmission& submission,
                                  const EmiCatalog& catalog = EmiCatalog::builtin());

/// Classification the scheduler assigns to a submission at `at` given the state's answered slots.
EmaClassification classify_for_state(const ParticipantState& state, Timestamp at);

struct EmiOutcome {
  std::string offer_id;
  EmiDecision decision = EmiDecision::completed;
  std::optional<EmiOption> choice;  // required when completed
  std::optional<int> satisfaction;  // 1-7, present iff completed
};

constexpr EmiFollowup followup_for(EmiDecision d) {
  return d == EmiDecision::completed ? EmiFollowup::praise_with_smile_image
                                     : EmiFollowup::encouragement_with_cry_image;
}

constexpr MessageKind message_kind_for(EmiFollowup f) {
  return f == EmiFollowup::praise_with_smile_image ? MessageKind::EmiPraise : MessageKind::EmiEncouragement;
}

struct EmiRecorded {
  Transition transition;
  EmiFollowup followup;
  std::optional<EmiCatalogEntry> content;
};

/// Closes an open offer. Throws state for unknown/closed offers and validation when a
/// completion lacks satisfaction or a decline carries one.
EmiRecorded record_emi_outcome(const ParticipantState& state, Timestamp at, const EmiOutcome& outcome,
                               const EmiCatalog& catalog = EmiCatalog::builtin());

/// EMI the participant started without an offer.
EmiRecorded record_self_initiated_emi(const ParticipantState& state, Timestamp at, EmiOption choice,
                                      int satisfaction, const EmiCatalog& catalog = EmiCatalog::builtin());

/// Declines (reason expired) every offer opened on a date before now's local date.
Transition expire_open_offers(const ParticipantState& state, Timestamp now);

}  // namespace tca
