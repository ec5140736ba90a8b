#include "tca/ema_emi/ops.hpp"

#include <algorithm>
#include <vector>

#include "tca/core/error.hpp"
#include "tca/protocol/calendar.hpp"
#include "tca/scheduler/schedule.hpp"

namespace tca {

EmaClassification classify_for_state(const ParticipantState& state, Timestamp at) {
  require(state.in_intervention(), ErrorCode::state, "participant does not receive EMA prompts");
  auto d = state.date_of(at);
  auto enroll = state.enrollment_date();
  require(d >= enroll && d < enroll + days(study_length_days(enroll)), ErrorCode::range,
          "submission outside the study window");
  auto schedule = build_daily_schedule(*state.config, enroll, study_day_of(enroll, d), state.timezone);
  std::vector<Slot> answered;
  if (const auto* r = state.day(d)) answered.assign(r->regular_slots.begin(), r->regular_slots.end());
  return classify_ema_submission(schedule, at, answered);
}

EmaRecorded record_ema_submission(const ParticipantState& state, const EmaSubmission& sub,
                                  const EmiCatalog& catalog) {
  validate_ema_scores(sub.scores);
  auto classification = sub.classification ? *sub.classification : classify_for_state(state, sub.at);
  auto options = emi_options_for(state.profile, catalog);
  if (options.empty()) fail(ErrorCode::catalog_gap, "no EMI content for participant " + state.profile.participant_id);

  Transition t(state);
  const auto& ema = t.append(sub.at, EmaSubmitted{classification, sub.scores});
  EmiOffered offer{"offer-" + std::to_string(ema.seq), ema.seq, std::move(options)};
  t.append(sub.at, offer);
  return {std::move(t), std::move(offer)};
}

EmiRecorded record_emi_outcome(const ParticipantState& state, Timestamp at, const EmiOutcome& outcome,
                               const EmiCatalog& catalog) {
  auto it = state.open_offers.find(outcome.offer_id);
  require(it != state.open_offers.end(), ErrorCode::state, "offer " + outcome.offer_id + " is not open");
  Transition t(state);
  auto followup = followup_for(outcome.decision);
  if (outcome.decision == EmiDecision::declined) {
    require(!outcome.satisfaction, ErrorCode::validation, "declined EMI cannot carry satisfaction");
    t.append(at, EmiDeclined{outcome.offer_id, DeclineReason::participant});
    return {std::move(t), followup, std::nullopt};
  }
  require(outcome.satisfaction.has_value(), ErrorCode::validation, "completed EMI needs a satisfaction score");
  require(outcome.choice.has_value(), ErrorCode::validation, "completed EMI needs the chosen option");
  const auto& entry = select_emi_content(state.profile, outcome.choice->type, outcome.choice->format,
                                         state.emi_completed_total, catalog);
  t.append(at, EmiCompleted{outcome.offer_id, *outcome.choice, entry.content_ref, *outcome.satisfaction});
  return {std::move(t), followup, entry};
}

EmiRecorded record_self_initiated_emi(const ParticipantState& state, Timestamp at, EmiOption choice,
                                      int satisfaction, const EmiCatalog& catalog) {
  const auto& entry = select_emi_content(state.profile, choice.type, choice.format, state.emi_completed_total, catalog);
  Transition t(state);
  t.append(at, EmiCompleted{"", choice, entry.content_ref, satisfaction});
  return {std::move(t), EmiFollowup::praise_with_smile_image, entry};
}

Transition expire_open_offers(const ParticipantState& state, Timestamp now) {
  Transition t(state);
  auto today = state.date_of(now);
  std::vector<std::string> stale;
  for (const auto& [id, offer] : state.open_offers) {
    if (offer.date < today) stale.push_back(id);
  }
  for (const auto& id : stale) t.append(std::max(now, state.last_at), EmiDeclined{id, DeclineReason::expired});
  return t;
}

}  // namespace tca
