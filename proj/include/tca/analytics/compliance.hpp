#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tca/protocol/state.hpp"

namespace tca {

struct ComplianceWeekSummary {
  ParticipantId participant_id;
  int week = 0;
  int days = 0;  // study days in the week (short first week after mid-week enrollment)
  int regular = 0;
  int voluntary = 0;
  int emi_completed = 0;
  int routine_done = 0;  // done item-days
  double rema_rate = 0;
  double tema_rate = 0;
  double emi_rate = 0;
  double routine_rate = 0;

  bool operator==(const ComplianceWeekSummary&) const = default;
};

/// Rates from raw counts; denominators are 3 prompts and 5 routine items per study day.
ComplianceWeekSummary compliance_from_counts(ParticipantId id, int week, int days, int regular, int voluntary,
                                             int emi_completed, int routine_done);

/// Throws range for weeks outside 1..6 and state when the week has not elapsed by the state's
/// last event (or by `as_of` when given).
ComplianceWeekSummary week_compliance(const ParticipantState& state, int week,
                                      std::optional<Timestamp> as_of = std::nullopt);
ComplianceWeekSummary week_compliance(std::span<const ProtocolEvent> events, int week);

/// Every elapsed week for an intervention participant.
std::vector<ComplianceWeekSummary> elapsed_week_compliance(const ParticipantState& state,
                                                           std::optional<Timestamp> as_of = std::nullopt);

enum class ComplianceMetric { rEMA, tEMA, EMI, routine };

double metric_value(const ComplianceWeekSummary& s, ComplianceMetric m);

struct MetricStats {
  double mean = 0;
  double min = 0;
  double max = 0;
  bool operator==(const MetricStats&) const = default;
};

struct CohortRow {
  std::optional<int> week;  // nullopt for the total row
  std::size_t participants = 0;
  std::array<MetricStats, 4> metrics{};

  const MetricStats& operator[](ComplianceMetric m) const { return metrics[static_cast<std::size_t>(m)]; }
};

struct CohortTable {
  std::vector<CohortRow> weeks;
  CohortRow total;
};

/// Weekly means and ranges plus a total row whose mean is the mean of weekly means and whose
/// range spans all participant-weeks. Throws validation on empty input or an empty week
/// between covered weeks.
CohortTable cohort_table(std::span<const ComplianceWeekSummary> summaries);

/// Columns week, metric, mean, min, max; the total row uses week "total".
std::string cohort_table_csv(const CohortTable& table);
std::string cohort_table_json(const CohortTable& table);

struct DispatchRow {
  ParticipantId participant_id;
  std::string message_id;
  MessageKind kind = MessageKind::MorningGreeting;
  Timestamp at{};
  bool operator==(const DispatchRow&) const = default;
};

/// One row per distinct message_id across all streams.
std::vector<DispatchRow> dispatch_rows(std::span<const std::vector<ProtocolEvent>> streams);

}  // namespace tca

TCA_ENUM_NAMES(tca::ComplianceMetric, "rEMA"sv, "tEMA"sv, "EMI"sv, "routine"sv);
