#include "tca/analytics/compliance.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "tca/core/error.hpp"
#include "tca/protocol/calendar.hpp"

namespace tca {

ComplianceWeekSummary compliance_from_counts(ParticipantId id, int week, int days, int regular, int voluntary,
                                             int emi_completed, int routine_done) {
  ComplianceWeekSummary s;
  s.participant_id = std::move(id);
  s.week = week;
  s.days = days;
  s.regular = regular;
  s.voluntary = voluntary;
  s.emi_completed = emi_completed;
  s.routine_done = routine_done;
  double prompts = kEmaPerDay * days;
  s.rema_rate = 100.0 * regular / prompts;
  s.tema_rate = 100.0 * (regular + voluntary) / prompts;
  s.emi_rate = regular + voluntary == 0 ? 0.0 : 100.0 * emi_completed / (regular + voluntary);
  s.routine_rate = 100.0 * routine_done / (kRoutineItemCount * days);
  return s;
}

ComplianceWeekSummary week_compliance(const ParticipantState& state, int week, std::optional<Timestamp> as_of) {
  require(week >= 1 && week <= kStudyWeeks, ErrorCode::range, "week " + std::to_string(week) + " outside 1..6");
  require(state.in_intervention(), ErrorCode::state, "compliance applies to intervention participants only");
  auto range = study_week_range(state.enrollment_date(), week);
  auto first = state.enrollment_date() + days(range.first_day);
  auto last = state.enrollment_date() + days(range.last_day);
  auto now = as_of ? *as_of : state.last_at;
  require(state.date_of(now) > last, ErrorCode::state, "week " + std::to_string(week) + " has not elapsed");

  int regular = 0, voluntary = 0, emi = 0, routine = 0;
  for (auto d = first; d <= last; d += days(1)) {
    if (const auto* r = state.day(d)) {
      regular += r->regular_ema();
      voluntary += r->voluntary_ema;
      emi += r->emi_completed;
      routine += r->ledger.done_count();
    }
  }
  return compliance_from_counts(state.profile.participant_id, week, range.length(), regular, voluntary, emi, routine);
}

ComplianceWeekSummary week_compliance(std::span<const ProtocolEvent> events, int week) {
  return week_compliance(replay(events), week);
}

std::vector<ComplianceWeekSummary> elapsed_week_compliance(const ParticipantState& state,
                                                           std::optional<Timestamp> as_of) {
  std::vector<ComplianceWeekSummary> out;
  if (!state.in_intervention()) return out;
  auto today = state.date_of(as_of ? *as_of : state.last_at);
  for (int w = 1; w <= kStudyWeeks; ++w) {
    auto range = study_week_range(state.enrollment_date(), w);
    if (today <= state.enrollment_date() + days(range.last_day)) break;
    out.push_back(week_compliance(state, w, as_of));
  }
  return out;
}

double metric_value(const ComplianceWeekSummary& s, ComplianceMetric m) {
  switch (m) {
    case ComplianceMetric::rEMA: return s.rema_rate;
    case ComplianceMetric::tEMA: return s.tema_rate;
    case ComplianceMetric::EMI: return s.emi_rate;
    case ComplianceMetric::routine: return s.routine_rate;
  }
  return 0;
}

CohortTable cohort_table(std::span<const ComplianceWeekSummary> summaries) {
  require(!summaries.empty(), ErrorCode::validation, "cohort table needs at least one summary");
  std::map<int, std::vector<const ComplianceWeekSummary*>> by_week;
  for (const auto& s : summaries) by_week[s.week].push_back(&s);
  int last_week = by_week.rbegin()->first;
  for (int w = by_week.begin()->first; w <= last_week; ++w) {
    require(by_week.contains(w), ErrorCode::validation, "week " + std::to_string(w) + " has no summaries");
  }

  CohortTable t;
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (auto& m : t.total.metrics) m = {0, inf, -inf};
  t.total.participants = 0;
  for (const auto& [week, rows] : by_week) {
    CohortRow row;
    row.week = week;
    row.participants = rows.size();
    for (std::size_t m = 0; m < 4; ++m) {
      auto metric = static_cast<ComplianceMetric>(m);
      MetricStats st{0, inf, -inf};
      for (const auto* s : rows) {
        double v = metric_value(*s, metric);
        st.mean += v;
        st.min = std::min(st.min, v);
        st.max = std::max(st.max, v);
      }
      st.mean /= static_cast<double>(rows.size());
      row.metrics[m] = st;
      auto& tot = t.total.metrics[m];
      tot.mean += st.mean;
      tot.min = std::min(tot.min, st.min);
      tot.max = std::max(tot.max, st.max);
    }
    t.total.participants = std::max(t.total.participants, rows.size());
    t.weeks.push_back(row);
  }
  for (auto& m : t.total.metrics) m.mean /= static_cast<double>(t.weeks.size());
  return t;
}

std::string cohort_table_csv(const CohortTable& table) {
  std::string out = "week,metric,mean,min,max\n";
  auto emit = [&](const CohortRow& row) {
    auto week = row.week ? std::to_string(*row.week) : std::string("total");
    for (std::size_t m = 0; m < 4; ++m) {
      const auto& st = row.metrics[m];
      out += fmt::format("{},{},{:.2f},{:.2f},{:.2f}\n", week, to_string(static_cast<ComplianceMetric>(m)), st.mean,
                         st.min, st.max);
    }
  };
  for (const auto& row : table.weeks) emit(row);
  emit(table.total);
  return out;
}

std::string cohort_table_json(const CohortTable& table) {
  auto rows = nlohmann::json::array();
  auto emit = [&](const CohortRow& row) {
    for (std::size_t m = 0; m < 4; ++m) {
      const auto& st = row.metrics[m];
      nlohmann::json r{{"metric", to_string(static_cast<ComplianceMetric>(m))},
                       {"mean", st.mean},
                       {"min", st.min},
                       {"max", st.max}};
      if (row.week) r["week"] = *row.week;
      else r["week"] = "total";
      rows.push_back(r);
    }
  };
  for (const auto& row : table.weeks) emit(row);
  emit(table.total);
  return rows.dump(2);
}

std::vector<DispatchRow> dispatch_rows(std::span<const std::vector<ProtocolEvent>> streams) {
  std::vector<DispatchRow> out;
  std::set<std::string> seen;
  for (const auto& stream : streams) {
    for (const auto& e : stream) {
      if (const auto* m = e.as<MessageDispatched>(); m && seen.insert(m->message_id).second) {
        out.push_back({e.participant_id, m->message_id, m->kind, e.at});
      }
    }
  }
  return out;
}

}  // namespace tca
