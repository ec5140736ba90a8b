#include "tca/analytics/outcomes.hpp"

#include <cmath>
#include <limits>

#include "tca/core/error.hpp"
#include "tca/protocol/json.hpp"

namespace tca {

namespace {

std::optional<int> total_of(const ParticipantState& p, Instrument inst, Wave wave) {
  auto it = p.assessment_log.find({inst, wave});
  if (it == p.assessment_log.end()) return std::nullopt;
  return it->second.total;
}

}  // namespace

AncovaInput assessment_ancova_input(std::span<const ParticipantState> participants, Instrument outcome,
                                    std::vector<Instrument> covariates) {
  std::vector<std::array<double, 4>> rows;
  std::vector<std::vector<double>> cov_rows;
  AncovaInput in;
  for (const auto& p : participants) {
    std::array<double, 4> y{};
    bool complete = true;
    for (int w = 0; w < 4 && complete; ++w) {
      auto t = total_of(p, outcome, static_cast<Wave>(w));
      if (t) y[w] = *t;
      else complete = false;
    }
    std::vector<double> c;
    for (auto inst : covariates) {
      auto t = total_of(p, inst, Wave::W0);
      if (!t) {
        complete = false;
        break;
      }
      c.push_back(*t);
    }
    if (!complete) continue;
    rows.push_back(y);
    cov_rows.push_back(c);
    in.group.push_back(p.profile.arm == Arm::intervention ? 1 : 0);
  }
  in.outcome.resize(static_cast<Eigen::Index>(rows.size()), 4);
  in.covariates.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(covariates.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int w = 0; w < 4; ++w) in.outcome(static_cast<Eigen::Index>(i), w) = rows[i][w];
    for (std::size_t c = 0; c < covariates.size(); ++c) {
      in.covariates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = cov_rows[i][c];
    }
  }
  for (auto inst : covariates) in.covariate_names.push_back(std::string(to_string(inst)) + "_baseline");
  return in;
}

WaveMeans observed_wave_means(std::span<const ParticipantState> participants, Instrument outcome) {
  WaveMeans out;
  for (int w = 0; w < 4; ++w) {
    double sum[2] = {0, 0};
    int n[2] = {0, 0};
    for (const auto& p : participants) {
      auto t = total_of(p, outcome, static_cast<Wave>(w));
      if (!t) continue;
      int g = p.profile.arm == Arm::intervention ? 0 : 1;
      sum[g] += *t;
      ++n[g];
    }
    auto nan = std::numeric_limits<double>::quiet_NaN();
    out.intervention[w] = n[0] ? sum[0] / n[0] : nan;
    out.control[w] = n[1] ? sum[1] / n[1] : nan;
  }
  return out;
}

BaselineComparison baseline_for(std::span<const ParticipantState> participants) {
  std::vector<ContinuousField> cont{{"age", {}, {}}, {"PHQ9", {}, {}}};
  for (auto inst : {Instrument::BDI2, Instrument::GAD7, Instrument::QLESQ_SF}) cont.push_back({std::string(to_string(inst)), {}, {}});
  std::vector<CategoricalField> cat{{"gender", {}, {}}, {"severity", {}, {}}};
  for (const auto& p : participants) {
    bool treated = p.profile.arm == Arm::intervention;
    auto push = [&](ContinuousField& f, double v) { (treated ? f.intervention : f.control).push_back(v); };
    push(cont[0], p.profile.age);
    push(cont[1], p.profile.phq9_total);
    int i = 2;
    for (auto inst : {Instrument::BDI2, Instrument::GAD7, Instrument::QLESQ_SF}) {
      if (auto t = total_of(p, inst, Wave::W0)) push(cont[static_cast<std::size_t>(i)], *t);
      ++i;
    }
    (treated ? cat[0].intervention : cat[0].control).emplace_back(to_string(p.profile.gender));
    (treated ? cat[1].intervention : cat[1].control).emplace_back(to_string(p.profile.severity_cell));
  }
  return baseline_comparison(cont, cat);
}

std::string outcome_report_json(std::span<const ParticipantState> participants, Instrument outcome) {
  auto input = assessment_ancova_input(participants, outcome);
  auto result = mixed_ancova(input);
  Json effects = Json::array();
  for (const auto& e : result.effects) {
    effects.push_back({{"name", e.name},
                       {"F", e.F},
                       {"df_effect", e.df_effect},
                       {"df_error", e.df_error},
                       {"p", e.p},
                       {"partial_eta_sq", e.partial_eta_sq}});
  }
  Json adjusted = Json::array();
  for (int w = 0; w < result.adjusted_means.cols(); ++w) {
    adjusted.push_back({{"wave", to_string(static_cast<Wave>(w))},
                        {"intervention", result.adjusted_means(0, w)},
                        {"control", result.adjusted_means(1, w)}});
  }
  Json waves = Json::array();
  for (const auto& w : per_wave_ancova(input)) {
    waves.push_back({{"wave", to_string(static_cast<Wave>(w.wave))},
                     {"F", w.group.F},
                     {"df_effect", w.group.df_effect},
                     {"df_error", w.group.df_error},
                     {"p", w.group.p},
                     {"adjusted_intervention", w.adjusted_mean_intervention},
                     {"adjusted_control", w.adjusted_mean_control},
                     {"difference", w.difference.estimate},
                     {"difference_se", w.difference.se}});
  }
  auto observed = observed_wave_means(participants, outcome);
  Json obs = Json::array();
  for (int w = 0; w < 4; ++w) {
    obs.push_back({{"wave", to_string(static_cast<Wave>(w))},
                   {"intervention", observed.intervention[w]},
                   {"control", observed.control[w]}});
  }
  auto baseline = baseline_for(participants);
  Json base = Json::array();
  for (const auto& [name, t] : baseline.t_tests) {
    base.push_back({{"field", name}, {"test", "welch_t"}, {"statistic", t.t}, {"df", t.df}, {"p", t.p}});
  }
  for (const auto& [name, c] : baseline.chi_squares) {
    base.push_back({{"field", name}, {"test", "chi_square"}, {"statistic", c.chi2}, {"df", c.df}, {"p", c.p},
                    {"warnings", c.warnings}});
  }
  int n_int = 0;
  for (int g : input.group) n_int += g;
  Json doc{{"measure", to_string(outcome)},
           {"n_intervention", n_int},
           {"n_control", static_cast<int>(input.group.size()) - n_int},
           {"covariates", input.covariate_names},
           {"effects", effects},
           {"adjusted_means", adjusted},
           {"adjusted_mean_difference", {{"estimate", result.adjusted_mean_diff.estimate},
                                         {"se", result.adjusted_mean_diff.se}}},
           {"per_wave", waves},
           {"observed_means", obs},
           {"baseline", base}};
  return doc.dump(2);
}

}  // namespace tca
