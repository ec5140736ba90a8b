#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tca {

struct TTestResult {
  double t = 0;
  double df = 0;
  double p = 1;
  double mean_a = 0;
  double mean_b = 0;
};

/// Two-sided Welch t-test. Throws validation for groups smaller than 2 and degenerate when
/// both groups have zero variance.
TTestResult welch_t_test(std::span<const double> a, std::span<const double> b);

struct ChiSquareResult {
  double chi2 = 0;
  int df = 0;
  double p = 1;
  std::vector<std::string> warnings;
};

/// Pearson chi-square without continuity correction. Rows or columns with a zero margin
/// (expected count zero) are dropped with a warning; expected counts below 5 add a warning.
ChiSquareResult chi_square_test(const std::vector<std::vector<double>>& table);

struct ContinuousField {
  std::string name;
  std::vector<double> intervention;
  std::vector<double> control;
};

struct CategoricalField {
  std::string name;
  std::vector<std::string> intervention;
  std::vector<std::string> control;
};

struct BaselineComparison {
  std::vector<std::pair<std::string, TTestResult>> t_tests;
  std::vector<std::pair<std::string, ChiSquareResult>> chi_squares;
};

BaselineComparison baseline_comparison(std::span<const ContinuousField> continuous,
                                       std::span<const CategoricalField> categorical);

double partial_eta_sq(double F, int df_effect, int df_error);

/// Upper-tail p-values.
double f_sf(double F, double df1, double df2);
double chi2_sf(double x, double df);
double t_two_sided_p(double t, double df);

struct AncovaEffect {
  std::string name;
  double F = 0;
  int df_effect = 0;
  int df_error = 0;
  double p = 1;
  double partial_eta_sq = 0;
};

struct AncovaInput {
  Eigen::MatrixXd outcome;     // participants x waves
  std::vector<int> group;      // 1 = intervention, 0 = control
  Eigen::MatrixXd covariates;  // participants x covariates
  std::vector<std::string> covariate_names;
};

struct AdjustedDifference {
  double estimate = 0;  // intervention minus control
  double se = 0;
};

struct AncovaResult {
  std::vector<AncovaEffect> effects;
  Eigen::MatrixXd adjusted_means;  // row 0 intervention, row 1 control; one column per wave
  AdjustedDifference adjusted_mean_diff;  // on the participant mean across waves

  const AncovaEffect& effect(const std::string& name) const;
};

/// Split-plot GLM with the repeated factor time, between factor group (effect coded) and
/// grand-mean-centered covariates. Reports time, group, time:group, every covariate and every
/// time:covariate term with type III sums of squares. Throws validation for incomplete input,
/// singular naming the aliased term, and degenerate when no error degrees of freedom remain.
AncovaResult mixed_ancova(const AncovaInput& input);

struct WaveAncova {
  int wave = 0;
  AncovaEffect group;
  double adjusted_mean_intervention = 0;
  double adjusted_mean_control = 0;
  AdjustedDifference difference;
};

/// Between-group ANCOVA with the same covariates at each wave.
std::vector<WaveAncova> per_wave_ancova(const AncovaInput& input);

/// Orthonormal polynomial-free contrasts (normalized Helmert), k x (k-1).
Eigen::MatrixXd orthonormal_contrasts(int k);

struct KsResult {
  double d = 0;
  double p = 1;
};

/// One-sample Kolmogorov-Smirnov test against Uniform(0,1), asymptotic p-value.
KsResult ks_uniform_test(std::vector<double> values);

}  // namespace tca
