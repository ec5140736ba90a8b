#include "tca/analytics/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "tca/core/error.hpp"

namespace tca {

namespace {

double mean(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

double sample_var(std::span<const double> v, double m) {
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / double(v.size() - 1);
}

struct Design {
  Eigen::MatrixXd X;
  std::vector<std::string> names;  // one per column: intercept, group, covariates
  Eigen::MatrixXd xtx_inv;
};

Design build_design(const AncovaInput& in) {
  const auto n = in.outcome.rows();
  const auto q = in.covariates.cols();
  require(static_cast<Eigen::Index>(in.group.size()) == n, ErrorCode::validation, "group labels do not match outcome rows");
  require(q == 0 || in.covariates.rows() == n, ErrorCode::validation, "covariate rows do not match outcome rows");
  require(static_cast<Eigen::Index>(in.covariate_names.size()) == q, ErrorCode::validation,
          "covariate names do not match covariate columns");
  require(in.outcome.allFinite() && (q == 0 || in.covariates.allFinite()), ErrorCode::validation,
          "outcome grid has missing values");
  int n1 = static_cast<int>(std::count(in.group.begin(), in.group.end(), 1));
  int n0 = static_cast<int>(std::count(in.group.begin(), in.group.end(), 0));
  require(n1 + n0 == n, ErrorCode::validation, "group labels must be 0 or 1");
  require(n1 >= 2 && n0 >= 2, ErrorCode::validation, "each group needs at least 2 participants");

  Design d;
  d.X.resize(n, 2 + q);
  d.X.col(0).setOnes();
  for (Eigen::Index i = 0; i < n; ++i) d.X(i, 1) = in.group[i] == 1 ? 1.0 : -1.0;
  for (Eigen::Index c = 0; c < q; ++c) {
    d.X.col(2 + c) = in.covariates.col(c).array() - in.covariates.col(c).mean();
  }
  d.names = {"intercept", "group"};
  for (const auto& name : in.covariate_names) d.names.push_back(name);

  // Gram-Schmidt in term order: a column that is (numerically) a combination of earlier
  // columns is aliased.
  Eigen::MatrixXd basis(n, 0);
  for (Eigen::Index c = 0; c < d.X.cols(); ++c) {
    Eigen::VectorXd v = d.X.col(c);
    double norm0 = v.norm();
    for (Eigen::Index b = 0; b < basis.cols(); ++b) v -= basis.col(b).dot(v) * basis.col(b);
    if (norm0 == 0 || v.norm() <= 1e-10 * std::max(1.0, norm0)) {
      fail(ErrorCode::singular, "design is rank deficient: term '" + d.names[c] + "' is aliased");
    }
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = v / v.norm();
  }
  require(n > d.X.cols(), ErrorCode::degenerate, "no error degrees of freedom left");
  d.xtx_inv = (d.X.transpose() * d.X).inverse();
  return d;
}

AncovaEffect make_effect(std::string name, double ss, int df_effect, double sse, int df_error) {
  AncovaEffect e;
  e.name = std::move(name);
  e.df_effect = df_effect;
  e.df_error = df_error;
  double mse = sse / df_error;
  e.F = mse > 0 ? (ss / df_effect) / mse : (ss > 0 ? std::numeric_limits<double>::infinity() : 0.0);
  e.p = f_sf(e.F, df_effect, df_error);
  e.partial_eta_sq = partial_eta_sq(e.F, df_effect, df_error);
  return e;
}

// Regresses every column of Z on the design; returns coefficients (p x m) and the total
// residual sum of squares.
std::pair<Eigen::MatrixXd, double> fit(const Design& d, const Eigen::MatrixXd& Z) {
  Eigen::MatrixXd B = d.xtx_inv * d.X.transpose() * Z;
  Eigen::MatrixXd R = Z - d.X * B;
  return {B, R.squaredNorm()};
}

}  // namespace

double f_sf(double F, double df1, double df2) {
  if (!(F > 0)) return 1.0;
  if (std::isinf(F)) return 0.0;
  boost::math::fisher_f_distribution<double> dist(df1, df2);
  return boost::math::cdf(boost::math::complement(dist, F));
}

double chi2_sf(double x, double df) {
  if (!(x > 0)) return 1.0;
  boost::math::chi_squared_distribution<double> dist(df);
  return boost::math::cdf(boost::math::complement(dist, x));
}

double t_two_sided_p(double t, double df) {
  if (std::isnan(t)) return 1.0;
  boost::math::students_t_distribution<double> dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  require(a.size() >= 2 && b.size() >= 2, ErrorCode::validation, "t-test needs at least 2 values per group");
  TTestResult r;
  r.mean_a = mean(a);
  r.mean_b = mean(b);
  double va = sample_var(a, r.mean_a) / double(a.size());
  double vb = sample_var(b, r.mean_b) / double(b.size());
  require(va + vb > 0, ErrorCode::degenerate, "both groups have zero variance");
  r.t = (r.mean_a - r.mean_b) / std::sqrt(va + vb);
  r.df = (va + vb) * (va + vb) / (va * va / double(a.size() - 1) + vb * vb / double(b.size() - 1));
  r.p = t_two_sided_p(r.t, r.df);
  return r;
}

ChiSquareResult chi_square_test(const std::vector<std::vector<double>>& table) {
  require(!table.empty() && !table[0].empty(), ErrorCode::validation, "empty contingency table");
  const auto cols = table[0].size();
  for (const auto& row : table) {
    require(row.size() == cols, ErrorCode::validation, "ragged contingency table");
    for (double v : row) require(v >= 0, ErrorCode::validation, "negative count in contingency table");
  }
  ChiSquareResult r;
  std::vector<double> row_tot(table.size(), 0), col_tot(cols, 0);
  double total = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      row_tot[i] += table[i][j];
      col_tot[j] += table[i][j];
      total += table[i][j];
    }
  }
  std::vector<std::size_t> rows, kept_cols;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (row_tot[i] > 0) rows.push_back(i);
    else r.warnings.push_back(fmt::format("row {} has expected count zero and was dropped", i));
  }
  for (std::size_t j = 0; j < cols; ++j) {
    if (col_tot[j] > 0) kept_cols.push_back(j);
    else r.warnings.push_back(fmt::format("column {} has expected count zero and was dropped", j));
  }
  require(rows.size() >= 2 && kept_cols.size() >= 2, ErrorCode::degenerate,
          "contingency table needs two non-empty rows and columns");
  bool small = false;
  for (auto i : rows) {
    for (auto j : kept_cols) {
      double expected = row_tot[i] * col_tot[j] / total;
      if (expected < 5) small = true;
      double diff = table[i][j] - expected;
      r.chi2 += diff * diff / expected;
    }
  }
  if (small) r.warnings.push_back("some expected counts are below 5");
  r.df = static_cast<int>((rows.size() - 1) * (kept_cols.size() - 1));
  r.p = chi2_sf(r.chi2, r.df);
  return r;
}

BaselineComparison baseline_comparison(std::span<const ContinuousField> continuous,
                                       std::span<const CategoricalField> categorical) {
  BaselineComparison out;
  for (const auto& f : continuous) out.t_tests.emplace_back(f.name, welch_t_test(f.intervention, f.control));
  for (const auto& f : categorical) {
    require(!f.intervention.empty() && !f.control.empty(), ErrorCode::validation,
            "categorical field '" + f.name + "' needs two non-empty groups");
    std::set<std::string> levels(f.intervention.begin(), f.intervention.end());
    levels.insert(f.control.begin(), f.control.end());
    std::vector<std::vector<double>> table;
    for (const auto& level : levels) {
      table.push_back({double(std::count(f.intervention.begin(), f.intervention.end(), level)),
                       double(std::count(f.control.begin(), f.control.end(), level))});
    }
    out.chi_squares.emplace_back(f.name, chi_square_test(table));
  }
  return out;
}

double partial_eta_sq(double F, int df_effect, int df_error) {
  double num = F * df_effect;
  return num / (num + df_error);
}

Eigen::MatrixXd orthonormal_contrasts(int k) {
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(k, k - 1);
  for (int j = 1; j < k; ++j) {
    // Column j contrasts level j against the mean of the levels before it.
    for (int i = 0; i < j; ++i) C(i, j - 1) = 1.0;
    C(j, j - 1) = -double(j);
    C.col(j - 1) /= C.col(j - 1).norm();
  }
  return C;
}

const AncovaEffect& AncovaResult::effect(const std::string& name) const {
  auto it = std::find_if(effects.begin(), effects.end(), [&](const auto& e) { return e.name == name; });
  if (it == effects.end()) fail(ErrorCode::not_found, "no ANCOVA effect named '" + name + "'");
  return *it;
}

AncovaResult mixed_ancova(const AncovaInput& in) {
  const int k = static_cast<int>(in.outcome.cols());
  require(k >= 2, ErrorCode::validation, "repeated-measures ANCOVA needs at least 2 waves");
  auto d = build_design(in);
  const int n = static_cast<int>(in.outcome.rows());
  const int p = static_cast<int>(d.X.cols());

  AncovaResult out;

  // Within stratum: orthonormal contrasts of the repeated measures.
  Eigen::MatrixXd Z = in.outcome * orthonormal_contrasts(k);
  auto [Bw, sse_w] = fit(d, Z);
  int df_w = (n - p) * (k - 1);
  auto within_ss = [&](int col) { return Bw.row(col).squaredNorm() / d.xtx_inv(col, col); };
  out.effects.push_back(make_effect("time", within_ss(0), k - 1, sse_w, df_w));
  out.effects.push_back(make_effect("time:group", within_ss(1), k - 1, sse_w, df_w));
  for (int c = 2; c < p; ++c) out.effects.push_back(make_effect("time:" + d.names[c], within_ss(c), k - 1, sse_w, df_w));

  // Between stratum: participant totals scaled by 1/sqrt(k).
  Eigen::MatrixXd s = in.outcome.rowwise().sum() / std::sqrt(double(k));
  auto [Bb, sse_b] = fit(d, s);
  int df_b = n - p;
  auto between_ss = [&](int col) { return Bb(col, 0) * Bb(col, 0) / d.xtx_inv(col, col); };
  out.effects.push_back(make_effect("group", between_ss(1), 1, sse_b, df_b));
  for (int c = 2; c < p; ++c) out.effects.push_back(make_effect(d.names[c], between_ss(c), 1, sse_b, df_b));

  // Adjusted means at the covariate grand means (centered covariates are zero there).
  auto [Bt, sse_t] = fit(d, in.outcome);
  (void)sse_t;
  out.adjusted_means.resize(2, k);
  for (int t = 0; t < k; ++t) {
    out.adjusted_means(0, t) = Bt(0, t) + Bt(1, t);
    out.adjusted_means(1, t) = Bt(0, t) - Bt(1, t);
  }
  Eigen::MatrixXd m = in.outcome.rowwise().mean();
  auto [Bm, sse_m] = fit(d, m);
  double mse_m = sse_m / df_b;
  out.adjusted_mean_diff = {2.0 * Bm(1, 0), 2.0 * std::sqrt(mse_m * d.xtx_inv(1, 1))};
  return out;
}

std::vector<WaveAncova> per_wave_ancova(const AncovaInput& in) {
  auto d = build_design(in);
  const int n = static_cast<int>(in.outcome.rows());
  const int p = static_cast<int>(d.X.cols());
  std::vector<WaveAncova> out;
  for (int t = 0; t < in.outcome.cols(); ++t) {
    auto [B, sse] = fit(d, in.outcome.col(t));
    WaveAncova w;
    w.wave = t;
    w.group = make_effect("group", B(1, 0) * B(1, 0) / d.xtx_inv(1, 1), 1, sse, n - p);
    w.adjusted_mean_intervention = B(0, 0) + B(1, 0);
    w.adjusted_mean_control = B(0, 0) - B(1, 0);
    w.difference = {2.0 * B(1, 0), 2.0 * std::sqrt(sse / (n - p) * d.xtx_inv(1, 1))};
    out.push_back(w);
  }
  return out;
}

KsResult ks_uniform_test(std::vector<double> values) {
  require(!values.empty(), ErrorCode::validation, "KS test needs values");
  std::sort(values.begin(), values.end());
  const double n = double(values.size());
  KsResult r;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double x = std::clamp(values[i], 0.0, 1.0);
    r.d = std::max({r.d, (double(i) + 1) / n - x, x - double(i) / n});
  }
  double sn = std::sqrt(n);
  double lambda = (sn + 0.12 + 0.11 / sn) * r.d;
  double sum = 0;
  for (int j = 1; j <= 100; ++j) {
    double term = 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::fabs(term) < 1e-12) break;
  }
  r.p = std::clamp(sum, 0.0, 1.0);
  if (lambda < 0.2) r.p = 1.0;
  return r;
}

}  // namespace tca
