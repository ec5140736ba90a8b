#include <doctest.h>

#include <random>

#include "tca/analytics/stats.hpp"
#include "stats_fixtures.hpp"
#include "tca/core/error.hpp"

using namespace tca;
using namespace tca::test;

namespace {

// Brute-force reference: long-format least squares with one dummy per participant, solved by
// Gauss-Jordan elimination on the normal equations, compared through nested residual sums.
struct LongFit {
  double rss;
  int rank;
};

LongFit long_rss(const std::vector<std::vector<double>>& cols, const std::vector<double>& y) {
  const std::size_t p = cols.size(), n = y.size();
  std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t r = 0; r < n; ++r) a[i][j] += cols[i][r] * cols[j][r];
    }
    for (std::size_t r = 0; r < n; ++r) a[i][p] += cols[i][r] * y[r];
  }
  std::vector<int> pivot_col;
  std::size_t row = 0;
  for (std::size_t c = 0; c < p && row < p; ++c) {
    std::size_t best = row;
    for (std::size_t r = row; r < p; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[best][c])) best = r;
    }
    if (std::fabs(a[best][c]) < 1e-9) continue;
    std::swap(a[row], a[best]);
    double piv = a[row][c];
    for (auto& v : a[row]) v /= piv;
    for (std::size_t r = 0; r < p; ++r) {
      if (r == row) continue;
      double f = a[r][c];
      for (std::size_t j = 0; j <= p; ++j) a[r][j] -= f * a[row][j];
    }
    pivot_col.push_back(static_cast<int>(c));
    ++row;
  }
  std::vector<double> beta(p, 0.0);
  for (std::size_t r = 0; r < pivot_col.size(); ++r) beta[pivot_col[r]] = a[r][p];
  double rss = 0;
  for (std::size_t r = 0; r < n; ++r) {
    double fitv = 0;
    for (std::size_t j = 0; j < p; ++j) fitv += beta[j] * cols[j][r];
    rss += (y[r] - fitv) * (y[r] - fitv);
  }
  return {rss, static_cast<int>(pivot_col.size())};
}

// F for each within-participant term by dropping its block from the long-format model.
std::map<std::string, double> brute_force_within_f(const AncovaInput& in) {
  const int n = static_cast<int>(in.outcome.rows()), k = static_cast<int>(in.outcome.cols());
  const int q = static_cast<int>(in.covariates.cols());
  std::vector<double> y;
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < k; ++t) y.push_back(in.outcome(i, t));
  std::vector<double> cmean(q, 0);
  for (int c = 0; c < q; ++c) cmean[c] = in.covariates.col(c).mean();

  std::vector<std::vector<double>> subj;
  for (int s = 0; s < n; ++s) {
    std::vector<double> col;
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < k; ++t) col.push_back(i == s ? 1.0 : 0.0);
    subj.push_back(col);
  }
  std::map<std::string, std::vector<std::vector<double>>> blocks;
  for (int j = 1; j < k; ++j) {
    std::vector<double> td, tg;
    std::vector<std::vector<double>> tc(q);
    for (int i = 0; i < n; ++i) {
      for (int t = 0; t < k; ++t) {
        double dummy = t == j ? 1.0 : 0.0;
        td.push_back(dummy);
        tg.push_back(dummy * (in.group[i] == 1 ? 1.0 : -1.0));
        for (int c = 0; c < q; ++c) tc[c].push_back(dummy * (in.covariates(i, c) - cmean[c]));
      }
    }
    blocks["time"].push_back(td);
    blocks["time:group"].push_back(tg);
    for (int c = 0; c < q; ++c) blocks["time:" + in.covariate_names[c]].push_back(tc[c]);
  }
  auto assemble = [&](const std::string& skip) {
    auto cols = subj;
    for (const auto& [name, b] : blocks)
      if (name != skip) cols.insert(cols.end(), b.begin(), b.end());
    return cols;
  };
  auto full = long_rss(assemble(""), y);
  int df_e = n * k - full.rank;
  std::map<std::string, double> out;
  for (const auto& [name, b] : blocks) {
    auto red = long_rss(assemble(name), y);
    int df_h = full.rank - red.rank;
    out[name] = ((red.rss - full.rss) / df_h) / (full.rss / df_e);
  }
  return out;
}

void check_against(const AncovaResult& r, const std::vector<Expected>& expected) {
  for (const auto& e : expected) {
    CAPTURE(e.term);
    const auto& eff = r.effect(e.term);
    CHECK(eff.F == doctest::Approx(e.F).epsilon(1e-9));
    CHECK(std::fabs(eff.F - e.F) < 1e-6);
    CHECK(eff.df_effect == e.df_effect);
    CHECK(eff.df_error == e.df_error);
    CHECK(eff.p == doctest::Approx(e.p).epsilon(1e-6));
  }
}

}  // namespace

TEST_CASE("Welch t-test matches frozen reference values") {
  for (const auto& c : welch_cases()) {
    auto r = welch_t_test(c.a, c.b);
    CHECK(std::fabs(r.t - c.t) < 1e-9);
    CHECK(std::fabs(r.df - c.df) < 1e-9);
    CHECK(std::fabs(r.p - c.p) < 1e-9);
  }
}

TEST_CASE("Welch t-test edge cases") {
  std::vector<double> a{1, 2, 3, 4}, c{5, 5, 5};
  auto r = welch_t_test(a, a);
  CHECK(r.t == 0.0);
  CHECK(r.p == doctest::Approx(1.0));
  CHECK_THROWS_AS(welch_t_test(c, c), Error);
  std::vector<double> one{1};
  CHECK_THROWS_AS(welch_t_test(one, a), Error);
}

TEST_CASE("chi-square matches frozen reference values") {
  auto g = chi_square_test({{17, 11}, {11, 18}});
  CHECK(std::fabs(g.chi2 - 2.95873625906962) < 1e-9);
  CHECK(g.df == 1);
  CHECK(std::fabs(g.p - 0.085414675225845) < 1e-9);

  auto t = chi_square_test({{5, 9}, {7, 3}, {4, 6}});
  CHECK(std::fabs(t.chi2 - 3.03571428571429) < 1e-9);
  CHECK(t.df == 2);
  CHECK(std::fabs(t.p - 0.219181057784904) < 1e-9);
  CHECK(!t.warnings.empty());
}

TEST_CASE("chi-square drops expected-zero rows with a warning") {
  auto r = chi_square_test({{5, 9}, {0, 0}, {7, 3}});
  auto ref = chi_square_test({{5, 9}, {7, 3}});
  CHECK(r.chi2 == doctest::Approx(ref.chi2));
  CHECK(r.df == 1);
  CHECK(r.warnings.size() >= 1);
  CHECK_THROWS_AS(chi_square_test({{5, 0}, {7, 0}}), Error);
}

TEST_CASE("baseline comparison runs t-tests and chi-square") {
  std::vector<ContinuousField> cont{{"age", {24, 26, 22, 30}, {27, 29, 31, 25}}};
  std::vector<CategoricalField> cat{{"gender", {"f", "f", "m", "f"}, {"m", "m", "f", "m"}}};
  auto r = baseline_comparison(cont, cat);
  REQUIRE(r.t_tests.size() == 1);
  REQUIRE(r.chi_squares.size() == 1);
  CHECK(r.chi_squares[0].second.df == 1);
  CHECK(r.chi_squares[0].second.chi2 == doctest::Approx(2.0));
}

TEST_CASE("mixed ANCOVA matches the frozen oracle on dataset a") {
  auto r = mixed_ancova(anc_a());
  check_against(r, expected_a());
}

TEST_CASE("mixed ANCOVA matches the frozen oracle on dataset b") {
  auto r = mixed_ancova(anc_b());
  check_against(r, expected_b());
}

TEST_CASE("mixed ANCOVA matches the frozen oracle on dataset c") {
  auto r = mixed_ancova(anc_c());
  check_against(r, expected_c());
}

TEST_CASE("within-participant F agrees with the long-format brute force") {
  for (const auto& in : {anc_a(), anc_b(), anc_c()}) {
    auto r = mixed_ancova(in);
    for (const auto& [term, f] : brute_force_within_f(in)) {
      CAPTURE(term);
      CHECK(std::fabs(r.effect(term).F - f) < 1e-6);
    }
  }
}

TEST_CASE("identical group trajectories give zero interaction") {
  auto in = make_input({1, 1, 0, 0}, {{5, 4, 3, 2}, {7, 5, 4, 3}, {5, 4, 3, 2}, {7, 5, 4, 3}}, {{1}, {2}, {1}, {2}});
  in.covariates.resize(4, 0);
  in.covariate_names.clear();
  auto r = mixed_ancova(in);
  CHECK(r.effect("time:group").F == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("df for 57 participants, 4 waves") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  AncovaInput in;
  in.outcome.resize(57, 4);
  in.covariates.resize(57, 2);
  for (int i = 0; i < 57; ++i) {
    in.group.push_back(i < 28 ? 1 : 0);
    for (int t = 0; t < 4; ++t) in.outcome(i, t) = 15 + z(rng);
    in.covariates(i, 0) = 18 + z(rng);
    in.covariates(i, 1) = 7 + z(rng);
  }
  in.covariate_names = {"bdi", "gad"};
  CHECK(mixed_ancova(in).effect("time:group").df_error == 159);
  in.covariates.resize(57, 0);
  in.covariate_names.clear();
  CHECK(mixed_ancova(in).effect("time:group").df_error == 165);
}

TEST_CASE("aliased covariate raises a singularity error naming it") {
  auto in = anc_a();
  in.covariates.col(1) = 2.0 * in.covariates.col(0);
  try {
    mixed_ancova(in);
    FAIL("expected singular design");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::singular);
    CHECK(std::string(e.what()).find("cov1") != std::string::npos);
  }
}

TEST_CASE("partial eta squared identity") {
  CHECK(std::fabs(partial_eta_sq(3.75, 3, 165) - 0.066) < 0.005);
  CHECK(std::fabs(partial_eta_sq(7.67, 3, 165) - 0.126) < 0.005);
  CHECK(std::fabs(partial_eta_sq(8.564, 3, 165) - 0.139) < 0.005);
  CHECK(partial_eta_sq(0, 3, 165) == 0.0);
  CHECK(partial_eta_sq(4, 3, 165) > partial_eta_sq(3, 3, 165));
  CHECK(partial_eta_sq(4, 3, 100) > partial_eta_sq(4, 3, 165));
  for (const auto& e : mixed_ancova(anc_c()).effects) {
    CHECK(e.partial_eta_sq == doctest::Approx(e.F * e.df_effect / (e.F * e.df_effect + e.df_error)));
    CHECK(e.partial_eta_sq >= 0);
    CHECK(e.partial_eta_sq < 1);
  }
}

TEST_CASE("per-wave ANCOVA adjusted means bracket the group difference") {
  auto waves = per_wave_ancova(anc_a());
  REQUIRE(waves.size() == 4);
  for (const auto& w : waves) {
    CHECK(w.difference.estimate == doctest::Approx(w.adjusted_mean_intervention - w.adjusted_mean_control));
    CHECK(w.difference.se > 0);
    CHECK(w.group.df_error == 4);
  }
  CHECK(waves[3].adjusted_mean_intervention < waves[3].adjusted_mean_control);
}

TEST_CASE("KS test against uniform") {
  std::vector<double> even;
  for (int i = 0; i < 500; ++i) even.push_back((i + 0.5) / 500.0);
  CHECK(ks_uniform_test(even).p > 0.99);
  std::vector<double> skewed;
  for (int i = 0; i < 500; ++i) skewed.push_back(std::pow((i + 0.5) / 500.0, 3));
  CHECK(ks_uniform_test(skewed).p < 1e-6);
}

TEST_CASE("null p-values are uniform across random group labels") {
  std::mt19937_64 rng(20240603);
  std::normal_distribution<double> z;
  const int n = 30, k = 4;
  std::vector<double> interaction, group;
  for (int rep = 0; rep < 500; ++rep) {
    AncovaInput in;
    in.outcome.resize(n, k);
    in.covariates.resize(n, 1);
    in.covariate_names = {"age"};
    for (int i = 0; i < n; ++i) {
      double person = z(rng);
      in.covariates(i, 0) = z(rng);
      for (int w = 0; w < k; ++w) in.outcome(i, w) = 10 + person + 0.5 * in.covariates(i, 0) + z(rng);
      in.group.push_back(i % 2);
    }
    std::shuffle(in.group.begin(), in.group.end(), rng);
    auto r = mixed_ancova(in);
    interaction.push_back(r.effect("time:group").p);
    group.push_back(r.effect("group").p);
  }
  CHECK(ks_uniform_test(interaction).p > 0.01);
  CHECK(ks_uniform_test(group).p > 0.01);
}
