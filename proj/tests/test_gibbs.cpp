#include <catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>

#include "lancaster_lab/gibbs.hpp"

using namespace lancaster_lab;
using Catch::Approx;

TEST_CASE("exact transition matrix of the smallest beta-binomial chain", "[gibbs]") {
  const auto model = beta_binomial_gibbs(1, 1.0, 1.0);
  const auto T = exact_transition_matrix(model);
  REQUIRE(T.k.size() == 2);
  CHECK(T.k[0][0] == Rational(2, 3));
  CHECK(T.k[0][1] == Rational(1, 3));
  CHECK(T.k[1][0] == Rational(1, 3));
  CHECK(T.k[1][1] == Rational(2, 3));
  CHECK(T.eigenvalues == std::vector<Rational>{Rational(1), Rational(1, 3)});

  // independent: trace 4/3 and determinant 1/3 give eigenvalues 1 and 1/3
  Eigen::Matrix2d k;
  k << 2.0 / 3, 1.0 / 3, 1.0 / 3, 2.0 / 3;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(k);
  CHECK(es.eigenvalues()(0) == Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(es.eigenvalues()(1) == Approx(1.0).epsilon(1e-15));
  CHECK(model.rho(1) * model.rho(1) == Approx(es.eigenvalues()(0)).epsilon(1e-15));

  const auto check = spectral_eigencheck(model, 1);
  CHECK(check.exact);
  CHECK(check.residual == 0.0);
}

TEST_CASE("finite chains: stochastic, stationary, reversible, exact spectrum", "[gibbs]") {
  for (auto [n, a, b] : {std::tuple{4, 2.0, 3.0}, {6, 0.5, 1.25}, {3, 1.0, 1.0}}) {
    const auto model = beta_binomial_gibbs(n, a, b);
    const auto T = exact_transition_matrix(model);
    for (int x = 0; x <= n; ++x) {
      Rational row(0), col(0);
      for (int y = 0; y <= n; ++y) {
        row += T.k[x][y];
        col += T.stationary[y] * T.k[y][x];
        CHECK(T.stationary[x] * T.k[x][y] == T.stationary[y] * T.k[y][x]);
      }
      CHECK(row == 1);
      CHECK(col == T.stationary[x]);
    }
    for (int j = 0; j <= n; ++j) {
      const auto check = spectral_eigencheck(model, j);
      CHECK(check.residual == 0.0);
    }
  }
  CHECK_THROWS_AS(exact_transition_matrix(gauss_gauss_gibbs(0.0, 1.0)), Error);
}

TEST_CASE("continuous eigenchecks", "[gibbs]") {
  const std::vector<ConjugateModel> models{gamma_poisson_gibbs(1.5, 0.8), gauss_gauss_gibbs(0.3, 2.0),
                                           kibble_gamma_gibbs(2.0, 0.6)};
  for (const auto& model : models) {
    INFO(model.name());
    for (int n = 0; n <= 8; ++n) {
      const auto check = spectral_eigencheck(model, n, 64);
      CHECK(check.residual < 1e-6);
      CHECK(check.grid_points == 64);
    }
  }
}

TEST_CASE("chains are reproducible", "[gibbs]") {
  const auto model = beta_binomial_gibbs(1, 1.0, 1.0);
  const auto a = run_x_chain(model, 0.0, 10, 42);
  const auto b = run_x_chain(model, 0.0, 10, 42);
  CHECK(a.states == b.states);
  CHECK(a.states.size() == 11);
  for (double x : a.states) CHECK((x == 0.0 || x == 1.0));
  CHECK(a.generator == "mt19937_64");

  const auto frozen = run_x_chain(kibble_gamma_gibbs(2.0, 1.0), 1.7, 50, 3);
  for (double x : frozen.states) CHECK(x == 1.7);
  CHECK(run_x_chain(model, 1.0, 0, 1).states == std::vector<double>{1.0});
  CHECK_THROWS_AS(run_x_chain(model, 2.0, 5, 1), Error);
  CHECK_THROWS_AS(run_x_chain(model, 0.5, 5, 1), Error);
}

TEST_CASE("autocorrelation decays at the eigenvalue", "[gibbs]") {
  const auto gg = gauss_gauss_gibbs(0.0, 1.5);
  const auto trace = run_x_chain(gg, 0.0, 1000000, 9);
  const auto fit = autocorrelation_vs_spectrum(trace, 1, 10);
  const double rho2 = 1.0 / 2.5;
  CHECK(std::abs(fit.autocorrelation.at(1) - rho2) < 0.01);
  CHECK(std::abs(fit.rate - rho2) < 0.02);
  CHECK(fit.expected == Approx(rho2));

  const auto bb = run_x_chain(beta_binomial_gibbs(1, 1.0, 1.0), 0.0, 1000000, 4);
  const auto fb = autocorrelation_vs_spectrum(bb, 1, 10);
  CHECK(fb.ci_low <= 1.0 / 3.0);
  CHECK(fb.ci_high >= 1.0 / 3.0);
  CHECK(fb.ci_high - fb.ci_low < 0.05);

  const auto ind = run_x_chain(kibble_gamma_gibbs(2.0, 0.0), 1.0, 200000, 8);
  const auto fi = autocorrelation_vs_spectrum(ind, 1, 5);
  CHECK(fi.ci_low <= 0.0);
  CHECK(fi.ci_high >= 0.0);

  CHECK_THROWS_AS(autocorrelation_vs_spectrum(run_x_chain(gg, 0.0, 500, 1), 1, 10), Error);
}

TEST_CASE("kibble conditional reproduces the joint transform", "[gibbs]") {
  const double q = 1.5, r = 0.55, s = 0.7, t = 0.4;
  const auto model = kibble_gamma_gibbs(q, r);
  Rng rng = make_rng(12);
  const int M = 400000;
  double mean = 0.0, m2 = 0.0;
  for (int i = 0; i < M; ++i) {
    const double x = sample_gamma(rng, q, 1.0);
    const double y = model.sample_y(rng, x);
    const double v = std::exp(-s * x - t * y);
    const double d = v - mean;
    mean += d / (i + 1);
    m2 += d * (v - mean);
  }
  const double se = std::sqrt(m2 / (M - 1) / M);
  CHECK(std::abs(mean - kibble_laplace(q, PointMixing{r}, s, t)) < 4 * se);
}

TEST_CASE("continuous chains are reversible in distribution", "[gibbs]") {
  // E[f(X0) g(X1)] = E[g(X0) f(X1)] for stationary starts
  const auto model = gamma_poisson_gibbs(2.0, 0.5);
  Rng rng = make_rng(77);
  const int M = 400000;
  double mean = 0.0, m2 = 0.0;
  for (int i = 0; i < M; ++i) {
    const double m = sample_gamma(rng, 0.5 * 2.0, 1.0 / 0.5);
    const double x0 = model.sample_x(rng, m);
    const double x1 = model.sample_x(rng, model.sample_y(rng, x0));
    const double v = std::exp(-0.3 * x0) * x1 - std::exp(-0.3 * x1) * x0;
    const double d = v - mean;
    mean += d / (i + 1);
    m2 += d * (v - mean);
  }
  CHECK(std::abs(mean) < 4 * std::sqrt(m2 / (M - 1) / M));
}

TEST_CASE("chi-square decay bound", "[gibbs]") {
  const auto model = beta_binomial_gibbs(1, 1.0, 1.0);
  const auto basis = recurrence(model.mu, 1);
  CHECK(chisq_decay_bound(model.sequence, basis, 1.0, 1, 1) == Approx(1.0 / 9.0).epsilon(1e-14));

  const auto ind = seq_independence(Measure::gamma(2.0), Measure::gamma(2.0), 10);
  const auto gb = recurrence(Measure::gamma(2.0), 10);
  CHECK(chisq_decay_bound(ind, gb, 3.0, 1, 10) == 0.0);

  const auto kib = seq_kibble(2.0, 0.8, 10);
  double prev = std::numeric_limits<double>::infinity();
  for (int ell = 1; ell <= 6; ++ell) {
    const double v = chisq_decay_bound(kib, gb, 3.0, ell, 10);
    CHECK(v < prev);
    prev = v;
  }
  CHECK_THROWS_AS(chisq_decay_bound(kib, gb, 3.0, 0, 10), Error);
}
