#include <boost/math/special_functions/bessel.hpp>

#include <catch_amalgamated.hpp>

#include <cmath>

#include "lancaster_lab/lancaster.hpp"

using namespace lancaster_lab;
using Catch::Approx;

namespace {

std::vector<LancasterSequence> constructed(int N) {
  std::vector<LancasterSequence> out;
  out.push_back(seq_eagleson(NefSpec::gamma(1.0), 0.5, 1.5, 2.0, N));
  out.push_back(seq_eagleson(NefSpec::poisson(), 1.0, 2.0, 0.5, N));
  out.push_back(seq_eagleson(NefSpec::negative_binomial(1.5), 0.4, 1.0, 0.0, N));
  out.push_back(seq_eagleson(NefSpec::gaussian(), 0.3, 1.0, 2.0, N));
  out.push_back(seq_eagleson(NefSpec::hyperbolic(1.0), 1.0, 0.5, 1.0, N));
  out.push_back(seq_hyperbolic_beta(2.5, 1.0, N).sequence);
  out.push_back(seq_geometric_cross(CrossKind::poisson, {{"a", 1.0}, {"b", 4.0}}, 0.5, N));
  out.push_back(seq_geometric_cross(CrossKind::negbin, {{"a", 0.2}, {"b", 0.5}, {"lambda", 2.0}}, 0.6, N));
  out.push_back(seq_geometric_cross(CrossKind::negbin_gamma, {{"a", 0.3}, {"lambda", 1.5}}, 0.5, N));
  out.push_back(seq_kibble(2.0, 0.7, N));
  return out;
}

/// Kibble-Moran density through its Bessel form.
double kibble_density(double q, double r, double x, double y) {
  const double z = 2.0 * std::sqrt(r * x * y) / (1.0 - r);
  return std::pow(x * y / r, (q - 1.0) / 2.0) * std::exp(-(x + y) / (1.0 - r)) /
         (std::tgamma(q) * (1.0 - r)) * boost::math::cyl_bessel_i(q - 1.0, z);
}

}  // namespace

TEST_CASE("buja sequence", "[lancaster]") {
  const auto s = seq_buja(1.0, 1.0, 6);
  CHECK(s.rho[0] == 1.0);
  CHECK(s.rho[1] == Approx(-0.5).epsilon(1e-15));
  CHECK(s.rho[2] == Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(seq_buja(1.0, 2.0, 2).rho[1] == Approx(-std::sqrt(2.0) / std::sqrt(6.0)).epsilon(1e-15));
  CHECK(s.margin_x == Measure::beta(1.0, 2.0));
  CHECK_THROWS_AS(seq_buja(0.0, 1.0, 3), Error);

  for (auto [a, b] : {std::pair{1.0, 1.0}, {0.7, 2.5}}) {
    const auto seq = seq_buja(a, b, 6);
    const auto model = buja_model(a, b);
    for (int n = 0; n <= 6; ++n) {
      const auto est = estimate_rho(model, n, 0, 0);
      CHECK(est.exact);
      CHECK(est.value == Approx(seq.rho[n]).margin(1e-10));
    }
  }
  const auto mc = estimate_rho(buja_model(1.0, 1.0), 1, 200000, 7, 0.01, false);
  CHECK_FALSE(mc.exact);
  CHECK(std::abs(mc.value + 0.5) < 3 * mc.std_error);
}

TEST_CASE("beta-binomial sequence", "[lancaster]") {
  const auto s = seq_beta_binomial(1, 1.0, 1.0);
  REQUIRE(s.printed_variant);
  CHECK((*s.printed_variant)[1] == Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(beta_binomial_rho_squared(1, 1.0, 1.0, 1) == Rational(1, 3));
  CHECK(s.rho[1] == Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(s.eigenvalues()[1] == Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(s.N() == 1);

  // p_1(x) = 2x - 1 under Bernoulli(1/2), q_1 = sqrt(12) (theta - 1/2) under the
  // uniform: E = 2 sqrt(12) Var(theta) = 1 / sqrt(3).
  const auto est = estimate_rho(beta_binomial_model(1, 1.0, 1.0), 1, 0, 0);
  CHECK(est.exact);
  CHECK(est.value == Approx(2.0 * std::sqrt(12.0) / 12.0).epsilon(1e-14));

  // printed values are the squared canonical ones, exactly
  for (int n : {1, 3, 6}) {
    for (auto [a, b] : {std::pair{1.0, 1.0}, {0.5, 2.0}, {3.0, 0.25}}) {
      const Rational ra = to_rational(a), rb = to_rational(b);
      for (int j = 0; j <= n; ++j) {
        Rational printed(1);
        for (int k = 0; k < j; ++k) printed *= Rational(n - k) / (ra + rb + n + k);
        CHECK(beta_binomial_rho_squared(n, a, b, j) == printed);
      }
      CHECK(beta_binomial_rho_squared(n, a, b, n + 1) == 0);
    }
  }

  const auto seq = seq_beta_binomial(6, 2.0, 3.0);
  const auto model = beta_binomial_model(6, 2.0, 3.0);
  for (int n = 0; n <= 6; ++n) CHECK(estimate_rho(model, n, 0, 0).value == Approx(seq.rho[n]).margin(1e-10));
  const auto mc = estimate_rho(model, 2, 200000, 3, 0.05, false);
  CHECK(std::abs(mc.value - seq.rho[2]) < 3 * mc.std_error);
}

TEST_CASE("eagleson sequences", "[lancaster]") {
  for (double r : seq_eagleson(NefSpec::poisson(), 0.0, 1.3, 0.0, 8).rho) CHECK(r == Approx(1.0).epsilon(1e-14));

  // gamma, lambda = xi = q - eta: (eta)_n / (q)_n
  const double q = 2.5, eta = 1.0;
  const auto g = seq_eagleson(NefSpec::gamma(1.0), q - eta, eta, q - eta, 10);
  double ratio = 1.0;
  for (int n = 0; n <= 10; ++n) {
    CHECK(g.rho[n] == Approx(ratio).epsilon(1e-12));
    ratio *= (eta + n) / (q + n);
  }
  // gaussian: (eta / sqrt((lambda + eta)(eta + xi)))^n
  const auto gs = seq_eagleson(NefSpec::gaussian(), 0.3, 1.0, 2.0, 8);
  for (int n = 0; n <= 8; ++n) {
    CHECK(gs.rho[n] == Approx(std::pow(1.0 / std::sqrt(1.3 * 3.0), n)).epsilon(1e-12));
  }
  // binomial: rho_j vanishes past the smaller count
  const auto b = seq_eagleson(NefSpec::binomial(1), 2.0, 1.0, 0.0, 5);
  CHECK(b.rho[1] == Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-12));
  CHECK(b.rho[2] == 0.0);

  CHECK_THROWS_AS(seq_eagleson(NefSpec::binomial(1), 0.5, 1.0, 0.0, 3), Error);
  CHECK_THROWS_AS(seq_eagleson(NefSpec::gamma(1.0), 1.0, 0.0, 1.0, 3), Error);

  const auto model = eagleson_model(NefSpec::gamma(1.0), 0.5, 1.5, 2.0);
  const auto seq = seq_eagleson(NefSpec::gamma(1.0), 0.5, 1.5, 2.0, 6);
  for (int n = 0; n <= 6; ++n) CHECK(estimate_rho(model, n, 0, 0).value == Approx(seq.rho[n]).margin(1e-10));
  const auto mc = estimate_rho(model, 2, 200000, 5, 0.05, false);
  CHECK(std::abs(mc.value - seq.rho[2]) < 3 * mc.std_error);

  const auto hm = eagleson_model(NefSpec::hyperbolic(1.0), 1.0, 0.5, 1.0);
  const auto hs = seq_eagleson(NefSpec::hyperbolic(1.0), 1.0, 0.5, 1.0, 5);
  for (int n = 0; n <= 5; ++n) CHECK(estimate_rho(hm, n, 0, 0).value == Approx(hs.rho[n]).margin(1e-10));
  const auto pm = eagleson_model(NefSpec::poisson(), 1.0, 2.0, 0.5);
  const auto ps = seq_eagleson(NefSpec::poisson(), 1.0, 2.0, 0.5, 4);
  for (int n = 0; n <= 4; ++n) CHECK(estimate_rho(pm, n, 0, 0).value == Approx(ps.rho[n]).margin(1e-10));
}

TEST_CASE("hyperbolic beta sequence", "[lancaster]") {
  const auto h = seq_hyperbolic_beta(2.0, 1.0, 10);
  CHECK(h.sequence.rho[1] == Approx(0.5).epsilon(1e-15));
  CHECK(h.beta_moments[1] == Approx(0.5).epsilon(1e-14));
  for (double q : {0.5, 2.0, 7.0}) {
    for (double eta : {0.0, 0.3 * q, q}) {
      const auto s = seq_hyperbolic_beta(q, eta, 10);
      CHECK(s.max_abs_difference <= 1e-12);
      for (int n = 1; n <= 10; ++n) {
        if (eta == q) CHECK(s.sequence.rho[n] == 1.0);
        if (eta == 0.0) CHECK(s.sequence.rho[n] == 0.0);
      }
    }
  }
  CHECK_THROWS_AS(seq_hyperbolic_beta(2.0, 2.5, 3), Error);
}

TEST_CASE("cross margin sequences", "[lancaster]") {
  const Params p{{"a", 1.0}, {"b", 4.0}};
  CHECK(seq_geometric_cross(CrossKind::poisson, p, 0.5, 4).rho[2] == 0.25);
  const auto zero = seq_geometric_cross(CrossKind::poisson, p, 0.0, 4);
  CHECK(zero.rho == std::vector<double>{1, 0, 0, 0, 0});
  try {
    seq_geometric_cross(CrossKind::poisson, p, 0.6, 4);
    FAIL("accepted t beyond the bound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::t_out_of_range);
  }
  CHECK_THROWS_AS(seq_geometric_cross(CrossKind::negbin_gamma, {{"a", 0.25}, {"lambda", 1.0}}, 0.51, 2), Error);
  CHECK_NOTHROW(seq_geometric_cross(CrossKind::negbin_gamma, {{"a", 0.25}, {"lambda", 1.0}}, 0.5, 2));
}

TEST_CASE("products of sequences", "[lancaster]") {
  const auto rho = seq_kibble(2.0, 0.6, 8);
  const auto one = seq_kibble(2.0, 1.0, 8);
  CHECK(seq_product(one, rho, one).rho == rho.rho);
  const auto s = seq_kibble(2.0, 0.5, 8), u = seq_kibble(2.0, 0.9, 8);
  const auto prod = seq_product(s, rho, u);
  for (int n = 0; n <= 8; ++n) CHECK(prod.rho[n] == Approx(std::pow(0.5 * 0.6 * 0.9, n)).epsilon(1e-14));
  try {
    seq_product(seq_kibble(3.0, 0.5, 4), rho, one);
    FAIL("margin mismatch accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::margin_mismatch);
  }
  // beta-binomial with Hahn and Jacobi self-sequences
  const auto bb = seq_beta_binomial(4, 2.0, 3.0);
  const auto left = seq_independence(bb.margin_x, bb.margin_x, 4);
  const auto right = seq_kibble(1.0, 1.0, 4);
  CHECK_THROWS_AS(seq_product(left, bb, right), Error);
}

TEST_CASE("every constructor keeps rho_0 = 1 and |rho_n| <= 1", "[lancaster]") {
  auto all = constructed(20);
  all.push_back(seq_buja(0.4, 3.0, 20));
  all.push_back(seq_beta_binomial(7, 0.5, 1.5));
  for (const auto& s : all) {
    INFO(s.provenance);
    CHECK(s.rho[0] == 1.0);
    for (double r : s.rho) CHECK(std::abs(r) <= 1.0 + 1e-15);
  }
}

TEST_CASE("truncated densities", "[lancaster]") {
  const auto ind = make_bivariate(seq_independence(Measure::gamma(2.0), Measure::poisson(1.0), 10), 10);
  for (auto [x, y] : {std::pair{0.3, 1.0}, {5.0, 3.0}}) {
    const auto ps = density_truncated(ind, x, y, 10);
    for (double s : ps.sums) CHECK(s == 1.0);
    CHECK(ps.stabilized);
  }

  // Kibble-Moran against the Bessel form
  const double q = 2.0, r = 0.5;
  const auto biv = make_bivariate(seq_kibble(q, r, 30), 30);
  for (auto [x, y] : {std::pair{1.0, 1.5}, {2.0, 2.0}, {0.5, 3.0}}) {
    const auto ps = density_truncated(biv, x, y, 30);
    const double marginals = x * std::exp(-x) * y * std::exp(-y);
    CHECK(ps.sums.back() * marginals == Approx(kibble_density(q, r, x, y)).margin(1e-3));
    CHECK(ps.stabilized);
  }

  // Buja a = b = 1: sigma = 2 on the triangle over beta(1, 2) margins
  const auto buja = make_bivariate(seq_buja(1.0, 1.0, 400), 400);
  const double x = 0.2, y = 0.3;
  const auto ps = density_truncated(buja, x, y, 400);
  CHECK(ps.sums.back() == Approx(2.0 / (4.0 * (1 - x) * (1 - y))).epsilon(0.05));

  // finite margins clip the truncation
  CHECK(make_bivariate(seq_beta_binomial(3, 1.0, 2.0), 3).N == 3);
}

TEST_CASE("moment representation verifier", "[lancaster]") {
  const auto t07 = verify_moment_representation(seq_kibble(2.0, 0.7, 20), SupportCase::D, 20);
  CHECK(t07.verdict == Verdict::consistent);
  CHECK(t07.gamma_estimate == Approx(1.0).epsilon(1e-12));
  CHECK(t07.one_sided);

  auto bad = seq_kibble(2.0, 0.5, 2);
  bad.rho = {1.0, 0.2, 0.9};
  const auto ref = verify_moment_representation(bad, SupportCase::D, 2);
  CHECK(ref.verdict == Verdict::refuted);
  bool recorded = false;
  for (const auto& c : ref.checks) recorded = recorded || (!c.passed && c.min_eigenvalue < -c.tolerance);
  CHECK(recorded);

  auto hyper = seq_hyperbolic_beta(1.0, 1.0, 20).sequence;
  for (int n = 0; n <= 20; ++n) hyper.rho[n] = std::pow(0.9, n);
  const auto h = verify_moment_representation(hyper, SupportCase::C, 20);
  CHECK(h.verdict == Verdict::consistent);
  bool flagged = false;
  for (const auto& note : h.notes) flagged = flagged || note.find("known non-Lancaster") != std::string::npos;
  CHECK(flagged);

  for (const auto& s : constructed(20)) {
    INFO(s.provenance);
    const bool whole = s.margin_x.support().whole_line();
    const auto report = verify_moment_representation(s, whole ? SupportCase::C : SupportCase::D, 20);
    CHECK(report.verdict != Verdict::refuted);
  }

  try {
    verify_moment_representation(seq_buja(1.0, 1.0, 10), SupportCase::D, 10);
    FAIL("bounded margins accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::wrong_case);
  }
}

TEST_CASE("kibble-moran transforms and sampling", "[lancaster]") {
  const double q = 1.7, s = 0.4, t = 1.3;
  CHECK(kibble_laplace(q, PointMixing{0.0}, s, t) == Approx(std::pow((1 + s) * (1 + t), -q)).epsilon(1e-15));
  CHECK(kibble_laplace(q, PointMixing{1.0}, s, t) == Approx(std::pow(1 + s + t, -q)).epsilon(1e-15));

  // beta(eta, q - eta) mixing gives the transform of (X + Y, Y + Z) with
  // X, Z ~ gamma(q - eta), Y ~ gamma(eta)
  for (double eta : {0.5, 1.0, 1.6}) {
    const double expected = std::pow(1 + s, -(q - eta)) * std::pow(1 + s + t, -eta) * std::pow(1 + t, -(q - eta));
    CHECK(kibble_laplace(q, BetaMixing{eta}, s, t) == Approx(expected).epsilon(1e-10));
  }
  const HistogramMixing hist{{{0.2, 0.25}, {0.9, 0.75}}};
  CHECK(kibble_laplace(q, hist, s, t) ==
        Approx(0.25 * kibble_laplace(q, PointMixing{0.2}, s, t) + 0.75 * kibble_laplace(q, PointMixing{0.9}, s, t)));
  CHECK_THROWS_AS(kibble_laplace(q, PointMixing{1.2}, s, t), Error);
  CHECK_THROWS_AS(kibble_laplace(q, HistogramMixing{{{0.5, 0.5}}}, s, t), Error);

  Rng rng = make_rng(1);
  const auto [x, y] = sample_kibble(rng, 2.0, 1.0);
  CHECK(x == y);

  const auto model = kibble_model(2.0, 0.6);
  for (int n = 1; n <= 6; ++n) {
    const auto est = estimate_rho(model, n, 100000, 17 + n);
    CHECK(std::abs(est.value - std::pow(0.6, n)) < 3 * est.std_error);
  }
  CHECK(estimate_rho(model, 0, 0, 0).value == 1.0);
  CHECK_THROWS_AS(estimate_rho(model, 3, 50, 1, 1e-4), Error);
}
