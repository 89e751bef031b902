#include <boost/math/distributions/beta.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>

#include <catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "lancaster_lab/nef.hpp"
#include "lancaster_lab/orthopoly.hpp"

using namespace lancaster_lab;
using Catch::Approx;

namespace {

std::vector<NefSpec> six() {
  return {NefSpec::gaussian(), NefSpec::poisson(), NefSpec::binomial(4),
          NefSpec::negative_binomial(2.5), NefSpec::gamma(1.5), NefSpec::hyperbolic(2.0)};
}

double sample_theta(const NefSpec& nef, std::mt19937_64& rng) {
  const Interval d = nef.theta_domain();
  const double lo = std::isfinite(d.lo) ? d.lo : -6.0;
  const double hi = std::isfinite(d.hi) ? d.hi : 6.0;
  std::uniform_real_distribution<double> u(0.02, 0.98);
  return lo + u(rng) * (hi - lo);
}

}  // namespace

TEST_CASE("mean map examples", "[nef]") {
  CHECK(mean_map(NefSpec::gaussian(), 0.0) == 0.0);
  CHECK(mean_map(NefSpec::poisson(), 0.0) == 1.0);
  CHECK(mean_map(NefSpec::hyperbolic(3.0), std::numbers::pi / 4) == Approx(3.0).epsilon(1e-14));
  CHECK_THROWS_AS(mean_map(NefSpec::gamma(1.0), 1.5), Error);
  CHECK_THROWS_AS(psi(NefSpec::binomial(3), 3.5), Error);
}

TEST_CASE("psi inverts the mean map", "[nef]") {
  std::mt19937_64 rng(11);
  for (const auto& nef : six()) {
    INFO(nef.name());
    for (int i = 0; i < 100; ++i) {
      const double theta = sample_theta(nef, rng);
      CHECK(std::abs(psi(nef, mean_map(nef, theta)) - theta) < 1e-10);
    }
  }
}

TEST_CASE("cumulant derivatives agree with finite differences", "[nef]") {
  std::mt19937_64 rng(5);
  for (const auto& nef : six()) {
    INFO(nef.name());
    for (int i = 0; i < 20; ++i) {
      const double t = sample_theta(nef, rng);
      const double h = 1e-5;
      const double d1 = (nef.cumulant(t + h) - nef.cumulant(t - h)) / (2 * h);
      const double d2 = (nef.mean(t + h) - nef.mean(t - h)) / (2 * h);
      CHECK(nef.mean(t) == Approx(d1).epsilon(1e-6));
      CHECK(nef.variance(t) == Approx(d2).epsilon(1e-6));
      CHECK(nef.variance(t) > 0.0);
      CHECK(nef.variance_function(nef.mean(t)) == Approx(nef.variance(t)).epsilon(1e-9));
    }
  }
}

TEST_CASE("members are probabilities", "[nef]") {
  for (const auto& nef : six()) {
    INFO(nef.name());
    const double theta = nef.reference_theta() + (nef.family() == NefFamily::gamma ? 0.3 : -0.2);
    double total = 0.0;
    double first = 0.0;
    if (nef.is_discrete()) {
      for (int x = 0; x < 400; ++x) {
        total += nef.member_density(theta, x);
        first += x * nef.member_density(theta, x);
      }
    } else if (nef.family() == NefFamily::gamma) {
      boost::math::quadrature::exp_sinh<double> q;
      total = q.integrate([&](double x) { return nef.member_density(theta, x); });
      first = q.integrate([&](double x) { return x * nef.member_density(theta, x); });
    } else {
      boost::math::quadrature::sinh_sinh<double> q;
      total = q.integrate([&](double x) { return nef.member_density(theta, x); });
      first = q.integrate([&](double x) { return x * nef.member_density(theta, x); });
    }
    CHECK(total == Approx(1.0).epsilon(1e-9));
    CHECK(first == Approx(nef.mean(theta)).epsilon(1e-8));
  }
}

TEST_CASE("dy priors", "[nef]") {
  const auto bern = dy_prior(NefSpec::binomial(1), 0.5, 2.0);
  REQUIRE(bern.closed_form);
  CHECK(bern.closed_form->family == "beta");
  CHECK(bern.closed_form->params.at("a") == 1.0);
  CHECK(bern.closed_form->params.at("b") == 1.0);
  // Uniform p: pi(theta) = p (1 - p)
  CHECK(bern.density_theta(0.0) == Approx(0.25).epsilon(1e-9));

  const auto gauss = dy_prior(NefSpec::gaussian(), 0.0, 1.0);
  CHECK(gauss.density_theta(0.3) == Approx(std::exp(-0.045) / std::sqrt(2 * std::numbers::pi)).epsilon(1e-9));

  for (const auto& nef : six()) {
    INFO(nef.name());
    const double x0 = nef.family() == NefFamily::binomial ? 1.3 : 0.8;
    const auto prior = dy_prior(nef, x0, 1.7);
    if (prior.closed_form_C) CHECK(prior.C == Approx(*prior.closed_form_C).epsilon(1e-8));
    // independent normalization on a plain trapezoid grid
    const Interval d = nef.theta_domain();
    const double lo = std::isfinite(d.lo) ? d.lo : -40.0;
    const double hi = std::isfinite(d.hi) ? d.hi : 40.0;
    const int M = 400000;
    double total = 0.0;
    for (int i = 1; i < M; ++i) total += prior.density_theta(lo + (hi - lo) * i / M);
    CHECK(total * (hi - lo) / M == Approx(1.0).epsilon(1e-8));
  }
  CHECK_THROWS_AS(dy_prior(NefSpec::poisson(), -1.0, 1.0), Error);
  CHECK_THROWS_AS(dy_prior(NefSpec::binomial(2), 2.0, 1.0), Error);
}

TEST_CASE("mean reparameterization", "[nef]") {
  const auto gauss = dy_prior(NefSpec::gaussian(), 0.4, 2.0);
  const auto nu = mean_reparam(gauss);
  for (double m : {-1.0, 0.0, 0.4, 1.3}) CHECK(nu.density(m) == Approx(gauss.density_theta(m)).epsilon(1e-10));

  const int n = 3;
  const auto prior = dy_prior(NefSpec::binomial(n), 1.2, 2.5);
  const auto nub = mean_reparam(prior);
  boost::math::beta_distribution<double> beta(2.5 * 1.2, 2.5 * (n - 1.2));
  for (double m : {0.2, 1.0, 2.5}) CHECK(nub.density(m) == Approx(pdf(beta, m / n) / n).epsilon(1e-8));

  for (const auto& nef : six()) {
    INFO(nef.name());
    const auto nu_f = mean_reparam(dy_prior(nef, nef.family() == NefFamily::binomial ? 1.3 : 0.8, 1.7));
    const Interval M = nef.mean_domain();
    double total = 0.0;
    if (M.bounded()) {
      boost::math::quadrature::tanh_sinh<double> q;
      total = q.integrate([&](double m) { return nu_f.density(m); }, M.lo, M.hi, 1e-11);
    } else if (M.whole_line()) {
      boost::math::quadrature::sinh_sinh<double> q;
      total = q.integrate([&](double m) { return nu_f.density(m); }, 1e-11);
    } else {
      boost::math::quadrature::exp_sinh<double> q;
      total = q.integrate([&](double m) { return nu_f.density(m); }, 1e-11);
    }
    CHECK(total == Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("mixture marginals", "[nef]") {
  const auto one = mixture_marginal(NefSpec::binomial(1), dy_prior(NefSpec::binomial(1), 0.5, 2.0));
  const auto m1 = one.exact_masses();
  REQUIRE(m1.size() == 2);
  CHECK(m1[0] == Rational(1, 2));
  CHECK(m1[1] == Rational(1, 2));

  const auto two = mixture_marginal(NefSpec::binomial(2), dy_prior(NefSpec::binomial(2), 1.0, 1.0));
  for (const auto& m : two.exact_masses()) CHECK(m == Rational(1, 3));

  struct Case { NefSpec nef; double x0; double lambda; };
  const std::vector<Case> cases{{NefSpec::binomial(5), 2.0, 1.5},
                                {NefSpec::poisson(), 1.4, 0.7},
                                {NefSpec::gaussian(), -0.3, 2.0}};
  for (const auto& c : cases) {
    INFO(c.nef.name());
    const auto prior = dy_prior(c.nef, c.x0, c.lambda);
    const auto closed = mixture_marginal(c.nef, prior);
    for (double x : {0.0, 1.0, 2.0, 4.0}) {
      const double expected = c.nef.is_discrete() ? closed.pmf(static_cast<long>(x)) : closed.density(x);
      CHECK(mixture_density_quadrature(c.nef, prior, x) == Approx(expected).epsilon(1e-8));
    }
  }

  // gamma/gamma: beta-prime mixture x^{q-1} r^A Gamma(A+q) / (Gamma(q) Gamma(A) (x+r)^{A+q})
  const double q = 1.5, x0 = 2.0, lambda = 0.8;
  const auto gprior = dy_prior(NefSpec::gamma(q), x0, lambda);
  const auto gm = mixture_marginal(NefSpec::gamma(q), gprior);
  const double A = lambda * q + 1.0, r = lambda * x0;
  for (double x : {0.3, 1.0, 4.0}) {
    const double expected = std::exp((q - 1) * std::log(x) + A * std::log(r) + std::lgamma(A + q) -
                                     std::lgamma(q) - std::lgamma(A) - (A + q) * std::log(x + r));
    CHECK(gm.density(x) == Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("hypergeometric marginal masses are exact", "[nef]") {
  const std::vector<double> shapes{0.5, 0.25, 1.0, 3.0, 7.5, 10.0};
  for (int n = 1; n <= 20; ++n) {
    for (double a : shapes) {
      for (double b : shapes) {
        const auto masses = Measure::beta_binomial(n, a, b).exact_masses();
        Rational total(0);
        for (const auto& m : masses) {
          CHECK(m >= 0);
          total += m;
        }
        CHECK(total == 1);
      }
    }
  }
}

TEST_CASE("jorgensen sets", "[nef]") {
  CHECK(jorgensen_contains(NefSpec::binomial(1), 3.0));
  CHECK_FALSE(jorgensen_contains(NefSpec::binomial(1), 2.5));
  CHECK(jorgensen_contains(NefSpec::binomial(2), 2.5));
  CHECK(jorgensen_contains(NefSpec::gamma(1.0), 0.1));
  CHECK(jorgensen_contains(NefSpec::hyperbolic(1.0), 0.0));
  CHECK_FALSE(jorgensen_contains(NefSpec::poisson(), -0.5));
  CHECK(NefSpec::gamma(2.0).power(1.5) == Measure::gamma(3.0, 1.0));
  CHECK_THROWS_AS(NefSpec::binomial(1).power(0.5), Error);
}
