#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/hermite.hpp>
#include <boost/math/special_functions/jacobi.hpp>
#include <boost/math/special_functions/laguerre.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include <catch_amalgamated.hpp>

#include "lancaster_lab/orthopoly.hpp"

using namespace lancaster_lab;
using Catch::Approx;

namespace {

Measure bernoulli_half() { return Measure::from_atoms("bernoulli", {{0.0, 0.5}, {1.0, 0.5}}); }

std::vector<Measure> all_families() {
  return {Measure::gaussian(0.3, 2.0),       Measure::poisson(1.7),
          Measure::binomial(25, 0.3),        Measure::negative_binomial(0.4, 2.5),
          Measure::gamma(2.5, 1.5),          Measure::hyperbolic(2.0),
          Measure::jacobi(1.5, 2.5),         Measure::beta_binomial(25, 2.0, 3.0),
          Measure::cartier_dunau(2.0)};
}

}  // namespace

TEST_CASE("moments of simple measures", "[orthopoly]") {
  const auto m = moments(bernoulli_half(), 2);
  CHECK(m.exact);
  CHECK(m[0] == 1.0);
  CHECK(m[1] == 0.5);
  CHECK(m[2] == 0.5);

  const auto g = moments(Measure::gaussian(), 4);
  CHECK(g[0] == 1.0);
  CHECK(g[1] == 0.0);
  CHECK(g[2] == 1.0);
  CHECK(g[3] == 0.0);
  CHECK(g[4] == 3.0);

  // kappa_2 = q, kappa_4 = 2q
  const auto h = moments(Measure::hyperbolic(2.0), 4);
  CHECK(h[2] == Approx(2.0).epsilon(1e-15));
  CHECK(h[4] == Approx(16.0).epsilon(1e-15));

  const auto p = moments(Measure::poisson(2.0), 3);
  CHECK(p[3] == Approx(8.0 + 12.0 + 2.0).epsilon(1e-15));

  CHECK_THROWS_AS(moments(Measure::gaussian(), kMaxMomentOrder + 1), Error);
}

TEST_CASE("cartier-dunau moments match direct integration of the density", "[orthopoly]") {
  const auto arcsine = moments(Measure::cartier_dunau(1.0), 4);
  CHECK(arcsine[0] == 1.0);
  CHECK(arcsine[2] == 0.5);
  CHECK(arcsine[4] == 0.375);
  for (double q : {1.5, 2.0, 5.0}) {
    const auto measure = Measure::cartier_dunau(q);
    const auto m = moments(measure, 6);
    const double r = measure.support().hi;
    boost::math::quadrature::tanh_sinh<double> integrator;
    for (int k : {0, 2, 4, 6}) {
      const double direct = integrator.integrate(
          [&](double x) { return std::pow(x, k) * measure.density(x); }, -r, r);
      CHECK(m[k] == Approx(direct).epsilon(1e-12));
    }
    CHECK(std::abs(m[1]) < 1e-40);
  }
}

TEST_CASE("gaussian oracle recurrence", "[orthopoly]") {
  const auto rec = recurrence(Measure::gaussian(), 2, RecurrenceMode::oracle);
  CHECK(std::abs(rec.alpha(0)) < 1e-30);
  CHECK(std::abs(rec.alpha(1)) < 1e-30);
  CHECK(rec.beta(1) == Approx(1.0).epsilon(1e-15));
  CHECK(rec.beta(2) == Approx(2.0).epsilon(1e-15));
  CHECK(eval_orthonormal(rec, 1, 0.7) == Approx(0.7));
  CHECK(eval_orthonormal(rec, 2, 3.0) == Approx((9.0 - 1.0) / std::sqrt(2.0)));
  CHECK(std::abs(eval_orthonormal(rec, 2, 1.0)) < 1e-15);
  CHECK(eval_orthonormal(rec, 0, -4.2) == 1.0);
  CHECK_THROWS_AS(eval_orthonormal(rec, 3, 0.0), Error);
}

TEST_CASE("bernoulli degree one polynomial", "[orthopoly]") {
  const auto rec = recurrence(bernoulli_half(), 1, RecurrenceMode::oracle);
  CHECK(eval_orthonormal(rec, 1, 1.0) == Approx(1.0).epsilon(1e-15));
  CHECK(eval_orthonormal(rec, 1, 0.0) == Approx(-1.0).epsilon(1e-15));
  CHECK_THROWS_AS(recurrence(bernoulli_half(), 2, RecurrenceMode::oracle), Error);
}

TEST_CASE("closed forms match classical polynomials", "[orthopoly]") {
  using boost::math::factorial;
  const auto herm = recurrence(Measure::gaussian(), 12);
  const auto lag = recurrence(Measure::gamma(1.0), 12);
  const auto leg = recurrence(Measure::jacobi(1.0, 1.0), 12);
  const auto jac = recurrence(Measure::jacobi(2.0, 3.5), 12);
  for (double x : {-1.7, -0.4, 0.2, 0.9}) {
    for (unsigned n = 0; n <= 12; ++n) {
      const double he = std::pow(2.0, -0.5 * n) * boost::math::hermite(n, x / std::sqrt(2.0));
      CHECK(eval_orthonormal(herm, n, x) == Approx(he / std::sqrt(factorial<double>(n))).margin(1e-11));
      const double u = std::abs(x) * 3.0;
      CHECK(eval_orthonormal(lag, n, u) ==
            Approx((n % 2 ? -1.0 : 1.0) * boost::math::laguerre(n, u)).margin(1e-11));
      const double t = x / 1.8;
      CHECK(eval_orthonormal(leg, n, t) ==
            Approx(std::sqrt(2.0 * n + 1.0) * boost::math::legendre_p(n, t)).margin(1e-11));
      // beta(2, 3.5) on [-1,1] has weight (1-x)^{2.5} (1+x)^{1}
      const double raw = boost::math::jacobi(n, 2.5, 1.0, t);
      const double ratio = eval_orthonormal(jac, n, t) / raw;
      if (std::abs(raw) > 1e-3) {
        const double other = eval_orthonormal(jac, n, 0.5) / boost::math::jacobi(n, 2.5, 1.0, 0.5);
        CHECK(ratio == Approx(other).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("leading coefficients", "[orthopoly]") {
  const auto hyp = recurrence(Measure::hyperbolic(2.0), 5);
  CHECK(leading_coeff(hyp, 0).lead == 1.0);
  CHECK(leading_coeff(hyp, 0).c == 1.0);
  CHECK(leading_coeff(hyp, 1).c == Approx(2.0));
  CHECK(leading_coeff(hyp, 3).c == Approx(4.0));
  const auto hyp7 = recurrence(Measure::hyperbolic(0.7), 3);
  CHECK(leading_coeff(hyp7, 1).c == Approx(0.7));

  // lead equals the x^n coefficient of the explicit polynomial
  for (const auto& measure : all_families()) {
    const auto rec = recurrence(measure, 10);
    Vector<Extended> a(11), b(11);
    for (int k = 0; k <= 10; ++k) {
      a(k) = rec.alpha(k);
      b(k) = rec.beta(k);
    }
    const auto P = monic_coefficients<Extended>(a, b, 10);
    for (int n = 0; n <= 10; ++n) {
      Extended norm(1);
      for (int k = 1; k <= n; ++k) norm *= b(k);
      const double expected = static_cast<double>(P[n][n] / sqrt(norm));
      CHECK(leading_coeff(rec, n).lead == Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("gauss quadrature rules", "[orthopoly]") {
  const auto rec = recurrence(Measure::gaussian(), 4);
  const auto two = quadrature(rec, 2);
  CHECK(two.nodes(0) == Approx(-1.0).epsilon(1e-14));
  CHECK(two.nodes(1) == Approx(1.0).epsilon(1e-14));
  CHECK(two.weights(0) == Approx(0.5).epsilon(1e-14));
  CHECK(two.weights(1) == Approx(0.5).epsilon(1e-14));

  const auto shifted = recurrence(Measure::gaussian(1.25, 3.0), 3);
  const auto one = quadrature(shifted, 1);
  CHECK(one.nodes(0) == Approx(1.25));
  CHECK(one.weights(0) == Approx(1.0));

  const auto jac = recurrence(Measure::jacobi(1.0, 1.0), 3);
  const auto three = quadrature(jac, 3);
  double x4 = 0.0;
  for (int i = 0; i < 3; ++i) x4 += three.weights(i) * std::pow(three.nodes(i), 4);
  CHECK(std::abs(x4 - 0.2) < 1e-14);
  CHECK(three.weights.sum() == Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(quadrature(jac, 4), Error);
}

TEST_CASE("gram matrices are the identity at N = 20", "[orthopoly]") {
  for (const auto& measure : all_families()) {
    INFO(measure.name());
    const auto rec = recurrence(measure, 21);
    const auto method = measure.atom_count() < 1000 ? GramMethod::atoms : GramMethod::moments;
    const Eigen::MatrixXd G = gram_matrix(rec, 20, method);
    CHECK((G - Eigen::MatrixXd::Identity(21, 21)).cwiseAbs().maxCoeff() < 1e-8);
    const Eigen::MatrixXd Q = gram_matrix(rec, 20, GramMethod::quadrature);
    CHECK((Q - Eigen::MatrixXd::Identity(21, 21)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("exact gram for krawtchouk and hahn", "[orthopoly]") {
  CHECK(exact_gram_is_identity(Measure::binomial(12, 0.25), 12));
  CHECK(exact_gram_is_identity(Measure::beta_binomial(10, 1.5, 2.0), 10));
  CHECK(exact_gram_is_identity(Measure::from_atoms("three", {{0, 0.25}, {1, 0.5}, {3, 0.25}}), 2));
}

TEST_CASE("oracle and closed forms agree up to degree 15", "[orthopoly]") {
  for (const auto& measure : all_families()) {
    if (measure.family() == Family::cartier_dunau) continue;
    INFO(measure.name());
    const auto fast = recurrence(measure, 15);
    const auto oracle = recurrence(measure, 15, RecurrenceMode::oracle);
    CHECK((fast.alpha - oracle.alpha).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((fast.beta - oracle.beta).cwiseAbs().maxCoeff() < 1e-9);
  }
}
