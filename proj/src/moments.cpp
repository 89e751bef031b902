#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>

#include "lancaster_lab/orthopoly.hpp"
#include "internal.hpp"

namespace lancaster_lab {

namespace detail {

/// S(k, j) for k, j <= K.
std::vector<std::vector<boost::multiprecision::cpp_int>> stirling2(int K) {
  using boost::multiprecision::cpp_int;
  std::vector<std::vector<cpp_int>> S(K + 1, std::vector<cpp_int>(K + 1, 0));
  S[0][0] = 1;
  for (int k = 1; k <= K; ++k) {
    for (int j = 1; j <= k; ++j) S[k][j] = j * S[k - 1][j] + S[k - 1][j - 1];
  }
  return S;
}

}  // namespace detail

namespace {

using boost::multiprecision::cpp_int;

template <class S>
std::vector<S> raw_from_factorial(const std::vector<S>& factorial) {
  const int K = static_cast<int>(factorial.size()) - 1;
  const auto st = detail::stirling2(K);
  std::vector<S> m(K + 1, S(0));
  for (int k = 0; k <= K; ++k) {
    for (int j = 0; j <= k; ++j) m[k] += S(st[k][j]) * factorial[j];
  }
  return m;
}

std::vector<Rational> exact_moments(const Measure& measure, int K) {
  std::vector<Rational> m(K + 1, Rational(0));
  if (measure.family() == Family::atoms) {
    for (const auto& atom : measure.atoms()) {
      const Rational x = to_rational(atom.point);
      Rational power = to_rational(atom.mass);
      for (int k = 0; k <= K; ++k) {
        m[k] += power;
        power *= x;
      }
    }
    return m;
  }
  const int n = static_cast<int>(measure.param("n"));
  std::vector<Rational> factorial(K + 1, Rational(0));
  Rational falling(1);
  for (int j = 0; j <= K && j <= n; ++j) {
    if (measure.family() == Family::binomial) {
      Rational pj(1);
      for (int i = 0; i < j; ++i) pj *= to_rational(measure.param("p"));
      factorial[j] = falling * pj;
    } else {
      const Rational a = to_rational(measure.param("a"));
      const Rational b = to_rational(measure.param("b"));
      factorial[j] = falling * rising(a, j) / rising(Rational(a + b), j);
    }
    falling *= (n - j);
  }
  return raw_from_factorial(factorial);
}

/// Cumulants of the hyperbolic law: kappa_n = q * d^{n-1}/dt^{n-1} tan t at 0,
/// from D tan^k = k tan^{k-1} (1 + tan^2).
std::vector<cpp_int> tan_derivatives_at_zero(int K) {
  std::vector<cpp_int> poly{0, 1};  // coefficients in u = tan t
  std::vector<cpp_int> at_zero(K + 1, 0);
  at_zero[0] = 0;
  for (int d = 1; d <= K; ++d) {
    std::vector<cpp_int> next(poly.size() + 1, 0);
    for (std::size_t k = 1; k < poly.size(); ++k) {
      if (poly[k] == 0) continue;
      next[k - 1] += poly[k] * static_cast<long>(k);
      next[k + 1] += poly[k] * static_cast<long>(k);
    }
    poly = std::move(next);
    at_zero[d] = poly[0];
  }
  return at_zero;
}

std::vector<Extended> moments_from_cumulants(const std::vector<Extended>& kappa) {
  const int K = static_cast<int>(kappa.size()) - 1;
  std::vector<Extended> m(K + 1, Extended(0));
  m[0] = 1;
  // binomial coefficients C(n-1, k-1)
  std::vector<std::vector<Extended>> C(K + 1, std::vector<Extended>(K + 1, Extended(0)));
  for (int n = 0; n <= K; ++n) {
    C[n][0] = 1;
    for (int k = 1; k <= n; ++k) C[n][k] = C[n - 1][k - 1] + (k <= n - 1 ? C[n - 1][k] : Extended(0));
  }
  for (int n = 1; n <= K; ++n) {
    for (int k = 1; k <= n; ++k) m[n] += C[n - 1][k - 1] * kappa[k] * m[n - k];
  }
  return m;
}

MomentSequence cartier_dunau_moments(double qd, int K) {
  if (qd == 1.0) {
    // p = 1: the arcsine law, m_{2k} = C(2k, k) / 4^k
    MomentSequence out;
    out.exact = true;
    out.values.assign(K + 1, Extended(0));
    Extended even(1);
    for (int k = 0; 2 * k <= K; ++k) {
      out.values[2 * k] = even;
      even = even * (2 * k + 1) / (2 * k + 2);
    }
    return out;
  }
  // x = p cos(phi) turns the density into a smooth periodic integrand; the
  // trapezoid rule then converges geometrically at rate exp(-2 M acosh(1/p)).
  const Extended q(qd);
  const Extended p = 2 * sqrt(q) / (1 + q);
  const Extended pi = boost::math::constants::pi<Extended>();
  const double decay = 2.0 * std::acosh(1.0 / static_cast<double>(p));
  const int digits = std::numeric_limits<Extended>::digits10;
  int M = static_cast<int>(std::min(digits * std::log(10.0) / decay, 4.0e5)) + 2 * K + 50;
  M += M % 2;

  auto rule = [&](int points) {
    std::vector<Extended> m(K + 1, Extended(0));
    const Extended h = pi / points;
    for (int i = 1; i < points; ++i) {  // endpoint terms vanish (sin^2 = 0)
      const Extended phi = h * i;
      const Extended c = cos(phi);
      const Extended s = sin(phi);
      const Extended x = p * c;
      Extended w = s * s / (1 - x * x);
      for (int k = 0; k <= K; ++k) {
        m[k] += w;
        w *= x;
      }
    }
    const Extended scale = (q + 1) * p * p / (2 * pi) * h;
    for (auto& v : m) v *= scale;
    return m;
  };

  MomentSequence out;
  out.values = rule(M);
  const auto coarse = rule(M / 2);
  double err = 0.0;
  for (int k = 0; k <= K; ++k) {
    err = std::max(err, static_cast<double>(abs(out.values[k] - coarse[k])));
  }
  out.exact = false;
  out.error_estimate = err;
  return out;
}

MomentSequence numeric_moments(const Measure& measure, int K) {
  const Interval s = measure.support();
  MomentSequence out;
  out.values.assign(K + 1, Extended(0));
  double err_total = 0.0;
  for (int k = 0; k <= K; ++k) {
    auto f = [&](double x) { return std::pow(x, k) * measure.density(x); };
    double err = 0.0;
    double value = 0.0;
    try {
      if (s.bounded()) {
        boost::math::quadrature::tanh_sinh<double> integrator;
        value = integrator.integrate(f, s.lo, s.hi, 1e-13, &err);
      } else if (s.whole_line()) {
        boost::math::quadrature::sinh_sinh<double> integrator;
        value = integrator.integrate(f, 1e-13, &err);
      } else if (std::isfinite(s.lo)) {
        boost::math::quadrature::exp_sinh<double> integrator;
        value = integrator.integrate([&](double t) { return f(s.lo + t); }, 1e-13, &err);
      } else {
        boost::math::quadrature::exp_sinh<double> integrator;
        value = integrator.integrate([&](double t) { return f(s.hi - t); }, 1e-13, &err);
      }
    } catch (const std::exception& e) {
      fail(ErrorCode::divergent_integral,
           "moment " + std::to_string(k) + " of " + measure.name() + ": " + e.what());
    }
    if (!std::isfinite(value) || !(err < 1e-6 * std::max(1.0, std::abs(value)))) {
      fail(ErrorCode::divergent_integral,
           "moment " + std::to_string(k) + " of " + measure.name() + " did not converge");
    }
    out.values[k] = value;
    err_total = std::max(err_total, err);
  }
  out.error_estimate = err_total;
  return out;
}

MomentSequence lattice_moments(const Measure& measure, int K) {
  MomentSequence out;
  out.values.assign(K + 1, Extended(0));
  constexpr long kMaxTerms = 10'000'000;
  for (long x = 0; x < kMaxTerms; ++x) {
    const double w = measure.pmf(x);
    Extended power(w);
    for (int k = 0; k <= K; ++k) {
      out.values[k] += power;
      power *= x;
    }
    if (x > 10 && w < 1e-300) break;
    if (x == kMaxTerms - 1) {
      fail(ErrorCode::divergent_integral, "lattice moments of " + measure.name() + " did not converge");
    }
  }
  out.error_estimate = 1e-16 * static_cast<double>(out.values[K]);
  return out;
}

}  // namespace

MomentSequence moments(const Measure& measure, int max_order) {
  if (max_order < 0) fail(ErrorCode::invalid_argument, "max_order must be nonnegative");
  if (max_order > kMaxMomentOrder) {
    fail(ErrorCode::order_too_large,
         "moment order " + std::to_string(max_order) + " exceeds " + std::to_string(kMaxMomentOrder));
  }
  const int K = max_order;
  MomentSequence out;
  out.exact = true;
  auto& m = out.values;
  m.assign(K + 1, Extended(0));

  switch (measure.family()) {
    case Family::gaussian: {
      const Extended mu(measure.param("mean"));
      const Extended v(measure.param("variance"));
      // m_k = mu m_{k-1} + (k-1) v m_{k-2}
      m[0] = 1;
      if (K >= 1) m[1] = mu;
      for (int k = 2; k <= K; ++k) m[k] = mu * m[k - 1] + (k - 1) * v * m[k - 2];
      break;
    }
    case Family::poisson: {
      const Extended lam(measure.param("mean"));
      std::vector<Extended> f(K + 1);
      Extended power(1);
      for (int j = 0; j <= K; ++j, power *= lam) f[j] = power;
      m = raw_from_factorial(f);
      break;
    }
    case Family::negative_binomial: {
      const Extended a(measure.param("a"));
      const Extended s(measure.param("shape"));
      const Extended r = a / (1 - a);
      std::vector<Extended> f(K + 1);
      Extended power(1);
      for (int j = 0; j <= K; ++j, power *= r) f[j] = rising(s, j) * power;
      m = raw_from_factorial(f);
      break;
    }
    case Family::gamma: {
      const Extended s(measure.param("shape"));
      const Extended c(measure.param("scale"));
      Extended power(1);
      for (int k = 0; k <= K; ++k, power *= c) m[k] = rising(s, k) * power;
      break;
    }
    case Family::hyperbolic: {
      const Extended q(measure.param("q"));
      const auto tan_d = tan_derivatives_at_zero(K);
      std::vector<Extended> kappa(K + 1, Extended(0));
      for (int n = 1; n <= K; ++n) kappa[n] = q * Extended(tan_d[n - 1]);
      m = moments_from_cumulants(kappa);
      break;
    }
    case Family::beta:
    case Family::jacobi: {
      const Extended a(measure.param("a"));
      const Extended b(measure.param("b"));
      std::vector<Extended> u(K + 1);
      u[0] = 1;
      for (int k = 1; k <= K; ++k) u[k] = u[k - 1] * (a + k - 1) / (a + b + k - 1);
      if (measure.family() == Family::beta) {
        m = u;
        break;
      }
      // X = 2U - 1
      for (int k = 0; k <= K; ++k) {
        Extended binom(1);
        Extended sum(0);
        for (int j = 0; j <= k; ++j) {
          const Extended term = binom * pow(Extended(2), j) * u[j];
          sum += ((k - j) % 2 == 0) ? term : Extended(-term);
          binom = binom * (k - j) / (j + 1);
        }
        m[k] = sum;
      }
      break;
    }
    case Family::binomial:
    case Family::beta_binomial:
    case Family::atoms: {
      const auto exact = exact_moments(measure, K);
      for (int k = 0; k <= K; ++k) m[k] = Extended(exact[k]);
      break;
    }
    case Family::cartier_dunau:
      return cartier_dunau_moments(measure.param("q"), K);
    case Family::density:
      return numeric_moments(measure, K);
    case Family::lattice:
      return lattice_moments(measure, K);
  }
  return out;
}

namespace detail {

std::vector<Rational> exact_rational_moments(const Measure& measure, int max_order) {
  switch (measure.family()) {
    case Family::binomial:
    case Family::beta_binomial:
    case Family::atoms:
      return exact_moments(measure, max_order);
    default:
      fail(ErrorCode::unsupported_family, measure.name() + " has no exact rational moments");
  }
}

}  // namespace detail

}  // namespace lancaster_lab
