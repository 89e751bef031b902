#include "lancaster_lab/nef.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "special.hpp"

namespace lancaster_lab {

namespace {

constexpr std::array<std::pair<NefFamily, std::string_view>, 6> kNefNames{{
    {NefFamily::gaussian, "gaussian"},
    {NefFamily::poisson, "poisson"},
    {NefFamily::binomial, "binomial"},
    {NefFamily::negative_binomial, "negative_binomial"},
    {NefFamily::gamma, "gamma"},
    {NefFamily::hyperbolic, "hyperbolic"},
}};

constexpr double kInf = std::numeric_limits<double>::infinity();

/// \int_a^b f over an interval that may be (half-)infinite.
template <class F>
double integrate(F f, Interval dom, double tol, double* err) {
  if (dom.bounded()) {
    boost::math::quadrature::tanh_sinh<double> q;
    return q.integrate(f, dom.lo, dom.hi, tol, err);
  }
  if (dom.whole_line()) {
    boost::math::quadrature::sinh_sinh<double> q;
    return q.integrate(f, tol, err);
  }
  boost::math::quadrature::exp_sinh<double> q;
  if (std::isfinite(dom.lo)) return q.integrate([&](double t) { return f(dom.lo + t); }, tol, err);
  return q.integrate([&](double t) { return f(dom.hi - t); }, tol, err);
}

/// log of the DY exponent lambda (theta x0 - k(theta)).
double dy_exponent(const NefSpec& nef, double x0, double lambda, double theta) {
  return lambda * (theta * x0 - nef.cumulant(theta));
}

}  // namespace

std::string_view nef_family_name(NefFamily family) {
  for (const auto& [f, name] : kNefNames) {
    if (f == family) return name;
  }
  return "unknown";
}

NefFamily nef_family_from_name(std::string_view name) {
  for (const auto& [f, n] : kNefNames) {
    if (n == name) return f;
  }
  fail(ErrorCode::unsupported_family, "unknown exponential family '" + std::string(name) + "'");
}

NefSpec NefSpec::binomial(int n) {
  if (n < 1) fail(ErrorCode::nonpositive_parameter, "binomial n must be >= 1");
  return NefSpec(NefFamily::binomial, n);
}

NefSpec NefSpec::negative_binomial(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorCode::nonpositive_parameter, "negative binomial r must be positive");
  return NefSpec(NefFamily::negative_binomial, r);
}

NefSpec NefSpec::gamma(double q) {
  if (!(q > 0.0) || !std::isfinite(q)) fail(ErrorCode::nonpositive_parameter, "gamma q must be positive");
  return NefSpec(NefFamily::gamma, q);
}

NefSpec NefSpec::hyperbolic(double q) {
  if (!(q > 0.0) || !std::isfinite(q)) fail(ErrorCode::nonpositive_parameter, "hyperbolic q must be positive");
  return NefSpec(NefFamily::hyperbolic, q);
}

NefSpec NefSpec::from_params(NefFamily family, const Params& p) {
  switch (family) {
    case NefFamily::gaussian: return gaussian();
    case NefFamily::poisson: return poisson();
    case NefFamily::binomial: {
      const double n = p.at("n");
      if (n != std::floor(n)) fail(ErrorCode::invalid_argument, "binomial n must be an integer");
      return binomial(static_cast<int>(n));
    }
    case NefFamily::negative_binomial: return negative_binomial(p.at("r"));
    case NefFamily::gamma: return gamma(p.at("q"));
    case NefFamily::hyperbolic: return hyperbolic(p.at("q"));
  }
  fail(ErrorCode::unsupported_family, "unknown exponential family");
}

Params NefSpec::params() const {
  switch (family_) {
    case NefFamily::binomial: return {{"n", shape_}};
    case NefFamily::negative_binomial: return {{"r", shape_}};
    case NefFamily::gamma:
    case NefFamily::hyperbolic: return {{"q", shape_}};
    default: return {};
  }
}

std::string NefSpec::name() const {
  std::string out(nef_family_name(family_));
  const Params p = params();
  for (const auto& [key, value] : p.entries()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "(%s=%.10g)", key.c_str(), value);
    out += buf;
  }
  return out;
}

Interval NefSpec::theta_domain() const {
  switch (family_) {
    case NefFamily::negative_binomial: return {-kInf, 0.0};
    case NefFamily::gamma: return {-kInf, 1.0};
    case NefFamily::hyperbolic: return {-std::numbers::pi / 2, std::numbers::pi / 2};
    default: return {-kInf, kInf};
  }
}

Interval NefSpec::mean_domain() const {
  switch (family_) {
    case NefFamily::gaussian:
    case NefFamily::hyperbolic: return {-kInf, kInf};
    case NefFamily::binomial: return {0.0, shape_};
    default: return {0.0, kInf};
  }
}

double NefSpec::reference_theta() const {
  return family_ == NefFamily::negative_binomial ? -std::numbers::ln2 : 0.0;
}

void NefSpec::require_theta(double theta) const {
  const Interval d = theta_domain();
  if (!(theta > d.lo && theta < d.hi)) {
    fail(ErrorCode::domain_error, "theta outside the natural domain of " + name());
  }
}

double NefSpec::cumulant(double theta) const {
  require_theta(theta);
  switch (family_) {
    case NefFamily::gaussian: return 0.5 * theta * theta;
    case NefFamily::poisson: return std::expm1(theta);
    case NefFamily::binomial:
      return shape_ * (theta > 0 ? theta + std::log1p(std::exp(-theta)) : std::log1p(std::exp(theta)));
    case NefFamily::negative_binomial: return -shape_ * std::log(-std::expm1(theta));
    case NefFamily::gamma: return -shape_ * std::log1p(-theta);
    case NefFamily::hyperbolic: return -shape_ * std::log(std::cos(theta));
  }
  return 0.0;
}

double NefSpec::mean(double theta) const {
  require_theta(theta);
  switch (family_) {
    case NefFamily::gaussian: return theta;
    case NefFamily::poisson: return std::exp(theta);
    case NefFamily::binomial: return shape_ / (1.0 + std::exp(-theta));
    case NefFamily::negative_binomial: return -shape_ * std::exp(theta) / std::expm1(theta);
    case NefFamily::gamma: return shape_ / (1.0 - theta);
    case NefFamily::hyperbolic: return shape_ * std::tan(theta);
  }
  return 0.0;
}

double NefSpec::variance(double theta) const {
  require_theta(theta);
  switch (family_) {
    case NefFamily::gaussian: return 1.0;
    case NefFamily::poisson: return std::exp(theta);
    case NefFamily::binomial: {
      const double p = 1.0 / (1.0 + std::exp(-theta));
      return shape_ * p * (1.0 - p);
    }
    case NefFamily::negative_binomial: {
      const double d = std::expm1(theta);
      return shape_ * std::exp(theta) / (d * d);
    }
    case NefFamily::gamma: return shape_ / ((1.0 - theta) * (1.0 - theta));
    case NefFamily::hyperbolic: {
      const double c = std::cos(theta);
      return shape_ / (c * c);
    }
  }
  return 0.0;
}

double NefSpec::variance_function(double m) const {
  switch (family_) {
    case NefFamily::gaussian: return 1.0;
    case NefFamily::poisson: return m;
    case NefFamily::binomial: return m - m * m / shape_;
    case NefFamily::negative_binomial: return m + m * m / shape_;
    case NefFamily::gamma: return m * m / shape_;
    case NefFamily::hyperbolic: return shape_ + m * m / shape_;
  }
  return 0.0;
}

bool NefSpec::is_discrete() const {
  return family_ == NefFamily::poisson || family_ == NefFamily::binomial ||
         family_ == NefFamily::negative_binomial;
}

double NefSpec::member_density(double theta, double x) const {
  require_theta(theta);
  const double k = cumulant(theta);
  switch (family_) {
    case NefFamily::gaussian:
      return std::exp(theta * x - k - 0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    case NefFamily::poisson: {
      if (x < 0 || x != std::floor(x)) return 0.0;
      return std::exp(theta * x - k - 1.0 - std::lgamma(x + 1.0));
    }
    case NefFamily::binomial: {
      if (x < 0 || x > shape_ || x != std::floor(x)) return 0.0;
      return std::exp(theta * x - k + std::lgamma(shape_ + 1.0) - std::lgamma(x + 1.0) -
                      std::lgamma(shape_ - x + 1.0));
    }
    case NefFamily::negative_binomial: {
      if (x < 0 || x != std::floor(x)) return 0.0;
      return std::exp(theta * x - k + std::lgamma(shape_ + x) - std::lgamma(shape_) -
                      std::lgamma(x + 1.0));
    }
    case NefFamily::gamma: {
      if (x <= 0) return 0.0;
      return std::exp(theta * x - k + (shape_ - 1.0) * std::log(x) - x - std::lgamma(shape_));
    }
    case NefFamily::hyperbolic:
      return std::exp(theta * x - k + (shape_ - 2.0) * std::numbers::ln2 -
                      std::log(std::numbers::pi) - std::lgamma(shape_) +
                      2.0 * detail::log_abs_gamma(0.5 * shape_, 0.5 * x));
  }
  return 0.0;
}

Measure NefSpec::power(double lambda) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    fail(ErrorCode::nonpositive_parameter, "power must be positive (lambda = 0 is a point mass)");
  }
  if (!jorgensen_contains(*this, lambda)) {
    fail(ErrorCode::jorgensen_violation, "lambda outside the Jorgensen set of " + name());
  }
  switch (family_) {
    case NefFamily::gaussian: return Measure::gaussian(0.0, lambda);
    case NefFamily::poisson: return Measure::poisson(lambda);
    case NefFamily::binomial:
      return Measure::binomial(static_cast<int>(std::lround(lambda * shape_)), 0.5);
    case NefFamily::negative_binomial: return Measure::negative_binomial(0.5, lambda * shape_);
    case NefFamily::gamma: return Measure::gamma(lambda * shape_, 1.0);
    case NefFamily::hyperbolic: return Measure::hyperbolic(lambda * shape_);
  }
  fail(ErrorCode::unsupported_family, "unknown exponential family");
}

double mean_map(const NefSpec& nef, double theta) { return nef.mean(theta); }

double psi(const NefSpec& nef, double m) {
  const Interval M = nef.mean_domain();
  if (!(m > M.lo && m < M.hi)) fail(ErrorCode::domain_error, "mean outside M_F of " + nef.name());
  const Interval dom = nef.theta_domain();

  // Bisect in u, where theta = b - e^u next to a single finite endpoint b,
  // so the root is found to relative accuracy in its distance to b.
  const bool log_scale = dom.half_line();
  const double edge = std::isfinite(dom.hi) ? dom.hi : dom.lo;
  const double sign = std::isfinite(dom.hi) ? -1.0 : 1.0;
  auto theta_of = [&](double u) { return log_scale ? edge + sign * std::exp(u) : u; };
  // g(u) increasing in u
  auto g = [&](double u) { return (log_scale && sign < 0 ? -1.0 : 1.0) * (nef.mean(theta_of(u)) - m); };
  auto inside = [&](double t) { return t > dom.lo && t < dom.hi; };

  double lo = dom.bounded() ? dom.lo : -1.0;
  double hi = dom.bounded() ? dom.hi : 1.0;
  if (!dom.bounded()) {
    for (int i = 0; g(lo) >= 0.0; ++i) {
      lo = 2.0 * lo - 1.0;
      if (i > 1100 || !inside(theta_of(lo))) fail(ErrorCode::domain_error, "could not bracket psi");
    }
    for (int i = 0; g(hi) <= 0.0; ++i) {
      hi = 2.0 * hi + 1.0;
      if (i > 1100 || !inside(theta_of(hi))) fail(ErrorCode::domain_error, "could not bracket psi");
    }
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double t_lo = theta_of(lo);
    const double t_hi = theta_of(hi);
    const double scale = log_scale ? std::min(1.0, std::abs(theta_of(mid) - edge)) : 1.0;
    if (std::abs(t_hi - t_lo) <= 1e-12 * scale || mid == lo || mid == hi) break;
    if (!inside(theta_of(mid))) break;
    if (g(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double theta = theta_of(0.5 * (lo + hi));
  if (!inside(theta)) fail(ErrorCode::domain_error, "psi left the natural domain of " + nef.name());
  return theta;
}

double DYPrior::density_theta(double theta) const {
  const Interval d = nef.theta_domain();
  if (!(theta > d.lo && theta < d.hi)) return 0.0;
  return C * std::exp(dy_exponent(nef, x0, lambda, theta));
}

DYPrior dy_prior(const NefSpec& nef, double x0, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(ErrorCode::non_integrable, "lambda must be positive");
  const Interval M = nef.mean_domain();
  if (!(x0 > M.lo && x0 < M.hi)) {
    fail(ErrorCode::non_integrable, "x0 must lie inside the domain of means of " + nef.name());
  }
  DYPrior prior;
  prior.nef = nef;
  prior.x0 = x0;
  prior.lambda = lambda;

  // Normalize around the mode theta* = psi(x0) to keep the integrand O(1).
  const double mode = psi(nef, x0);
  const double peak = dy_exponent(nef, x0, lambda, mode);
  const Interval dom = nef.theta_domain();
  auto integrand = [&](double theta) {
    if (!(theta > dom.lo && theta < dom.hi)) return 0.0;
    return std::exp(dy_exponent(nef, x0, lambda, theta) - peak);
  };
  double err = 0.0;
  double mass = 0.0;
  try {
    mass = integrate(integrand, dom, 1e-13, &err);
  } catch (const std::exception& e) {
    fail(ErrorCode::non_integrable, std::string("prior normalization failed: ") + e.what());
  }
  if (!std::isfinite(mass) || !(mass > 0.0) || err > 1e-9 * mass) {
    fail(ErrorCode::non_integrable, "prior normalization did not converge for " + nef.name());
  }
  prior.C = std::exp(-peak) / mass;

  const double s = nef.shape();
  switch (nef.family()) {
    case NefFamily::gaussian:
      prior.closed_form = ConjugateForm{"gaussian", "theta", {{"mean", x0}, {"variance", 1.0 / lambda}}};
      prior.closed_form_C = std::sqrt(lambda / (2.0 * std::numbers::pi)) * std::exp(-0.5 * lambda * x0 * x0);
      break;
    case NefFamily::poisson: {
      const double a = lambda * x0;
      prior.closed_form = ConjugateForm{"gamma", "m = e^theta", {{"shape", a}, {"rate", lambda}}};
      prior.closed_form_C = std::exp(a * std::log(lambda) - lambda - std::lgamma(a));
      break;
    }
    case NefFamily::binomial: {
      const double a = lambda * x0;
      const double b = lambda * (s - x0);
      prior.closed_form = ConjugateForm{"beta", "p = e^theta / (1 + e^theta)", {{"a", a}, {"b", b}}};
      prior.closed_form_C = std::exp(-detail::log_beta(a, b));
      break;
    }
    case NefFamily::negative_binomial: {
      const double a = lambda * x0;
      const double b = lambda * s + 1.0;
      prior.closed_form = ConjugateForm{"beta", "u = e^theta", {{"a", a}, {"b", b}}};
      prior.closed_form_C = std::exp(-detail::log_beta(a, b));
      break;
    }
    case NefFamily::gamma: {
      const double shape = lambda * s + 1.0;
      const double rate = lambda * x0;
      prior.closed_form = ConjugateForm{"gamma", "s = 1 - theta", {{"shape", shape}, {"rate", rate}}};
      prior.closed_form_C = std::exp(shape * std::log(rate) - rate - std::lgamma(shape));
      break;
    }
    case NefFamily::hyperbolic:
      break;
  }
  return prior;
}

Measure mean_reparam(const DYPrior& prior) {
  if (prior.parameterization != Parameterization::canonical_theta) {
    fail(ErrorCode::invalid_argument, "prior is already in the mean parameterization");
  }
  const DYPrior p = prior;
  auto density = [p](double m) {
    const Interval M = p.nef.mean_domain();
    if (!(m > M.lo && m < M.hi) || !std::isfinite(m)) return 0.0;
    double theta = 0.0;
    try {
      theta = psi(p.nef, m);
    } catch (const Error&) {
      return 0.0;  // beyond the representable range of theta
    }
    // theta pinned against a finite endpoint by double resolution
    if (std::abs(p.nef.mean(theta) - m) > 1e-6 * std::max(1.0, std::abs(m))) return 0.0;
    const double d = p.density_theta(theta);
    return d == 0.0 ? 0.0 : d / p.nef.variance(theta);
  };
  char buf[96];
  std::snprintf(buf, sizeof buf, "dy_mean(x0=%.10g, lambda=%.10g)", prior.x0, prior.lambda);
  return Measure::from_density(prior.nef.name() + " " + buf, density, prior.nef.mean_domain());
}

double mixture_density_quadrature(const NefSpec& nef, const DYPrior& prior, double x) {
  const Interval dom = nef.theta_domain();
  const double mode = psi(nef, prior.x0);
  const double peak = dy_exponent(nef, prior.x0, prior.lambda, mode);
  auto integrand = [&](double theta) {
    if (!(theta > dom.lo && theta < dom.hi)) return 0.0;
    const double w = std::exp(dy_exponent(nef, prior.x0, prior.lambda, theta) - peak);
    return w == 0.0 ? 0.0 : w * nef.member_density(theta, x);
  };
  double err = 0.0;
  const double value = integrate(integrand, dom, 1e-13, &err);
  return value * prior.C * std::exp(peak);
}

Measure mixture_marginal(const NefSpec& nef, const DYPrior& prior) {
  const double x0 = prior.x0;
  const double lambda = prior.lambda;
  const double s = nef.shape();
  switch (nef.family()) {
    case NefFamily::binomial:
      return Measure::beta_binomial(static_cast<int>(s), lambda * x0, lambda * (s - x0));
    case NefFamily::poisson:
      return Measure::negative_binomial(1.0 / (1.0 + lambda), lambda * x0);
    case NefFamily::gaussian:
      return Measure::gaussian(x0, 1.0 + 1.0 / lambda);
    default:
      break;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, " mixture(x0=%.10g, lambda=%.10g)", x0, lambda);
  const std::string name = nef.name() + buf;
  if (nef.family() == NefFamily::negative_binomial) {
    return Measure::from_lattice_pmf(name, [nef, prior](long k) {
      return mixture_density_quadrature(nef, prior, static_cast<double>(k));
    });
  }
  const Interval support = nef.family() == NefFamily::gamma ? Interval{0.0, kInf} : Interval{-kInf, kInf};
  return Measure::from_density(name, [nef, prior](double x) {
    return mixture_density_quadrature(nef, prior, x);
  }, support);
}

bool jorgensen_contains(const NefSpec& nef, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) return false;
  if (nef.family() != NefFamily::binomial) return true;
  const double j = lambda * nef.shape();
  return std::abs(j - std::round(j)) <= 1e-12 * std::max(1.0, j);
}

}  // namespace lancaster_lab
