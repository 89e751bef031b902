#include "lancaster_lab/measure.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "lancaster_lab/orthopoly.hpp"
#include "special.hpp"

namespace lancaster_lab {

namespace {

constexpr std::array<std::pair<Family, std::string_view>, 13> kFamilyNames{{
    {Family::gaussian, "gaussian"},
    {Family::poisson, "poisson"},
    {Family::binomial, "binomial"},
    {Family::negative_binomial, "negative_binomial"},
    {Family::gamma, "gamma"},
    {Family::hyperbolic, "hyperbolic"},
    {Family::beta, "beta"},
    {Family::jacobi, "jacobi"},
    {Family::beta_binomial, "beta_binomial"},
    {Family::cartier_dunau, "cartier_dunau"},
    {Family::atoms, "atoms"},
    {Family::density, "density"},
    {Family::lattice, "lattice"},
}};

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    fail(ErrorCode::nonpositive_parameter, std::string(what) + " must be positive and finite");
  }
}

void require_count(int n, const char* what) {
  if (n < 1) fail(ErrorCode::nonpositive_parameter, std::string(what) + " must be >= 1");
}

double log_choose(long n, long k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

Rational rational_choose(long n, long k) {
  Rational r(1);
  for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double cartier_dunau_radius(double q) { return 2.0 * std::sqrt(q) / (1.0 + q); }

}  // namespace

std::string_view family_name(Family family) {
  for (const auto& [f, name] : kFamilyNames) {
    if (f == family) return name;
  }
  return "unknown";
}

Family family_from_name(std::string_view name) {
  for (const auto& [f, n] : kFamilyNames) {
    if (n == name) return f;
  }
  fail(ErrorCode::unsupported_family, "unknown measure family '" + std::string(name) + "'");
}

struct Measure::Custom {
  std::string name;
  std::vector<Atom> atoms;
  std::function<double(double)> density;
  std::function<double(long)> pmf;
  Interval support;
};

Measure Measure::gaussian(double mean, double variance) {
  if (!std::isfinite(mean)) fail(ErrorCode::invalid_argument, "gaussian mean must be finite");
  require_positive(variance, "gaussian variance");
  return Measure(Family::gaussian, {{"mean", mean}, {"variance", variance}});
}

Measure Measure::poisson(double mean) {
  require_positive(mean, "poisson mean");
  return Measure(Family::poisson, {{"mean", mean}});
}

Measure Measure::binomial(int n, double p) {
  require_count(n, "binomial n");
  if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::domain_error, "binomial p must lie in (0, 1)");
  return Measure(Family::binomial, {{"n", static_cast<double>(n)}, {"p", p}});
}

Measure Measure::negative_binomial(double a, double shape) {
  if (!(a > 0.0 && a < 1.0)) fail(ErrorCode::domain_error, "negative binomial a must lie in (0, 1)");
  require_positive(shape, "negative binomial shape");
  return Measure(Family::negative_binomial, {{"a", a}, {"shape", shape}});
}

Measure Measure::gamma(double shape, double scale) {
  require_positive(shape, "gamma shape");
  require_positive(scale, "gamma scale");
  return Measure(Family::gamma, {{"shape", shape}, {"scale", scale}});
}

Measure Measure::hyperbolic(double q) {
  require_positive(q, "hyperbolic q");
  return Measure(Family::hyperbolic, {{"q", q}});
}

Measure Measure::beta(double a, double b) {
  require_positive(a, "beta a");
  require_positive(b, "beta b");
  return Measure(Family::beta, {{"a", a}, {"b", b}});
}

Measure Measure::jacobi(double a, double b) {
  require_positive(a, "jacobi a");
  require_positive(b, "jacobi b");
  return Measure(Family::jacobi, {{"a", a}, {"b", b}});
}

Measure Measure::beta_binomial(int n, double a, double b) {
  require_count(n, "beta-binomial n");
  require_positive(a, "beta-binomial a");
  require_positive(b, "beta-binomial b");
  return Measure(Family::beta_binomial, {{"n", static_cast<double>(n)}, {"a", a}, {"b", b}});
}

Measure Measure::cartier_dunau(double q) {
  // The printed density has total mass min(q, 1); it is a probability for q >= 1.
  if (!(q >= 1.0) || !std::isfinite(q)) {
    fail(ErrorCode::domain_error, "cartier_dunau requires q >= 1");
  }
  return Measure(Family::cartier_dunau, {{"q", q}});
}

Measure Measure::from_atoms(std::string name, std::vector<Atom> atoms) {
  if (atoms.empty()) fail(ErrorCode::invalid_argument, "atom list is empty");
  std::sort(atoms.begin(), atoms.end(), [](const Atom& l, const Atom& r) { return l.point < r.point; });
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(atoms[i].mass > 0.0 && atoms[i].mass <= 1.0)) {
      fail(ErrorCode::invalid_argument, "atom masses must lie in (0, 1]");
    }
    if (i > 0 && atoms[i].point == atoms[i - 1].point) {
      fail(ErrorCode::invalid_argument, "duplicate atom");
    }
    total += atoms[i].mass;
  }
  if (std::abs(total - 1.0) > 1e-12) fail(ErrorCode::invalid_argument, "atom masses must sum to 1");
  Measure m(Family::atoms, {});
  auto custom = std::make_shared<Custom>();
  custom->name = std::move(name);
  custom->support = {atoms.front().point, atoms.back().point};
  custom->atoms = std::move(atoms);
  m.custom_ = std::move(custom);
  return m;
}

Measure Measure::from_density(std::string name, std::function<double(double)> density,
                              Interval support) {
  if (!(support.lo < support.hi)) fail(ErrorCode::invalid_argument, "empty support interval");
  Measure m(Family::density, {});
  auto custom = std::make_shared<Custom>();
  custom->name = std::move(name);
  custom->density = std::move(density);
  custom->support = support;
  m.custom_ = std::move(custom);
  return m;
}

Measure Measure::from_lattice_pmf(std::string name, std::function<double(long)> pmf) {
  Measure m(Family::lattice, {});
  auto custom = std::make_shared<Custom>();
  custom->name = std::move(name);
  custom->pmf = std::move(pmf);
  custom->support = {0.0, std::numeric_limits<double>::infinity()};
  m.custom_ = std::move(custom);
  return m;
}

Measure Measure::from_params(Family family, const Params& p) {
  switch (family) {
    case Family::gaussian: return gaussian(p.at("mean"), p.at("variance"));
    case Family::poisson: return poisson(p.at("mean"));
    case Family::binomial: return binomial(static_cast<int>(p.at("n")), p.at("p"));
    case Family::negative_binomial: return negative_binomial(p.at("a"), p.at("shape"));
    case Family::gamma: return gamma(p.at("shape"), p.at("scale"));
    case Family::hyperbolic: return hyperbolic(p.at("q"));
    case Family::beta: return beta(p.at("a"), p.at("b"));
    case Family::jacobi: return jacobi(p.at("a"), p.at("b"));
    case Family::beta_binomial:
      return beta_binomial(static_cast<int>(p.at("n")), p.at("a"), p.at("b"));
    case Family::cartier_dunau: return cartier_dunau(p.at("q"));
    default:
      fail(ErrorCode::unsupported_family,
           "custom measures cannot be rebuilt from parameters: " + std::string(family_name(family)));
  }
}

std::string Measure::name() const {
  if (custom_) return custom_->name;
  std::string out(family_name(family_));
  out += '(';
  bool first = true;
  for (const auto& [key, value] : params_.entries()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    if (!first) out += ", ";
    out += key + "=" + buf;
    first = false;
  }
  out += ')';
  return out;
}

bool Measure::is_discrete() const {
  switch (family_) {
    case Family::poisson:
    case Family::binomial:
    case Family::negative_binomial:
    case Family::beta_binomial:
    case Family::atoms:
    case Family::lattice:
      return true;
    default:
      return false;
  }
}

bool Measure::is_parametric() const { return !custom_; }

std::size_t Measure::atom_count() const {
  switch (family_) {
    case Family::binomial:
    case Family::beta_binomial:
      return static_cast<std::size_t>(param("n")) + 1;
    case Family::atoms:
      return custom_->atoms.size();
    default:
      return std::numeric_limits<std::size_t>::max();
  }
}

Interval Measure::support() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (family_) {
    case Family::gaussian:
    case Family::hyperbolic:
      return {-inf, inf};
    case Family::poisson:
    case Family::negative_binomial:
    case Family::gamma:
      return {0.0, inf};
    case Family::binomial:
    case Family::beta_binomial:
      return {0.0, param("n")};
    case Family::beta:
      return {0.0, 1.0};
    case Family::jacobi:
      return {-1.0, 1.0};
    case Family::cartier_dunau: {
      const double r = cartier_dunau_radius(param("q"));
      return {-r, r};
    }
    default:
      return custom_->support;
  }
}

std::vector<Atom> Measure::atoms() const {
  if (family_ == Family::atoms) return custom_->atoms;
  if (family_ != Family::binomial && family_ != Family::beta_binomial) {
    fail(ErrorCode::infinite_support, name() + " has no finite atom list");
  }
  const int n = static_cast<int>(param("n"));
  std::vector<Atom> out;
  out.reserve(n + 1);
  for (int k = 0; k <= n; ++k) out.push_back({static_cast<double>(k), pmf(k)});
  return out;
}

std::vector<Rational> Measure::exact_masses() const {
  std::vector<Rational> out;
  if (family_ == Family::atoms) {
    for (const auto& atom : custom_->atoms) out.push_back(to_rational(atom.mass));
    return out;
  }
  if (family_ == Family::binomial) {
    const int n = static_cast<int>(param("n"));
    const Rational p = to_rational(param("p"));
    for (int k = 0; k <= n; ++k) {
      Rational term = rational_choose(n, k);
      for (int i = 0; i < k; ++i) term *= p;
      for (int i = 0; i < n - k; ++i) term *= (1 - p);
      out.push_back(term);
    }
    return out;
  }
  if (family_ == Family::beta_binomial) {
    const int n = static_cast<int>(param("n"));
    const Rational a = to_rational(param("a"));
    const Rational b = to_rational(param("b"));
    const Rational denom = rising(Rational(a + b), n);
    for (int k = 0; k <= n; ++k) {
      out.push_back(rational_choose(n, k) * rising(a, k) * rising(b, n - k) / denom);
    }
    return out;
  }
  fail(ErrorCode::unsupported_family, name() + " has no exact rational masses");
}

double Measure::pmf(long k) const {
  switch (family_) {
    case Family::poisson: {
      if (k < 0) return 0.0;
      const double m = param("mean");
      return std::exp(k * std::log(m) - m - std::lgamma(k + 1.0));
    }
    case Family::negative_binomial: {
      if (k < 0) return 0.0;
      const double a = param("a");
      const double s = param("shape");
      return std::exp(s * std::log1p(-a) + std::lgamma(s + k) - std::lgamma(s) -
                      std::lgamma(k + 1.0) + k * std::log(a));
    }
    case Family::binomial: {
      const long n = static_cast<long>(param("n"));
      if (k < 0 || k > n) return 0.0;
      const double p = param("p");
      return std::exp(log_choose(n, k) + k * std::log(p) + (n - k) * std::log1p(-p));
    }
    case Family::beta_binomial: {
      const long n = static_cast<long>(param("n"));
      if (k < 0 || k > n) return 0.0;
      const double a = param("a");
      const double b = param("b");
      return std::exp(log_choose(n, k) + detail::log_beta(k + a, n - k + b) - detail::log_beta(a, b));
    }
    case Family::lattice:
      return k < 0 ? 0.0 : custom_->pmf(k);
    case Family::atoms:
      for (const auto& atom : custom_->atoms) {
        if (atom.point == static_cast<double>(k)) return atom.mass;
      }
      return 0.0;
    default:
      fail(ErrorCode::invalid_argument, name() + " is not integer-supported");
  }
}

double Measure::density(double x) const {
  switch (family_) {
    case Family::gaussian: {
      const double m = param("mean");
      const double v = param("variance");
      return std::exp(-0.5 * (x - m) * (x - m) / v) / std::sqrt(2.0 * std::numbers::pi * v);
    }
    case Family::gamma: {
      if (x <= 0.0) return 0.0;
      const double s = param("shape");
      const double c = param("scale");
      return std::exp((s - 1.0) * std::log(x / c) - x / c - std::lgamma(s)) / c;
    }
    case Family::hyperbolic: {
      // 2^{q-2} / (pi Gamma(q)) |Gamma((q + i x) / 2)|^2
      const double q = param("q");
      return std::exp((q - 2.0) * std::numbers::ln2 - std::log(std::numbers::pi) - std::lgamma(q) +
                      2.0 * detail::log_abs_gamma(0.5 * q, 0.5 * x));
    }
    case Family::beta: {
      if (x <= 0.0 || x >= 1.0) return 0.0;
      const double a = param("a");
      const double b = param("b");
      return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - detail::log_beta(a, b));
    }
    case Family::jacobi: {
      if (x <= -1.0 || x >= 1.0) return 0.0;
      const double a = param("a");
      const double b = param("b");
      // both halves directly: 1 - (x + 1) / 2 rounds to 0 near x = 1
      return 0.5 * std::exp((a - 1.0) * std::log(0.5 * (1.0 + x)) + (b - 1.0) * std::log(0.5 * (1.0 - x)) -
                            detail::log_beta(a, b));
    }
    case Family::cartier_dunau: {
      const double q = param("q");
      const double r = cartier_dunau_radius(q);
      if (x <= -r || x >= r) return 0.0;
      return (q + 1.0) / (2.0 * std::numbers::pi) * std::sqrt(r * r - x * x) / (1.0 - x * x);
    }
    case Family::density:
      return support().contains(x) ? custom_->density(x) : 0.0;
    default:
      fail(ErrorCode::invalid_argument, name() + " has no Lebesgue density");
  }
}

bool Measure::operator==(const Measure& other) const {
  if (family_ != other.family_ || !(params_ == other.params_)) return false;
  if (custom_ == other.custom_) return true;
  if (!custom_ || !other.custom_) return false;
  if (custom_->name != other.custom_->name) return false;
  if (family_ != Family::atoms) return false;
  const auto& l = custom_->atoms;
  const auto& r = other.custom_->atoms;
  return std::equal(l.begin(), l.end(), r.begin(), r.end(), [](const Atom& x, const Atom& y) {
    return x.point == y.point && x.mass == y.mass;
  });
}

}  // namespace lancaster_lab
