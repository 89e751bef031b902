#ifndef LANCASTER_LAB_NEF_HPP
#define LANCASTER_LAB_NEF_HPP

// Natural exponential families F(mu) = { exp(theta x - k(theta)) mu(dx) }.
//
// Cumulant conventions (the base mu is the measure generating k):
//   gaussian          k = theta^2 / 2            mu = N(0, 1)
//   poisson           k = e^theta - 1            mu = Poisson(1)
//   binomial(n)       k = n log(1 + e^theta)     mu = sum_j C(n, j) delta_j
//   negative_binomial(r)
//                     k = -r log(1 - e^theta)    mu = sum_j (r)_j / j! delta_j
//   gamma(q)          k = -q log(1 - theta)      mu = Gamma(q, 1)
//   hyperbolic(q)     k = -q log cos(theta)      mu = mu_q
// The binomial and negative binomial bases are not probabilities; their
// reference members are taken at theta = 0 (Binomial(n, 1/2)) and
// theta = -log 2 (NB with a = 1/2).

#include <functional>
#include <optional>
#include <string>

#include "lancaster_lab/common.hpp"
#include "lancaster_lab/measure.hpp"

namespace lancaster_lab {

enum class NefFamily { gaussian, poisson, binomial, negative_binomial, gamma, hyperbolic };

std::string_view nef_family_name(NefFamily family);
NefFamily nef_family_from_name(std::string_view name);

class NefSpec {
 public:
  static NefSpec gaussian() { return NefSpec(NefFamily::gaussian, 0.0); }
  static NefSpec poisson() { return NefSpec(NefFamily::poisson, 0.0); }
  static NefSpec binomial(int n);
  static NefSpec negative_binomial(double r);
  static NefSpec gamma(double q);
  static NefSpec hyperbolic(double q);
  /// "n" for binomial, "r" for negative binomial, "q" for gamma and hyperbolic.
  static NefSpec from_params(NefFamily family, const Params& params);

  NefFamily family() const { return family_; }
  /// n, r or q; 0 for the parameter-free families.
  double shape() const { return shape_; }
  Params params() const;
  std::string name() const;

  Interval theta_domain() const;
  /// Interior of the convex support, M_F.
  Interval mean_domain() const;
  double reference_theta() const;

  double cumulant(double theta) const;
  /// k'(theta).
  double mean(double theta) const;
  /// k''(theta).
  double variance(double theta) const;
  /// Variance function V(m) = k''(psi(m)); quadratic in m for all six families.
  double variance_function(double m) const;

  /// P(mu, theta): density (continuous) or pmf (discrete) at x.
  double member_density(double theta, double x) const;
  bool is_discrete() const;

  /// The member of F(mu^lambda) at the reference theta, as a Measure.
  Measure power(double lambda) const;

  bool operator==(const NefSpec&) const = default;

 private:
  NefSpec(NefFamily family, double shape) : family_(family), shape_(shape) {}
  void require_theta(double theta) const;

  NefFamily family_;
  double shape_;
};

/// m = k'(theta).
double mean_map(const NefSpec& nef, double theta);
/// Inverse of the mean map by bracketed bisection (tolerance 1e-12, at most
/// 200 iterations after bracketing).
double psi(const NefSpec& nef, double m);

struct ConjugateForm {
  std::string family;  // e.g. "beta"
  std::string scale;   // variable the closed form lives on, e.g. "p = e^theta / (1 + e^theta)"
  Params params;
};

enum class Parameterization { canonical_theta, mean };

/// pi_{x0, lambda}(dtheta) = C e^{lambda (theta x0 - k(theta))} dtheta on Theta.
struct DYPrior {
  NefSpec nef = NefSpec::gaussian();
  double x0 = 0.0;
  double lambda = 1.0;
  double C = 1.0;  // from quadrature over Theta
  Parameterization parameterization = Parameterization::canonical_theta;
  std::optional<ConjugateForm> closed_form;
  /// C from the closed form where one is known (used to cross-check).
  std::optional<double> closed_form_C;

  double density_theta(double theta) const;
};

DYPrior dy_prior(const NefSpec& nef, double x0, double lambda);

/// nu_{x0, lambda}: image of pi under theta -> k'(theta), density
/// pi(psi(m)) / k''(psi(m)) on M_F.
Measure mean_reparam(const DYPrior& prior);

/// mu_1(dx) = \int P(mu, theta)(dx) pi(dtheta). Closed forms for
/// binomial/beta (beta-binomial), poisson/gamma (negative binomial) and
/// gaussian/gaussian; quadrature over Theta otherwise.
Measure mixture_marginal(const NefSpec& nef, const DYPrior& prior);

/// The same mixture by quadrature over Theta at one point, for any family
/// (pmf for the discrete families).
double mixture_density_quadrature(const NefSpec& nef, const DYPrior& prior, double x);

/// lambda in the Jorgensen set: [0, inf) for the infinitely divisible
/// families, {j / n : j = 0, 1, ...} for binomial(n).
bool jorgensen_contains(const NefSpec& nef, double lambda);

}  // namespace lancaster_lab

#endif  // LANCASTER_LAB_NEF_HPP
