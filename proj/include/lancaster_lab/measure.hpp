#ifndef LANCASTER_LAB_MEASURE_HPP
#define LANCASTER_LAB_MEASURE_HPP

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lancaster_lab/common.hpp"
#include "lancaster_lab/extended.hpp"

namespace lancaster_lab {

/// Parametric families carry their classical orthogonal polynomial system;
/// the last three are user-supplied measures.
enum class Family {
  gaussian,           // mean, variance                     (Hermite)
  poisson,            // mean                               (Charlier)
  binomial,           // n, p                               (Krawtchouk)
  negative_binomial,  // a, shape: (1-a)^s (s)_k a^k / k!   (Meixner)
  gamma,              // shape, scale                       (Laguerre)
  hyperbolic,         // q: Laplace transform (cos t)^(-q)  (Meixner-Pollaczek)
  beta,               // a, b on [0, 1]                     (Jacobi)
  jacobi,             // a, b: beta(a, b) moved to [-1, 1] by x -> 2x - 1
  beta_binomial,      // n, a, b: the hypergeometric mixture (Hahn)
  cartier_dunau,      // q >= 1, Plancherel measure of the (q+1)-regular tree
  atoms,
  density,
  lattice,            // pmf on {0, 1, 2, ...}
};

std::string_view family_name(Family family);
Family family_from_name(std::string_view name);

struct Atom {
  double point;
  double mass;
};

/// A univariate probability. Immutable; copies share custom data.
class Measure {
 public:
  static Measure gaussian(double mean = 0.0, double variance = 1.0);
  static Measure poisson(double mean);
  static Measure binomial(int n, double p);
  static Measure negative_binomial(double a, double shape);
  static Measure gamma(double shape, double scale = 1.0);
  static Measure hyperbolic(double q);
  static Measure beta(double a, double b);
  static Measure jacobi(double a, double b);
  static Measure symmetric_jacobi(double a) { return jacobi(a, a); }
  static Measure beta_binomial(int n, double a, double b);
  static Measure cartier_dunau(double q);

  static Measure from_atoms(std::string name, std::vector<Atom> atoms);
  static Measure from_density(std::string name,
                              std::function<double(double)> density,
                              Interval support);
  static Measure from_lattice_pmf(std::string name,
                                  std::function<double(long)> pmf);

  /// Rebuilds a parametric family from its serialized parameters.
  static Measure from_params(Family family, const Params& params);

  Family family() const { return family_; }
  const Params& params() const { return params_; }
  double param(std::string_view name) const { return params_.at(name); }
  /// e.g. "gamma(shape=2, scale=1)"; custom measures use their given name.
  std::string name() const;

  bool is_discrete() const;
  bool is_parametric() const;
  /// Number of support points; SIZE_MAX when infinite or continuous.
  std::size_t atom_count() const;
  Interval support() const;

  /// Finite discrete measures only.
  std::vector<Atom> atoms() const;
  /// Exact masses for binomial and beta-binomial (parameters taken as the
  /// exact rationals their doubles represent) and for atom lists.
  std::vector<Rational> exact_masses() const;

  double pmf(long k) const;
  double density(double x) const;

  bool operator==(const Measure& other) const;

 private:
  struct Custom;

  Measure(Family family, Params params) : family_(family), params_(std::move(params)) {}

  Family family_;
  Params params_;
  std::shared_ptr<const Custom> custom_;
};

}  // namespace lancaster_lab

#endif  // LANCASTER_LAB_MEASURE_HPP
