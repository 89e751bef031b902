#ifndef LANCASTER_LAB_GIBBS_HPP
#define LANCASTER_LAB_GIBBS_HPP

// Two-component Gibbs samplers on Lancaster laws. The x-chain
// k(x, dx') = \int K(x, dy) L(y, dx') has the orthonormal p_n as
// eigenfunctions with eigenvalues rho_n^2.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lancaster_lab/common.hpp"
#include "lancaster_lab/extended.hpp"
#include "lancaster_lab/lancaster.hpp"
#include "lancaster_lab/measure.hpp"
#include "lancaster_lab/orthopoly.hpp"
#include "lancaster_lab/rng.hpp"

namespace lancaster_lab {

enum class ModelKind { beta_binomial, gamma_poisson, gauss_gauss, kibble_gamma };
std::string_view model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(std::string_view name);

/// Conditionals:
///   beta_binomial(n, a, b): theta | x ~ beta(x + a, n - x + b), x | theta ~ Binomial(n, theta)
///   gamma_poisson(x0, lambda): m | x ~ gamma(lambda x0 + x, 1 / (1 + lambda)), x | m ~ Poisson(m)
///   gauss_gauss(x0, lambda): theta | x ~ N((lambda x0 + x) / (1 + lambda), 1 / (1 + lambda)),
///                            x | theta ~ N(theta, 1)
///   kibble_gamma(q, r): y | x through N ~ Poisson(r x / (1 - r)), y ~ gamma(q + N, 1 - r);
///                       symmetric in x and y
/// The priors of the first three are the Diaconis-Ylvisaker priors of the
/// binomial, Poisson and Gaussian families.
struct ConjugateModel {
  ModelKind kind = ModelKind::beta_binomial;
  Params params;
  Measure mu = Measure::gaussian();  // x margin, the stationary law of the x-chain
  Measure nu = Measure::gaussian();  // y margin
  /// Canonical rho_n, up to n for the finite model and kMaxDegree otherwise.
  LancasterSequence sequence;

  std::string name() const;
  double rho(int n) const;
  double sample_y(Rng& rng, double x) const;
  double sample_x(Rng& rng, double y) const;
  bool is_finite() const { return kind == ModelKind::beta_binomial; }
};

ConjugateModel beta_binomial_gibbs(int n, double a, double b);
ConjugateModel gamma_poisson_gibbs(double x0, double lambda);
ConjugateModel gauss_gauss_gibbs(double x0, double lambda);
ConjugateModel kibble_gamma_gibbs(double q, double r);
ConjugateModel make_model(ModelKind kind, const Params& params);

struct ChainTrace {
  std::vector<double> states;  // x_0 .. x_T
  std::uint64_t seed = 0;
  ConjugateModel model;
  std::string generator{kGeneratorId};

  int steps() const { return static_cast<int>(states.size()) - 1; }
};

/// y ~ K(x, .), then x' ~ L(y, .), `steps` times.
ChainTrace run_x_chain(const ConjugateModel& model, double x0, int steps, std::uint64_t seed);

using RationalMatrix = std::vector<std::vector<Rational>>;

struct ExactTransition {
  RationalMatrix k;                  // k[x][x'], x, x' = 0..n
  std::vector<Rational> stationary;  // mu
  std::vector<Rational> eigenvalues; // rho_j^2, j = 0..n
};

/// Finite model only: Beta integrals in rational arithmetic.
ExactTransition exact_transition_matrix(const ConjugateModel& model);

struct EigenCheck {
  double residual = 0.0;  // max over the grid of |T p_n - rho_n^2 p_n|
  double eigenvalue = 0.0;
  int grid_points = 0;
  /// Residual computed in rational arithmetic.
  bool exact = false;
};

/// Exact matrix action for the finite model; otherwise nested Gauss rules
/// (in extended precision) for K(x, .) and L(y, .) at the `resolution`
/// Gauss nodes of mu.
EigenCheck spectral_eigencheck(const ConjugateModel& model, int n, int resolution = 64);

struct AutocorrFit {
  std::map<int, double> autocorrelation;  // lag -> corr of p_n(X_t)
  double rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double expected = 0.0;  // rho_n^2
  int lags_used = 0;
};

/// Autocorrelation of p_n(X_t) and a log-linear fit of its decay through
/// the origin; the interval comes from ten batch estimates.
AutocorrFit autocorrelation_vs_spectrum(const ChainTrace& trace, int n, int max_lag);

/// sum_{n=1..N} rho_n^{4 ell} p_n(x)^2: rho_n^2 is the eigenvalue, and the
/// chi-square distance after ell steps carries its square.
double chisq_decay_bound(const LancasterSequence& seq, const RecurrenceCoeffs& basis, double x, int ell,
                         int N);

}  // namespace lancaster_lab

#endif  // LANCASTER_LAB_GIBBS_HPP
