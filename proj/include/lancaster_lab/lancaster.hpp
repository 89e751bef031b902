#ifndef LANCASTER_LAB_LANCASTER_HPP
#define LANCASTER_LAB_LANCASTER_HPP

// Lancaster sequences and bivariate Lancaster laws
//   sigma(dx, dy) = [ sum_n rho_n p_n(x) q_n(y) ] mu(dx) nu(dy),
// with p_n, q_n orthonormal for the margins mu, nu and positive leading
// coefficients. The canonical rho_n is E[p_n(X) q_n(Y)].

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lancaster_lab/common.hpp"
#include "lancaster_lab/extended.hpp"
#include "lancaster_lab/measure.hpp"
#include "lancaster_lab/nef.hpp"
#include "lancaster_lab/orthopoly.hpp"
#include "lancaster_lab/rng.hpp"

namespace lancaster_lab {

struct LancasterSequence {
  std::vector<double> rho;  // rho_0 .. rho_N
  Measure margin_x = Measure::gaussian();
  Measure margin_y = Measure::gaussian();
  std::string provenance;
  /// Values as printed by a closed formula when they differ from the
  /// canonical E[p_n(X) q_n(Y)] (beta-binomial).
  std::optional<std::vector<double>> printed_variant;
  std::string printed_note;

  int N() const { return static_cast<int>(rho.size()) - 1; }
  /// rho_n, or 0 past the stored range when the margins are finite.
  double operator[](int n) const { return rho.at(n); }
  /// rho_n^2: the x-chain eigenvalues.
  std::vector<double> eigenvalues() const;
};

/// Independence: (1, 0, 0, ...).
LancasterSequence seq_independence(const Measure& mu, const Measure& nu, int N);

/// sigma = (a+b)/B(a,b) x^{a-1} y^{b-1} on {x, y > 0, x + y < 1}; margins
/// beta(a, b+1) and beta(b, a+1).
LancasterSequence seq_buja(double a, double b, int N);

/// X | theta ~ Binomial(n, theta), theta ~ beta(a, b). rho holds the
/// canonical signed values; printed_variant holds n! / ((a+b+n)_j (n-j)!),
/// which equals rho_j^2.
LancasterSequence seq_beta_binomial(int n, double a, double b);
/// (rho_j^canonical)^2 exactly, for rational a, b.
Rational beta_binomial_rho_squared(int n, double a, double b, int j);

/// (S, T) = (X + Y, Y + Z) with X, Y, Z independent in F(mu^lambda),
/// F(mu^eta), F(mu^xi): rho_n = c_n(eta) / sqrt(c_n(lambda+eta) c_n(eta+xi)).
LancasterSequence seq_eagleson(const NefSpec& nef, double lambda, double eta, double xi, int N);

struct HyperbolicBeta {
  LancasterSequence sequence;
  std::vector<double> beta_moments;  // \int t^n beta_{eta, q-eta}(dt)
  double max_abs_difference = 0.0;
};
/// rho_n = c_n(eta) / c_n(q) = (eta)_n / (q)_n on hyperbolic(q) margins.
HyperbolicBeta seq_hyperbolic_beta(double q, double eta, int N);

enum class CrossKind { poisson, negbin, negbin_gamma };
/// rho_n = t^n on the cross margins:
///   poisson(a, b):        Poisson(a), Poisson(b),        0 <= t <= sqrt(a/b), a <= b
///   negbin(a, b, lambda): NB(a, lambda), NB(b, lambda),  0 <= t <= sqrt(a/b), a <= b
///   negbin_gamma(a, lambda): NB(a, lambda), gamma(lambda), 0 <= t <= sqrt(a)
LancasterSequence seq_geometric_cross(CrossKind kind, const Params& params, double t, int N);

/// rho_n = r^n on gamma(q) margins (Kibble-Moran).
LancasterSequence seq_kibble(double q, double r, int N);

/// a_n rho_n b_n with a on (mu, mu) and b on (nu, nu).
LancasterSequence seq_product(const LancasterSequence& a, const LancasterSequence& rho,
                              const LancasterSequence& b);

struct BivariateLancaster {
  LancasterSequence sequence;
  RecurrenceCoeffs basis_x;
  RecurrenceCoeffs basis_y;
  int N = 0;
};
/// Truncation is clipped to the degrees the margins support.
BivariateLancaster make_bivariate(const LancasterSequence& sequence, int N);

struct PartialSums {
  std::vector<double> sums;  // S_0 .. S_N
  /// max |S_k - S_N| over the last five k.
  double oscillation = 0.0;
  /// oscillation < 1e-6 |S_N|.
  bool stabilized = false;
};
PartialSums stabilization(std::vector<double> sums, double floor = 0.0);

/// Partial sums of sum_n rho_n p_n(x) q_n(y), the density of sigma with
/// respect to mu x nu.
PartialSums density_truncated(const BivariateLancaster& biv, double x, double y, int N);

// --- verification ------------------------------------------------------------

enum class SupportCase { C, D };
enum class Verdict { consistent, refuted, gamma_unstable };
std::string_view verdict_name(Verdict verdict);

struct HankelCheck {
  std::string name;  // e.g. "m_{i+j}"
  int size = 0;
  double min_eigenvalue = 0.0;
  double tolerance = 0.0;
  bool passed = true;
};

struct VerifyReport {
  Verdict verdict = Verdict::consistent;
  SupportCase support_case = SupportCase::D;
  double gamma_estimate = 1.0;
  std::vector<double> gamma_trend;   // last few gamma proxies
  std::vector<double> rescaled;      // m_n = a_n rho_n / (b_n gamma^n)
  std::vector<HankelCheck> checks;
  std::optional<std::pair<double, double>> witness;
  std::vector<std::string> notes;
  /// Consistency never proves membership in the Lancaster class.
  bool one_sided = true;
};

/// Tyan-Thomas necessary condition: a_n rho_n / b_n must be the moments of a
/// probability on [-gamma, gamma] (case C, both supports the real line) or
/// [0, gamma] (case D, both supports half-lines).
VerifyReport verify_moment_representation(const LancasterSequence& rho, SupportCase support_case,
                                          int N);

// --- joint models and the canonical oracle -----------------------------------

/// A bivariate law with its margins, a sampler and, when tractable, exact
/// mixed moments E[X^i Y^k].
struct JointModel {
  std::string name;
  Measure margin_x = Measure::gaussian();
  Measure margin_y = Measure::gaussian();
  std::function<std::pair<double, double>(Rng&)> sample;
  std::function<Extended(int, int)> joint_moment;
};

JointModel buja_model(double a, double b);
/// (X, theta) with theta ~ beta(a, b), X | theta ~ Binomial(n, theta).
JointModel beta_binomial_model(int n, double a, double b);
/// (S, T) of the Eagleson construction; no sampler for the hyperbolic family.
JointModel eagleson_model(const NefSpec& nef, double lambda, double eta, double xi);
JointModel kibble_model(double q, double r);

struct RhoEstimate {
  double value = 0.0;
  double std_error = 0.0;
  bool exact = false;
  std::uint64_t samples = 0;
};

/// E[p_n(X) q_n(Y)]: exact through joint moments when available (and
/// prefer_exact), otherwise the Monte Carlo mean over `budget` draws.
/// Throws budget_too_small when the standard error exceeds tolerance.
RhoEstimate estimate_rho(const JointModel& model, int n, std::uint64_t budget, std::uint64_t seed,
                         double tolerance = std::numeric_limits<double>::infinity(),
                         bool prefer_exact = true);

// --- Kibble-Moran -------------------------------------------------------------

struct PointMixing {
  double r;
};
struct BetaMixing {
  double eta;  // beta(eta, q - eta)
};
struct HistogramMixing {
  std::vector<std::pair<double, double>> atoms;  // (r, weight)
};
using Mixing = std::variant<PointMixing, BetaMixing, HistogramMixing>;

/// \int_0^1 (1 + s + t + (1 - r) s t)^{-q} alpha(dr).
double kibble_laplace(double q, const Mixing& mixing, double s, double t);

/// X ~ gamma(q); N | X ~ Poisson(r X / (1 - r)); Y | N ~ gamma(q + N, 1 - r).
/// r = 1 gives Y = X.
std::pair<double, double> sample_kibble(Rng& rng, double q, double r);

}  // namespace lancaster_lab

#endif  // LANCASTER_LAB_LANCASTER_HPP
