#ifndef LANCASTER_LAB_ORTHOPOLY_HPP
#define LANCASTER_LAB_ORTHOPOLY_HPP

// Orthonormal polynomial systems for the marginal measures.
//
// Recurrences are stored in monic form,
//   P_{k+1}(x) = (x - alpha_k) P_k(x) - beta_k P_{k-1}(x),   beta_0 = mass,
// so that the orthonormal p_n = P_n / sqrt(beta_1 ... beta_n) satisfy
//   sqrt(beta_{k+1}) p_{k+1}(x) = (x - alpha_k) p_k(x) - sqrt(beta_k) p_{k-1}(x).
// The monic form has no square roots, so the closed forms below also run in
// exact rational arithmetic.

#include <array>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "lancaster_lab/common.hpp"
#include "lancaster_lab/extended.hpp"
#include "lancaster_lab/measure.hpp"

namespace lancaster_lab {

struct MomentSequence {
  std::vector<Extended> values;  // m_0 .. m_N
  /// True when every value came from a finite closed-form computation.
  bool exact = false;
  /// Absolute error bound reported by numeric integration (0 when exact).
  double error_estimate = 0.0;

  int max_order() const { return static_cast<int>(values.size()) - 1; }
  double operator[](int k) const { return static_cast<double>(values[k]); }
};

/// m_k = \int x^k dmu for k = 0..max_order (max_order <= kMaxMomentOrder).
MomentSequence moments(const Measure& measure, int max_order);

enum class RecurrenceMode { oracle, fast_path };

struct RecurrenceCoeffs {
  Measure measure = Measure::gaussian();
  RecurrenceMode mode = RecurrenceMode::fast_path;
  Eigen::VectorXd alpha;  // alpha_0 .. alpha_N
  Eigen::VectorXd beta;   // beta_0 = 1, beta_1 .. beta_N
  Eigen::VectorXd lead;   // coefficient of x^n in p_n, n = 0..N

  int degree() const { return static_cast<int>(alpha.size()) - 1; }
};

/// Fast path: closed forms for every parametric family except Cartier-Dunau,
/// whose recurrence always comes from the moment oracle. Oracle: Chebyshev's
/// algorithm on extended-precision moments.
RecurrenceCoeffs recurrence(const Measure& measure, int N,
                            RecurrenceMode mode = RecurrenceMode::fast_path);

/// p_n(x) by forward recurrence.
double eval_orthonormal(const RecurrenceCoeffs& rec, int n, double x);
/// p_0(x) .. p_N(x).
Eigen::VectorXd eval_orthonormal_all(const RecurrenceCoeffs& rec, int N, double x);

struct LeadingCoeff {
  double lead;  // coefficient of x^n in p_n
  /// c_n = 1 / (n!^2 lead^2) = prod_k beta_k / k^2. This reproduces
  /// c_n(q) = (q)_n / n! for the gamma and hyperbolic families; any
  /// lambda-free factor cancels in the Eagleson ratio.
  double c;
};
LeadingCoeff leading_coeff(const RecurrenceCoeffs& rec, int n);

struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
/// Golub-Welsch on the symmetric tridiagonal (Jacobi) matrix.
GaussRule quadrature(const RecurrenceCoeffs& rec, int n_nodes);

enum class GramMethod {
  moments,     // extended-precision moment Hankel, independent of quadrature
  atoms,       // exact finite sum, finite discrete measures only
  quadrature,  // Gauss rule with at least N + 1 nodes
};
/// G_mn = \int p_m p_n dmu for m, n <= N.
Eigen::MatrixXd gram_matrix(const RecurrenceCoeffs& rec, int N, GramMethod method);

/// Monic recurrence of a Krawtchouk/Hahn-type measure in exact arithmetic,
/// then checks G_mn == delta_mn * prod beta exactly over the exact atoms.
bool exact_gram_is_identity(const Measure& measure, int N);

// --- scalar-generic building blocks ---------------------------------------

template <class Scalar>
struct MonicRecurrence {
  Vector<Scalar> alpha;  // size N + 1
  Vector<Scalar> beta;   // size N + 1, beta(0) = mass
};

/// Closed-form monic coefficients. Parameters in the order documented on
/// Family (integer parameters passed as Scalar).
template <class Scalar>
MonicRecurrence<Scalar> closed_form_recurrence(Family family,
                                               const std::array<Scalar, 3>& p,
                                               int N);

/// Chebyshev's algorithm: moments m_0..m_{2N+1} -> alpha_0..alpha_N,
/// beta_0..beta_N. Throws indefinite_hankel when some beta_k <= 0.
template <class Scalar>
MonicRecurrence<Scalar> chebyshev_algorithm(const std::vector<Scalar>& m, int N);

/// p_0(x)..p_N(x) from monic coefficients (orthonormal normalization).
template <class Scalar>
Vector<Scalar> orthonormal_values(const Vector<Scalar>& alpha,
                                  const Vector<Scalar>& beta, int N,
                                  const Scalar& x) {
  using std::sqrt;
  Vector<Scalar> p(N + 1);
  p(0) = Scalar(1) / sqrt(beta(0));
  if (N >= 1) p(1) = (x - alpha(0)) * p(0) / sqrt(beta(1));
  for (int k = 1; k < N; ++k) {
    p(k + 1) = ((x - alpha(k)) * p(k) - sqrt(beta(k)) * p(k - 1)) / sqrt(beta(k + 1));
  }
  return p;
}

/// Golub-Welsch: n-point Gauss rule from monic coefficients (weights scaled
/// by beta(0)). Nodes ascending. Weights come from the Christoffel function
/// 1 / sum_k p_k(x_i)^2, which keeps tiny tail weights relatively accurate.
template <class Scalar>
std::pair<Vector<Scalar>, Vector<Scalar>> gauss_rule(const Vector<Scalar>& alpha,
                                                     const Vector<Scalar>& beta, int n) {
  using std::sqrt;
  Vector<Scalar> diag = alpha.head(n);
  Vector<Scalar> sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub(k - 1) = sqrt(beta(k));
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::eigensolver_failure, "tridiagonal eigensolver did not converge");
  }
  Vector<Scalar> unit_beta = beta;
  unit_beta(0) = Scalar(1);
  Vector<Scalar> weights(n);
  for (int i = 0; i < n; ++i) {
    const Vector<Scalar> p = orthonormal_values<Scalar>(alpha, unit_beta, n - 1, solver.eigenvalues()(i));
    weights(i) = beta(0) / p.squaredNorm();
  }
  return {solver.eigenvalues(), weights};
}

/// Coefficients (in x^0..x^n) of the monic P_0..P_N.
template <class Scalar>
std::vector<std::vector<Scalar>> monic_coefficients(const Vector<Scalar>& alpha,
                                                    const Vector<Scalar>& beta,
                                                    int N) {
  std::vector<std::vector<Scalar>> P(N + 1);
  P[0] = {Scalar(1)};
  if (N >= 1) P[1] = {-alpha(0), Scalar(1)};
  for (int k = 1; k < N; ++k) {
    std::vector<Scalar> next(k + 2, Scalar(0));
    for (int i = 0; i <= k; ++i) {
      next[i + 1] += P[k][i];
      next[i] -= alpha(k) * P[k][i];
    }
    for (int i = 0; i < k; ++i) next[i] -= beta(k) * P[k - 1][i];
    P[k + 1] = std::move(next);
  }
  return P;
}

/// Pochhammer (x)_n.
template <class Scalar>
Scalar rising(const Scalar& x, int n) {
  Scalar r(1);
  for (int i = 0; i < n; ++i) r *= x + i;
  return r;
}

// --- template definitions --------------------------------------------------

template <class Scalar>
MonicRecurrence<Scalar> closed_form_recurrence(Family family,
                                               const std::array<Scalar, 3>& p,
                                               int N) {
  MonicRecurrence<Scalar> r;
  r.alpha = Vector<Scalar>::Zero(N + 1);
  r.beta = Vector<Scalar>::Zero(N + 1);
  r.beta(0) = Scalar(1);
  const Scalar one(1), two(2), four(4);

  // Symmetric-or-not Jacobi on [-1, 1] with weight (1-x)^al (1+x)^be.
  auto jacobi = [&](const Scalar& al, const Scalar& be, auto&& store) {
    const Scalar s = al + be;
    for (int n = 0; n <= N; ++n) {
      Scalar a;
      if (n == 0) {
        a = (be - al) / (s + two);
      } else {
        a = (be * be - al * al) / ((two * n + s) * (two * n + s + two));
      }
      Scalar b(0);
      if (n == 1) {
        b = four * (one + al) * (one + be) / ((two + s) * (two + s) * (Scalar(3) + s));
      } else if (n > 1) {
        const Scalar d = two * n + s;
        b = four * n * (n + al) * (n + be) * (n + s) / (d * d * (d + one) * (d - one));
      }
      store(n, a, b);
    }
  };

  switch (family) {
    case Family::gaussian:
      for (int n = 0; n <= N; ++n) {
        r.alpha(n) = p[0];
        if (n > 0) r.beta(n) = p[1] * n;
      }
      break;
    case Family::poisson:
      for (int n = 0; n <= N; ++n) {
        r.alpha(n) = p[0] + n;
        if (n > 0) r.beta(n) = p[0] * n;
      }
      break;
    case Family::binomial: {
      const Scalar& m = p[0];
      const Scalar& q = p[1];
      for (int n = 0; n <= N; ++n) {
        r.alpha(n) = q * (m - n) + (one - q) * n;
        if (n > 0) r.beta(n) = Scalar(n) * (m - n + one) * q * (one - q);
      }
      break;
    }
    case Family::negative_binomial: {
      const Scalar& a = p[0];
      const Scalar& s = p[1];
      for (int n = 0; n <= N; ++n) {
        r.alpha(n) = (Scalar(n) + (s + n) * a) / (one - a);
        if (n > 0) r.beta(n) = Scalar(n) * (s + n - one) * a / ((one - a) * (one - a));
      }
      break;
    }
    case Family::gamma: {
      const Scalar& s = p[0];
      const Scalar& c = p[1];
      for (int n = 0; n <= N; ++n) {
        r.alpha(n) = c * (two * n + s);
        if (n > 0) r.beta(n) = c * c * n * (s + n - one);
      }
      break;
    }
    case Family::hyperbolic:
      for (int n = 1; n <= N; ++n) r.beta(n) = Scalar(n) * (p[0] + n - one);
      break;
    case Family::jacobi:
      jacobi(p[1] - one, p[0] - one, [&](int n, const Scalar& a, const Scalar& b) {
        r.alpha(n) = a;
        if (n > 0) r.beta(n) = b;
      });
      break;
    case Family::beta:
      jacobi(p[1] - one, p[0] - one, [&](int n, const Scalar& a, const Scalar& b) {
        r.alpha(n) = (a + one) / two;
        if (n > 0) r.beta(n) = b / four;
      });
      break;
    case Family::beta_binomial: {
      // Hahn polynomials Q_n(x; a - 1, b - 1, n_trials).
      const Scalar& M = p[0];
      const Scalar al = p[1] - one;
      const Scalar be = p[2] - one;
      const Scalar s = al + be;
      auto A = [&](int k) -> Scalar {
        if (k == 0) return (al + one) * M / (s + two);
        return (Scalar(k) + s + one) * (Scalar(k) + al + one) * (M - k) /
               ((two * k + s + one) * (two * k + s + two));
      };
      auto C = [&](int k) -> Scalar {
        if (k == 0) return Scalar(0);
        return Scalar(k) * (Scalar(k) + s + M + one) * (Scalar(k) + be) /
               ((two * k + s) * (two * k + s + one));
      };
      for (int n = 0; n <= N; ++n) {
        r.alpha(n) = A(n) + C(n);
        if (n > 0) r.beta(n) = A(n - 1) * C(n);
      }
      break;
    }
    default:
      fail(ErrorCode::unsupported_family,
           std::string("no closed-form recurrence for family ") +
               std::string(family_name(family)));
  }
  return r;
}

template <class Scalar>
MonicRecurrence<Scalar> chebyshev_algorithm(const std::vector<Scalar>& m, int N) {
  const int n = N + 1;  // number of (alpha, beta) pairs
  if (static_cast<int>(m.size()) < 2 * n) {
    fail(ErrorCode::order_too_large, "chebyshev_algorithm needs moments up to 2N+1");
  }
  MonicRecurrence<Scalar> r;
  r.alpha = Vector<Scalar>::Zero(n);
  r.beta = Vector<Scalar>::Zero(n);
  if (!(m[0] > 0)) fail(ErrorCode::indefinite_hankel, "m_0 must be positive");
  r.alpha(0) = m[1] / m[0];
  r.beta(0) = m[0];

  std::vector<Scalar> prev(2 * n, Scalar(0));
  std::vector<Scalar> cur(m.begin(), m.begin() + 2 * n);
  for (int k = 1; k < n; ++k) {
    std::vector<Scalar> next(2 * n, Scalar(0));
    for (int l = k; l < 2 * n - k; ++l) {
      next[l] = cur[l + 1] - r.alpha(k - 1) * cur[l] - r.beta(k - 1) * prev[l];
    }
    if (!(next[k] > 0)) {
      fail(ErrorCode::indefinite_hankel,
           "moment Hankel matrix is not positive definite at order " + std::to_string(k));
    }
    r.alpha(k) = next[k + 1] / next[k] - cur[k] / cur[k - 1];
    r.beta(k) = next[k] / cur[k - 1];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return r;
}

}  // namespace lancaster_lab

#endif  // LANCASTER_LAB_ORTHOPOLY_HPP
