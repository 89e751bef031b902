#include "lancaster_lab/orthopoly.hpp"

#include <cmath>

#include "internal.hpp"

namespace lancaster_lab {

namespace {

bool has_closed_form(Family family) {
  switch (family) {
    case Family::gaussian:
    case Family::poisson:
    case Family::binomial:
    case Family::negative_binomial:
    case Family::gamma:
    case Family::hyperbolic:
    case Family::beta:
    case Family::jacobi:
    case Family::beta_binomial:
      return true;
    default:
      return false;
  }
}

template <class S>
std::array<S, 3> family_params(const Measure& measure) {
  std::array<S, 3> p{S(0), S(0), S(0)};
  const auto& entries = measure.params().entries();
  for (std::size_t i = 0; i < entries.size() && i < 3; ++i) p[i] = S(entries[i].second);
  return p;
}

std::array<Rational, 3> rational_params(const Measure& measure) {
  std::array<Rational, 3> p{Rational(0), Rational(0), Rational(0)};
  const auto& entries = measure.params().entries();
  for (std::size_t i = 0; i < entries.size() && i < 3; ++i) p[i] = to_rational(entries[i].second);
  return p;
}

void check_degree(const RecurrenceCoeffs& rec, int n) {
  if (n < 0 || n > rec.degree()) {
    fail(ErrorCode::degree_out_of_range,
         "degree " + std::to_string(n) + " outside 0.." + std::to_string(rec.degree()));
  }
}

}  // namespace

RecurrenceCoeffs recurrence(const Measure& measure, int N, RecurrenceMode mode) {
  if (N < 0) fail(ErrorCode::degree_out_of_range, "negative degree");
  if (measure.atom_count() != std::numeric_limits<std::size_t>::max() &&
      static_cast<std::size_t>(N) >= measure.atom_count()) {
    fail(ErrorCode::degree_exceeds_support,
         measure.name() + " has " + std::to_string(measure.atom_count()) +
             " atoms; degrees above " + std::to_string(measure.atom_count() - 1) + " vanish");
  }
  const bool fast = mode == RecurrenceMode::fast_path && has_closed_form(measure.family());
  if (!fast && N > kMaxDegree) {
    fail(ErrorCode::degree_out_of_range,
         "moment-based recurrence is capped at degree " + std::to_string(kMaxDegree));
  }
  if (fast && N > kMaxFastPathDegree) {
    fail(ErrorCode::degree_out_of_range,
         "closed-form recurrence is capped at degree " + std::to_string(kMaxFastPathDegree));
  }

  RecurrenceCoeffs rec{measure, mode, {}, {}, {}};
  if (fast) {
    const auto r = closed_form_recurrence<double>(measure.family(), family_params<double>(measure), N);
    rec.alpha = r.alpha;
    rec.beta = r.beta;
  } else {
    const auto m = moments(measure, 2 * N + 1);
    const auto r = chebyshev_algorithm<Extended>(m.values, N);
    rec.alpha.resize(N + 1);
    rec.beta.resize(N + 1);
    for (int k = 0; k <= N; ++k) {
      rec.alpha(k) = static_cast<double>(r.alpha(k));
      rec.beta(k) = static_cast<double>(r.beta(k));
    }
  }
  rec.beta(0) = 1.0;
  for (int k = 1; k <= N; ++k) {
    if (!(rec.beta(k) > 0.0)) {
      fail(ErrorCode::indefinite_hankel, "nonpositive beta_" + std::to_string(k) + " for " + measure.name());
    }
  }
  rec.lead.resize(N + 1);
  rec.lead(0) = 1.0;
  for (int k = 1; k <= N; ++k) rec.lead(k) = rec.lead(k - 1) / std::sqrt(rec.beta(k));
  return rec;
}

double eval_orthonormal(const RecurrenceCoeffs& rec, int n, double x) {
  check_degree(rec, n);
  double prev = 0.0;
  double cur = 1.0;
  for (int k = 0; k < n; ++k) {
    const double next =
        ((x - rec.alpha(k)) * cur - (k > 0 ? std::sqrt(rec.beta(k)) * prev : 0.0)) /
        std::sqrt(rec.beta(k + 1));
    prev = cur;
    cur = next;
  }
  return cur;
}

Eigen::VectorXd eval_orthonormal_all(const RecurrenceCoeffs& rec, int N, double x) {
  check_degree(rec, N);
  return orthonormal_values<double>(rec.alpha, rec.beta, N, x);
}

LeadingCoeff leading_coeff(const RecurrenceCoeffs& rec, int n) {
  check_degree(rec, n);
  double c = 1.0;
  for (int k = 1; k <= n; ++k) c *= rec.beta(k) / (static_cast<double>(k) * k);
  return {rec.lead(n), c};
}

GaussRule quadrature(const RecurrenceCoeffs& rec, int n_nodes) {
  if (n_nodes < 1 || n_nodes > rec.degree()) {
    fail(ErrorCode::degree_out_of_range,
         "quadrature needs 1 <= n_nodes <= " + std::to_string(rec.degree()));
  }
  auto [nodes, weights] = gauss_rule<double>(rec.alpha, rec.beta, n_nodes);
  return {std::move(nodes), std::move(weights)};
}

Eigen::MatrixXd gram_matrix(const RecurrenceCoeffs& rec, int N, GramMethod method) {
  check_degree(rec, N);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N + 1, N + 1);
  switch (method) {
    case GramMethod::atoms: {
      for (const auto& atom : rec.measure.atoms()) {
        const Eigen::VectorXd p = eval_orthonormal_all(rec, N, atom.point);
        G.noalias() += atom.mass * p * p.transpose();
      }
      break;
    }
    case GramMethod::quadrature: {
      if (rec.degree() < N + 1) {
        fail(ErrorCode::degree_out_of_range, "quadrature Gram matrix needs a recurrence of degree N + 1");
      }
      const GaussRule rule = quadrature(rec, N + 1);
      for (int i = 0; i <= N; ++i) {
        const Eigen::VectorXd p = eval_orthonormal_all(rec, N, rule.nodes(i));
        G.noalias() += rule.weights(i) * p * p.transpose();
      }
      break;
    }
    case GramMethod::moments: {
      const auto m = moments(rec.measure, 2 * N);
      Vector<Extended> alpha(N + 1);
      Vector<Extended> beta(N + 1);
      for (int k = 0; k <= N; ++k) {
        alpha(k) = rec.alpha(k);
        beta(k) = rec.beta(k);
      }
      const auto P = monic_coefficients<Extended>(alpha, beta, N);
      std::vector<Extended> norm(N + 1);
      norm[0] = 1;
      for (int k = 1; k <= N; ++k) norm[k] = norm[k - 1] * beta(k);
      for (int i = 0; i <= N; ++i) {
        for (int j = 0; j <= i; ++j) {
          Extended s(0);
          for (std::size_t u = 0; u < P[i].size(); ++u) {
            for (std::size_t v = 0; v < P[j].size(); ++v) s += P[i][u] * P[j][v] * m.values[u + v];
          }
          G(i, j) = G(j, i) = static_cast<double>(s / sqrt(norm[i] * norm[j]));
        }
      }
      break;
    }
  }
  return G;
}

bool exact_gram_is_identity(const Measure& measure, int N) {
  if (measure.atom_count() == std::numeric_limits<std::size_t>::max()) {
    fail(ErrorCode::infinite_support, measure.name() + " is not finitely supported");
  }
  if (static_cast<std::size_t>(N) >= measure.atom_count()) {
    fail(ErrorCode::degree_exceeds_support, "degree exceeds the number of atoms");
  }
  MonicRecurrence<Rational> r;
  if (measure.family() == Family::atoms) {
    r = chebyshev_algorithm<Rational>(detail::exact_rational_moments(measure, 2 * N + 1), N);
  } else {
    r = closed_form_recurrence<Rational>(measure.family(), rational_params(measure), N);
  }
  const auto P = monic_coefficients<Rational>(r.alpha, r.beta, N);
  const auto masses = measure.exact_masses();
  const auto atoms = measure.atoms();

  // Values of each monic P_k at each atom, exactly.
  std::vector<std::vector<Rational>> values(N + 1, std::vector<Rational>(atoms.size()));
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const Rational x = to_rational(atoms[a].point);
    for (int k = 0; k <= N; ++k) {
      Rational v(0);
      for (std::size_t i = P[k].size(); i-- > 0;) v = v * x + P[k][i];
      values[k][a] = v;
    }
  }
  Rational norm(1);
  for (int i = 0; i <= N; ++i) {
    if (i > 0) norm *= r.beta(i);
    for (int j = 0; j <= i; ++j) {
      Rational s(0);
      for (std::size_t a = 0; a < atoms.size(); ++a) s += masses[a] * values[i][a] * values[j][a];
      if (s != (i == j ? norm : Rational(0))) return false;
    }
  }
  return true;
}

}  // namespace lancaster_lab
