#include "lancaster_lab/lancaster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "internal.hpp"

namespace lancaster_lab {

namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    fail(ErrorCode::nonpositive_parameter, std::string(what) + " must be positive");
  }
}

void require_length(int N) {
  if (N < 0 || N > kMaxFastPathDegree) {
    fail(ErrorCode::degree_out_of_range,
         "N must lie in [0, " + std::to_string(kMaxFastPathDegree) + "]");
  }
}

LancasterSequence make_sequence(std::vector<double> rho, Measure mu, Measure nu,
                                std::string provenance) {
  LancasterSequence s{std::move(rho), std::move(mu), std::move(nu), std::move(provenance), {}, {}};
  s.rho[0] = 1.0;
  return s;
}

/// E[P_n(X) Q_n(Y)] for the monic P_n, Q_n, and the product of their
/// squared norms. rho_n = numerator / sqrt(norms).
template <class S>
std::pair<S, S> canonical_parts(const MonicRecurrence<S>& rx, const MonicRecurrence<S>& ry, int n,
                                const std::function<S(int, int)>& joint) {
  const auto P = monic_coefficients<S>(rx.alpha, rx.beta, n)[n];
  const auto Q = monic_coefficients<S>(ry.alpha, ry.beta, n)[n];
  S num(0);
  for (int i = 0; i <= n; ++i) {
    if (P[i] == 0) continue;
    for (int k = 0; k <= n; ++k) {
      if (Q[k] == 0) continue;
      num += P[i] * Q[k] * joint(i, k);
    }
  }
  S norms(1);
  for (int k = 1; k <= n; ++k) norms *= rx.beta(k) * ry.beta(k);
  return {num, norms};
}

/// E[X^i theta^k] for theta ~ beta(a, b), X | theta ~ Binomial(n, theta).
template <class S>
std::function<S(int, int)> beta_binomial_joint(int n, S a, S b, int max_order) {
  const auto st = detail::stirling2(max_order);
  std::vector<S> theta(2 * max_order + 1, S(1));
  for (int r = 1; r <= 2 * max_order; ++r) theta[r] = theta[r - 1] * (a + (r - 1)) / (a + b + (r - 1));
  std::vector<S> falling(max_order + 1, S(1));
  for (int m = 1; m <= max_order; ++m) falling[m] = falling[m - 1] * S(n - m + 1);
  return [st, theta, falling](int i, int k) {
    S total(0);
    for (int m = 0; m <= i; ++m) total += S(st[i][m]) * falling[m] * theta[m + k];
    return total;
  };
}

/// log c_n for n = 0..N from a closed-form monic recurrence; -inf once the
/// degree passes the support.
std::vector<double> log_c(const Measure& measure, int N) {
  std::array<double, 3> p{0, 0, 0};
  const auto& entries = measure.params().entries();
  for (std::size_t i = 0; i < entries.size() && i < 3; ++i) p[i] = entries[i].second;
  const auto rec = closed_form_recurrence<double>(measure.family(), p, N);
  std::vector<double> out(N + 1, 0.0);
  for (int k = 1; k <= N; ++k) {
    const double b = rec.beta(k);
    out[k] = (b > 0.0 && std::isfinite(out[k - 1]))
                 ? out[k - 1] + std::log(b) - 2.0 * std::log(static_cast<double>(k))
                 : -std::numeric_limits<double>::infinity();
  }
  return out;
}

double nef_draw(Rng& rng, const NefSpec& nef, double lambda) {
  if (lambda == 0.0) return 0.0;
  switch (nef.family()) {
    case NefFamily::gaussian:
      return sample_normal(rng, 0.0, std::sqrt(lambda));
    case NefFamily::poisson:
      return static_cast<double>(sample_poisson(rng, lambda));
    case NefFamily::binomial:
      return static_cast<double>(
          sample_binomial(rng, std::lround(lambda * nef.shape()), 0.5));
    case NefFamily::negative_binomial:
      // NB(a = 1/2, lambda r): Poisson with a gamma(lambda r, 1) mean
      return static_cast<double>(sample_poisson(rng, sample_gamma(rng, lambda * nef.shape(), 1.0)));
    case NefFamily::gamma:
      return sample_gamma(rng, lambda * nef.shape(), 1.0);
    case NefFamily::hyperbolic:
      break;
  }
  fail(ErrorCode::unsupported_model, "no sampler for " + nef.name());
}

std::vector<Extended> component_moments(const NefSpec& nef, double lambda, int K) {
  if (lambda == 0.0) {
    std::vector<Extended> m(K + 1, Extended(0));
    m[0] = 1;
    return m;
  }
  return moments(nef.power(lambda), K).values;
}

double min_eigenvalue(const Eigen::MatrixXd& H) {
  if (H.rows() == 1) return H(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::eigensolver_failure, "Hankel eigensolver did not converge");
  }
  return solver.eigenvalues().minCoeff();
}

HankelCheck hankel_check(std::string name, const std::vector<double>& m, int shift,
                         const std::function<double(int)>& entry) {
  const int N = static_cast<int>(m.size()) - 1;
  const int K = (N - shift) / 2;
  HankelCheck check;
  check.name = std::move(name);
  if (K < 0) {
    check.size = 0;
    return check;
  }
  Eigen::MatrixXd H(K + 1, K + 1);
  for (int i = 0; i <= K; ++i) {
    for (int j = 0; j <= K; ++j) H(i, j) = entry(i + j);
  }
  check.size = K + 1;
  check.min_eigenvalue = min_eigenvalue(H);
  check.tolerance = 1e-8 * H.cwiseAbs().colwise().sum().maxCoeff();
  check.passed = check.min_eigenvalue >= -check.tolerance;
  return check;
}

bool geometric(const std::vector<double>& rho, int N) {
  const double t = rho[1];
  if (!(std::abs(t) < 1.0) || t == 0.0) return false;
  for (int n = 2; n <= N; ++n) {
    if (std::abs(rho[n] - std::pow(t, n)) > 1e-12 * std::max(std::abs(rho[n]), 1e-300)) return false;
  }
  return true;
}

}  // namespace

std::vector<double> LancasterSequence::eigenvalues() const {
  std::vector<double> out(rho.size());
  std::transform(rho.begin(), rho.end(), out.begin(), [](double r) { return r * r; });
  return out;
}

LancasterSequence seq_independence(const Measure& mu, const Measure& nu, int N) {
  require_length(N);
  return make_sequence(std::vector<double>(N + 1, 0.0), mu, nu, "independence");
}

LancasterSequence seq_buja(double a, double b, int N) {
  require_positive(a, "a");
  require_positive(b, "b");
  require_length(N);
  std::vector<double> rho(N + 1);
  for (int n = 0; n <= N; ++n) {
    rho[n] = (n % 2 ? -1.0 : 1.0) * std::sqrt(a * b / ((a + n) * (b + n)));
  }
  return make_sequence(std::move(rho), Measure::beta(a, b + 1.0), Measure::beta(b, a + 1.0), "buja");
}

Rational beta_binomial_rho_squared(int n, double a, double b, int j) {
  if (n < 1) fail(ErrorCode::nonpositive_parameter, "n must be at least 1");
  require_positive(a, "a");
  require_positive(b, "b");
  if (j < 0) fail(ErrorCode::degree_out_of_range, "degree must be nonnegative");
  if (j > n) return Rational(0);
  const Rational ra = to_rational(a), rb = to_rational(b);
  const auto rx = closed_form_recurrence<Rational>(Family::beta_binomial, {Rational(n), ra, rb}, j);
  const auto ry = closed_form_recurrence<Rational>(Family::beta, {ra, rb, Rational(0)}, j);
  const auto [num, norms] = canonical_parts<Rational>(rx, ry, j, beta_binomial_joint<Rational>(n, ra, rb, j));
  return num * num / norms;
}

LancasterSequence seq_beta_binomial(int n, double a, double b) {
  if (n < 1) fail(ErrorCode::nonpositive_parameter, "n must be at least 1");
  require_positive(a, "a");
  require_positive(b, "b");
  const Rational ra = to_rational(a), rb = to_rational(b);
  const auto rx = closed_form_recurrence<Rational>(Family::beta_binomial, {Rational(n), ra, rb}, n);
  const auto ry = closed_form_recurrence<Rational>(Family::beta, {ra, rb, Rational(0)}, n);
  const auto joint = beta_binomial_joint<Rational>(n, ra, rb, n);
  std::vector<double> rho(n + 1), printed(n + 1);
  for (int j = 0; j <= n; ++j) {
    const auto [num, norms] = canonical_parts<Rational>(rx, ry, j, joint);
    const double r = std::sqrt(to_double(num * num / norms));
    rho[j] = num < 0 ? -r : r;
    double p = 1.0;
    for (int k = 0; k < j; ++k) p *= (n - k) / (a + b + n + k);
    printed[j] = p;
  }
  auto s = make_sequence(std::move(rho), Measure::beta_binomial(n, a, b), Measure::beta(a, b),
                         "beta_binomial");
  s.printed_variant = std::move(printed);
  s.printed_note =
      "printed n!/((a+b+n)_j (n-j)!) equals the eigenvalue rho_j^2, not the canonical "
      "rho_j = E[p_j(X) q_j(theta)]";
  return s;
}

LancasterSequence seq_eagleson(const NefSpec& nef, double lambda, double eta, double xi, int N) {
  require_length(N);
  for (const auto& [v, what] : {std::pair{lambda, "lambda"}, {eta, "eta"}, {xi, "xi"}}) {
    if (!jorgensen_contains(nef, v)) {
      fail(ErrorCode::jorgensen_violation,
           std::string(what) + " = " + format_real(v) + " is outside the Jorgensen set of " + nef.name());
    }
  }
  if (!(eta > 0.0)) fail(ErrorCode::jorgensen_violation, "eta must be positive");
  const Measure mx = nef.power(lambda + eta), my = nef.power(eta + xi);
  const auto ce = log_c(nef.power(eta), N);
  const auto cx = log_c(mx, N);
  const auto cy = log_c(my, N);
  std::vector<double> rho(N + 1, 0.0);
  for (int n = 0; n <= N; ++n) {
    if (std::isfinite(ce[n]) && std::isfinite(cx[n]) && std::isfinite(cy[n])) {
      rho[n] = std::exp(ce[n] - 0.5 * (cx[n] + cy[n]));
    }
  }
  return make_sequence(std::move(rho), mx, my, "eagleson:" + nef.name());
}

HyperbolicBeta seq_hyperbolic_beta(double q, double eta, int N) {
  require_positive(q, "q");
  require_length(N);
  if (!(eta >= 0.0 && eta <= q)) {
    fail(ErrorCode::eta_out_of_range, "eta must lie in [0, q]");
  }
  HyperbolicBeta out;
  std::vector<double> rho(N + 1, 1.0);
  for (int n = 1; n <= N; ++n) rho[n] = rho[n - 1] * (eta + n - 1) / (q + n - 1);
  out.beta_moments.assign(N + 1, 1.0);
  for (int n = 1; n <= N; ++n) {
    if (eta == 0.0) {
      out.beta_moments[n] = 0.0;
    } else if (eta < q) {
      out.beta_moments[n] = boost::math::beta(eta + n, q - eta) / boost::math::beta(eta, q - eta);
    }
    out.max_abs_difference = std::max(out.max_abs_difference, std::abs(out.beta_moments[n] - rho[n]));
  }
  if (out.max_abs_difference > 1e-12) {
    fail(ErrorCode::domain_error, "Pochhammer ratio and beta moments disagree by " +
                                      format_real(out.max_abs_difference));
  }
  out.sequence = make_sequence(std::move(rho), Measure::hyperbolic(q), Measure::hyperbolic(q),
                               "hyperbolic_beta");
  return out;
}

LancasterSequence seq_geometric_cross(CrossKind kind, const Params& params, double t, int N) {
  require_length(N);
  const double a = params.at("a");
  double bound = 0.0;
  Measure mx = Measure::gaussian(), my = Measure::gaussian();
  std::string tag;
  switch (kind) {
    case CrossKind::poisson: {
      const double b = params.at("b");
      require_positive(a, "a");
      require_positive(b, "b");
      if (a > b) fail(ErrorCode::invalid_argument, "cross sequence needs a <= b");
      bound = std::sqrt(a / b);
      mx = Measure::poisson(a);
      my = Measure::poisson(b);
      tag = "cross:poisson";
      break;
    }
    case CrossKind::negbin: {
      const double b = params.at("b"), lambda = params.at("lambda");
      if (a > b) fail(ErrorCode::invalid_argument, "cross sequence needs a <= b");
      mx = Measure::negative_binomial(a, lambda);
      my = Measure::negative_binomial(b, lambda);
      bound = std::sqrt(a / b);
      tag = "cross:negbin";
      break;
    }
    case CrossKind::negbin_gamma: {
      const double lambda = params.at("lambda");
      mx = Measure::negative_binomial(a, lambda);
      my = Measure::gamma(lambda, 1.0);
      bound = std::sqrt(a);
      tag = "cross:negbin_gamma";
      break;
    }
  }
  if (!(t >= 0.0 && t <= bound)) {
    fail(ErrorCode::t_out_of_range,
         "t = " + format_real(t) + " is outside [0, " + format_real(bound) + "]");
  }
  std::vector<double> rho(N + 1, 1.0);
  for (int n = 1; n <= N; ++n) rho[n] = rho[n - 1] * t;
  return make_sequence(std::move(rho), mx, my, tag);
}

LancasterSequence seq_kibble(double q, double r, int N) {
  require_positive(q, "q");
  require_length(N);
  if (!(r >= 0.0 && r <= 1.0)) fail(ErrorCode::t_out_of_range, "r must lie in [0, 1]");
  std::vector<double> rho(N + 1, 1.0);
  for (int n = 1; n <= N; ++n) rho[n] = rho[n - 1] * r;
  return make_sequence(std::move(rho), Measure::gamma(q), Measure::gamma(q), "kibble");
}

LancasterSequence seq_product(const LancasterSequence& a, const LancasterSequence& rho,
                              const LancasterSequence& b) {
  if (!(a.margin_x == a.margin_y) || !(a.margin_x == rho.margin_x)) {
    fail(ErrorCode::margin_mismatch, "left factor must live on (mu, mu) with mu the first margin");
  }
  if (!(b.margin_x == b.margin_y) || !(b.margin_x == rho.margin_y)) {
    fail(ErrorCode::margin_mismatch, "right factor must live on (nu, nu) with nu the second margin");
  }
  const int N = std::min({a.N(), rho.N(), b.N()});
  std::vector<double> out(N + 1);
  for (int n = 0; n <= N; ++n) out[n] = a.rho[n] * rho.rho[n] * b.rho[n];
  return make_sequence(std::move(out), rho.margin_x, rho.margin_y,
                       "product(" + a.provenance + ", " + rho.provenance + ", " + b.provenance + ")");
}

BivariateLancaster make_bivariate(const LancasterSequence& sequence, int N) {
  if (N < 0 || N > sequence.N()) {
    fail(ErrorCode::degree_out_of_range, "truncation exceeds the sequence length");
  }
  auto clip = [](const Measure& m, int n) {
    const std::size_t atoms = m.atom_count();
    if (atoms != SIZE_MAX) n = std::min<long>(n, static_cast<long>(atoms) - 1);
    return n;
  };
  BivariateLancaster biv;
  biv.sequence = sequence;
  biv.N = std::min(clip(sequence.margin_x, N), clip(sequence.margin_y, N));
  biv.basis_x = recurrence(sequence.margin_x, biv.N);
  biv.basis_y = recurrence(sequence.margin_y, biv.N);
  return biv;
}

PartialSums stabilization(std::vector<double> sums, double floor) {
  PartialSums out;
  out.sums = std::move(sums);
  const int N = static_cast<int>(out.sums.size()) - 1;
  const auto first = out.sums.begin() + std::max(0, N - 4);
  const auto [lo, hi] = std::minmax_element(first, out.sums.end());
  out.oscillation = *hi - *lo;
  out.stabilized = out.oscillation < 1e-6 * std::max(std::abs(out.sums.back()), floor) ||
                   out.oscillation == 0.0;
  return out;
}

PartialSums density_truncated(const BivariateLancaster& biv, double x, double y, int N) {
  if (N < 0 || N > biv.N) fail(ErrorCode::degree_out_of_range, "N exceeds the truncation");
  const Eigen::VectorXd p = eval_orthonormal_all(biv.basis_x, N, x);
  const Eigen::VectorXd q = eval_orthonormal_all(biv.basis_y, N, y);
  std::vector<double> sums(N + 1);
  double s = 0.0;
  for (int n = 0; n <= N; ++n) {
    s += biv.sequence.rho[n] * p(n) * q(n);
    sums[n] = s;
  }
  return stabilization(std::move(sums));
}

std::string_view verdict_name(Verdict verdict) {
  switch (verdict) {
    case Verdict::consistent:
      return "consistent";
    case Verdict::refuted:
      return "refuted";
    case Verdict::gamma_unstable:
      return "gamma-unstable";
  }
  return "?";
}

VerifyReport verify_moment_representation(const LancasterSequence& rho, SupportCase support_case,
                                          int N) {
  const Interval ix = rho.margin_x.support(), iy = rho.margin_y.support();
  if (support_case == SupportCase::C && !(ix.whole_line() && iy.whole_line())) {
    fail(ErrorCode::wrong_case, "case C needs both supports equal to the real line");
  }
  if (support_case == SupportCase::D && !(ix.half_line() && iy.half_line())) {
    fail(ErrorCode::wrong_case, "case D needs both supports to be half-lines");
  }
  if (N < 2 || N > rho.N()) {
    fail(ErrorCode::insufficient_length, "need 2 <= N <= sequence length");
  }
  if (N > kMaxDegree) fail(ErrorCode::degree_out_of_range, "N is capped at " + std::to_string(kMaxDegree));

  VerifyReport report;
  report.support_case = support_case;
  const auto ax = recurrence(rho.margin_x, N).lead;
  const auto by = recurrence(rho.margin_y, N).lead;
  std::vector<double> log_ratio(N + 1);
  for (int n = 0; n <= N; ++n) log_ratio[n] = std::log(ax(n)) - std::log(by(n));

  // gamma proxies (a_n / b_n)^{1/n}, even n only in case C
  std::vector<double> proxies;
  const int step = support_case == SupportCase::C ? 2 : 1;
  for (int n = step; n <= N; n += step) proxies.push_back(std::exp(log_ratio[n] / n));
  report.gamma_estimate = proxies.back();
  report.gamma_trend.assign(proxies.end() - std::min<std::size_t>(5, proxies.size()), proxies.end());
  const auto [lo, hi] = std::minmax_element(report.gamma_trend.begin(), report.gamma_trend.end());
  const double spread = (*hi - *lo) / std::abs(report.gamma_estimate);
  const bool monotone =
      std::is_sorted(report.gamma_trend.begin(), report.gamma_trend.end()) ||
      std::is_sorted(report.gamma_trend.rbegin(), report.gamma_trend.rend());
  const bool unstable = !monotone && spread > 0.1;
  const bool converged = spread <= 1e-9;

  const double log_gamma = std::log(report.gamma_estimate);
  report.rescaled.resize(N + 1);
  for (int n = 0; n <= N; ++n) {
    report.rescaled[n] = rho.rho[n] * std::exp(log_ratio[n] - n * log_gamma);
  }
  const auto& m = report.rescaled;
  report.checks.push_back(hankel_check("m_{i+j}", m, 0, [&](int k) { return m[k]; }));
  if (support_case == SupportCase::D) {
    report.checks.push_back(hankel_check("m_{i+j+1}", m, 1, [&](int k) { return m[k + 1]; }));
    if (converged) {
      report.checks.push_back(
          hankel_check("m_{i+j}-m_{i+j+1}", m, 1, [&](int k) { return m[k] - m[k + 1]; }));
      report.checks.push_back(
          hankel_check("m_{i+j+1}-m_{i+j+2}", m, 2, [&](int k) { return m[k + 1] - m[k + 2]; }));
    }
  } else if (converged) {
    report.checks.push_back(
        hankel_check("m_{i+j}-m_{i+j+2}", m, 2, [&](int k) { return m[k] - m[k + 2]; }));
  }
  if (!converged) {
    report.notes.push_back("gamma proxy not converged at N = " + std::to_string(N) +
                           "; upper-bound localizing checks skipped");
  }
  std::erase_if(report.checks, [](const HankelCheck& c) { return c.size == 0; });

  const bool failed = std::any_of(report.checks.begin(), report.checks.end(),
                                  [](const HankelCheck& c) { return !c.passed; });
  if (failed) {
    report.verdict = unstable ? Verdict::gamma_unstable : Verdict::refuted;
  }
  if (unstable) report.notes.push_back("gamma proxy trend is non-monotone beyond 10%");
  report.notes.push_back("one-sided: consistency does not prove membership in the Lancaster class");
  if (rho.margin_x.family() == Family::hyperbolic && rho.margin_x == rho.margin_y &&
      geometric(rho.rho, N)) {
    report.notes.push_back("known non-Lancaster: t^n is never a Lancaster sequence for hyperbolic margins");
  }
  return report;
}

JointModel buja_model(double a, double b) {
  require_positive(a, "a");
  require_positive(b, "b");
  JointModel model;
  model.name = "buja";
  model.margin_x = Measure::beta(a, b + 1.0);
  model.margin_y = Measure::beta(b, a + 1.0);
  model.sample = [a, b](Rng& rng) {
    // (x, y, 1 - x - y) ~ Dirichlet(a, b, 1)
    const double g1 = sample_gamma(rng, a, 1.0);
    const double g2 = sample_gamma(rng, b, 1.0);
    const double g3 = sample_gamma(rng, 1.0, 1.0);
    const double s = g1 + g2 + g3;
    return std::pair{g1 / s, g2 / s};
  };
  model.joint_moment = [a, b](int i, int k) {
    return rising(Extended(a), i) * rising(Extended(b), k) / rising(Extended(a + b + 1.0), i + k);
  };
  return model;
}

JointModel beta_binomial_model(int n, double a, double b) {
  if (n < 1) fail(ErrorCode::nonpositive_parameter, "n must be at least 1");
  require_positive(a, "a");
  require_positive(b, "b");
  JointModel model;
  model.name = "beta_binomial";
  model.margin_x = Measure::beta_binomial(n, a, b);
  model.margin_y = Measure::beta(a, b);
  model.sample = [n, a, b](Rng& rng) {
    const double theta = sample_beta(rng, a, b);
    return std::pair{static_cast<double>(sample_binomial(rng, n, theta)), theta};
  };
  model.joint_moment = [n, a, b](int i, int k) {
    return beta_binomial_joint<Extended>(n, Extended(a), Extended(b), std::max(i, k))(i, k);
  };
  return model;
}

JointModel eagleson_model(const NefSpec& nef, double lambda, double eta, double xi) {
  const auto seq = seq_eagleson(nef, lambda, eta, xi, 0);
  JointModel model;
  model.name = "eagleson:" + nef.name();
  model.margin_x = seq.margin_x;
  model.margin_y = seq.margin_y;
  if (nef.family() != NefFamily::hyperbolic) {
    model.sample = [nef, lambda, eta, xi](Rng& rng) {
      const double x = nef_draw(rng, nef, lambda);
      const double y = nef_draw(rng, nef, eta);
      const double z = nef_draw(rng, nef, xi);
      return std::pair{x + y, y + z};
    };
  }
  model.joint_moment = [nef, lambda, eta, xi](int i, int k) {
    const auto mx = component_moments(nef, lambda, i);
    const auto my = component_moments(nef, eta, i + k);
    const auto mz = component_moments(nef, xi, k);
    // E[(X+Y)^i (Y+Z)^k] = sum C(i,u) C(k,v) E[X^{i-u}] E[Y^{u+v}] E[Z^{k-v}]
    Extended total(0), ci(1);
    for (int u = 0; u <= i; ++u) {
      Extended ck(1);
      for (int v = 0; v <= k; ++v) {
        total += ci * ck * mx[i - u] * my[u + v] * mz[k - v];
        ck = ck * (k - v) / (v + 1);
      }
      ci = ci * (i - u) / (u + 1);
    }
    return total;
  };
  return model;
}

JointModel kibble_model(double q, double r) {
  seq_kibble(q, r, 0);
  JointModel model;
  model.name = "kibble";
  model.margin_x = Measure::gamma(q);
  model.margin_y = Measure::gamma(q);
  model.sample = [q, r](Rng& rng) { return sample_kibble(rng, q, r); };
  return model;
}

RhoEstimate estimate_rho(const JointModel& model, int n, std::uint64_t budget, std::uint64_t seed,
                         double tolerance, bool prefer_exact) {
  if (n < 0) fail(ErrorCode::degree_out_of_range, "degree must be nonnegative");
  RhoEstimate out;
  if (n == 0) {
    out.value = 1.0;
    out.exact = true;
    return out;
  }
  if (model.joint_moment && (prefer_exact || !model.sample)) {
    if (n > kMaxDegree) fail(ErrorCode::degree_out_of_range, "exact path is capped at degree 40");
    const auto rx = detail::monic_recurrence<Extended>(model.margin_x, n);
    const auto ry = detail::monic_recurrence<Extended>(model.margin_y, n);
    const auto [num, norms] = canonical_parts<Extended>(rx, ry, n, model.joint_moment);
    out.value = static_cast<double>(num / sqrt(norms));
    out.exact = true;
    return out;
  }
  if (!model.sample) fail(ErrorCode::unsupported_model, model.name + " has neither sampler nor moments");
  if (budget < 2) fail(ErrorCode::budget_too_small, "Monte Carlo needs at least two draws");
  const auto rx = recurrence(model.margin_x, n);
  const auto ry = recurrence(model.margin_y, n);
  Rng rng = make_rng(seed);
  double mean = 0.0, m2 = 0.0;
  for (std::uint64_t i = 0; i < budget; ++i) {
    const auto [x, y] = model.sample(rng);
    const double v = eval_orthonormal(rx, n, x) * eval_orthonormal(ry, n, y);
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  out.value = mean;
  out.samples = budget;
  out.std_error = std::sqrt(m2 / static_cast<double>(budget - 1) / static_cast<double>(budget));
  if (out.std_error > tolerance) {
    fail(ErrorCode::budget_too_small, "standard error " + format_real(out.std_error) +
                                          " exceeds the tolerance " + format_real(tolerance));
  }
  return out;
}

double kibble_laplace(double q, const Mixing& mixing, double s, double t) {
  require_positive(q, "q");
  if (!(s >= 0.0) || !(t >= 0.0)) fail(ErrorCode::domain_error, "s and t must be nonnegative");
  auto point = [&](double r) { return std::pow(1.0 + s + t + (1.0 - r) * s * t, -q); };
  auto in_unit = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (const auto* p = std::get_if<PointMixing>(&mixing)) {
    if (!in_unit(p->r)) fail(ErrorCode::invalid_mixing_support, "r must lie in [0, 1]");
    return point(p->r);
  }
  if (const auto* b = std::get_if<BetaMixing>(&mixing)) {
    if (!(b->eta >= 0.0 && b->eta <= q)) {
      fail(ErrorCode::invalid_mixing_support, "beta mixing needs 0 <= eta <= q");
    }
    if (b->eta == 0.0) return point(0.0);
    if (b->eta == q) return point(1.0);
    boost::math::quadrature::tanh_sinh<double> integrator;
    const double e = b->eta;
    const double log_norm = std::log(boost::math::beta(e, q - e));
    // past the midpoint xc = 1 - r exactly, which keeps the weight accurate near 1
    return integrator.integrate(
        [&](double r, double xc) {
          const double one_minus = r > 0.5 ? xc : 1.0 - r;
          const double lr = r > 0.5 ? std::log1p(-xc) : std::log(r);
          const double weight =
              std::exp((e - 1.0) * lr + (q - e - 1.0) * std::log(one_minus) - log_norm);
          return std::pow(1.0 + s + t + one_minus * s * t, -q) * weight;
        },
        0.0, 1.0, 1e-14);
  }
  const auto& h = std::get<HistogramMixing>(mixing);
  if (h.atoms.empty()) fail(ErrorCode::invalid_mixing_support, "empty mixing histogram");
  double total = 0.0, weight = 0.0;
  for (const auto& [r, w] : h.atoms) {
    if (!in_unit(r) || !(w >= 0.0)) {
      fail(ErrorCode::invalid_mixing_support, "histogram atoms need r in [0, 1] and weight >= 0");
    }
    total += w * point(r);
    weight += w;
  }
  if (std::abs(weight - 1.0) > 1e-12) {
    fail(ErrorCode::invalid_mixing_support, "histogram weights must sum to 1");
  }
  return total;
}

std::pair<double, double> sample_kibble(Rng& rng, double q, double r) {
  const double x = sample_gamma(rng, q, 1.0);
  if (r >= 1.0) return {x, x};
  const long k = sample_poisson(rng, r * x / (1.0 - r));
  return {x, sample_gamma(rng, q + static_cast<double>(k), 1.0 - r)};
}

}  // namespace lancaster_lab
