#include "lancaster_lab/gibbs.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "internal.hpp"

namespace lancaster_lab {

namespace {

using Rule = std::vector<std::pair<Extended, Extended>>;  // (node, weight)

Rule family_rule(Family family, const std::array<Extended, 3>& p, int M) {
  const auto rec = closed_form_recurrence<Extended>(family, p, M);
  const auto [nodes, weights] = gauss_rule<Extended>(rec.alpha, rec.beta, M);
  Rule rule(M);
  for (int i = 0; i < M; ++i) rule[i] = {nodes(i), weights(i)};
  return rule;
}

Rule point_rule(const Extended& x) { return {{x, Extended(1)}}; }

Rule gamma_rule(const Extended& shape, const Extended& scale, int M) {
  return family_rule(Family::gamma, {shape, scale, Extended(0)}, M);
}

Rule poisson_rule(const Extended& mean, int M) {
  if (mean == 0) return point_rule(Extended(0));
  return family_rule(Family::poisson, {mean, Extended(0), Extended(0)}, M);
}

/// Y | x for the Kibble-Moran law. log E[e^{-tY} | x] = -q log(1 + ct) - r x t / (1 + ct)
/// with c = 1 - r, so kappa_k = (k-1)! q c^k + k! r x c^{k-1}; the Gauss rule
/// comes from the resulting moments.
Rule kibble_rule(const Extended& q, const Extended& r, const Extended& x, int M) {
  if (r == 1) return point_rule(x);
  const Extended c = 1 - r;
  const int K = 2 * M + 1;
  std::vector<Extended> kappa(K + 1, Extended(0));
  Extended fact(1);  // (k-1)!
  for (int k = 1; k <= K; ++k) {
    if (k > 1) fact *= k - 1;
    kappa[k] = fact * q * pow(c, k) + fact * k * r * x * pow(c, k - 1);
  }
  std::vector<Extended> m(K + 1, Extended(0));
  m[0] = 1;
  for (int k = 1; k <= K; ++k) {
    Extended binom(1);  // C(k-1, j-1)
    for (int j = 1; j <= k; ++j) {
      m[k] += binom * kappa[j] * m[k - j];
      binom = binom * (k - j) / j;
    }
  }
  const auto rec = chebyshev_algorithm<Extended>(m, M);
  const auto [nodes, weights] = gauss_rule<Extended>(rec.alpha, rec.beta, M);
  Rule rule(M);
  for (int i = 0; i < M; ++i) rule[i] = {nodes(i), weights(i)};
  return rule;
}

/// Monic recurrence of mu with the parameters formed in extended precision.
MonicRecurrence<Extended> mu_recurrence(const ConjugateModel& model, int N) {
  const Params& p = model.params;
  switch (model.kind) {
    case ModelKind::gamma_poisson: {
      const Extended lambda(p.at("lambda")), x0(p.at("x0"));
      return closed_form_recurrence<Extended>(Family::negative_binomial, {1 / (1 + lambda), lambda * x0, Extended(0)}, N);
    }
    case ModelKind::gauss_gauss: {
      const Extended lambda(p.at("lambda")), x0(p.at("x0"));
      return closed_form_recurrence<Extended>(Family::gaussian, {x0, 1 + 1 / lambda, Extended(0)}, N);
    }
    default:
      return detail::monic_recurrence<Extended>(model.mu, N);
  }
}

std::string describe(std::string_view kind, const Params& params) {
  std::string out(kind);
  out += "(";
  bool first = true;
  for (const auto& [key, value] : params.entries()) {
    if (!first) out += ", ";
    out += key + "=" + format_real(value);
    first = false;
  }
  return out + ")";
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    fail(ErrorCode::nonpositive_parameter, std::string(what) + " must be positive");
  }
}

/// rho_n^2 in extended precision.
Extended eigenvalue_extended(const ConjugateModel& model, int n) {
  switch (model.kind) {
    case ModelKind::gamma_poisson:
    case ModelKind::gauss_gauss:
      return pow(1 + Extended(model.params.at("lambda")), -n);
    case ModelKind::kibble_gamma:
      return pow(Extended(model.params.at("r")), 2 * n);
    case ModelKind::beta_binomial:
      break;
  }
  const Rational r2 = beta_binomial_rho_squared(static_cast<int>(model.params.at("n")), model.params.at("a"),
                                                model.params.at("b"), n);
  return Extended(numerator(r2)) / Extended(denominator(r2));
}

/// Rule for K(x, .) exact to degree 2M - 1.
Rule rule_K(const ConjugateModel& model, const Extended& x, int M) {
  const Params& p = model.params;
  switch (model.kind) {
    case ModelKind::gamma_poisson: {
      const Extended lambda(p.at("lambda")), x0(p.at("x0"));
      return gamma_rule(lambda * x0 + x, 1 / (1 + lambda), M);
    }
    case ModelKind::gauss_gauss: {
      const Extended lambda(p.at("lambda")), x0(p.at("x0"));
      return family_rule(Family::gaussian, {(lambda * x0 + x) / (1 + lambda), 1 / (1 + lambda), Extended(0)}, M);
    }
    case ModelKind::kibble_gamma:
      return kibble_rule(Extended(p.at("q")), Extended(p.at("r")), x, M);
    case ModelKind::beta_binomial:
      break;
  }
  fail(ErrorCode::unsupported_model, "no quadrature conditional for " + model.name());
}

Rule rule_L(const ConjugateModel& model, const Extended& y, int M) {
  switch (model.kind) {
    case ModelKind::gamma_poisson:
      return poisson_rule(y, M);
    case ModelKind::gauss_gauss:
      return family_rule(Family::gaussian, {y, Extended(1), Extended(0)}, M);
    case ModelKind::kibble_gamma:
      return kibble_rule(Extended(model.params.at("q")), Extended(model.params.at("r")), y, M);
    case ModelKind::beta_binomial:
      break;
  }
  fail(ErrorCode::unsupported_model, "no quadrature conditional for " + model.name());
}

struct DecayFit {
  std::map<int, double> corr;
  double rate = 0.0;
  int lags_used = 0;
};

DecayFit fit_decay(const std::vector<double>& f, std::size_t begin, std::size_t end, int max_lag) {
  const std::size_t T = end - begin;
  double mean = 0.0;
  for (std::size_t t = begin; t < end; ++t) mean += f[t];
  mean /= static_cast<double>(T);
  double var = 0.0;
  for (std::size_t t = begin; t < end; ++t) var += (f[t] - mean) * (f[t] - mean);
  DecayFit fit;
  for (int k = 1; k <= max_lag; ++k) {
    double c = 0.0;
    for (std::size_t t = begin; t + k < end; ++t) c += (f[t] - mean) * (f[t + k] - mean);
    fit.corr[k] = var > 0.0 ? c / var : 0.0;
  }
  // weighted fit of log c_k = k log(rate), weights c_k^2, over the leading
  // lags that stand clear of the noise floor
  const double floor = 3.0 / std::sqrt(static_cast<double>(T));
  double num = 0.0, den = 0.0;
  for (int k = 1; k <= max_lag; ++k) {
    const double c = fit.corr[k];
    if (c <= floor) break;
    num += c * c * k * std::log(c);
    den += c * c * k * k;
    ++fit.lags_used;
  }
  fit.rate = fit.lags_used > 0 ? std::exp(num / den) : fit.corr[1];
  return fit;
}

}  // namespace

std::string_view model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::beta_binomial:
      return "beta_binomial";
    case ModelKind::gamma_poisson:
      return "gamma_poisson";
    case ModelKind::gauss_gauss:
      return "gauss_gauss";
    case ModelKind::kibble_gamma:
      return "kibble_gamma";
  }
  return "?";
}

ModelKind model_kind_from_name(std::string_view name) {
  for (auto kind : {ModelKind::beta_binomial, ModelKind::gamma_poisson, ModelKind::gauss_gauss,
                    ModelKind::kibble_gamma}) {
    if (model_kind_name(kind) == name) return kind;
  }
  fail(ErrorCode::unsupported_model, "unknown model '" + std::string(name) + "'");
}

std::string ConjugateModel::name() const { return describe(model_kind_name(kind), params); }

double ConjugateModel::rho(int n) const {
  if (n < 0) fail(ErrorCode::degree_out_of_range, "degree must be nonnegative");
  switch (kind) {
    case ModelKind::beta_binomial:
      return n <= sequence.N() ? sequence.rho[n] : 0.0;
    case ModelKind::gamma_poisson:
    case ModelKind::gauss_gauss:
      return std::pow(1.0 + params.at("lambda"), -0.5 * n);
    case ModelKind::kibble_gamma:
      return std::pow(params.at("r"), n);
  }
  return 0.0;
}

double ConjugateModel::sample_y(Rng& rng, double x) const {
  switch (kind) {
    case ModelKind::beta_binomial: {
      const double n = params.at("n");
      return sample_beta(rng, x + params.at("a"), n - x + params.at("b"));
    }
    case ModelKind::gamma_poisson: {
      const double lambda = params.at("lambda");
      return sample_gamma(rng, lambda * params.at("x0") + x, 1.0 / (1.0 + lambda));
    }
    case ModelKind::gauss_gauss: {
      const double lambda = params.at("lambda");
      return sample_normal(rng, (lambda * params.at("x0") + x) / (1.0 + lambda), std::sqrt(1.0 / (1.0 + lambda)));
    }
    case ModelKind::kibble_gamma: {
      const double q = params.at("q"), r = params.at("r");
      if (r >= 1.0) return x;
      const long k = sample_poisson(rng, r * x / (1.0 - r));
      return sample_gamma(rng, q + static_cast<double>(k), 1.0 - r);
    }
  }
  return 0.0;
}

double ConjugateModel::sample_x(Rng& rng, double y) const {
  switch (kind) {
    case ModelKind::beta_binomial:
      return static_cast<double>(sample_binomial(rng, std::lround(params.at("n")), y));
    case ModelKind::gamma_poisson:
      return static_cast<double>(sample_poisson(rng, y));
    case ModelKind::gauss_gauss:
      return sample_normal(rng, y, 1.0);
    case ModelKind::kibble_gamma:
      return sample_y(rng, y);
  }
  return 0.0;
}

ConjugateModel beta_binomial_gibbs(int n, double a, double b) {
  ConjugateModel m;
  m.kind = ModelKind::beta_binomial;
  m.params = {{"n", static_cast<double>(n)}, {"a", a}, {"b", b}};
  m.sequence = seq_beta_binomial(n, a, b);
  m.mu = m.sequence.margin_x;
  m.nu = m.sequence.margin_y;
  return m;
}

ConjugateModel gamma_poisson_gibbs(double x0, double lambda) {
  require_positive(x0, "x0");
  require_positive(lambda, "lambda");
  ConjugateModel m;
  m.kind = ModelKind::gamma_poisson;
  m.params = {{"x0", x0}, {"lambda", lambda}};
  m.mu = Measure::negative_binomial(1.0 / (1.0 + lambda), lambda * x0);
  m.nu = Measure::gamma(lambda * x0, 1.0 / lambda);
  std::vector<double> rho(kMaxDegree + 1);
  for (int n = 0; n <= kMaxDegree; ++n) rho[n] = std::pow(1.0 + lambda, -0.5 * n);
  m.sequence = LancasterSequence{rho, m.mu, m.nu, "gamma_poisson", {}, {}};
  return m;
}

ConjugateModel gauss_gauss_gibbs(double x0, double lambda) {
  if (!std::isfinite(x0)) fail(ErrorCode::domain_error, "x0 must be finite");
  require_positive(lambda, "lambda");
  ConjugateModel m;
  m.kind = ModelKind::gauss_gauss;
  m.params = {{"x0", x0}, {"lambda", lambda}};
  m.mu = Measure::gaussian(x0, 1.0 + 1.0 / lambda);
  m.nu = Measure::gaussian(x0, 1.0 / lambda);
  std::vector<double> rho(kMaxDegree + 1);
  for (int n = 0; n <= kMaxDegree; ++n) rho[n] = std::pow(1.0 + lambda, -0.5 * n);
  m.sequence = LancasterSequence{rho, m.mu, m.nu, "gauss_gauss", {}, {}};
  return m;
}

ConjugateModel kibble_gamma_gibbs(double q, double r) {
  ConjugateModel m;
  m.kind = ModelKind::kibble_gamma;
  m.params = {{"q", q}, {"r", r}};
  m.sequence = seq_kibble(q, r, kMaxDegree);
  m.mu = m.sequence.margin_x;
  m.nu = m.sequence.margin_y;
  return m;
}

ConjugateModel make_model(ModelKind kind, const Params& params) {
  switch (kind) {
    case ModelKind::beta_binomial: {
      const double n = params.at("n");
      if (n != std::floor(n) || n < 1) fail(ErrorCode::invalid_argument, "n must be a positive integer");
      return beta_binomial_gibbs(static_cast<int>(n), params.at("a"), params.at("b"));
    }
    case ModelKind::gamma_poisson:
      return gamma_poisson_gibbs(params.at("x0"), params.at("lambda"));
    case ModelKind::gauss_gauss:
      return gauss_gauss_gibbs(params.at("x0"), params.at("lambda"));
    case ModelKind::kibble_gamma:
      return kibble_gamma_gibbs(params.at("q"), params.at("r"));
  }
  fail(ErrorCode::unsupported_model, "unknown model");
}

ChainTrace run_x_chain(const ConjugateModel& model, double x0, int steps, std::uint64_t seed) {
  if (steps < 0) fail(ErrorCode::invalid_argument, "steps must be nonnegative");
  const Interval support = model.mu.support();
  const bool lattice = model.mu.is_discrete();
  if (!std::isfinite(x0) || !support.contains(x0) || (lattice && x0 != std::floor(x0))) {
    fail(ErrorCode::domain_error, "x0 = " + format_real(x0) + " is outside the support of " + model.mu.name());
  }
  ChainTrace trace;
  trace.seed = seed;
  trace.model = model;
  trace.states.reserve(static_cast<std::size_t>(steps) + 1);
  trace.states.push_back(x0);
  Rng rng = make_rng(seed);
  double x = x0;
  for (int t = 0; t < steps; ++t) {
    const double y = model.sample_y(rng, x);
    x = model.sample_x(rng, y);
    trace.states.push_back(x);
  }
  return trace;
}

ExactTransition exact_transition_matrix(const ConjugateModel& model) {
  if (!model.is_finite()) {
    fail(ErrorCode::infinite_support, model.name() + " has no finite transition matrix");
  }
  const int n = static_cast<int>(model.params.at("n"));
  const Rational a = to_rational(model.params.at("a")), b = to_rational(model.params.at("b"));
  ExactTransition out;
  out.k.assign(n + 1, std::vector<Rational>(n + 1));
  // k(x, x') = C(n, x') B(a + x + x', b + 2n - x - x') / B(a + x, b + n - x)
  for (int x = 0; x <= n; ++x) {
    const Rational alpha = a + x, beta = b + (n - x);
    Rational choose(1);
    for (int xp = 0; xp <= n; ++xp) {
      if (xp > 0) choose = choose * (n - xp + 1) / xp;
      out.k[x][xp] = choose * rising<Rational>(alpha, xp) * rising<Rational>(beta, n - xp) /
                     rising<Rational>(alpha + beta, n);
    }
  }
  out.stationary = model.mu.exact_masses();
  for (int j = 0; j <= n; ++j) {
    out.eigenvalues.push_back(beta_binomial_rho_squared(n, model.params.at("a"), model.params.at("b"), j));
  }
  return out;
}

EigenCheck spectral_eigencheck(const ConjugateModel& model, int n, int resolution) {
  if (n < 0 || n > kMaxDegree) fail(ErrorCode::degree_out_of_range, "degree out of range");
  EigenCheck out;
  out.eigenvalue = model.rho(n) * model.rho(n);
  if (model.is_finite()) {
    const int m = static_cast<int>(model.params.at("n"));
    if (n > m) fail(ErrorCode::degree_exceeds_support, "degree exceeds the support");
    const auto T = exact_transition_matrix(model);
    const auto rec = detail::monic_recurrence<Rational>(model.mu, n);
    const auto P = monic_coefficients<Rational>(rec.alpha, rec.beta, n)[n];
    std::vector<Rational> values(m + 1, Rational(0));
    for (int x = 0; x <= m; ++x) {
      Rational power(1);
      for (int i = 0; i <= n; ++i) {
        values[x] += P[i] * power;
        power *= x;
      }
    }
    const double lead = recurrence(model.mu, n).lead(n);
    Rational worst(0);
    for (int x = 0; x <= m; ++x) {
      Rational action(0);
      for (int xp = 0; xp <= m; ++xp) action += T.k[x][xp] * values[xp];
      worst = std::max(worst, Rational(abs(action - T.eigenvalues[n] * values[x])));
    }
    out.residual = to_double(worst) * lead;
    out.eigenvalue = to_double(T.eigenvalues[n]);
    out.grid_points = m + 1;
    out.exact = true;
    return out;
  }
  if (resolution < 1) fail(ErrorCode::invalid_argument, "resolution must be positive");
  const auto rec = mu_recurrence(model, std::max(n, resolution));
  const auto [grid, grid_weights] = gauss_rule<Extended>(rec.alpha, rec.beta, resolution);
  const Extended lambda_n = eigenvalue_extended(model, n);
  const int M = n + 1;
  Extended norm(1);
  for (int k = 1; k <= n; ++k) norm *= rec.beta(k);
  const Extended lead = 1 / sqrt(norm);
  // monic P_n by its recurrence, scaled once
  auto p_n = [&](const Extended& x) {
    Extended prev(0), cur(1);
    for (int k = 0; k < n; ++k) {
      Extended next = (x - rec.alpha(k)) * cur - (k > 0 ? rec.beta(k) * prev : Extended(0));
      prev = cur;
      cur = next;
    }
    return lead * cur;
  };
  // g(y) = E[p_n(X') | y] is a polynomial of degree n in y: take it at
  // n + 1 nodes by quadrature, then interpolate (Newton divided differences)
  std::vector<Extended> ys(M), coef(M);
  for (int j = 0; j < M; ++j) {
    ys[j] = Extended(j + 1) / 2;
    if (model.kind == ModelKind::gauss_gauss) ys[j] -= Extended(M) / 4;
    coef[j] = 0;
    for (const auto& [xp, wx] : rule_L(model, ys[j], M)) coef[j] += wx * p_n(xp);
  }
  for (int level = 1; level < M; ++level) {
    for (int j = M - 1; j >= level; --j) coef[j] = (coef[j] - coef[j - 1]) / (ys[j] - ys[j - level]);
  }
  auto g = [&](const Extended& y) {
    Extended v = coef[M - 1];
    for (int j = M - 2; j >= 0; --j) v = v * (y - ys[j]) + coef[j];
    return v;
  };
  Extended worst(0);
  for (int i = 0; i < resolution; ++i) {
    const Extended x = grid(i);
    Extended action(0);
    for (const auto& [y, wy] : rule_K(model, x, M)) action += wy * g(y);
    worst = std::max(worst, Extended(abs(action - lambda_n * p_n(x))));
  }
  out.residual = static_cast<double>(worst);
  out.grid_points = resolution;
  return out;
}

AutocorrFit autocorrelation_vs_spectrum(const ChainTrace& trace, int n, int max_lag) {
  if (max_lag < 1) fail(ErrorCode::invalid_argument, "max_lag must be positive");
  const std::size_t T = trace.states.size();
  if (T < 100 * static_cast<std::size_t>(max_lag)) {
    fail(ErrorCode::insufficient_length, "trace needs at least 100 * max_lag states");
  }
  const auto rec = recurrence(trace.model.mu, n);
  std::vector<double> f(T);
  for (std::size_t t = 0; t < T; ++t) f[t] = eval_orthonormal(rec, n, trace.states[t]);

  const auto full = fit_decay(f, 0, T, max_lag);
  AutocorrFit out;
  out.autocorrelation = full.corr;
  out.rate = full.rate;
  out.lags_used = full.lags_used;
  out.expected = trace.model.rho(n) * trace.model.rho(n);

  constexpr int batches = 10;
  std::vector<double> rates;
  for (int b = 0; b < batches; ++b) {
    rates.push_back(fit_decay(f, T * b / batches, T * (b + 1) / batches, max_lag).rate);
  }
  double mean = 0.0, var = 0.0;
  for (double r : rates) mean += r / batches;
  for (double r : rates) var += (r - mean) * (r - mean) / (batches - 1);
  const double t975 = boost::math::quantile(boost::math::students_t(batches - 1), 0.975);
  // a batch is a tenth of the trace, so the full-trace spread is sqrt(10) narrower
  const double half = t975 * std::sqrt(var / batches);
  out.ci_low = out.rate - half;
  out.ci_high = out.rate + half;
  return out;
}

double chisq_decay_bound(const LancasterSequence& seq, const RecurrenceCoeffs& basis, double x, int ell,
                         int N) {
  if (ell < 1) fail(ErrorCode::invalid_argument, "ell must be at least 1");
  if (N < 0 || N > seq.N() || N > basis.degree()) {
    fail(ErrorCode::degree_out_of_range, "N exceeds the sequence or the basis");
  }
  const Eigen::VectorXd p = eval_orthonormal_all(basis, N, x);
  double total = 0.0;
  for (int n = 1; n <= N; ++n) total += std::pow(seq.rho[n], 4.0 * ell) * p(n) * p(n);
  return total;
}

}  // namespace lancaster_lab
