#include "lancaster_lab/triplekernel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/binomial.hpp>

#include "lancaster_lab/rng.hpp"

namespace lancaster_lab {

namespace {

constexpr int kFilterCount = 5;
constexpr double kStabilizationFloor = 1.0;
// Share of grid points that must stabilize before a nonnegative verdict.
constexpr double kResolvedFraction = 0.95;

void require_a(double a) {
  if (!(a > 0.5)) fail(ErrorCode::parameter_below_half, "a must exceed 1/2");
}

void require_open_unit(double v, const char* what) {
  if (!(v > -1.0 && v < 1.0)) {
    fail(what[0] == 'z' ? ErrorCode::z_out_of_range : ErrorCode::domain_error,
         std::string(what) + " must lie in (-1, 1)");
  }
}

// 1 / \int_{-1}^{1} (1 - x^2)^{c-1} dx
double jacobi_norm(double c) { return std::pow(2.0, 1.0 - 2.0 * c) / boost::math::beta(c, c); }

double ka_unscaled(double a, double x, double y, double z) {
  const double d = jacobi_delta(x, y, z);
  if (!(d > 0.0)) return 0.0;
  return std::pow((1.0 - x * x) * (1.0 - y * y) * (1.0 - z * z), 1.0 - a) * std::pow(d, a - 1.5);
}

// Columns are the linear functionals whose values at a point are the
// reported sums: S_{N-4}..S_N (raw) or the filtered sums.
Eigen::MatrixXd sum_weights(const KernelSpec& spec, SeriesMode mode) {
  const int N = spec.N;
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(N + 1, kFilterCount);
  for (int f = 0; f < kFilterCount; ++f) {
    if (mode == SeriesMode::raw) {
      const int last = std::max(0, N - (kFilterCount - 1) + f);
      for (int n = 0; n <= last; ++n) W(n, f) = 1.0 / spec.p_x0(n);
    } else {
      const double M = N * (0.8 + 0.05 * f);
      for (int n = 0; n <= N; ++n) W(n, f) = kernel_filter(n, M) / spec.p_x0(n);
    }
  }
  return W;
}

// A finite measure expanded to its top degree: the sum is exact.
bool complete(const KernelSpec& spec) {
  return spec.measure.atom_count() != SIZE_MAX && spec.N + 1 == static_cast<int>(spec.measure.atom_count());
}

PartialSums settle(std::vector<double> sums, const KernelSpec& spec) {
  PartialSums out = stabilization(std::move(sums), kStabilizationFloor);
  out.stabilized = out.stabilized || complete(spec);
  return out;
}

unsigned thread_count(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LANCASTER_LAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

KernelSpec make_kernel_spec(const Measure& measure, int N, std::optional<double> x0) {
  if (N < 0) fail(ErrorCode::degree_out_of_range, "N must be nonnegative");
  if (N > kMaxFastPathDegree) fail(ErrorCode::degree_out_of_range, "N exceeds the fast-path cap");
  KernelSpec spec;
  spec.measure = measure;
  if (measure.atom_count() != SIZE_MAX) {
    N = std::min<int>(N, static_cast<int>(measure.atom_count()) - 1);
  }
  if (x0) {
    spec.x0 = *x0;
  } else {
    const Interval s = measure.support();
    if (!std::isfinite(s.hi)) fail(ErrorCode::invalid_argument, "x0 is required for unbounded supports");
    spec.x0 = s.hi;
  }
  spec.N = N;
  spec.basis = recurrence(measure, N);
  spec.p_x0 = eval_orthonormal_all(spec.basis, N, spec.x0);
  for (int n = 0; n <= N; ++n) {
    if (!(spec.p_x0(n) > 0.0)) {
      fail(ErrorCode::domain_error, "p_" + std::to_string(n) + "(x0) must be positive");
    }
  }
  return spec;
}

double kernel_filter(int n, double M) {
  if (n > M) return 0.0;
  return std::exp(-36.0 * std::pow(n / M, 8));
}

PartialSums series_K(const KernelSpec& spec, double x, double y, double z, SeriesMode mode) {
  const Interval s = spec.measure.support();
  for (double v : {x, y, z}) {
    if (!s.contains(v)) fail(ErrorCode::domain_error, "point outside the support");
  }
  // sorting first makes the sums bitwise symmetric
  std::array<double, 3> pts{x, y, z};
  std::sort(pts.begin(), pts.end());
  const int N = spec.N;
  const Eigen::VectorXd px = eval_orthonormal_all(spec.basis, N, pts[0]);
  const Eigen::VectorXd py = eval_orthonormal_all(spec.basis, N, pts[1]);
  const Eigen::VectorXd pz = eval_orthonormal_all(spec.basis, N, pts[2]);
  const Eigen::VectorXd terms = px.cwiseProduct(py).cwiseProduct(pz);
  if (mode == SeriesMode::raw) {
    std::vector<double> sums(N + 1);
    double acc = 0.0;
    for (int n = 0; n <= N; ++n) {
      acc += terms(n) / spec.p_x0(n);
      sums[n] = acc;
    }
    return settle(std::move(sums), spec);
  }
  const Eigen::VectorXd v = sum_weights(spec, mode).transpose() * terms;
  return settle(std::vector<double>(v.data(), v.data() + v.size()), spec);
}

double jacobi_delta(double x, double y, double z) {
  std::array<double, 3> p{x, y, z};
  std::sort(p.begin(), p.end());
  return 1.0 - p[0] * p[0] - p[1] * p[1] - p[2] * p[2] + 2.0 * p[0] * p[1] * p[2];
}

double jacobi_Ka_constant(double a) {
  require_a(a);
  // y = xz + s(x) u with s = sqrt((1 - x^2)(1 - z^2)) turns mu_a(dy) into
  // c(a) (1 - y^2)^{a-1} s du and Delta into s^2 (1 - u^2); the u-weight is
  // that of mu_{a-1/2}.
  constexpr double z = 0.3;
  constexpr int nodes = 24;
  const auto rx = quadrature(recurrence(Measure::symmetric_jacobi(a), nodes), nodes);
  const auto ru = quadrature(recurrence(Measure::symmetric_jacobi(a - 0.5), nodes), nodes);
  const double ca = jacobi_norm(a), cu = jacobi_norm(a - 0.5);
  double total = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double x = rx.nodes(i);
    const double s = std::sqrt((1.0 - x * x) * (1.0 - z * z));
    double inner = 0.0;
    for (int j = 0; j < nodes; ++j) {
      const double u = ru.nodes(j);
      const double y = x * z + s * u;
      const double g = ka_unscaled(a, x, y, z) * ca * std::pow(1.0 - y * y, a - 1.0) * s /
                       (std::pow(1.0 - u * u, a - 1.5) * cu);
      inner += ru.weights(j) * g;
    }
    total += rx.weights(i) * inner;
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    fail(ErrorCode::quadrature_failure, "normalizing integral of K_a failed");
  }
  return 1.0 / total;
}

double jacobi_Ka(double a, double x, double y, double z) {
  require_a(a);
  require_open_unit(x, "x");
  require_open_unit(y, "y");
  require_open_unit(z, "z");
  thread_local double cached_a = std::numeric_limits<double>::quiet_NaN();
  thread_local double cached_c = 0.0;
  if (a != cached_a) {
    cached_c = jacobi_Ka_constant(a);
    cached_a = a;
  }
  return cached_c * ka_unscaled(a, x, y, z);
}

BivariateLancaster extremal_sigma_z(double a, double z, int N) {
  if (!(a >= 0.5)) fail(ErrorCode::parameter_below_half, "a must be at least 1/2");
  require_open_unit(z, "z");
  const Measure mu = Measure::symmetric_jacobi(a);
  const auto basis = recurrence(mu, N);
  const Eigen::VectorXd pz = eval_orthonormal_all(basis, N, z);
  const Eigen::VectorXd p1 = eval_orthonormal_all(basis, N, 1.0);
  LancasterSequence seq;
  seq.rho.resize(N + 1);
  for (int n = 0; n <= N; ++n) seq.rho[n] = pz(n) / p1(n);
  seq.margin_x = mu;
  seq.margin_y = mu;
  seq.provenance = "sigma_z(a=" + format_real(a) + ", z=" + format_real(z) + ")";
  return make_bivariate(seq, N);
}

JointModel sigma_z_model(double a, double z) {
  require_a(a);
  require_open_unit(z, "z");
  JointModel model;
  model.name = "sigma_z";
  model.margin_x = Measure::symmetric_jacobi(a);
  model.margin_y = model.margin_x;
  model.sample = [a, z](Rng& rng) {
    const double x = 2.0 * sample_beta(rng, a, a) - 1.0;
    const double u = 2.0 * sample_beta(rng, a - 0.5, a - 0.5) - 1.0;
    return std::pair{x, x * z + std::sqrt((1.0 - x * x) * (1.0 - z * z)) * u};
  };
  model.joint_moment = [a, z](int i, int k) {
    // Y^k = sum_j C(k, j) (xz)^{k-j} s^j U^j; odd powers of U vanish.
    const auto mx = moments(Measure::symmetric_jacobi(a), i + k + k);
    const auto mu = moments(Measure::symmetric_jacobi(a - 0.5), k);
    const Extended ze(z), w = 1 - ze * ze;
    Extended total = 0;
    for (int l = 0; 2 * l <= k; ++l) {
      // E[X^{i+k-2l} (1 - X^2)^l]
      Extended ex = 0;
      for (int j = 0; j <= l; ++j) {
        const Extended c(boost::math::binomial_coefficient<double>(l, j));
        ex += (j % 2 ? -c : c) * mx.values[i + k - 2 * l + 2 * j];
      }
      const Extended ck(boost::math::binomial_coefficient<double>(k, 2 * l));
      total += ck * pow(ze, k - 2 * l) * pow(w, l) * mu.values[2 * l] * ex;
    }
    return total;
  };
  return model;
}

double elliptical_contour_check(double a, double z, int pairs, std::uint64_t seed) {
  require_a(a);
  require_open_unit(z, "z");
  if (pairs < 1) fail(ErrorCode::invalid_argument, "pairs must be positive");
  constexpr double eps = 1e-3;
  const double w = 1.0 - z * z;
  if (w <= 2.0 * eps) fail(ErrorCode::degenerate_delta, "U_z is too thin for the margin");
  const Measure mu = Measure::symmetric_jacobi(a);
  auto lebesgue = [&](double x, double y) { return jacobi_Ka(a, x, y, z) * mu.density(x) * mu.density(y); };
  Rng rng = make_rng(seed);
  double worst = 0.0;
  for (int p = 0; p < pairs; ++p) {
    double x1 = 0.0, y1 = 0.0, d = 0.0;
    for (int tries = 0;; ++tries) {
      if (tries > 100000) fail(ErrorCode::degenerate_delta, "no interior point found");
      x1 = 2.0 * sample_uniform(rng) - 1.0;
      y1 = 2.0 * sample_uniform(rng) - 1.0;
      d = jacobi_delta(x1, y1, z);
      if (d > eps && d < w * (1.0 - eps)) break;
    }
    // a second point on the same level set of Delta
    const double r = std::sqrt(1.0 - d / w);
    const double x2 = r * (2.0 * sample_uniform(rng) - 1.0);
    const double s2 = (1.0 - x2 * x2) * w;
    const double u2 = std::sqrt(std::max(0.0, 1.0 - d / s2)) * (sample_uniform(rng) < 0.5 ? -1.0 : 1.0);
    const double y2 = x2 * z + std::sqrt(s2) * u2;
    const double f1 = lebesgue(x1, y1), f2 = lebesgue(x2, y2);
    worst = std::max(worst, std::abs(f1 - f2) / std::max(f1, f2));
  }
  return worst;
}

std::string_view positivity_verdict_name(PositivityVerdict verdict) {
  switch (verdict) {
    case PositivityVerdict::nonnegative_on_grid:
      return "nonnegative-on-grid";
    case PositivityVerdict::negative_witness:
      return "negative-witness";
    case PositivityVerdict::inconclusive:
      return "inconclusive";
  }
  return "?";
}

PositivityReport positivity_scan(const KernelSpec& spec, int grid_per_axis, const ScanOptions& options) {
  if (grid_per_axis < 1) fail(ErrorCode::invalid_argument, "grid_per_axis must be positive");
  if (grid_per_axis > 200) fail(ErrorCode::resource_budget, "grid_per_axis is capped at 200");

  PositivityReport report;
  report.N = spec.N;
  report.mode = options.mode;
  report.tolerance = options.tolerance;
  const bool finite = spec.measure.atom_count() != SIZE_MAX;
  std::vector<double> grid;
  if (finite) {
    report.grid = "atoms";
    for (const auto& atom : spec.measure.atoms()) grid.push_back(atom.point);
  } else {
    const Interval s = spec.measure.support();
    if (s.bounded()) {
      report.grid = "midpoint";
      for (int i = 0; i < grid_per_axis; ++i) grid.push_back(s.lo + (i + 0.5) * (s.hi - s.lo) / grid_per_axis);
    } else {
      report.grid = "gauss";
      const auto rule = quadrature(recurrence(spec.measure, grid_per_axis), grid_per_axis);
      grid.assign(rule.nodes.data(), rule.nodes.data() + grid_per_axis);
    }
  }
  const int G = static_cast<int>(grid.size());
  report.grid_per_axis = G;
  const double work = double(G) * G * G * (spec.N + 1) * kFilterCount;
  if (work > 5e10) fail(ErrorCode::resource_budget, "scan exceeds the work budget");

  Eigen::MatrixXd A(G, spec.N + 1);
  for (int i = 0; i < G; ++i) A.row(i) = eval_orthonormal_all(spec.basis, spec.N, grid[i]).transpose();
  const Eigen::MatrixXd W = sum_weights(spec, options.mode);
  for (int i = 0; i < G; ++i) {
    for (int n = 0; n <= spec.N; ++n) {
      report.max_ratio_to_x0 = std::max(report.max_ratio_to_x0, std::abs(A(i, n)) / spec.p_x0(n));
    }
  }
  report.x0_dominates = report.max_ratio_to_x0 <= 1.0 + 1e-12;

  struct Slab {
    std::size_t points = 0, stabilized = 0;
    double min_stabilized = std::numeric_limits<double>::infinity();
    double min_value = std::numeric_limits<double>::infinity();
    bool unstable_negative = false;
    std::vector<ScanPoint> witnesses, samples;
  };
  std::vector<Slab> slabs(G);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < G; i = next++) {
      Slab& slab = slabs[i];
      for (int j = 0; j < G; ++j) {
        const Eigen::MatrixXd M = A.row(i).cwiseProduct(A.row(j)).transpose().asDiagonal() * W;
        const Eigen::MatrixXd R = A * M;
        for (int k = 0; k < G; ++k) {
          if (!finite && grid[i] == spec.x0 && grid[j] == spec.x0 && grid[k] == spec.x0) continue;
          const Eigen::VectorXd row = R.row(k).transpose();
          const PartialSums ps = settle(std::vector<double>(row.data(), row.data() + row.size()), spec);
          const ScanPoint pt{grid[i], grid[j], grid[k], ps.sums.back(), ps.stabilized};
          ++slab.points;
          slab.min_value = std::min(slab.min_value, pt.value);
          if (pt.stabilized) {
            ++slab.stabilized;
            slab.min_stabilized = std::min(slab.min_stabilized, pt.value);
            if (pt.value < -options.tolerance && slab.witnesses.size() < 10) slab.witnesses.push_back(pt);
          } else if (pt.value < -options.tolerance) {
            slab.unstable_negative = true;
          }
          if (options.keep_points) slab.samples.push_back(pt);
        }
      }
    }
  };
  {
    const unsigned n_threads = std::min<unsigned>(thread_count(options.threads), G);
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  std::size_t stabilized = 0;
  bool unstable_negative = false;
  for (auto& slab : slabs) {
    report.points += slab.points;
    stabilized += slab.stabilized;
    report.min_stabilized = std::min(report.min_stabilized, slab.min_stabilized);
    report.min_value = std::min(report.min_value, slab.min_value);
    unstable_negative = unstable_negative || slab.unstable_negative;
    for (auto& w : slab.witnesses) {
      if (report.witnesses.size() < 10) report.witnesses.push_back(w);
    }
    if (options.keep_points) {
      report.samples.insert(report.samples.end(), slab.samples.begin(), slab.samples.end());
    }
  }
  report.stabilization_fraction = report.points ? double(stabilized) / report.points : 0.0;
  if (!report.witnesses.empty()) {
    report.verdict = PositivityVerdict::negative_witness;
  } else if (report.stabilization_fraction >= kResolvedFraction) {
    report.verdict = PositivityVerdict::nonnegative_on_grid;
  } else {
    report.verdict = PositivityVerdict::inconclusive;
  }
  if (unstable_negative) report.notes.push_back("unstabilized points with negative partial sums left unresolved");

  if (!report.x0_dominates) report.notes.push_back("|p_n(x)| <= p_n(x0) fails on the grid");
  if (spec.measure.family() == Family::beta_binomial) {
    report.notes.push_back("exploratory: positivity of this kernel is an open question");
  }
  if (spec.measure.family() == Family::cartier_dunau) {
    report.notes.push_back("x0 taken as the right end of the support (an assumption)");
  }
  return report;
}

}  // namespace lancaster_lab
