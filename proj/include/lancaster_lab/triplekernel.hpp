#ifndef LANCASTER_LAB_TRIPLEKERNEL_HPP
#define LANCASTER_LAB_TRIPLEKERNEL_HPP

// The triple-product kernel
//   K(x, y, z) = sum_n p_n(x) p_n(y) p_n(z) / p_n(x0),
// whose nonnegativity makes rho_n = p_n(z) / p_n(x0) a Lancaster sequence
// on (mu, mu) for every z.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lancaster_lab/common.hpp"
#include "lancaster_lab/lancaster.hpp"
#include "lancaster_lab/measure.hpp"
#include "lancaster_lab/orthopoly.hpp"

namespace lancaster_lab {

struct KernelSpec {
  Measure measure = Measure::gaussian();
  RecurrenceCoeffs basis;
  double x0 = 1.0;
  int N = 0;
  Eigen::VectorXd p_x0;  // p_n(x0), all positive
};

/// x0 defaults to 1 for Jacobi, the rightmost atom for binomial and
/// beta-binomial, and the right end of the support otherwise (Cartier-Dunau:
/// an assumption). N is clipped to the degrees a finite measure supports.
KernelSpec make_kernel_spec(const Measure& measure, int N, std::optional<double> x0 = std::nullopt);

enum class SeriesMode {
  raw,       // S_0 .. S_N
  filtered,  // five exponentially filtered sums, cutoffs 0.80 N .. 1.00 N
};

/// Filter weight exp(-36 (n / M)^8) for n <= M, 0 beyond.
double kernel_filter(int n, double M);

/// Partial sums of the series at (x, y, z); symmetric in the three points
/// bit for bit. Stabilization uses the band 1e-6 max(1, |S|).
PartialSums series_K(const KernelSpec& spec, double x, double y, double z,
                     SeriesMode mode = SeriesMode::raw);

/// 1 - x^2 - y^2 - z^2 + 2xyz.
double jacobi_delta(double x, double y, double z);

/// C(a), fixed by \int\int K_a d mu_a d mu_a = 1 through a tensor Gauss rule
/// after y = xz + sqrt((1 - x^2)(1 - z^2)) u. Needs a > 1/2.
double jacobi_Ka_constant(double a);

/// Symmetric Jacobi margins mu_a (density prop. to (1 - x^2)^{a-1}):
/// C(a) [(1-x^2)(1-y^2)(1-z^2)]^{1-a} Delta^{a-3/2} inside Delta > 0, else 0.
double jacobi_Ka(double a, double x, double y, double z);

/// sigma_z: rho_n = p_n(z) / p_n(1) on mu_a x mu_a.
BivariateLancaster extremal_sigma_z(double a, double z, int N = 30);

/// sigma_z as a joint model: X ~ mu_a, U ~ mu_{a-1/2}, Y = xz + sqrt((1-x^2)(1-z^2)) U.
JointModel sigma_z_model(double a, double z);

/// Max relative difference of the Lebesgue density of sigma_z over random
/// pairs of points sharing the same Delta (kept at least 1e-3 inside U_z).
double elliptical_contour_check(double a, double z, int pairs, std::uint64_t seed);

enum class PositivityVerdict { nonnegative_on_grid, negative_witness, inconclusive };
std::string_view positivity_verdict_name(PositivityVerdict verdict);

struct ScanPoint {
  double x, y, z;
  double value;  // S_N, or the widest-cutoff filtered sum
  bool stabilized;
};

struct PositivityReport {
  std::string grid;  // "atoms", "midpoint" or "gauss"
  int grid_per_axis = 0;
  int N = 0;
  SeriesMode mode = SeriesMode::raw;
  double tolerance = 1e-6;
  std::size_t points = 0;
  double min_stabilized = std::numeric_limits<double>::infinity();
  double min_value = std::numeric_limits<double>::infinity();
  std::vector<ScanPoint> witnesses;  // at most 10, in grid order
  double stabilization_fraction = 0.0;
  /// max over the grid and n <= N of |p_n(x)| / p_n(x0).
  double max_ratio_to_x0 = 0.0;
  bool x0_dominates = true;
  PositivityVerdict verdict = PositivityVerdict::inconclusive;
  std::vector<std::string> notes;
  std::vector<ScanPoint> samples;  // every point, when requested
};

struct ScanOptions {
  SeriesMode mode = SeriesMode::raw;
  double tolerance = 1e-6;
  bool keep_points = false;
  /// 0 reads LANCASTER_LAB_THREADS, falling back to the hardware count.
  unsigned threads = 0;
};

/// Finite measures are scanned on all atoms; continuous ones on a midpoint
/// grid of the support (Gauss nodes when it is unbounded). A stabilized sum
/// below -tolerance is a witness; without witnesses the verdict is
/// nonnegative-on-grid once 95% of the points stabilize. The reduction runs in grid order, so the report
/// does not depend on the thread count.
PositivityReport positivity_scan(const KernelSpec& spec, int grid_per_axis, const ScanOptions& options = {});

}  // namespace lancaster_lab

#endif  // LANCASTER_LAB_TRIPLEKERNEL_HPP
