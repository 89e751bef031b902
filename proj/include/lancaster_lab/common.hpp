#ifndef LANCASTER_LAB_COMMON_HPP
#define LANCASTER_LAB_COMMON_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lancaster_lab {

/// Highest polynomial degree for moment-based (oracle) work.
inline constexpr int kMaxDegree = 40;
/// Moments m_0..m_{2N+1} are needed to recover alpha_0..alpha_N.
inline constexpr int kMaxMomentOrder = 2 * kMaxDegree + 1;
/// Closed-form recurrences stay stable far beyond kMaxDegree; series and
/// quadrature grids built from them may go this high.
inline constexpr int kMaxFastPathDegree = 4000;

enum class ErrorCode {
  invalid_argument,
  nonpositive_parameter,
  domain_error,
  degree_out_of_range,
  order_too_large,
  divergent_integral,
  indefinite_hankel,
  degree_exceeds_support,
  eigensolver_failure,
  unsupported_family,
  non_integrable,
  jorgensen_violation,
  non_quadratic_family,
  margin_mismatch,
  wrong_case,
  budget_too_small,
  t_out_of_range,
  eta_out_of_range,
  z_out_of_range,
  parameter_below_half,
  invalid_mixing_support,
  infinite_support,
  unsupported_model,
  insufficient_length,
  quadrature_failure,
  resource_budget,
  degenerate_delta,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x >= lo && x <= hi; }
  bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
  bool whole_line() const { return !std::isfinite(lo) && !std::isfinite(hi); }
  bool half_line() const { return std::isfinite(lo) != std::isfinite(hi); }
  bool operator==(const Interval&) const = default;
};

/// Named real parameters in a fixed order, e.g. {{"a", 1}, {"b", 2}}.
class Params {
 public:
  Params() = default;
  Params(std::initializer_list<std::pair<std::string, double>> init)
      : entries_(init) {}

  double at(std::string_view name) const;
  bool contains(std::string_view name) const;
  void set(const std::string& name, double value);

  const std::vector<std::pair<std::string, double>>& entries() const {
    return entries_;
  }
  bool operator==(const Params&) const = default;

 private:
  std::vector<std::pair<std::string, double>> entries_;
};

/// Decimal string with 17 significant digits; round-trips every double.
std::string format_real(double value);
double parse_real(std::string_view text);

}  // namespace lancaster_lab

#endif  // LANCASTER_LAB_COMMON_HPP
