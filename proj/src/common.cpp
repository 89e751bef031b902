#include "lancaster_lab/common.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>

#include "lancaster_lab/extended.hpp"

namespace lancaster_lab {

namespace {

constexpr std::array<std::pair<ErrorCode, std::string_view>, 27> kErrorNames{{
    {ErrorCode::invalid_argument, "invalid_argument"},
    {ErrorCode::nonpositive_parameter, "nonpositive_parameter"},
    {ErrorCode::domain_error, "domain_error"},
    {ErrorCode::degree_out_of_range, "degree_out_of_range"},
    {ErrorCode::order_too_large, "order_too_large"},
    {ErrorCode::divergent_integral, "divergent_integral"},
    {ErrorCode::indefinite_hankel, "indefinite_hankel"},
    {ErrorCode::degree_exceeds_support, "degree_exceeds_support"},
    {ErrorCode::eigensolver_failure, "eigensolver_failure"},
    {ErrorCode::unsupported_family, "unsupported_family"},
    {ErrorCode::non_integrable, "non_integrable"},
    {ErrorCode::jorgensen_violation, "jorgensen_violation"},
    {ErrorCode::non_quadratic_family, "non_quadratic_family"},
    {ErrorCode::margin_mismatch, "margin_mismatch"},
    {ErrorCode::wrong_case, "wrong_case"},
    {ErrorCode::budget_too_small, "budget_too_small"},
    {ErrorCode::t_out_of_range, "t_out_of_range"},
    {ErrorCode::eta_out_of_range, "eta_out_of_range"},
    {ErrorCode::z_out_of_range, "z_out_of_range"},
    {ErrorCode::parameter_below_half, "parameter_below_half"},
    {ErrorCode::invalid_mixing_support, "invalid_mixing_support"},
    {ErrorCode::infinite_support, "infinite_support"},
    {ErrorCode::unsupported_model, "unsupported_model"},
    {ErrorCode::insufficient_length, "insufficient_length"},
    {ErrorCode::quadrature_failure, "quadrature_failure"},
    {ErrorCode::resource_budget, "resource_budget"},
    {ErrorCode::degenerate_delta, "degenerate_delta"},
}};

}  // namespace

std::string_view to_string(ErrorCode code) {
  for (const auto& [c, name] : kErrorNames) {
    if (c == code) return name;
  }
  return "unknown";
}

double Params::at(std::string_view name) const {
  for (const auto& [key, value] : entries_) {
    if (key == name) return value;
  }
  fail(ErrorCode::invalid_argument, "missing parameter '" + std::string(name) + "'");
}

bool Params::contains(std::string_view name) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const auto& e) { return e.first == name; });
}

void Params::set(const std::string& name, double value) {
  for (auto& [key, v] : entries_) {
    if (key == name) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(name, value);
}

std::string format_real(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

double parse_real(std::string_view text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const char* end = text.data() + text.size();
  const char* begin = text.data();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    fail(ErrorCode::invalid_argument, "not a real number: '" + std::string(text) + "'");
  }
  return value;
}

Rational to_rational(double value) {
  if (!std::isfinite(value)) fail(ErrorCode::invalid_argument, "cannot convert non-finite value");
  int exponent = 0;
  double mantissa = std::frexp(value, &exponent);
  // mantissa * 2^53 is an exact integer
  const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  Rational r(scaled);
  if (exponent > 0) {
    r *= Rational(boost::multiprecision::cpp_int(1) << exponent);
  } else if (exponent < 0) {
    r /= Rational(boost::multiprecision::cpp_int(1) << -exponent);
  }
  return r;
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

}  // namespace lancaster_lab
