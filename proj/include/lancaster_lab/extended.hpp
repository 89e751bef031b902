#ifndef LANCASTER_LAB_EXTENDED_HPP
#define LANCASTER_LAB_EXTENDED_HPP

// Extended-precision and exact rational scalars, usable as Eigen scalars.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <Eigen/Core>

namespace lancaster_lab {

/// ~100 decimal digits. Expression templates are off so Eigen sees plain values.
using Extended = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<100>, boost::multiprecision::et_off>;

using Rational = boost::multiprecision::cpp_rational;

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Exact conversion (every finite double is a dyadic rational).
Rational to_rational(double value);
double to_double(const Rational& value);

}  // namespace lancaster_lab

namespace Eigen {

template <>
struct NumTraits<lancaster_lab::Extended>
    : GenericNumTraits<lancaster_lab::Extended> {
  using Self = lancaster_lab::Extended;
  using Real = Self;
  using NonInteger = Self;
  using Literal = Self;
  using Nested = Self;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 10,
    AddCost = 10,
    MulCost = 40
  };
  static Real epsilon() { return std::numeric_limits<Self>::epsilon(); }
  static Real dummy_precision() { return Real(1e-90); }
  static Real highest() { return (std::numeric_limits<Self>::max)(); }
  static Real lowest() { return std::numeric_limits<Self>::lowest(); }
  static int digits10() { return std::numeric_limits<Self>::digits10; }
  static int digits() { return std::numeric_limits<Self>::digits; }
  static Real infinity() { return std::numeric_limits<Self>::infinity(); }
  static Real quiet_NaN() { return std::numeric_limits<Self>::quiet_NaN(); }
};

}  // namespace Eigen

#endif  // LANCASTER_LAB_EXTENDED_HPP
