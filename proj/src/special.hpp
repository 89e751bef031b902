#ifndef LANCASTER_LAB_SRC_SPECIAL_HPP
#define LANCASTER_LAB_SRC_SPECIAL_HPP

#include <cmath>
#include <complex>
#include <numbers>

namespace lancaster_lab::detail {

/// log |Gamma(re + i im)| for re > 0 via recurrence shift and Stirling series.
inline double log_abs_gamma(double re, double im) {
  std::complex<double> z(re, im);
  std::complex<double> shift(0.0, 0.0);
  while (z.real() < 12.0) {
    shift += std::log(z);
    z += 1.0;
  }
  const std::complex<double> inv = 1.0 / z;
  const std::complex<double> inv2 = inv * inv;
  // Bernoulli terms B_{2k} / (2k (2k-1) z^{2k-1}), k = 1..6.
  const std::complex<double> series =
      inv * (1.0 / 12.0 +
             inv2 * (-1.0 / 360.0 +
                     inv2 * (1.0 / 1260.0 +
                             inv2 * (-1.0 / 1680.0 +
                                     inv2 * (1.0 / 1188.0 + inv2 * (-691.0 / 360360.0))))));
  const std::complex<double> lg = (z - 0.5) * std::log(z) - z +
                                  0.5 * std::log(2.0 * std::numbers::pi) + series - shift;
  return lg.real();
}

inline double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace lancaster_lab::detail

#endif  // LANCASTER_LAB_SRC_SPECIAL_HPP
