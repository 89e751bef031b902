#ifndef LANCASTER_LAB_SRC_INTERNAL_HPP
#define LANCASTER_LAB_SRC_INTERNAL_HPP

#include <array>
#include <type_traits>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "lancaster_lab/extended.hpp"
#include "lancaster_lab/measure.hpp"
#include "lancaster_lab/orthopoly.hpp"

namespace lancaster_lab::detail {

/// Binomial, beta-binomial and atom-list measures only.
std::vector<Rational> exact_rational_moments(const Measure& measure, int max_order);

/// Stirling numbers of the second kind S(k, j) for k, j <= K.
std::vector<std::vector<boost::multiprecision::cpp_int>> stirling2(int K);

inline bool has_closed_form(Family family) {
  switch (family) {
    case Family::cartier_dunau:
    case Family::atoms:
    case Family::density:
    case Family::lattice:
      return false;
    default:
      return true;
  }
}

/// Monic recurrence of a measure in scalar S: closed form when the family
/// has one, Chebyshev's algorithm on moments otherwise.
template <class S>
MonicRecurrence<S> monic_recurrence(const Measure& measure, int N) {
  if (has_closed_form(measure.family())) {
    std::array<S, 3> p{S(0), S(0), S(0)};
    const auto& entries = measure.params().entries();
    for (std::size_t i = 0; i < entries.size() && i < 3; ++i) {
      if constexpr (std::is_same_v<S, Rational>) {
        p[i] = to_rational(entries[i].second);
      } else {
        p[i] = S(entries[i].second);
      }
    }
    return closed_form_recurrence<S>(measure.family(), p, N);
  }
  if constexpr (std::is_same_v<S, Rational>) {
    return chebyshev_algorithm<Rational>(detail::exact_rational_moments(measure, 2 * N + 1), N);
  } else {
    return chebyshev_algorithm<S>(moments(measure, 2 * N + 1).values, N);
  }
}

}  // namespace lancaster_lab::detail

#endif  // LANCASTER_LAB_SRC_INTERNAL_HPP
