#ifndef LANCASTER_LAB_RNG_HPP
#define LANCASTER_LAB_RNG_HPP

// Seeded streams. Variates come from boost::random, whose algorithms are
// fixed across platforms (the <random> distributions are not), so traces
// are reproducible bit for bit.

#include <cstdint>
#include <random>
#include <string_view>

#include <boost/random/beta_distribution.hpp>
#include <boost/random/binomial_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace lancaster_lab {

using Rng = std::mt19937_64;
inline constexpr std::string_view kGeneratorId = "mt19937_64";

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

inline double sample_uniform(Rng& rng) { return boost::random::uniform_01<double>()(rng); }

inline double sample_normal(Rng& rng, double mean, double sd) {
  return boost::random::normal_distribution<double>(mean, sd)(rng);
}

inline double sample_gamma(Rng& rng, double shape, double scale) {
  return boost::random::gamma_distribution<double>(shape, scale)(rng);
}

inline double sample_beta(Rng& rng, double a, double b) {
  return boost::random::beta_distribution<double>(a, b)(rng);
}

inline long sample_poisson(Rng& rng, double mean) {
  if (mean <= 0.0) return 0;
  return boost::random::poisson_distribution<long, double>(mean)(rng);
}

inline long sample_binomial(Rng& rng, long n, double p) {
  return boost::random::binomial_distribution<long, double>(n, p)(rng);
}

}  // namespace lancaster_lab

#endif  // LANCASTER_LAB_RNG_HPP
