#pragma once

// Shared test fixtures: the running lag-2 example, a random spec battery, and
// oracles that never touch the library's own algorithms.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "renarma/lifetime.hpp"

namespace renarma::testing {

inline LifetimeSpec geometric_half() { return make_constant_hazard({0.5}, 0.5); }

/// f_1 = 0.2, f_2 = 0.3, r = 0.6, so f_3 = 0.2 and mu = 3.05.
inline LifetimeSpec running_example() { return make_constant_hazard({0.2, 0.3}, 0.6); }

/// Head mass in [0.2, 0.9] split by exponential weights, tail rate in [0.05, 0.9].
inline LifetimeSpec random_spec(int p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mass(0.2, 0.9);
  std::uniform_real_distribution<double> rate(0.05, 0.9);
  std::exponential_distribution<double> weight(1.0);
  const double head_mass = mass(rng);
  std::vector<double> w(p);
  double total = 0.0;
  for (auto& x : w) total += (x = weight(rng) + 0.05);
  for (auto& x : w) x *= head_mass / total;
  return make_constant_hazard(w, rate(rng));
}

/// 200 specs for each p = 1..5, in a fixed order from a fixed seed.
inline std::vector<LifetimeSpec> battery(int per_lag = 200, std::uint64_t seed = 1989) {
  std::mt19937_64 rng(seed);
  std::vector<LifetimeSpec> out;
  for (int p = 1; p <= 5; ++p)
    for (int i = 0; i < per_lag; ++i) out.push_back(random_spec(p, rng));
  return out;
}

/// Brute-force pmf straight from the definition.
inline double oracle_pmf(const std::vector<double>& head, double r, int n) {
  const int p = static_cast<int>(head.size());
  double rest = 1.0;
  for (double f : head) rest -= f;
  if (n <= p) return head[n - 1];
  return (1.0 - r) * rest * std::pow(r, n - p - 1);
}

/// Renewal probabilities in long double from the brute-force pmf.
inline std::vector<long double> oracle_renewals(const std::vector<double>& head, double r, int N) {
  std::vector<long double> f(N + 1, 0.0L), u(N + 1, 0.0L);
  for (int n = 1; n <= N; ++n) f[n] = oracle_pmf(head, r, n);
  u[0] = 1.0L;
  for (int n = 1; n <= N; ++n)
    for (int j = 0; j < n; ++j) u[n] += u[j] * f[n - j];
  return u;
}

/// Moments by truncated series until the tail drops below 1e-14 relative.
struct SeriesMoments {
  double mean;
  double variance;
};

inline SeriesMoments oracle_moments(const std::vector<double>& head, double r) {
  long double m1 = 0.0L, m2 = 0.0L;
  for (int n = 1;; ++n) {
    const long double f = oracle_pmf(head, r, n);
    m1 += n * f;
    m2 += static_cast<long double>(n) * n * f;
    if (n > static_cast<int>(head.size()) + 1 && f * n * n < 1e-14L * m2) break;
    if (n > 100000) break;
  }
  return {static_cast<double>(m1), static_cast<double>(m2 - m1 * m1)};
}

}  // namespace renarma::testing
