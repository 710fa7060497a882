#pragma once

/// @file
/// Monte-Carlo generation of stationary renewal chains and binomial count
/// series, plus the estimators used to check them.

#include <cstdint>
#include <span>
#include <vector>

#include "renarma/lifetime.hpp"
#include "renarma/rng.hpp"

namespace renarma {

struct SimConfig {
  LifetimeSpec spec;
  int M = 1;
  std::int64_t steps = 1;
  std::uint64_t seed = 0;
};

struct CountSeries {
  std::vector<int> values;  ///< Y_0..Y_{steps-1}, each in [0, M]
  SimConfig config;
};

/// Exact sampler for L and for the equilibrium delay L_0. Head values come
/// from an inverse CDF, tails from an analytic geometric draw (never truncated).
class LifetimeSampler {
 public:
  explicit LifetimeSampler(const LifetimeSpec& spec);

  std::int64_t lifetime(StreamRng& rng) const;
  std::int64_t equilibrium_delay(StreamRng& rng) const;

 private:
  std::int64_t draw(double u, const std::vector<double>& cumulative, double tail_mass, std::int64_t tail_start) const;

  int p_;
  double r_;
  double log_r_;
  std::vector<double> lifetime_cdf_;  ///< P(L <= n), n = 1..p+1
  double lifetime_tail_;              ///< P(L > p+1)
  std::vector<double> delay_cdf_;     ///< P(L_0 <= n), n = 0..p
  double delay_tail_;                 ///< P(L_0 > p)
};

std::int64_t sample_lifetime(const LifetimeSpec& spec, StreamRng& rng);
std::int64_t sample_equilibrium_delay(const LifetimeSpec& spec, StreamRng& rng);

/// Stationary renewal indicators X_0..X_{steps-1}: first renewal at L_0, then
/// at the partial sums L_0 + L_1 + ... .
std::vector<std::uint8_t> simulate_chain(const LifetimeSpec& spec, std::int64_t steps, StreamRng& rng);

/// Sum of M independent chains; chain i draws from StreamRng(seed, i). The
/// result depends only on the config, whatever the thread count (0 = all cores).
CountSeries simulate_counts(const SimConfig& config, unsigned threads = 1);

double sample_mean(std::span<const int> values);

/// Biased (divisor n) sample autocovariance, h = 0..hmax. Positive semidefinite.
std::vector<double> sample_acvf(std::span<const int> values, int hmax);

struct BatchEstimate {
  double mean;
  double se;
};

/// Mean and batch-means standard error of a per-time statistic.
BatchEstimate batch_means(std::span<const double> x, int batches = 30);

/// Batch-means SE of the lag-h sample autocovariance, with products centered
/// at the global mean.
BatchEstimate acvf_batch_estimate(std::span<const int> values, int h, int batches = 30);

struct ContextFrequency {
  std::vector<int> context;  ///< x_{t-1}, ..., x_{t-order}
  std::int64_t count = 0;
  std::int64_t ones = 0;
  double frequency = 0.0;  ///< ones / count (NaN when count == 0)
  double se = 0.0;         ///< binomial standard error
  bool sparse = false;     ///< fewer than kMinContextCount observations
};

inline constexpr std::int64_t kMinContextCount = 1000;

struct ConditionalFrequencies {
  int order;
  std::vector<ContextFrequency> contexts;  ///< indexed by sum_j x_{t-j} 2^{j-1}
};

/// Empirical P(x_t = 1 | previous `order` bits), order in {1, 2, 3}.
ConditionalFrequencies empirical_conditionals(std::span<const std::uint8_t> bits, int order);

struct ChiSquareResult {
  double statistic;
  int dof;
  double p_value;
};

/// Pearson goodness of fit of integer counts against Binomial(M, p); cells
/// with expected count below five are merged into their neighbours.
ChiSquareResult binomial_gof(std::span<const int> values, int M, double p);

}  // namespace renarma
