#pragma once

/// @file
/// Exact three-time laws of a lag-2 constant-hazard renewal chain, the
/// trivariate binomial MGF of the count series, and an empirical Markov-order
/// test for any bit sequence.
///
/// Index convention: 1 is time t, 2 is t-1, 3 is t-2. p_13 is
/// P(X_t = 1, X_{t-1} = 0, X_{t-2} = 1), and so on.

#include <cstdint>
#include <span>
#include <vector>

#include "renarma/lifetime.hpp"

namespace renarma {

struct TriJointTable {
  double q, p1, p2, p3, p12, p13, p23, p123;

  /// P(X_t = a, X_{t-1} = b, X_{t-2} = c).
  double prob(int a, int b, int c) const noexcept;
  double total() const noexcept { return q + p1 + p2 + p3 + p12 + p13 + p23 + p123; }
};

/// Conditional laws P(X_t = a | X_{t-1} = b, X_{t-2} = c), written p{a}g{b}{c}.
struct ConditionalTableP2 {
  double p1g00, p1g01, p1g10, p1g11;
  double p0g00, p0g01, p0g10, p0g11;
  /// P(X_t = 0 | 0, 0) through q / P(X_{t-1} = 0, X_{t-2} = 0) with the
  /// lag-2 mean formula; must agree with r.
  double p0g00_long_form;

  double prob(int a, int b, int c) const noexcept;
};

/// Requires a lag-2 spec; throws ValidationError otherwise.
TriJointTable joint_probs_p2(const LifetimeSpec& spec);
ConditionalTableP2 conditional_probs_p2(const LifetimeSpec& spec);

/// E[exp(s1 Y_t + s2 Y_{t-1} + s3 Y_{t-2})] for the M-fold superposition.
double mgf_trivariate(const TriJointTable& table, int M, double s1, double s2, double s3);

struct OrderDivergence {
  std::vector<int> context;  ///< x_{t-1}, ..., x_{t-order-1}
  std::int64_t count;        ///< observations of the long context
  std::int64_t parent_count; ///< observations of the truncated context
  double long_frequency;
  double short_frequency;
  double divergence;  ///< |long - short|
  double se;          ///< pooled SE of the difference under no dependence on the extra lag
  double z;           ///< divergence / se
  bool sparse;
};

struct OrderReport {
  int order;  ///< compares contexts of length order+1 with length order
  std::vector<OrderDivergence> contexts;
  double max_divergence;  ///< over non-sparse contexts
  double max_z;           ///< over non-sparse contexts
};

/// For each order o = 0..max_order, how much the conditional frequency of a
/// one changes when the context is extended from o to o+1 lags.
std::vector<OrderReport> markov_order_test(std::span<const std::uint8_t> bits, int max_order);

}  // namespace renarma
