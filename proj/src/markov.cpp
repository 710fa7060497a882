#include "renarma/markov.hpp"

#include <cmath>
#include <limits>

#include "renarma/simulate.hpp"

namespace renarma {
namespace {

void require_lag_two(const LifetimeSpec& spec) {
  if (spec.lag() != 2) throw ValidationError("three-time tables need a lag-2 lifetime (two head probabilities)");
}

TriJointTable joint_with_mean(double f1, double f2, double mu) {
  TriJointTable t{};
  t.p1 = (1.0 - f1 - f2) / mu;
  t.p3 = t.p1;
  t.p13 = f2 / mu;
  t.p12 = f1 * (1.0 - f1) / mu;
  t.p23 = t.p12;
  t.p123 = f1 * f1 / mu;
  t.p2 = (1.0 - f1) * (1.0 - f1) / mu;
  t.q = 1.0 - (t.p1 + t.p2 + t.p3 + t.p12 + t.p13 + t.p23 + t.p123);
  return t;
}

}  // namespace

double TriJointTable::prob(int a, int b, int c) const noexcept {
  switch ((a << 2) | (b << 1) | c) {
    case 0b000: return q;
    case 0b100: return p1;
    case 0b010: return p2;
    case 0b001: return p3;
    case 0b110: return p12;
    case 0b101: return p13;
    case 0b011: return p23;
    default: return p123;
  }
}

double ConditionalTableP2::prob(int a, int b, int c) const noexcept {
  const double one = b == 0 ? (c == 0 ? p1g00 : p1g01) : (c == 0 ? p1g10 : p1g11);
  return a == 1 ? one : 1.0 - one;
}

TriJointTable joint_probs_p2(const LifetimeSpec& spec) {
  require_lag_two(spec);
  return joint_with_mean(spec.head()[0], spec.head()[1], mean(spec));
}

ConditionalTableP2 conditional_probs_p2(const LifetimeSpec& spec) {
  require_lag_two(spec);
  const double f1 = spec.head()[0];
  const double f2 = spec.head()[1];
  const double r = spec.tail_rate();
  ConditionalTableP2 c{};
  c.p1g00 = 1.0 - r;
  c.p1g01 = f2 / (1.0 - f1);
  c.p1g10 = f1;
  c.p1g11 = f1;
  c.p0g00 = r;
  c.p0g01 = (1.0 - f1 - f2) / (1.0 - f1);
  c.p0g10 = 1.0 - f1;
  c.p0g11 = 1.0 - f1;

  const double mu = 1.0 - f1 + (2.0 - r - f1 - f2) / (1.0 - r);
  const TriJointTable t = joint_with_mean(f1, f2, mu);
  c.p0g00_long_form = t.q / (1.0 - 2.0 / mu + f1 / mu);
  return c;
}

double mgf_trivariate(const TriJointTable& t, int M, double s1, double s2, double s3) {
  // 1 + sum p_abc (e^{s.abc} - 1), so the origin gives exactly 1.
  const double base = 1.0 + t.p1 * std::expm1(s1) + t.p2 * std::expm1(s2) + t.p3 * std::expm1(s3) +
                      t.p12 * std::expm1(s1 + s2) + t.p13 * std::expm1(s1 + s3) + t.p23 * std::expm1(s2 + s3) +
                      t.p123 * std::expm1(s1 + s2 + s3);
  return std::pow(base, M);
}

std::vector<OrderReport> markov_order_test(std::span<const std::uint8_t> bits, int max_order) {
  if (max_order < 0 || max_order > 10) throw ValidationError("max_order must lie in [0, 10]");
  const int longest = max_order + 1;
  std::vector<std::vector<std::int64_t>> counts(longest + 1), ones(longest + 1);
  for (int len = 0; len <= longest; ++len) {
    counts[len].assign(std::size_t{1} << len, 0);
    ones[len].assign(std::size_t{1} << len, 0);
  }
  // All lengths share the same time index set so contexts are exactly nested.
  for (std::size_t t = static_cast<std::size_t>(longest); t < bits.size(); ++t) {
    std::size_t code = 0;
    for (int len = 0; len <= longest; ++len) {
      ++counts[len][code];
      ones[len][code] += bits[t];
      if (len < longest) code |= std::size_t{bits[t - len - 1]} << len;
    }
  }

  std::vector<OrderReport> reports;
  for (int o = 0; o <= max_order; ++o) {
    OrderReport report{o, {}, 0.0, 0.0};
    for (std::size_t code = 0; code < counts[o + 1].size(); ++code) {
      const std::size_t parent = code & ((std::size_t{1} << o) - 1);
      OrderDivergence d{};
      for (int j = 0; j <= o; ++j) d.context.push_back(static_cast<int>((code >> j) & 1u));
      d.count = counts[o + 1][code];
      d.parent_count = counts[o][parent];
      d.sparse = d.count < kMinContextCount;
      if (d.count == 0 || d.parent_count == 0) {
        d.long_frequency = d.short_frequency = d.divergence = d.z = std::numeric_limits<double>::quiet_NaN();
        d.se = 0.0;
        report.contexts.push_back(std::move(d));
        continue;
      }
      d.long_frequency = double(ones[o + 1][code]) / double(d.count);
      d.short_frequency = double(ones[o][parent]) / double(d.parent_count);
      d.divergence = std::abs(d.long_frequency - d.short_frequency);
      // Nested samples: Var(long - short) = p(1-p)(1/n_long - 1/n_short).
      const double gap = std::max(0.0, 1.0 / double(d.count) - 1.0 / double(d.parent_count));
      d.se = std::sqrt(d.short_frequency * (1.0 - d.short_frequency) * gap);
      d.z = d.se > 0.0 ? d.divergence / d.se : (d.divergence > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      if (!d.sparse) {
        report.max_divergence = std::max(report.max_divergence, d.divergence);
        report.max_z = std::max(report.max_z, d.z);
      }
      report.contexts.push_back(std::move(d));
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace renarma
