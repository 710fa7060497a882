#include "renarma/simulate.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace renarma {

LifetimeSampler::LifetimeSampler(const LifetimeSpec& spec)
    : p_(spec.lag()), r_(spec.tail_rate()), log_r_(std::log(spec.tail_rate())) {
  const double mu = mean(spec);
  double acc = 0.0;
  for (double f : spec.head()) lifetime_cdf_.push_back(acc += f);
  lifetime_tail_ = survival(spec, p_);
  acc = 0.0;
  for (int n = 0; n < p_; ++n) delay_cdf_.push_back(acc += survival(spec, n) / mu);
  delay_tail_ = survival(spec, p_) / ((1.0 - r_) * mu);
}

std::int64_t LifetimeSampler::draw(double u, const std::vector<double>& cumulative, double tail_mass,
                                   std::int64_t tail_start) const {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  const std::int64_t offset = tail_start - static_cast<std::int64_t>(cumulative.size());
  if (it != cumulative.end()) return offset + (it - cumulative.begin());
  if (!(tail_mass > 0.0)) {
    // Rounding pushed u past a head that carries all the mass: return the
    // last value with positive probability.
    std::size_t last = cumulative.size() - 1;
    while (last > 0 && cumulative[last] == cumulative[last - 1]) --last;
    return offset + static_cast<std::int64_t>(last);
  }
  const double head_mass = cumulative.empty() ? 0.0 : cumulative.back();
  // Residual uniform on (0, 1]; the tail is geometric with ratio r from tail_start.
  const double v = std::clamp(1.0 - (u - head_mass) / tail_mass, std::numeric_limits<double>::min(), 1.0);
  if (r_ == 0.0) return tail_start;
  return tail_start + static_cast<std::int64_t>(std::floor(std::log(v) / log_r_));
}

std::int64_t LifetimeSampler::lifetime(StreamRng& rng) const {
  return draw(rng.uniform(), lifetime_cdf_, lifetime_tail_, p_ + 1);
}

std::int64_t LifetimeSampler::equilibrium_delay(StreamRng& rng) const {
  return draw(rng.uniform(), delay_cdf_, delay_tail_, p_);
}

std::int64_t sample_lifetime(const LifetimeSpec& spec, StreamRng& rng) { return LifetimeSampler(spec).lifetime(rng); }

std::int64_t sample_equilibrium_delay(const LifetimeSpec& spec, StreamRng& rng) {
  return LifetimeSampler(spec).equilibrium_delay(rng);
}

std::vector<std::uint8_t> simulate_chain(const LifetimeSpec& spec, std::int64_t steps, StreamRng& rng) {
  if (steps < 1) throw ValidationError("steps must be positive");
  const LifetimeSampler sampler(spec);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(steps), 0);
  for (std::int64_t t = sampler.equilibrium_delay(rng); t < steps; t += sampler.lifetime(rng)) bits[t] = 1;
  return bits;
}

CountSeries simulate_counts(const SimConfig& config, unsigned threads) {
  if (config.M < 1) throw ValidationError("superposition count M must be positive");
  if (config.steps < 1) throw ValidationError("steps must be positive");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(config.M));

  const auto steps = static_cast<std::size_t>(config.steps);
  std::vector<std::vector<int>> partial(threads, std::vector<int>(steps, 0));
  auto work = [&](unsigned worker) {
    for (int chain = static_cast<int>(worker); chain < config.M; chain += static_cast<int>(threads)) {
      StreamRng rng(config.seed, static_cast<std::uint64_t>(chain));
      const auto bits = simulate_chain(config.spec, config.steps, rng);
      for (std::size_t t = 0; t < steps; ++t) partial[worker][t] += bits[t];
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < threads; ++w) pool.emplace_back(work, w);
    work(0);
  }
  CountSeries out{std::move(partial[0]), config};
  for (unsigned w = 1; w < threads; ++w)
    for (std::size_t t = 0; t < steps; ++t) out.values[t] += partial[w][t];
  return out;
}

double sample_mean(std::span<const int> values) {
  if (values.empty()) throw ValidationError("empty series");
  double acc = 0.0;
  for (int v : values) acc += v;
  return acc / static_cast<double>(values.size());
}

std::vector<double> sample_acvf(std::span<const int> values, int hmax) {
  const auto n = static_cast<std::int64_t>(values.size());
  if (hmax < 0 || hmax >= n) throw ValidationError("hmax must be below the series length");
  const double ybar = sample_mean(values);
  std::vector<double> gamma(hmax + 1, 0.0);
  for (int h = 0; h <= hmax; ++h) {
    double acc = 0.0;
    for (std::int64_t t = 0; t + h < n; ++t) acc += (values[t] - ybar) * (values[t + h] - ybar);
    gamma[h] = acc / static_cast<double>(n);
  }
  return gamma;
}

BatchEstimate batch_means(std::span<const double> x, int batches) {
  const auto n = static_cast<std::int64_t>(x.size());
  if (batches < 2 || n < batches) throw ValidationError("batch means needs at least one point per batch");
  const std::int64_t size = n / batches;
  double total = 0.0;
  for (double v : x) total += v;
  std::vector<double> means(batches);
  for (int b = 0; b < batches; ++b) {
    double acc = 0.0;
    for (std::int64_t t = b * size; t < (b + 1) * size; ++t) acc += x[t];
    means[b] = acc / static_cast<double>(size);
  }
  double grand = 0.0;
  for (double m : means) grand += m;
  grand /= batches;
  double ss = 0.0;
  for (double m : means) ss += (m - grand) * (m - grand);
  return {total / static_cast<double>(n), std::sqrt(ss / (batches - 1) / batches)};
}

BatchEstimate acvf_batch_estimate(std::span<const int> values, int h, int batches) {
  const auto n = static_cast<std::int64_t>(values.size());
  if (h < 0 || h >= n) throw ValidationError("lag must be below the series length");
  const double ybar = sample_mean(values);
  std::vector<double> products(static_cast<std::size_t>(n - h));
  for (std::int64_t t = 0; t + h < n; ++t) products[t] = (values[t] - ybar) * (values[t + h] - ybar);
  const BatchEstimate raw = batch_means(products, batches);
  const double scale = static_cast<double>(n - h) / static_cast<double>(n);
  return {raw.mean * scale, raw.se * scale};
}

ConditionalFrequencies empirical_conditionals(std::span<const std::uint8_t> bits, int order) {
  if (order < 1 || order > 3) throw ValidationError("context order must be 1, 2 or 3");
  const std::size_t contexts = std::size_t{1} << order;
  ConditionalFrequencies out{order, std::vector<ContextFrequency>(contexts)};
  for (std::size_t t = static_cast<std::size_t>(order); t < bits.size(); ++t) {
    std::size_t code = 0;
    for (int j = 1; j <= order; ++j) code |= std::size_t{bits[t - j]} << (j - 1);
    ++out.contexts[code].count;
    out.contexts[code].ones += bits[t];
  }
  for (std::size_t code = 0; code < contexts; ++code) {
    auto& c = out.contexts[code];
    for (int j = 1; j <= order; ++j) c.context.push_back(static_cast<int>((code >> (j - 1)) & 1u));
    c.sparse = c.count < kMinContextCount;
    if (c.count == 0) {
      c.frequency = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    c.frequency = static_cast<double>(c.ones) / static_cast<double>(c.count);
    c.se = std::sqrt(c.frequency * (1.0 - c.frequency) / static_cast<double>(c.count));
  }
  return out;
}

ChiSquareResult binomial_gof(std::span<const int> values, int M, double p) {
  if (values.empty()) throw ValidationError("empty series");
  const double n = static_cast<double>(values.size());
  std::vector<double> observed(M + 1, 0.0);
  for (int v : values) {
    if (v < 0 || v > M) throw ValidationError("count outside [0, M]");
    observed[v] += 1.0;
  }
  std::vector<double> expected(M + 1);
  for (int k = 0; k <= M; ++k) {
    const double log_choose = std::lgamma(M + 1.0) - std::lgamma(k + 1.0) - std::lgamma(M - k + 1.0);
    expected[k] = n * std::exp(log_choose + k * std::log(p) + (M - k) * std::log1p(-p));
  }
  std::vector<std::pair<double, double>> cells;  // (observed, expected)
  double obs = 0.0, exp = 0.0;
  for (int k = 0; k <= M; ++k) {
    obs += observed[k];
    exp += expected[k];
    if (exp >= 5.0) {
      cells.emplace_back(obs, exp);
      obs = exp = 0.0;
    }
  }
  if (exp > 0.0 || obs > 0.0) {
    if (cells.empty()) cells.emplace_back(obs, exp);
    else {
      cells.back().first += obs;
      cells.back().second += exp;
    }
  }
  double stat = 0.0;
  for (const auto& [o, e] : cells) stat += (o - e) * (o - e) / e;
  const int dof = static_cast<int>(cells.size()) - 1;
  if (dof < 1) return {stat, dof, 1.0};
  const boost::math::chi_squared dist(dof);
  return {stat, dof, boost::math::cdf(boost::math::complement(dist, stat))};
}

}  // namespace renarma
