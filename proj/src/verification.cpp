#include "renarma/verification.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>

#include "renarma/markov.hpp"
#include "renarma/renewal.hpp"

namespace renarma {
namespace {

/// Auxiliary Monte-Carlo draws use streams above every chain index.
constexpr std::uint64_t kAuxStream = std::uint64_t{1} << 40;

class GateList {
 public:
  explicit GateList(VerificationReport& report) : report_(report) {}

  void at_most(std::string name, double threshold, const std::function<double()>& measure) {
    add(std::move(name), threshold, false, measure);
  }
  void at_least(std::string name, double threshold, const std::function<double()>& measure) {
    add(std::move(name), threshold, true, measure);
  }

 private:
  void add(std::string name, double threshold, bool at_least, const std::function<double()>& measure) {
    Gate g{std::move(name), std::numeric_limits<double>::quiet_NaN(), threshold, at_least, false, {}};
    try {
      g.measured = measure();
      g.passed = at_least ? g.measured >= threshold : g.measured <= threshold;
    } catch (const std::exception& e) {
      g.note = e.what();
    }
    report_.gates.push_back(std::move(g));
  }

  VerificationReport& report_;
};

double relative_gap(std::complex<double> a, std::complex<double> b) { return std::abs(a - b) / std::abs(b); }

/// Renewal sequence long enough that the autocovariance has decayed below
/// 1e-12 over its last 20 lags.
std::vector<double> decayed_acvf(const LifetimeSpec& spec, int M) {
  const double mu = mean(spec);
  for (int N = 256;; N *= 2) {
    const std::vector<double> u = renewal_probs(spec, N);
    double tail = 0.0;
    for (int h = N - 20; h <= N; ++h) tail = std::max(tail, std::abs((M / mu) * (u[h] - 1.0 / mu)));
    if (tail < 1e-12 || N >= (1 << 16)) {
      int H = N;
      while (H > 0 && std::abs((M / mu) * (u[H] - 1.0 / mu)) < 1e-12) --H;
      return acvf_from_renewals(u, mu, M, std::min(N, H + 1));
    }
  }
}

void analytic_gates(const LifetimeSpec& spec, const VerifyOptions& opt, GateList& gates) {
  const int p = spec.lag();
  const int M = opt.M;
  const double r = spec.tail_rate();
  const double mu = mean(spec);
  const RationalPGF F = pgf(spec);

  gates.at_most("lifetime.pgf_valid", 0.0, [&] {
    make_rational_pgf(F.P, F.Q);
    return 0.0;
  });
  gates.at_most("lifetime.pmf_tail_identity", 1e-12, [&] {
    constexpr int N = 100;
    double acc = 0.0;
    for (int n = 1; n <= N; ++n) acc += pmf(spec, n);
    return std::abs(acc + spec.tail_head() * std::pow(r, N - p) / (1.0 - r) - 1.0);
  });
  gates.at_most("lifetime.pgf_series_matches_pmf", 1e-12, [&] {
    const std::vector<double> f = series(F, 201);
    double worst = 0.0;
    for (int n = 1; n <= 200; ++n) worst = std::max(worst, std::abs(f[n] - pmf(spec, n)));
    return worst;
  });
  gates.at_most("lifetime.mean_quotient_rule", 1e-10, [&] { return std::abs(mu - pgf_mean(F)); });
  gates.at_most("lifetime.variance_quotient_rule", 1e-10, [&] { return std::abs(variance(spec) - pgf_variance(F)); });
  if (spec.geometric_tail()) {
    gates.at_most("lifetime.constant_hazard", 1e-14, [&] {
      double worst = 0.0;
      for (int k = p + 1; k <= p + 20; ++k) worst = std::max(worst, std::abs(hazard(spec, k) - (1.0 - r)));
      return worst;
    });
  }

  gates.at_most("renewal.stationarity", 1e-12, [&] {
    const std::vector<double> nu = delayed_probs(spec, 500);
    double worst = 0.0;
    for (double v : nu) worst = std::max(worst, std::abs(v - 1.0 / mu));
    return worst;
  });
  gates.at_most("renewal.ergodicity", 1e-9, [&] {
    constexpr int N = 4096;
    return std::abs(renewal_probs(spec, N)[N] - 1.0 / mu);
  });
  gates.at_most("renewal.binomial_variance", 1e-12, [&] {
    const double q = 1.0 / mu;
    return std::abs(acvf_renewal(spec, M, 0)[0] - M * q * (1.0 - q));
  });
  gates.at_most("renewal.generating_function_series", 1e-8, [&] {
    const std::vector<double> gamma = decayed_acvf(spec, M);
    double worst = 0.0;
    for (const auto& z : circle_grid()) {
      const double t = std::arg(z);
      double acc = gamma[0];
      for (std::size_t h = 1; h < gamma.size(); ++h) acc += 2.0 * gamma[h] * std::cos(double(h) * t);
      worst = std::max(worst, relative_gap(gen_eval_renewal(F, M, mu, z), acc));
    }
    return worst;
  });

  gates.at_most("polynomials.factor_reconstruction", 1e-9, [&] {
    const SymLaurent<double> d = divide_sym_by_unit_pair(sym_product_diff(F.P, F.Q));
    const OutsideFactor<double> fac = factor_outside(d);
    double worst = 0.0;
    for (const auto& z : circle_grid(63)) {
      const std::complex<double> target = eval(d, z);
      worst = std::max(worst, std::abs(fac.k * eval(fac.theta, z) * eval(fac.theta, 1.0 / z) - target) / std::abs(target));
    }
    return worst;
  });

  std::optional<Factorization> fac;
  gates.at_most("arma.k_routes", kRouteTolerance, [&] {
    fac = factorize_detailed(F, M);
    return std::abs(fac->k_constant_term - fac->k_variance_route) / std::abs(fac->k_variance_route);
  });
  const auto model = [&]() -> const ArmaModel& {
    if (opt.model) return *opt.model;
    if (!fac) throw NumericalError("factorization unavailable");
    return fac->model;
  };
  gates.at_least("arma.causal_invertible", 1.0 + 1e-8, [&] {
    const CausalityReport rep = check_causal_invertible(model());
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& x : rep.ar_roots) smallest = std::min(smallest, x.modulus);
    for (const auto& x : rep.ma_roots) smallest = std::min(smallest, x.modulus);
    return smallest;
  });
  gates.at_least("arma.no_common_roots", 1e-8, [&] { return check_causal_invertible(model()).min_common_distance; });
  gates.at_most("arma.generating_function_identity", 1e-9, [&] {
    double worst = 0.0;
    for (const auto& z : circle_grid())
      worst = std::max(worst, relative_gap(gen_eval_arma(model(), z), gen_eval_renewal(F, M, mu, z)));
    return worst;
  });
  gates.at_most("arma.acvf_identity", 1e-8, [&] {
    const std::vector<double> a = arma_acvf(model(), 50);
    const std::vector<double> b = acvf_renewal(spec, M, 50);
    double worst = 0.0;
    for (int h = 0; h <= 50; ++h) worst = std::max(worst, std::abs(a[h] - b[h]));
    return worst;
  });
  if (spec.geometric_tail() && F.P.degree() == p + 1) {
    gates.at_most("arma.degree_law", 0.0, [&] {
      return std::abs(model().ar_order() - p) + std::abs(model().ma_order() - (p - 1));
    });
  }
  gates.at_most("arma.variance_limit", 1e-6, [&] { return std::abs(richardson_variance_limit(F) - variance(spec)); });

  if (p != 2) return;
  const double f1 = spec.head()[0];
  gates.at_most("arma.closed_form_p2", 1e-8, [&] {
    const ClosedFormP2 cf = closed_form_p2(f1, spec.head()[1], r);
    const ArmaModel& m = model();
    const double theta_num = m.ma_order() > 0 ? m.theta[0] : 0.0;
    const double theta_cf = cf.theta.empty() ? 0.0 : cf.theta[0];
    const double phi2 = m.ar_order() > 1 ? m.phi[1] : 0.0;
    return std::max({std::abs(cf.phi1 - m.phi[0]), std::abs(cf.phi2 - phi2), std::abs(theta_cf - theta_num),
                     std::abs(cf.k - m.k)});
  });

  const TriJointTable table = joint_probs_p2(spec);
  const ConditionalTableP2 cond = conditional_probs_p2(spec);
  gates.at_most("markov.table_mass", 1e-12, [&] { return std::abs(table.total() - 1.0); });
  gates.at_most("markov.table_marginals", 1e-12, [&] {
    double worst = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
      double m = 0.0;
      for (int code = 0; code < 8; ++code) {
        const int bits[3] = {(code >> 2) & 1, (code >> 1) & 1, code & 1};
        if (bits[axis]) m += table.prob(bits[0], bits[1], bits[2]);
      }
      worst = std::max(worst, std::abs(m - 1.0 / mu));
    }
    return worst;
  });
  gates.at_most("markov.pair_marginal", 1e-12, [&] { return std::abs(table.p12 + table.p123 - f1 / mu); });
  gates.at_most("markov.long_form_p0g00", 1e-12, [&] { return std::abs(cond.p0g00_long_form - r); });
  gates.at_most("markov.chapman_kolmogorov", 1e-12, [&] {
    // Pair law of (X_{t-1}, X_{t-2}), stepped once with the conditionals.
    double worst = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        double stepped = 0.0;
        for (int c = 0; c < 2; ++c) stepped += (table.prob(b, c, 0) + table.prob(b, c, 1)) * cond.prob(a, b, c);
        const double pair = table.prob(a, b, 0) + table.prob(a, b, 1);
        worst = std::max(worst, std::abs(stepped - pair));
      }
    return worst;
  });
  gates.at_most("markov.mgf_covariances", 1e-4, [&] {
    // Mixed second differences of the log MGF are the lag covariances.
    const double h = 1e-3;
    auto cgf = [&](double s1, double s2, double s3) { return std::log(mgf_trivariate(table, M, s1, s2, s3)); };
    const double c12 = (cgf(h, h, 0) - cgf(h, -h, 0) - cgf(-h, h, 0) + cgf(-h, -h, 0)) / (4 * h * h);
    const double c13 = (cgf(h, 0, h) - cgf(h, 0, -h) - cgf(-h, 0, h) + cgf(-h, 0, -h)) / (4 * h * h);
    const std::vector<double> gamma = acvf_renewal(spec, M, 2);
    return std::max(std::abs(c12 - gamma[1]), std::abs(c13 - gamma[2]));
  });
}

void monte_carlo_gates(const LifetimeSpec& spec, const VerifyOptions& opt, GateList& gates) {
  const int M = opt.M;
  const double mu = mean(spec);

  gates.at_least("simulate.lifetime_pmf_pvalue", 1e-3, [&] {
    // Pearson fit over L = 1..10 and a pooled cell L > 10.
    const LifetimeSampler sampler(spec);
    StreamRng rng(opt.seed, kAuxStream);
    constexpr int kDraws = 1'000'000;
    std::vector<double> hits(12, 0.0);
    for (int i = 0; i < kDraws; ++i) hits[std::min<std::int64_t>(sampler.lifetime(rng), 11)] += 1.0;
    double stat = 0.0, tail = 1.0;
    int cells = 0;
    for (int n = 1; n <= 11; ++n) {
      const double f = n <= 10 ? pmf(spec, n) : tail;
      tail -= n <= 10 ? f : 0.0;
      const double expected = f * kDraws;
      if (expected < 5.0) {
        if (hits[n] > 0.0 && f <= 0.0) return 0.0;
        continue;
      }
      stat += (hits[n] - expected) * (hits[n] - expected) / expected;
      ++cells;
    }
    if (cells < 2) return 1.0;
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(cells - 1), stat));
  });
  gates.at_most("simulate.delay_b0_z", 3.0, [&] {
    const LifetimeSampler sampler(spec);
    StreamRng rng(opt.seed, kAuxStream + 1);
    constexpr int kDraws = 1'000'000;
    int zeros = 0;
    for (int i = 0; i < kDraws; ++i) zeros += sampler.equilibrium_delay(rng) == 0;
    const double b0 = 1.0 / mu;
    return std::abs(double(zeros) / kDraws - b0) / std::sqrt(b0 * (1 - b0) / kDraws);
  });

  const CountSeries series = simulate_counts({spec, M, opt.steps, opt.seed}, opt.threads);
  const std::span<const int> y(series.values);
  gates.at_most("simulate.mean_z", 3.0, [&] {
    const std::vector<double> x(y.begin(), y.end());
    const BatchEstimate est = batch_means(x);
    return std::abs(est.mean - M / mu) / est.se;
  });
  gates.at_most("simulate.acvf_z", 5.0, [&] {
    const std::vector<double> gamma = acvf_renewal(spec, M, 10);
    double worst = 0.0;
    for (int h = 0; h <= 10; ++h) {
      const BatchEstimate est = acvf_batch_estimate(y, h);
      worst = std::max(worst, std::abs(est.mean - gamma[h]) / est.se);
    }
    return worst;
  });
  gates.at_most("simulate.stationarity_thirds_z", 5.0, [&] {
    const std::size_t third = y.size() / 3;
    std::vector<BatchEstimate> parts;
    for (int i = 0; i < 3; ++i) {
      const std::vector<double> x(y.begin() + i * third, y.begin() + (i + 1) * third);
      parts.push_back(batch_means(x));
    }
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        worst = std::max(worst, std::abs(parts[i].mean - parts[j].mean) /
                                    std::hypot(parts[i].se, parts[j].se));
    return worst;
  });
  gates.at_least("simulate.binomial_marginal_pvalue", 1e-3, [&] { return binomial_gof(y, M, 1.0 / mu).p_value; });

  if (spec.lag() != 2) return;
  StreamRng rng(opt.seed, kAuxStream + 2);
  const std::vector<std::uint8_t> bits = simulate_chain(spec, opt.steps, rng);
  const TriJointTable table = joint_probs_p2(spec);
  const ConditionalTableP2 cond = conditional_probs_p2(spec);

  gates.at_most("markov.empirical_joint_z", 3.0, [&] {
    double worst = 0.0;
    for (int code = 0; code < 8; ++code) {
      const int a = (code >> 2) & 1, b = (code >> 1) & 1, c = code & 1;
      std::vector<double> hit(bits.size() - 2);
      for (std::size_t t = 2; t < bits.size(); ++t) hit[t - 2] = bits[t] == a && bits[t - 1] == b && bits[t - 2] == c;
      const BatchEstimate est = batch_means(hit);
      worst = std::max(worst, std::abs(est.mean - table.prob(a, b, c)) / est.se);
    }
    return worst;
  });
  gates.at_most("markov.empirical_conditionals_z", 3.0, [&] {
    const ConditionalFrequencies freq = empirical_conditionals(bits, 2);
    double worst = 0.0;
    for (const auto& c : freq.contexts) {
      if (c.sparse) continue;
      worst = std::max(worst, std::abs(c.frequency - cond.prob(1, c.context[0], c.context[1])) / c.se);
    }
    return worst;
  });
  gates.at_most("markov.empirical_mgf_z", 3.0, [&] {
    const double points[3][3] = {{0.1, 0.2, 0.3}, {-0.2, 0.1, 0.05}, {0.15, -0.1, 0.2}};
    double worst = 0.0;
    for (const auto& s : points) {
      std::vector<double> x(y.size() - 2);
      for (std::size_t t = 2; t < y.size(); ++t) x[t - 2] = std::exp(s[0] * y[t] + s[1] * y[t - 1] + s[2] * y[t - 2]);
      const BatchEstimate est = batch_means(x);
      worst = std::max(worst, std::abs(est.mean - mgf_trivariate(table, M, s[0], s[1], s[2])) / est.se);
    }
    return worst;
  });
  gates.at_most("markov.order3_refinement_z", 4.0, [&] { return markov_order_test(bits, 2)[2].max_z; });
}

}  // namespace

std::vector<std::complex<double>> circle_grid(int count) {
  std::vector<std::complex<double>> out;
  for (int j = 1; j <= count; ++j) out.push_back(std::polar(1.0, 2.0 * std::numbers::pi * j / (count + 1)));
  return out;
}

double richardson_variance_limit(const RationalPGF& pgf, double eps1, double eps2) {
  // q(z) = (F(z)F(1/z) - 1)/(z-1)^2 satisfies q(1/z) = z^2 q(z), so z q(z) is
  // even in s = log z: z q(z) = sigma^2 + a s^2 + O(s^4). Extrapolate in s^2.
  auto symmetric = [&](double eps) {
    const double z = 1.0 + eps;
    const double fz = eval(pgf.P, z) / eval(pgf.Q, z);
    const double fzi = eval(pgf.P, 1.0 / z) / eval(pgf.Q, 1.0 / z);
    return z * (fz * fzi - 1.0) / (eps * eps);
  };
  const double s1 = std::pow(std::log1p(eps1), 2);
  const double s2 = std::pow(std::log1p(eps2), 2);
  return (s1 * symmetric(eps2) - s2 * symmetric(eps1)) / (s1 - s2);
}

VerificationReport run_verification(const LifetimeSpec& spec, const VerifyOptions& options) {
  if (options.M < 1) throw ValidationError("superposition count M must be positive");
  VerificationReport report;
  GateList gates(report);
  analytic_gates(spec, options, gates);
  if (options.level == VerifyLevel::full) monte_carlo_gates(spec, options, gates);
  return report;
}

VerificationReport verify_series(const CountSeries& series) {
  VerificationReport report;
  GateList gates(report);
  const int M = series.config.M;
  const double mu = mean(series.config.spec);
  const std::span<const int> y(series.values);
  gates.at_most("series.length_mismatch", 0.0, [&] {
    return std::abs(static_cast<double>(y.size()) - static_cast<double>(series.config.steps));
  });
  gates.at_most("series.out_of_range", 0.0, [&] {
    return static_cast<double>(std::count_if(y.begin(), y.end(), [&](int v) { return v < 0 || v > M; }));
  });
  gates.at_most("series.mean_z", 3.0, [&] {
    const std::vector<double> x(y.begin(), y.end());
    const BatchEstimate est = batch_means(x);
    return std::abs(est.mean - M / mu) / est.se;
  });
  gates.at_least("series.binomial_marginal_pvalue", 1e-3, [&] { return binomial_gof(y, M, 1.0 / mu).p_value; });
  return report;
}

}  // namespace renarma
