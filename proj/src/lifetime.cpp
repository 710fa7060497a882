#include "renarma/lifetime.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace renarma {
namespace {

constexpr double kMassSlack = 1e-12;

int support_gcd(const std::vector<double>& head, double tail_head, double r) {
  int g = 0;
  const int p = static_cast<int>(head.size());
  for (int i = 0; i < p; ++i)
    if (head[i] > 0.0) g = std::gcd(g, i + 1);
  if (tail_head > 0.0) {
    g = std::gcd(g, p + 1);
    if (r > 0.0) g = std::gcd(g, p + 2);
  }
  return g;
}

}  // namespace

LifetimeSpec::LifetimeSpec(std::vector<double> head, double r, LifetimeOptions options)
    : head_(std::move(head)), r_(r), tail_head_(0.0), options_(options) {
  if (head_.empty()) throw ValidationError("lifetime head must hold at least f_1");
  if (!std::isfinite(r_) || r_ < 0.0 || r_ >= 1.0) throw ValidationError("tail rate r must lie in [0, 1)");
  double mass = 0.0;
  for (std::size_t i = 0; i < head_.size(); ++i) {
    const double f = head_[i];
    if (!std::isfinite(f) || f < 0.0 || f > 1.0)
      throw ValidationError("head probability f_" + std::to_string(i + 1) + " must lie in [0, 1]");
    mass += f;
  }
  if (mass > 1.0 + kMassSlack) throw ValidationError("head probabilities sum to more than one");
  const double rest = std::max(0.0, 1.0 - mass);
  tail_head_ = (1.0 - r_) * rest;
  // Positive tail rate with no tail mass would leave r meaningless.
  if (r_ > 0.0 && !(tail_head_ > 0.0))
    throw ValidationError("geometric tail needs positive tail mass: head probabilities must sum to less than one");

  if (support_gcd(head_, tail_head_, r_) != 1) throw LatticeError("lattice lifetime: gcd of the support exceeds one");
  if (head_[0] >= 1.0) throw ValidationError("f_1 must be below one");
  if (options_.require_positive_f1 && !(head_[0] > 0.0)) throw ValidationError("f_1 must be positive");
}

int LifetimeSpec::max_support() const noexcept {
  if (geometric_tail()) return -1;
  if (tail_head_ > 0.0) return lag() + 1;
  int n = lag();
  while (n > 1 && head_[n - 1] == 0.0) --n;
  return n;
}

LifetimeSpec make_constant_hazard(std::vector<double> head, double r, LifetimeOptions options) {
  return LifetimeSpec(std::move(head), r, options);
}

double pmf(const LifetimeSpec& spec, std::int64_t n) {
  if (n <= 0) throw ValidationError("pmf index must be positive");
  const int p = spec.lag();
  if (n <= p) return spec.head()[n - 1];
  if (n == p + 1) return spec.tail_head();
  return spec.tail_head() * std::pow(spec.tail_rate(), double(n - p - 1));
}

double survival(const LifetimeSpec& spec, std::int64_t n) {
  if (n < 0) throw ValidationError("survival index must be nonnegative");
  const int p = spec.lag();
  const double r = spec.tail_rate();
  const double tail_mass = spec.tail_head() / (1.0 - r);
  if (n >= p) return n == p ? tail_mass : tail_mass * std::pow(r, double(n - p));
  double acc = tail_mass;
  for (int i = static_cast<int>(n); i < p; ++i) acc += spec.head()[i];
  return acc;
}

double mean(const LifetimeSpec& spec) {
  const int p = spec.lag();
  const double r = spec.tail_rate();
  double mu = 0.0;
  for (int i = 1; i <= p; ++i) mu += i * spec.head()[i - 1];
  return mu + spec.tail_head() * ((p + 1) - p * r) / ((1.0 - r) * (1.0 - r));
}

double variance(const LifetimeSpec& spec) {
  const int p = spec.lag();
  const double r = spec.tail_rate();
  // E[L(L-1)] = sum over the head + f_{p+1} sum_m (a+m)(a-1+m) r^m with a = p+1.
  double factorial2 = 0.0;
  for (int i = 1; i <= p; ++i) factorial2 += double(i) * (i - 1) * spec.head()[i - 1];
  const double a = p + 1;
  const double s = 1.0 - r;
  factorial2 += spec.tail_head() * (a * (a - 1) / s + (2 * a - 1) * r / (s * s) + r * (1 + r) / (s * s * s));
  const double mu = mean(spec);
  return factorial2 + mu - mu * mu;
}

double hazard(const LifetimeSpec& spec, std::int64_t k) {
  if (k <= 0) throw ValidationError("hazard index must be positive");
  const int p = spec.lag();
  if (k > p + 1 && spec.geometric_tail()) return 1.0 - spec.tail_rate();
  const double at_risk = survival(spec, k - 1);
  if (!(at_risk > 0.0)) throw ValidationError("hazard undefined: zero survivor mass");
  if (k == p + 1 && spec.geometric_tail()) return 1.0 - spec.tail_rate();
  return pmf(spec, k) / at_risk;
}

double equilibrium_pmf(const LifetimeSpec& spec, std::int64_t n) {
  return survival(spec, n) / mean(spec);
}

RationalPGF pgf(const LifetimeSpec& spec) {
  const int p = spec.lag();
  const double r = spec.tail_rate();
  std::vector<double> P(p + 2, 0.0);
  P[1] = spec.head()[0];
  for (int i = 2; i <= p; ++i) P[i] = spec.head()[i - 1] - spec.head()[i - 2] * r;
  P[p + 1] = spec.tail_head() - spec.head()[p - 1] * r;
  return {Poly<double>::from(P), Poly<double>{1.0, -r}};
}

std::vector<double> series(const RationalPGF& pgf, std::size_t n) {
  std::vector<double> out(n, 0.0);
  const double q0 = pgf.Q[0];
  for (std::size_t i = 0; i < n; ++i) {
    double acc = pgf.P[Eigen::Index(i)];
    for (Eigen::Index j = 1; j <= pgf.Q.degree() && j <= Eigen::Index(i); ++j) acc -= pgf.Q[j] * out[i - j];
    out[i] = acc / q0;
  }
  return out;
}

double normalized_resultant(const Poly<double>& P, const Poly<double>& Q) {
  const Eigen::Index m = P.degree();
  const Eigen::Index n = Q.degree();
  if (m < 0 || n < 0) return 0.0;
  const Vector<double> a = P.coeffs() / P.coeffs().norm();
  const Vector<double> b = Q.coeffs() / Q.coeffs().norm();
  if (m == 0) return std::pow(a[0], double(n));
  if (n == 0) return std::pow(b[0], double(m));
  Matrix<double> sylvester = Matrix<double>::Zero(m + n, m + n);
  for (Eigen::Index row = 0; row < n; ++row)
    for (Eigen::Index j = 0; j <= m; ++j) sylvester(row, row + j) = a[m - j];
  for (Eigen::Index row = 0; row < m; ++row)
    for (Eigen::Index j = 0; j <= n; ++j) sylvester(n + row, row + j) = b[n - j];
  return sylvester.fullPivLu().determinant();
}

RationalPGF make_rational_pgf(Poly<double> P, Poly<double> Q) {
  if (Q.is_zero() || Q[0] == 0.0) throw ValidationError("PGF denominator must have a nonzero constant term");
  if (P.is_zero()) throw ValidationError("PGF numerator must be nonzero");
  const double q0 = Q[0];
  RationalPGF out{(1.0 / q0) * P, (1.0 / q0) * Q};
  if (std::abs(out.P[0]) > 1e-12) throw ValidationError("PGF numerator must vanish at zero (no mass at L = 0)");
  if (std::abs(eval(out.P, 1.0) - eval(out.Q, 1.0)) > 1e-12) throw ValidationError("PGF must satisfy F(1) = 1");
  if (!(std::abs(normalized_resultant(out.P, out.Q)) > 1e-10))
    throw ValidationError("PGF numerator and denominator share a factor");
  const std::vector<double> f = series(out, 401);
  int g = 0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    if (f[i] < -1e-12) throw ValidationError("PGF power series has a negative coefficient");
    if (f[i] > 1e-12) g = std::gcd(g, static_cast<int>(i));
  }
  if (g != 1) throw LatticeError("lattice lifetime: gcd of the support exceeds one");
  return out;
}

double pgf_mean(const RationalPGF& pgf) {
  const double p1 = eval(pgf.P, 1.0);
  const double q1 = eval(pgf.Q, 1.0);
  const double dp = eval(derivative(pgf.P), 1.0);
  const double dq = eval(derivative(pgf.Q), 1.0);
  return (dp * q1 - p1 * dq) / (q1 * q1);
}

double pgf_variance(const RationalPGF& pgf) {
  const double p1 = eval(pgf.P, 1.0);
  const double q1 = eval(pgf.Q, 1.0);
  const double dp = eval(derivative(pgf.P), 1.0);
  const double dq = eval(derivative(pgf.Q), 1.0);
  const double ddp = eval(derivative(derivative(pgf.P)), 1.0);
  const double ddq = eval(derivative(derivative(pgf.Q)), 1.0);
  const double first = (dp * q1 - p1 * dq) / (q1 * q1);
  const double second = (ddp * q1 - p1 * ddq) / (q1 * q1) - 2.0 * dq * (dp * q1 - p1 * dq) / (q1 * q1 * q1);
  return second + first - first * first;
}

std::complex<double> pgf_eval(const RationalPGF& pgf, std::complex<double> z) {
  return eval(pgf.P, z) / eval(pgf.Q, z);
}

}  // namespace renarma
