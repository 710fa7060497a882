#pragma once

/// @file
/// Integer lifetime distributions with a constant hazard rate after lag p.
///
/// A lifetime is described by its head probabilities f_1..f_p and a tail rate
/// r in [0,1). The first tail probability f_{p+1} = (1-r)(1 - sum f_i) is
/// derived, and P(L = n) = f_{p+1} r^{n-p-1} for n >= p+1. With r = 0 the law
/// has finite support {1, ..., p+1}.

#include <cstdint>
#include <vector>

#include "renarma/polynomials.hpp"

namespace renarma {

struct LifetimeOptions {
  /// Require 0 < f_1. Turning this off still requires a nonlattice support.
  bool require_positive_f1 = true;
};

class LifetimeSpec {
 public:
  /// Validates and builds; see make_constant_hazard.
  LifetimeSpec(std::vector<double> head, double r, LifetimeOptions options = {});

  const std::vector<double>& head() const noexcept { return head_; }
  double tail_rate() const noexcept { return r_; }
  /// f_{p+1}.
  double tail_head() const noexcept { return tail_head_; }
  /// p.
  int lag() const noexcept { return static_cast<int>(head_.size()); }
  bool geometric_tail() const noexcept { return r_ > 0.0 && tail_head_ > 0.0; }
  bool finite_support() const noexcept { return !geometric_tail(); }
  /// Largest n with P(L = n) > 0, or -1 for an infinite support.
  int max_support() const noexcept;
  const LifetimeOptions& options() const noexcept { return options_; }

 private:
  std::vector<double> head_;
  double r_;
  double tail_head_;
  LifetimeOptions options_;
};

/// Throws ValidationError on invalid mass and LatticeError when the support
/// has gcd > 1.
LifetimeSpec make_constant_hazard(std::vector<double> head, double r, LifetimeOptions options = {});

/// P(L = n), n >= 1.
double pmf(const LifetimeSpec& spec, std::int64_t n);

/// P(L > n), n >= 0, in closed form.
double survival(const LifetimeSpec& spec, std::int64_t n);

double mean(const LifetimeSpec& spec);
double variance(const LifetimeSpec& spec);

/// f_k / P(L >= k); exactly 1 - r past the head.
double hazard(const LifetimeSpec& spec, std::int64_t k);

/// b_n = P(L > n) / mu, the stationary delay law.
double equilibrium_pmf(const LifetimeSpec& spec, std::int64_t n);

/// F(z) = P(z)/Q(z) in lowest terms, Q(0) = 1 and P(0) = 0.
struct RationalPGF {
  Poly<double> P;
  Poly<double> Q;
};

/// The constant-hazard PGF: Q = 1 - rz, P = z[f_1 + (f_2 - f_1 r)z + ... + (f_{p+1} - f_p r) z^p].
RationalPGF pgf(const LifetimeSpec& spec);

/// Normalizes Q(0) to one and checks every RationalPGF invariant: P(0) = 0,
/// P(1) = Q(1), numerical coprimality, a nonnegative power series and a
/// nonlattice support. Throws ValidationError / LatticeError.
RationalPGF make_rational_pgf(Poly<double> P, Poly<double> Q);

/// First n coefficients of the power series of P/Q (index 0 included).
std::vector<double> series(const RationalPGF& pgf, std::size_t n);

/// Resultant of P/|P| and Q/|Q| via the Sylvester determinant.
double normalized_resultant(const Poly<double>& P, const Poly<double>& Q);

/// F'(1), by the quotient rule.
double pgf_mean(const RationalPGF& pgf);
/// F''(1) + F'(1) - F'(1)^2, by the quotient rule.
double pgf_variance(const RationalPGF& pgf);

std::complex<double> pgf_eval(const RationalPGF& pgf, std::complex<double> z);

}  // namespace renarma
