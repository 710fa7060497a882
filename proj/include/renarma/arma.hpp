#pragma once

/// @file
/// Causal-invertible ARMA representation of a renewal count series.
///
/// The autocovariance generating function of the superposed count series is
///
///   G(z) = (M/mu) [Q(z)Q(1/z) - P(z)P(1/z)] / ([Q(z)-P(z)][Q(1/z)-P(1/z)])
///
/// for F = P/Q. Dividing numerator and denominator by (1-z)(1-1/z)Q(0)^2 gives
/// phi(z)phi(1/z) downstairs and k theta(z)theta(1/z) upstairs, so the series
/// is ARMA with noise variance sigma^2 = kM/mu. The constant k can also be read
/// off at z = 1: k = sigma_L^2 Q(1)^2 / (theta(1)^2 Q(0)^2).

#include <complex>
#include <optional>
#include <vector>

#include "renarma/lifetime.hpp"

namespace renarma {

struct ArmaModel {
  Eigen::VectorXd phi;    ///< phi(z) = 1 - phi_1 z - ... - phi_p z^p
  Eigen::VectorXd theta;  ///< theta(z) = 1 + theta_1 z + ... + theta_q z^q
  double k = 0.0;
  int M = 1;
  double mu = 1.0;
  double sigma2 = 0.0;  ///< k M / mu

  int ar_order() const noexcept { return static_cast<int>(phi.size()); }
  int ma_order() const noexcept { return static_cast<int>(theta.size()); }
};

/// phi(z) as a polynomial.
Poly<double> ar_polynomial(const ArmaModel& model);
/// theta(z) as a polynomial.
Poly<double> ma_polynomial(const ArmaModel& model);

/// Full pipeline output, with both routes to k kept for reporting.
struct Factorization {
  ArmaModel model;
  double k_constant_term;   ///< normalization of the numerator factor
  double k_variance_route;  ///< sigma_L^2 Q(1)^2 / (theta(1)^2 Q(0)^2)
  double sigma_L2;
};

/// Relative agreement required between the two k routes.
inline constexpr double kRouteTolerance = 1e-9;

Factorization factorize_detailed(const RationalPGF& pgf, int M, const PolyTolerances<double>& tol = {});

/// Throws NumericalError when any polynomial stage fails or the two k routes
/// disagree beyond kRouteTolerance.
ArmaModel factorize(const RationalPGF& pgf, int M, const PolyTolerances<double>& tol = {});

/// Closed-form ARMA(2,1) factorization for the lag-2 constant-hazard family.
struct ClosedFormP2 {
  double phi1, phi2;
  double pi0, pi1;
  std::optional<double> a1;  ///< root of pi0 z + pi1 + pi0/z; empty when pi0 = 0
  std::vector<double> theta;  ///< {theta_1}, or empty when pi0 = 0
  double k;
};

ClosedFormP2 closed_form_p2(double f1, double f2, double r);

/// gamma(0..hmax) of the model through its truncated MA(infinity) expansion.
/// Throws NumericalError when phi has a root too close to the unit circle.
std::vector<double> arma_acvf(const ArmaModel& model, int hmax);

/// psi_0..psi_{n-1} of theta(z)/phi(z).
std::vector<double> psi_weights(const ArmaModel& model, int n);

/// sigma^2 theta(z)theta(1/z) / (phi(z)phi(1/z)).
std::complex<double> gen_eval_arma(const ArmaModel& model, std::complex<double> z);

struct RootInfo {
  std::complex<double> root;
  double modulus;
};

struct CausalityReport {
  std::vector<RootInfo> ar_roots;
  std::vector<RootInfo> ma_roots;
  bool causal = true;
  bool invertible = true;
  /// Smallest distance between an AR and an MA root (infinity if either is empty).
  double min_common_distance;
  bool coprime = true;

  bool passed() const noexcept { return causal && invertible && coprime; }
};

/// Root moduli of phi and theta; passes iff every modulus exceeds 1 + tol_circle
/// and no AR root lies within tol_circle of an MA root.
CausalityReport check_causal_invertible(const ArmaModel& model, double tol_circle = 1e-8);

}  // namespace renarma
