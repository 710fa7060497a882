#include "renarma/arma.hpp"

#include <cmath>
#include <limits>

namespace renarma {
namespace {

constexpr double kTruncationTail = 1e-14;
constexpr double kNonCausalGap = 1e-6;

}  // namespace

Poly<double> ar_polynomial(const ArmaModel& model) {
  Eigen::VectorXd c(model.phi.size() + 1);
  c[0] = 1.0;
  c.tail(model.phi.size()) = -model.phi;
  return Poly<double>(std::move(c));
}

Poly<double> ma_polynomial(const ArmaModel& model) {
  Eigen::VectorXd c(model.theta.size() + 1);
  c[0] = 1.0;
  c.tail(model.theta.size()) = model.theta;
  return Poly<double>(std::move(c));
}

Factorization factorize_detailed(const RationalPGF& pgf, int M, const PolyTolerances<double>& tol) {
  if (M < 1) throw ValidationError("superposition count M must be positive");
  const double q0 = pgf.Q[0];

  // Q - P = (1 - z) Q(0) phi(z)
  const Poly<double> deflated = deflate_at_one(pgf.Q - pgf.P, tol);
  const Poly<double> phi = (1.0 / q0) * deflated;

  const SymLaurent<double> numerator = sym_product_diff(pgf.P, pgf.Q);
  const SymLaurent<double> reduced = divide_sym_by_unit_pair(numerator, tol);
  const OutsideFactor<double> factor = factor_outside(reduced, tol);

  Factorization out;
  out.sigma_L2 = pgf_variance(pgf);
  out.k_constant_term = factor.k / (q0 * q0);
  const double q1 = eval(pgf.Q, 1.0);
  const double theta1 = eval(factor.theta, 1.0);
  out.k_variance_route = out.sigma_L2 * q1 * q1 / (theta1 * theta1 * q0 * q0);
  if (!(std::abs(out.k_constant_term - out.k_variance_route) <= kRouteTolerance * std::abs(out.k_variance_route)))
    throw NumericalError("factorization inconsistent with the variance-based constant k");

  ArmaModel& model = out.model;
  model.phi = -phi.coeffs().tail(std::max<Eigen::Index>(phi.degree(), 0));
  model.theta = factor.theta.coeffs().tail(std::max<Eigen::Index>(factor.theta.degree(), 0));
  model.k = out.k_constant_term;
  model.M = M;
  model.mu = pgf_mean(pgf);
  model.sigma2 = model.k * M / model.mu;
  return out;
}

ArmaModel factorize(const RationalPGF& pgf, int M, const PolyTolerances<double>& tol) {
  return factorize_detailed(pgf, M, tol).model;
}

ClosedFormP2 closed_form_p2(double f1, double f2, double r) {
  const double f3 = (1.0 - r) * (1.0 - f1 - f2);
  ClosedFormP2 out;
  out.phi1 = r + f1 - 1.0;
  out.phi2 = f2 * r - f3;
  out.pi0 = f1 * (f3 - f2 * r);
  out.pi1 = f1 * f2 * (1 - r) * (1 - r) + f1 * f3 * (2 - r) + r * (1 - f1 * f1 - f2 * f2) + f2 * f3;
  const double constant = (1 - f1 * f1 - f2 * f2 - f3 * f3) + r * r * (1 - f1 * f1 - f2 * f2) + 2 * f1 * f2 * r +
                          2 * f2 * f3 * r;
  double theta = 0.0;
  if (out.pi0 != 0.0) {
    const double a1 = (-out.pi1 - std::sqrt(out.pi1 * out.pi1 - 4 * out.pi0 * out.pi0)) / (2 * out.pi0);
    out.a1 = a1;
    theta = -1.0 / a1;
    out.theta = {theta};
  }
  out.k = constant / (2 + 2 * theta * theta - 2 * theta);
  return out;
}

std::vector<double> psi_weights(const ArmaModel& model, int n) {
  std::vector<double> psi(std::max(n, 0), 0.0);
  for (int j = 0; j < n; ++j) {
    double acc = j == 0 ? 1.0 : (j <= model.ma_order() ? model.theta[j - 1] : 0.0);
    for (int i = 1; i <= model.ar_order() && i <= j; ++i) acc += model.phi[i - 1] * psi[j - i];
    psi[j] = acc;
  }
  return psi;
}

std::vector<double> arma_acvf(const ArmaModel& model, int hmax) {
  if (hmax < 0) throw ValidationError("lag horizon must be nonnegative");
  double rho = 0.0;
  const Poly<double> phi = ar_polynomial(model);
  if (phi.degree() >= 1)
    for (const auto& root : roots(phi)) rho = std::max(rho, 1.0 / std::abs(root));
  if (rho > 1.0 - kNonCausalGap) throw NumericalError("numerically non-causal");

  // rho^T / (1 - rho) < kTruncationTail, padded for repeated roots and the MA lag.
  int terms = model.ma_order() + 1;
  if (rho > 0.0) {
    const double base = std::log(kTruncationTail * (1.0 - rho)) / std::log(rho);
    terms += static_cast<int>(std::ceil(1.5 * base)) + 10 * model.ar_order();
  }
  const std::vector<double> psi = psi_weights(model, terms + hmax + 1);
  std::vector<double> gamma(hmax + 1, 0.0);
  for (int h = 0; h <= hmax; ++h) {
    double acc = 0.0;
    for (int j = 0; j <= terms; ++j) acc += psi[j] * psi[j + h];
    gamma[h] = model.sigma2 * acc;
  }
  return gamma;
}

std::complex<double> gen_eval_arma(const ArmaModel& model, std::complex<double> z) {
  constexpr double kSingular = 1e-14;
  if (std::abs(z) < kSingular) throw NumericalError("singular evaluation point");
  const std::complex<double> zi = 1.0 / z;
  const Poly<double> phi = ar_polynomial(model);
  const Poly<double> theta = ma_polynomial(model);
  const std::complex<double> den = eval(phi, z) * eval(phi, zi);
  if (std::abs(den) < kSingular) throw NumericalError("singular evaluation point");
  return model.sigma2 * eval(theta, z) * eval(theta, zi) / den;
}

CausalityReport check_causal_invertible(const ArmaModel& model, double tol_circle) {
  CausalityReport report;
  auto collect = [&](const Poly<double>& p, std::vector<RootInfo>& out, bool& ok) {
    if (p.degree() < 1) return;
    for (const auto& z : roots(p)) {
      out.push_back({z, std::abs(z)});
      if (!(std::abs(z) > 1.0 + tol_circle)) ok = false;
    }
  };
  collect(ar_polynomial(model), report.ar_roots, report.causal);
  collect(ma_polynomial(model), report.ma_roots, report.invertible);
  report.min_common_distance = std::numeric_limits<double>::infinity();
  for (const auto& a : report.ar_roots)
    for (const auto& b : report.ma_roots)
      report.min_common_distance = std::min(report.min_common_distance, std::abs(a.root - b.root));
  report.coprime = report.min_common_distance > tol_circle;
  return report;
}

}  // namespace renarma
