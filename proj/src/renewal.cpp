#include "renarma/renewal.hpp"

#include <cmath>

namespace renarma {

std::vector<double> renewal_probs(std::span<const double> f, int N) {
  if (N < 0) throw ValidationError("renewal horizon must be nonnegative");
  std::vector<double> u(N + 1, 0.0);
  u[0] = 1.0;
  const int support = static_cast<int>(f.size()) - 1;
  for (int n = 1; n <= N; ++n) {
    double acc = 0.0;
    for (int j = std::max(0, n - support); j < n; ++j) acc += u[j] * f[n - j];
    u[n] = acc;
  }
  return u;
}

std::vector<double> renewal_probs(const LifetimeSpec& spec, int N) {
  if (N < 0) throw ValidationError("renewal horizon must be nonnegative");
  std::vector<double> f(N + 1, 0.0);
  for (int n = 1; n <= N; ++n) f[n] = pmf(spec, n);
  return renewal_probs(f, N);
}

std::vector<double> delayed_probs(const LifetimeSpec& spec, int N) {
  const std::vector<double> u = renewal_probs(spec, N);
  std::vector<double> b(N + 1);
  for (int n = 0; n <= N; ++n) b[n] = equilibrium_pmf(spec, n);
  std::vector<double> nu(N + 1, 0.0);
  for (int n = 0; n <= N; ++n) {
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) acc += b[k] * u[n - k];
    nu[n] = acc;
  }
  return nu;
}

RenewalTable make_renewal_table(const LifetimeSpec& spec, int N) {
  return {renewal_probs(spec, N), delayed_probs(spec, N), mean(spec), N};
}

std::vector<double> acvf_from_renewals(std::span<const double> u, double mu, int M, int hmax) {
  if (M < 1) throw ValidationError("superposition count M must be positive");
  if (hmax < 0 || hmax >= static_cast<int>(u.size())) throw ValidationError("lag horizon exceeds renewal table");
  std::vector<double> gamma(hmax + 1);
  for (int h = 0; h <= hmax; ++h) gamma[h] = (M / mu) * (u[h] - 1.0 / mu);
  return gamma;
}

std::vector<double> acvf_renewal(const LifetimeSpec& spec, int M, int hmax) {
  if (hmax < 0) throw ValidationError("lag horizon must be nonnegative");
  return acvf_from_renewals(renewal_probs(spec, hmax), mean(spec), M, hmax);
}

std::complex<double> gen_eval_renewal(const RationalPGF& pgf, int M, double mu, std::complex<double> z) {
  constexpr double kSingular = 1e-14;
  if (std::abs(z) < kSingular || std::abs(z - 1.0) < kSingular) throw NumericalError("singular evaluation point");
  const std::complex<double> zi = 1.0 / z;
  const std::complex<double> qz = eval(pgf.Q, z);
  const std::complex<double> qzi = eval(pgf.Q, zi);
  if (std::abs(qz) < kSingular || std::abs(qzi) < kSingular) throw NumericalError("singular evaluation point");
  const std::complex<double> fz = eval(pgf.P, z) / qz;
  const std::complex<double> fzi = eval(pgf.P, zi) / qzi;
  const std::complex<double> den = (1.0 - fz) * (1.0 - fzi);
  if (std::abs(1.0 - fz) < kSingular || std::abs(1.0 - fzi) < kSingular) throw NumericalError("singular evaluation point");
  return (double(M) / mu) * (1.0 - fz * fzi) / den;
}

}  // namespace renarma
