#pragma once

/// @file
/// Renewal probabilities, the stationary delayed sequence and the count-series
/// autocovariance.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "renarma/lifetime.hpp"

namespace renarma {

/// Default horizon for renewal tables.
inline constexpr int kDefaultHorizon = 512;

struct RenewalTable {
  std::vector<double> u;   ///< pure renewal probabilities u_0..u_N
  std::vector<double> nu;  ///< equilibrium-delayed probabilities nu_0..nu_N
  double mu;
  int N;
};

/// u_0 = 1, u_n = sum_{j<n} u_j f_{n-j}, from a pmf sequence f_0..f_N (f_0 is
/// ignored). Quadratic reference recursion.
std::vector<double> renewal_probs(std::span<const double> f, int N);

std::vector<double> renewal_probs(const LifetimeSpec& spec, int N);

/// nu_n = sum_{k<=n} b_k u_{n-k} with the equilibrium delay b.
std::vector<double> delayed_probs(const LifetimeSpec& spec, int N);

RenewalTable make_renewal_table(const LifetimeSpec& spec, int N = kDefaultHorizon);

/// gamma(h) = (M/mu)(u_h - 1/mu), h = 0..hmax.
std::vector<double> acvf_renewal(const LifetimeSpec& spec, int M, int hmax);

/// Same, from a renewal sequence and mean lifetime.
std::vector<double> acvf_from_renewals(std::span<const double> u, double mu, int M, int hmax);

/// Autocovariance generating function from the lifetime PGF:
///   G(z) = (M/mu) (1 - F(z)F(1/z)) / ((1 - F(z))(1 - F(1/z))).
/// Throws NumericalError at z = 0, z = 1 and at poles.
std::complex<double> gen_eval_renewal(const RationalPGF& pgf, int M, double mu, std::complex<double> z);

}  // namespace renarma
