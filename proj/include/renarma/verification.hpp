#pragma once

/// @file
/// Gate battery run by `renewal_arma verify`: every analytic invariant of the
/// engine for one spec and, at the full level, the Monte-Carlo checks.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "renarma/arma.hpp"
#include "renarma/lifetime.hpp"
#include "renarma/simulate.hpp"

namespace renarma {

enum class VerifyLevel { quick, full };

struct Gate {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool at_least = false;  ///< pass iff measured >= threshold (else measured <= threshold)
  bool passed = false;
  std::string note;
};

struct VerificationReport {
  std::vector<Gate> gates;

  bool passed() const noexcept {
    for (const auto& g : gates)
      if (!g.passed) return false;
    return true;
  }
};

struct VerifyOptions {
  int M = 1;
  VerifyLevel level = VerifyLevel::quick;
  /// Checked in place of the factorized model when present.
  std::optional<ArmaModel> model;
  std::uint64_t seed = 20261019;
  std::int64_t steps = 1'000'000;
  unsigned threads = 1;
};

VerificationReport run_verification(const LifetimeSpec& spec, const VerifyOptions& options);

/// Range, mean and marginal checks of a simulated series against its own
/// embedded configuration.
VerificationReport verify_series(const CountSeries& series);

/// Richardson limit of (F(z)F(1/z) - 1)/(z-1)^2 along z = 1 + eps, which tends
/// to the lifetime variance. The quotient is symmetrized under z -> 1/z first so
/// one extrapolation step removes the whole O(eps^2) error.
double richardson_variance_limit(const RationalPGF& pgf, double eps1 = 1e-3, double eps2 = 1e-4);

/// `count` points e^{2 pi i j / (count+1)}, j = 1..count (z = 1 excluded).
std::vector<std::complex<double>> circle_grid(int count = 64);

}  // namespace renarma
