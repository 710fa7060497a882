#pragma once

/// @file
/// Real polynomials, symmetric Laurent polynomials and the outside-the-circle
/// spectral factorization built on top of them.
///
/// Coefficients are stored in ascending power order: `coeffs[0]` is the
/// constant term. Everything here is templated on the scalar so the same code
/// can run in `double` or `long double`.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <numbers>
#include <utility>
#include <vector>

#include "renarma/errors.hpp"

namespace renarma {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct PolyTolerances {
  /// |p(1)| allowed relative to the l1 norm of the coefficients.
  Scalar zero_at_one = Scalar(1e-10);
  /// Minimum distance of a factorization root from the unit circle.
  Scalar circle = Scalar(1e-8);
  /// Root residual bound, relative to the l1 norm.
  Scalar resid = Scalar(1e-10);
  /// Worst acceptable |a*b - 1| for a reciprocal root pair.
  Scalar pairing = Scalar(1e-6);
  /// Worst imaginary residue tolerated before truncating theta to real.
  Scalar real_residue = Scalar(1e-10);
};

namespace detail {

/// Drops trailing coefficients below 1e-13 of the largest magnitude.
template <typename Scalar>
Vector<Scalar> trim_trailing(Vector<Scalar> c) {
  if (c.size() == 0) return c;
  const Scalar cutoff = Scalar(1e-13) * c.cwiseAbs().maxCoeff();
  Eigen::Index n = c.size();
  while (n > 0 && (c[n - 1] == Scalar(0) || std::abs(c[n - 1]) < cutoff)) --n;
  c.conservativeResize(n);
  return c;
}

template <typename Scalar>
void require_finite(const Vector<Scalar>& c) {
  if (!c.allFinite()) throw ValidationError("polynomial coefficients must be finite");
}

/// Parlett-Reinsch balancing (radix 2). Similarity transform, eigenvalues are
/// unchanged but their sensitivity to rounding drops for companion matrices.
template <typename Scalar>
void balance(Matrix<Scalar>& a) {
  constexpr Scalar radix = 2;
  constexpr Scalar sqrdx = radix * radix;
  const Eigen::Index n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar c = a.col(i).cwiseAbs().sum() - std::abs(a(i, i));
      Scalar r = a.row(i).cwiseAbs().sum() - std::abs(a(i, i));
      if (c == Scalar(0) || r == Scalar(0)) continue;
      Scalar g = r / radix;
      Scalar f = 1;
      const Scalar s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < Scalar(0.95) * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

}  // namespace detail

/// Real polynomial with trimmed trailing zeros; the zero polynomial is empty.
template <typename Scalar = double>
class Poly {
 public:
  using Coeffs = Vector<Scalar>;

  Poly() = default;

  explicit Poly(Coeffs coeffs) : coeffs_(detail::trim_trailing(std::move(coeffs))) {
    detail::require_finite(coeffs_);
  }

  Poly(std::initializer_list<Scalar> coeffs)
      : Poly(Coeffs(Eigen::Map<const Coeffs>(coeffs.begin(), Eigen::Index(coeffs.size())))) {}

  static Poly from(const std::vector<Scalar>& c) {
    return Poly(Coeffs(Eigen::Map<const Coeffs>(c.data(), Eigen::Index(c.size()))));
  }

  const Coeffs& coeffs() const noexcept { return coeffs_; }

  /// -1 for the zero polynomial.
  Eigen::Index degree() const noexcept { return coeffs_.size() - 1; }

  bool is_zero() const noexcept { return coeffs_.size() == 0; }

  /// Coefficient of z^i; zero past the degree.
  Scalar operator[](Eigen::Index i) const noexcept {
    return i >= 0 && i < coeffs_.size() ? coeffs_[i] : Scalar(0);
  }

  Scalar l1_norm() const noexcept { return coeffs_.cwiseAbs().sum(); }

  std::vector<Scalar> to_vector() const { return {coeffs_.data(), coeffs_.data() + coeffs_.size()}; }

 private:
  Coeffs coeffs_;
};

template <typename Scalar>
std::complex<Scalar> eval(const Poly<Scalar>& p, std::complex<Scalar> z) {
  std::complex<Scalar> acc(0);
  const auto& c = p.coeffs();
  for (Eigen::Index i = c.size() - 1; i >= 0; --i) acc = acc * z + c[i];
  return acc;
}

template <typename Scalar>
Scalar eval(const Poly<Scalar>& p, Scalar x) {
  Scalar acc(0);
  const auto& c = p.coeffs();
  for (Eigen::Index i = c.size() - 1; i >= 0; --i) acc = acc * x + c[i];
  return acc;
}

template <typename Scalar>
Poly<Scalar> operator+(const Poly<Scalar>& a, const Poly<Scalar>& b) {
  const Eigen::Index n = std::max(a.coeffs().size(), b.coeffs().size());
  Vector<Scalar> c(n);
  for (Eigen::Index i = 0; i < n; ++i) c[i] = a[i] + b[i];
  return Poly<Scalar>(std::move(c));
}

template <typename Scalar>
Poly<Scalar> operator-(const Poly<Scalar>& a, const Poly<Scalar>& b) {
  const Eigen::Index n = std::max(a.coeffs().size(), b.coeffs().size());
  Vector<Scalar> c(n);
  for (Eigen::Index i = 0; i < n; ++i) c[i] = a[i] - b[i];
  return Poly<Scalar>(std::move(c));
}

template <typename Scalar>
Poly<Scalar> operator*(const Poly<Scalar>& a, const Poly<Scalar>& b) {
  if (a.is_zero() || b.is_zero()) return {};
  const auto& x = a.coeffs();
  const auto& y = b.coeffs();
  Vector<Scalar> c = Vector<Scalar>::Zero(x.size() + y.size() - 1);
  for (Eigen::Index i = 0; i < x.size(); ++i) c.segment(i, y.size()) += x[i] * y;
  return Poly<Scalar>(std::move(c));
}

template <typename Scalar>
Poly<Scalar> operator*(Scalar s, const Poly<Scalar>& p) {
  return Poly<Scalar>(Vector<Scalar>(s * p.coeffs()));
}

template <typename Scalar>
Poly<Scalar> derivative(const Poly<Scalar>& p) {
  if (p.degree() < 1) return {};
  Vector<Scalar> c(p.degree());
  for (Eigen::Index i = 1; i <= p.degree(); ++i) c[i - 1] = Scalar(i) * p[i];
  return Poly<Scalar>(std::move(c));
}

/// All complex roots of p, with multiplicity.
///
/// Eigenvalues of the balanced companion matrix, then up to two Newton steps
/// per root (kept only when they shrink the residual), then exact conjugate
/// symmetrization. Throws if a root misses the residual bound
/// `|p(r)| <= resid * |p|_1 * max(1,|r|)^deg`.
template <typename Scalar>
std::vector<std::complex<Scalar>> roots(const Poly<Scalar>& p, const PolyTolerances<Scalar>& tol = {}) {
  using Cplx = std::complex<Scalar>;
  const Eigen::Index n = p.degree();
  if (n < 1) throw ValidationError("no roots of a constant");

  Matrix<Scalar> companion = Matrix<Scalar>::Zero(n, n);
  companion.diagonal(-1).setOnes();
  const Scalar lead = p[n];
  for (Eigen::Index i = 0; i < n; ++i) companion(i, n - 1) = -p[i] / lead;
  detail::balance(companion);

  Eigen::EigenSolver<Matrix<Scalar>> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NumericalError("companion eigenvalue solver did not converge");
  std::vector<Cplx> rts(solver.eigenvalues().data(), solver.eigenvalues().data() + n);

  const Poly<Scalar> dp = derivative(p);
  for (auto& z : rts) {
    for (int step = 0; step < 2; ++step) {
      const Cplx fz = eval(p, z);
      const Cplx dfz = eval(dp, z);
      if (dfz == Cplx(0)) break;
      const Cplx next = z - fz / dfz;
      if (!(std::abs(eval(p, next)) < std::abs(fz))) break;
      z = next;
    }
  }

  // Conjugate symmetrization: pair each upper-half root with its nearest
  // lower-half partner and average.
  std::vector<Cplx*> upper;
  std::vector<Cplx*> lower;
  for (auto& z : rts) {
    if (z.imag() > 0) upper.push_back(&z);
    else if (z.imag() < 0) lower.push_back(&z);
  }
  std::vector<bool> used(lower.size(), false);
  for (Cplx* u : upper) {
    std::size_t best = lower.size();
    Scalar best_dist = std::numeric_limits<Scalar>::infinity();
    for (std::size_t j = 0; j < lower.size(); ++j) {
      if (used[j]) continue;
      const Scalar dist = std::abs(*u - std::conj(*lower[j]));
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    if (best == lower.size()) {
      *u = Cplx(u->real(), 0);
      continue;
    }
    used[best] = true;
    const Cplx mid = (*u + std::conj(*lower[best])) / Scalar(2);
    *u = mid;
    *lower[best] = std::conj(mid);
  }
  for (std::size_t j = 0; j < lower.size(); ++j)
    if (!used[j]) *lower[j] = Cplx(lower[j]->real(), 0);

  const Scalar norm = p.l1_norm();
  for (const auto& z : rts) {
    const Scalar bound = tol.resid * norm * std::pow(std::max(Scalar(1), std::abs(z)), Scalar(n));
    if (!(std::abs(eval(p, z)) <= bound)) throw NumericalError("root residual exceeds tolerance");
  }
  return rts;
}

/// Polynomial with constant term one and the given zeros: prod (1 - z/a).
/// Zeros must come in conjugate pairs; throws if the product is not real to
/// within `max_imag`.
template <typename Scalar>
Poly<Scalar> from_zeros_unit_constant(const std::vector<std::complex<Scalar>>& zeros,
                                      Scalar max_imag = Scalar(1e-10)) {
  using Cplx = std::complex<Scalar>;
  std::vector<Cplx> c{Cplx(1)};
  for (const auto& a : zeros) {
    const Cplx w = -Scalar(1) / a;
    c.push_back(Cplx(0));
    for (std::size_t i = c.size() - 1; i > 0; --i) c[i] += w * c[i - 1];
  }
  Vector<Scalar> re(Eigen::Index(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (std::abs(c[i].imag()) > max_imag * std::max(Scalar(1), std::abs(c[i].real())))
      throw NumericalError("non-real polynomial from zero set");
    re[Eigen::Index(i)] = c[i].real();
  }
  return Poly<Scalar>(std::move(re));
}

/// Quotient q with p(z) = (1 - z) q(z). Requires p(1) ~ 0.
template <typename Scalar>
Poly<Scalar> deflate_at_one(const Poly<Scalar>& p, const PolyTolerances<Scalar>& tol = {}) {
  if (p.degree() < 1 || std::abs(eval(p, Scalar(1))) > tol.zero_at_one * p.l1_norm())
    throw NumericalError("no zero at z=1");
  // p = (1 - z) q  =>  q_i = p_0 + ... + p_i; the last partial sum is p(1).
  Vector<Scalar> q(p.degree());
  Scalar acc = 0;
  for (Eigen::Index i = 0; i < p.degree(); ++i) {
    acc += p[i];
    q[i] = acc;
  }
  return Poly<Scalar>(std::move(q));
}

/// Symmetric Laurent polynomial c_0 + sum_h c_h (z^h + z^-h).
template <typename Scalar = double>
class SymLaurent {
 public:
  using Coeffs = Vector<Scalar>;

  SymLaurent() = default;

  explicit SymLaurent(Coeffs c) : c_(detail::trim_trailing(std::move(c))) { detail::require_finite(c_); }

  SymLaurent(std::initializer_list<Scalar> c)
      : SymLaurent(Coeffs(Eigen::Map<const Coeffs>(c.begin(), Eigen::Index(c.size())))) {}

  const Coeffs& coeffs() const noexcept { return c_; }
  Eigen::Index degree() const noexcept { return c_.size() - 1; }
  bool is_zero() const noexcept { return c_.size() == 0; }
  Scalar operator[](Eigen::Index h) const noexcept { return h >= 0 && h < c_.size() ? c_[h] : Scalar(0); }

  /// l1 norm of the full two-sided coefficient sequence.
  Scalar l1_norm() const noexcept {
    if (is_zero()) return 0;
    return std::abs(c_[0]) + 2 * c_.tail(c_.size() - 1).cwiseAbs().sum();
  }

  /// Value at z = 1.
  Scalar at_one() const noexcept {
    if (is_zero()) return 0;
    return c_[0] + 2 * c_.tail(c_.size() - 1).sum();
  }

  /// Value at z = e^{it}: c_0 + 2 sum c_h cos(ht).
  Scalar on_circle(Scalar t) const noexcept {
    Scalar acc = 0;
    for (Eigen::Index h = c_.size() - 1; h >= 1; --h) acc += c_[h] * std::cos(Scalar(h) * t);
    return (is_zero() ? Scalar(0) : c_[0]) + 2 * acc;
  }

  /// The palindromic ordinary polynomial z^d N(z) of degree 2d.
  Poly<Scalar> to_palindromic() const {
    const Eigen::Index d = degree();
    if (d < 0) return {};
    Vector<Scalar> p(2 * d + 1);
    for (Eigen::Index h = 0; h <= d; ++h) {
      p[d + h] = c_[h];
      p[d - h] = c_[h];
    }
    return Poly<Scalar>(std::move(p));
  }

 private:
  Coeffs c_;
};

template <typename Scalar>
std::complex<Scalar> eval(const SymLaurent<Scalar>& n, std::complex<Scalar> z) {
  if (n.is_zero()) return {};
  if (z == std::complex<Scalar>(0)) throw NumericalError("singular evaluation point");
  const std::complex<Scalar> zi = Scalar(1) / z;
  std::complex<Scalar> acc(0);
  for (Eigen::Index h = n.degree(); h >= 1; --h) acc += n[h] * (std::pow(z, int(h)) + std::pow(zi, int(h)));
  return acc + n[0];
}

/// Q(z)Q(1/z) - P(z)P(1/z) as a symmetric Laurent polynomial.
template <typename Scalar>
SymLaurent<Scalar> sym_product_diff(const Poly<Scalar>& P, const Poly<Scalar>& Q) {
  const Eigen::Index d = std::max(P.degree(), Q.degree());
  if (d < 0) return {};
  Vector<Scalar> c(d + 1);
  for (Eigen::Index h = 0; h <= d; ++h) {
    Scalar acc = 0;
    for (Eigen::Index j = 0; j + h <= Q.degree(); ++j) acc += Q[j] * Q[j + h];
    for (Eigen::Index j = 0; j + h <= P.degree(); ++j) acc -= P[j] * P[j + h];
    c[h] = acc;
  }
  return SymLaurent<Scalar>(std::move(c));
}

/// d with n(z) = (2 - z - 1/z) d(z), i.e. n divided by (1-z)(1-1/z).
template <typename Scalar>
SymLaurent<Scalar> divide_sym_by_unit_pair(const SymLaurent<Scalar>& n, const PolyTolerances<Scalar>& tol = {}) {
  if (n.degree() < 1 || std::abs(n.at_one()) > tol.zero_at_one * n.l1_norm())
    throw NumericalError("numerator lacks (1-z)(1-1/z) factor");
  const Eigen::Index d = n.degree();
  // z^d n(z) = (1-z)^2 A(z) and (1-z)^2 = -z (2 - z - 1/z), so d(z) = -z^{1-d} A(z).
  const Poly<Scalar> twice = [&] {
    const Poly<Scalar> pal = n.to_palindromic();
    Vector<Scalar> q(pal.degree());
    Scalar acc = 0;
    for (Eigen::Index i = 0; i < pal.degree(); ++i) q[i] = (acc += pal[i]);
    Vector<Scalar> a(pal.degree() - 1);
    acc = 0;
    for (Eigen::Index i = 0; i + 1 < pal.degree(); ++i) a[i] = (acc += q[i]);
    return Poly<Scalar>(std::move(a));
  }();
  // Average the two mirrored halves of A to restore exact symmetry.
  Vector<Scalar> out(d);
  for (Eigen::Index h = 0; h < d; ++h) out[h] = -Scalar(0.5) * (twice[d - 1 + h] + twice[d - 1 - h]);
  return SymLaurent<Scalar>(std::move(out));
}

template <typename Scalar>
struct OutsideFactor {
  Poly<Scalar> theta;  ///< theta(0) = 1, every zero strictly outside the unit circle
  Scalar k;            ///< d(z) = k theta(z) theta(1/z)
};

/// Spectral factor of a symmetric Laurent polynomial that is positive on the
/// unit circle.
template <typename Scalar>
OutsideFactor<Scalar> factor_outside(const SymLaurent<Scalar>& d, const PolyTolerances<Scalar>& tol = {}) {
  using Cplx = std::complex<Scalar>;
  constexpr int kGrid = 512;
  for (int j = 0; j < kGrid; ++j) {
    const Scalar t = 2 * std::numbers::pi_v<Scalar> * Scalar(j) / Scalar(kGrid);
    if (!(d.on_circle(t) > Scalar(0))) throw NumericalError("not a valid symmetric spectral density");
  }
  if (d.degree() == 0) return {Poly<Scalar>{Scalar(1)}, d[0]};

  const std::vector<Cplx> rts = roots(d.to_palindromic(), tol);
  for (const auto& a : rts)
    if (std::abs(std::abs(a) - Scalar(1)) < tol.circle)
      throw NumericalError("zero on unit circle: lifetime may be lattice or input invalid");

  // Greedy reciprocal pairing on |a b - 1|.
  struct Candidate {
    Scalar cost;
    std::size_t i, j;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < rts.size(); ++i)
    for (std::size_t j = i + 1; j < rts.size(); ++j) candidates.push_back({std::abs(rts[i] * rts[j] - Scalar(1)), i, j});
  std::sort(candidates.begin(), candidates.end(), [](const auto& x, const auto& y) { return x.cost < y.cost; });

  std::vector<bool> paired(rts.size(), false);
  std::vector<Cplx> outside;
  for (const auto& c : candidates) {
    if (paired[c.i] || paired[c.j]) continue;
    if (c.cost > tol.pairing) throw NumericalError("reciprocal root pairing failed");
    paired[c.i] = paired[c.j] = true;
    outside.push_back(std::abs(rts[c.i]) > std::abs(rts[c.j]) ? rts[c.i] : rts[c.j]);
  }
  if (Eigen::Index(outside.size()) != d.degree()) throw NumericalError("reciprocal root pairing failed");

  Poly<Scalar> theta = from_zeros_unit_constant(outside, tol.real_residue);
  const Scalar theta1 = eval(theta, Scalar(1));
  return {std::move(theta), d.at_one() / (theta1 * theta1)};
}

}  // namespace renarma
