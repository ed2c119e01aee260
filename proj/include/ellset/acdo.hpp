#pragma once

#include <cmath>
#include <utility>

#include "ellset/errors.hpp"
#include "ellset/operators.hpp"
#include "ellset/symmat.hpp"

namespace ellset {

/// Output of the ray bisection: value = -inf{t | X + tI in Theta_plus(x)},
/// with the final bracket and the number of F evaluations spent.
struct AcdoResult {
  double value = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  int evals = 0;
};

namespace detail {

constexpr double kRayHorizon = 1048576.0;  // 2^20

/// Locates the flip of a monotone boolean ray r (false for small t, true
/// for large t): expands geometrically from t = +-1 out to the horizon,
/// then bisects to width <= tol. Returns (lo, hi) with r(lo) false and
/// r(hi) true.
template <typename Fn>
std::pair<double, double> bracket_flip(Fn&& r, double tol) {
  double lo, hi;
  if (r(1.0)) {
    hi = 1.0;
    double t = -1.0;
    while (r(t)) {
      hi = t;
      t *= 2.0;
      if (t < -kRayHorizon)
        throw NoBracket("ray bisection: membership never turns false (level set is the whole ray)");
    }
    lo = t;
  } else {
    lo = 1.0;
    double t = 2.0;
    while (!r(t)) {
      lo = t;
      t *= 2.0;
      if (t > kRayHorizon)
        throw NoBracket("ray bisection: membership never turns true (level set empty along ray)");
    }
    hi = t;
  }
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at floating-point resolution
    if (r(mid))
      hi = mid;
    else
      lo = mid;
  }
  return {lo, hi};
}

}  // namespace detail

/// F_bar(X,x) = -inf{t | X + tI in Theta_plus(x)} by bracketed bisection.
/// Ellipticity at 0 makes the plus-membership indicator monotone in t,
/// which is all the bisection needs; F itself may be discontinuous.
inline AcdoResult compute_acdo(const EllipticOperator& F, const SymMat& X, const Point& x,
                               double tol) {
  if (tol <= 0.0) throw PreconditionNotMet("compute_acdo: tol must be > 0");
  int evals = 0;
  auto probe = [&](double t) {
    ++evals;
    return in_level_set(F, X.shifted(t), x, Side::plus);
  };
  auto [lo, hi] = detail::bracket_flip(probe, tol);
  return AcdoResult{-0.5 * (lo + hi), lo, hi, evals};
}

/// Same number as compute_acdo: the signed operator-norm distance to the
/// null-level boundary, positive exactly when X lies in Theta_plus(x).
inline double signed_distance_to_gamma(const EllipticOperator& F, const SymMat& X, const Point& x,
                                       double tol) {
  return compute_acdo(F, X, x, tol).value;
}

/// The two one-sided critical shifts along the ray X + tI. For operators
/// with a thin null-level set they agree to bisection accuracy; a gap
/// inf_plus - sup_minus below -2*tol certifies an interior plateau of
/// {F = 0} along the ray.
struct SupInfGap {
  double sup_minus = 0.0;  // sup{t | X + tI in Theta_minus}
  double inf_plus = 0.0;   // inf{t | X + tI in Theta_plus}
  int evals = 0;

  double gap() const { return inf_plus - sup_minus; }
};

inline SupInfGap sup_inf_gap(const EllipticOperator& F, const SymMat& X, const Point& x,
                             double tol) {
  if (tol <= 0.0) throw PreconditionNotMet("sup_inf_gap: tol must be > 0");
  SupInfGap out;
  int evals = 0;
  auto plus_probe = [&](double t) {
    ++evals;
    return in_level_set(F, X.shifted(t), x, Side::plus);
  };
  auto [plo, phi] = detail::bracket_flip(plus_probe, tol);
  out.inf_plus = 0.5 * (plo + phi);
  auto leave_minus_probe = [&](double t) {
    ++evals;
    return !in_level_set(F, X.shifted(t), x, Side::minus);
  };
  auto [mlo, mhi] = detail::bracket_flip(leave_minus_probe, tol);
  out.sup_minus = 0.5 * (mlo + mhi);
  out.evals = evals;
  return out;
}

/// W - F_bar(W,x) I, the radial projection of W onto the null-level
/// boundary Gamma(x).
inline SymMat project_to_gamma(const EllipticOperator& F, const SymMat& W, const Point& x,
                               double tol) {
  return W.shifted(-compute_acdo(F, W, x, tol).value);
}

/// Two quadratic polynomials with identical boundary values on |p| = 1
/// but different interior values; both Hessians sit inside the zero set
/// of F. Exists only for operators whose zero set has interior along the
/// ray (positive sup/inf gap width).
struct PolynomialPair {
  SymMat hessian_phi;  // Hessian of phi; psi has Hessian hessian_phi - 2*eps*I
  double eps = 0.0;    // interior separation psi(0) - phi(0)

  double phi(const Point& p) const {
    double s = 0.0;
    for (int i = 0; i < hessian_phi.dim(); ++i)
      for (int j = 0; j < hessian_phi.dim(); ++j)
        s += hessian_phi.at(i, j) * p[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(j)];
    return 0.5 * s;
  }

  double psi(const Point& p) const {
    double r2 = 0.0;
    for (double c : p) r2 += c * c;
    return phi(p) + eps * (1.0 - r2);
  }
};

/// Builds the pair phi = (1/2) p^T X0 p and psi = phi + eps(1 - |p|^2)
/// from a detected gap at X: X0 = X + mid*I sits at the center of the
/// plateau and X0 - 2*eps*I stays inside it, so both polynomials satisfy
/// F(Hessian) = 0 while agreeing on the unit sphere.
inline PolynomialPair solution_pair_from_gap(const EllipticOperator& F, const SymMat& X,
                                             const Point& x, double tol) {
  SupInfGap g = sup_inf_gap(F, X, x, tol);
  if (g.gap() >= -4.0 * tol)
    throw PreconditionNotMet("solution_pair_from_gap: zero set is thin along the ray");
  double mid = 0.5 * (g.sup_minus + g.inf_plus);
  PolynomialPair pair;
  pair.hessian_phi = X.shifted(mid);
  pair.eps = (g.sup_minus - g.inf_plus) / 8.0;
  return pair;
}

}  // namespace ellset
