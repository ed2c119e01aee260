#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "ellset/errors.hpp"
#include "ellset/symmat.hpp"

namespace ellset {

/// Candidate for the 2n x 2n block inequality
/// diag(X, -Y) <= alpha * [[I, -I], [-I, I]].
struct BlockPair {
  SymMat X;
  SymMat Y;
  double alpha = 1.0;
};

namespace detail {

inline void validate_block_pair(const BlockPair& p) {
  if (p.X.dim() != p.Y.dim()) throw DimensionMismatch("BlockPair: X, Y dimension mismatch");
  if (p.alpha <= 0.0) throw PreconditionNotMet("BlockPair: alpha must be > 0");
}

/// X (I - eps X)^{-1} under the one-sided condition eps * lambda_max < 1,
/// which is all the block equivalence needs (large negative eigenvalues
/// keep I - eps X positive definite for eps > 0).
inline SymMat positive_shift_resolvent(const SymMat& x, double eps) {
  EigenDecomposition e = eig_sym(x);
  if (eps * e.values.back() >= 1.0)
    throw SingularShift("positive_shift_resolvent: eps * lambda_max >= 1");
  std::vector<double> mapped(e.values.size());
  for (std::size_t k = 0; k < e.values.size(); ++k)
    mapped[k] = e.values[k] / (1.0 - eps * e.values[k]);
  return assemble(e, mapped);
}

}  // namespace detail

/// diag(X,-Y) - alpha [[I,-I],[-I,I]]; the inequality holds iff this
/// defect matrix is negative semidefinite.
inline SymMat block_defect(const BlockPair& p) {
  detail::validate_block_pair(p);
  const int n = p.X.dim();
  SymMat m(2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m.at(i, j) = p.X.at(i, j);
      m.at(n + i, n + j) = -p.Y.at(i, j);
    }
    m.at(i, i) -= p.alpha;
    m.at(n + i, n + i) -= p.alpha;
    m.at(i, n + i) = p.alpha;
    m.at(n + i, i) = p.alpha;
  }
  return m;
}

inline bool block_inequality_holds(const BlockPair& p, double tol) {
  return max_eigenvalue(block_defect(p)) <= tol;
}

/// Log-spaced grid in [0, 1/alpha) clustering toward the open end, where
/// the resolvent inequality is tightest. First point is exactly 0; last
/// is (1 - 1e-6)/alpha.
inline std::vector<double> eps_grid_toward(double alpha, int points) {
  if (alpha <= 0.0) throw PreconditionNotMet("eps_grid_toward: alpha must be > 0");
  if (points < 2) throw PreconditionNotMet("eps_grid_toward: need at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    double frac = 1.0 - std::pow(10.0, -6.0 * k / (points - 1));
    grid[static_cast<std::size_t>(k)] = frac / alpha;
  }
  return grid;
}

/// Block inequality => for every eps in [0, 1/alpha): eps X < I and
/// X (I - eps X)^{-1} <= Y. Checked on the supplied grid (points outside
/// [0, 1/alpha) are skipped).
inline bool forward_direction_check(const BlockPair& p, const std::vector<double>& eps_grid,
                                    double tol) {
  detail::validate_block_pair(p);
  if (!block_inequality_holds(p, tol))
    throw PreconditionNotMet("forward_direction_check: block inequality does not hold");
  for (double eps : eps_grid) {
    if (eps < 0.0 || eps >= 1.0 / p.alpha) continue;
    if (eps == 0.0) {
      if (!psd_leq(p.X, p.Y, tol)) return false;
      continue;
    }
    if (max_eigenvalue(eps * p.X) >= 1.0 + tol) return false;
    if (!psd_leq(detail::positive_shift_resolvent(p.X, eps), p.Y, tol)) return false;
  }
  return true;
}

/// Outcome of the reverse implication test. When a hypothesis fails the
/// implication is vacuous on this instance; failed_eps records the first
/// grid point where it failed.
struct ReverseCheck {
  bool passed = false;
  bool hypotheses_hold = false;
  std::optional<double> failed_eps;
  double block_defect_max = 0.0;

  explicit operator bool() const { return passed; }
};

/// If eps X < I and X (I - eps X)^{-1} <= Y hold on a dense grid in
/// [0, 1/alpha), the block inequality with this alpha must hold.
inline ReverseCheck reverse_direction_check(const SymMat& X, const SymMat& Y, double alpha,
                                            const std::vector<double>& eps_grid, double tol) {
  BlockPair p{X, Y, alpha};
  detail::validate_block_pair(p);
  int usable = 0;
  for (double eps : eps_grid)
    if (eps >= 0.0 && eps < 1.0 / alpha) ++usable;
  if (usable < 50)
    throw PreconditionNotMet("reverse_direction_check: grid must have >= 50 points in [0, 1/alpha)");

  ReverseCheck out;
  for (double eps : eps_grid) {
    if (eps < 0.0 || eps >= 1.0 / alpha) continue;
    bool strict_ok = eps == 0.0 || max_eigenvalue(eps * X) < 1.0 - tol;
    if (!strict_ok) {
      out.failed_eps = eps;
      return out;
    }
    const SymMat lhs = eps == 0.0 ? X : detail::positive_shift_resolvent(X, eps);
    if (!psd_leq(lhs, Y, tol)) {
      out.failed_eps = eps;
      return out;
    }
  }
  out.hypotheses_hold = true;
  out.block_defect_max = max_eigenvalue(block_defect(p));
  out.passed = out.block_defect_max <= tol;
  return out;
}

/// Congruence inequality
/// Q1^T X Q1 - Q2^T X (I - delta X)^{-1} Q2 <= (1/delta) (Q1 - Q2)^T (Q1 - Q2)
/// for n x m matrices Q1, Q2.
inline bool congruence_resolvent_check(const SymMat& X, double delta, const RectMat& Q1, const RectMat& Q2,
                           double tol) {
  if (delta <= 0.0) throw PreconditionNotMet("congruence_resolvent_check: delta must be > 0");
  if (delta * op_norm(X) >= 1.0) throw SingularShift("congruence_resolvent_check: delta |X| >= 1");
  if (Q1.rows() != X.dim() || Q2.rows() != X.dim() || Q1.cols() != Q2.cols())
    throw DimensionMismatch("congruence_resolvent_check: Q shapes incompatible");
  SymMat lhs = congruence(Q1, X) - congruence(Q2, resolvent_transform(X, delta));
  SymMat rhs = (1.0 / delta) * gram(Q1 - Q2);
  return max_eigenvalue(lhs - rhs) <= tol;
}

/// Defect of X (I - delta X)^{-1} >= X + (delta/2) X^2; nonnegative up to
/// rounding for every delta >= 0 with delta |X| < 1.
inline double resolvent_lower_bound_defect(const SymMat& X, double delta) {
  SymMat gap = resolvent_transform(X, delta) - X - (0.5 * delta) * sym_square(X);
  return min_eigenvalue(gap);
}

}  // namespace ellset
