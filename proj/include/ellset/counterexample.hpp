#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ellset/errors.hpp"
#include "ellset/operators.hpp"
#include "ellset/parallel.hpp"
#include "ellset/rng.hpp"
#include "ellset/symmat.hpp"

namespace ellset {

struct PlanePoint {
  double x = 0.0;
  double y = 0.0;
};

inline double norm2(const PlanePoint& p) { return std::sqrt(p.x * p.x + p.y * p.y); }

/// Signed fractional powers: t^{2/3} and t^{4/3} are even, t^{1/3} is odd.
inline double pow_two_thirds(double t) {
  double c = std::cbrt(t);
  return c * c;
}

inline double pow_four_thirds(double t) { return std::pow(std::abs(t), 4.0 / 3.0); }

struct SolutionValues {
  double u = 0.0;  // smooth solution x^{4/3} - y^{4/3}
  double v = 0.0;  // piecewise-linear solution |x| - |y|
};

inline SolutionValues eval_solutions(const PlanePoint& p) {
  return SolutionValues{pow_four_thirds(p.x) - pow_four_thirds(p.y),
                        std::abs(p.x) - std::abs(p.y)};
}

/// A(x,y) = [[x^{2/3}, -(xy)^{1/3}], [-(xy)^{1/3}, y^{2/3}]], built as the
/// outer product q q^T with q = (x^{1/3}, -y^{1/3}).
inline SymMat coefficient_matrix(const PlanePoint& p) {
  return plane_linear_coefficient(p.x, p.y);
}

/// Hessian of u off the coordinate axes:
/// diag((4/9) x^{-2/3}, -(4/9) y^{-2/3}).
inline SymMat hessian_u(const PlanePoint& p) {
  if (p.x == 0.0 || p.y == 0.0) throw OnAxis("hessian_u: undefined on the axes");
  SymMat h(2);
  h.at(0, 0) = (4.0 / 9.0) / pow_two_thirds(p.x);
  h.at(1, 1) = -(4.0 / 9.0) / pow_two_thirds(p.y);
  return h;
}

/// tr(A(p) * Hessian u(p)); cancels to 4/9 - 4/9 = 0 off the axes.
inline double classical_residual_u(const PlanePoint& p) {
  if (p.x == 0.0 || p.y == 0.0) throw OnAxis("classical_residual_u: point on an axis");
  return coefficient_matrix(p).inner(hessian_u(p));
}

/// tr(A(p) * (-t I)) = -t (x^{2/3} + y^{2/3}); strictly negative away from
/// the origin, which is why strict subsolutions push maxima to the
/// boundary there.
inline double max_principle_witness(const PlanePoint& p, double t) {
  if (t <= 0.0) throw PreconditionNotMet("max_principle_witness: t must be > 0");
  return -t * coefficient_matrix(p).trace();
}

enum class AxisSide { above_v_on_x_axis, below_v_on_y_axis };

/// Quadratic test function centered at a point on an axis; equals v at the
/// center by construction.
struct AxisQuadratic {
  PlanePoint center;
  double gx = 0.0, gy = 0.0;    // gradient
  double hxx = 0.0, hxy = 0.0, hyy = 0.0;

  double eval(const PlanePoint& p) const {
    double dx = p.x - center.x, dy = p.y - center.y;
    double base = std::abs(center.x) - std::abs(center.y);
    return base + gx * dx + gy * dy + 0.5 * (hxx * dx * dx + 2.0 * hxy * dx * dy + hyy * dy * dy);
  }
};

struct AxisCheckResult {
  bool pass = false;
  /// Extreme raw residual tr(A * H) over accepted quadratics: the minimum
  /// for the above-side check (must be >= -1e-9), the maximum for the
  /// below-side check (must be <= 1e-9).
  double extreme_residual = 0.0;
  int accepted = 0;
  int trials = 0;
  std::vector<AxisQuadratic> accepted_quadratics;
};

namespace detail {

constexpr double kAxisGridRadius = 0.05;
constexpr int kAxisGridHalf = 20;  // 41 x 41 nodes
constexpr double kAxisResidualTol = 1e-9;

/// Discrete touching filter: sign * (phi - v) >= 0 on every node of the
/// local grid (sign +1 for touching from above). Equality holds at the
/// center by construction.
inline bool touches_on_grid(const AxisQuadratic& q, double sign) {
  const double hg = kAxisGridRadius / kAxisGridHalf;
  for (int i = -kAxisGridHalf; i <= kAxisGridHalf; ++i) {
    for (int j = -kAxisGridHalf; j <= kAxisGridHalf; ++j) {
      PlanePoint p{q.center.x + i * hg, q.center.y + j * hg};
      double v = std::abs(p.x) - std::abs(p.y);
      if (sign * (q.eval(p) - v) < 0.0) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Random quadratics filtered to touch v on the requested side at
/// (x0, 0) or (0, x0); every accepted one must satisfy the sign condition
/// on tr(A * H), which only sees the curvature along the axis direction.
inline AxisCheckResult axis_viscosity_check(double x0, AxisSide side, int trials,
                                            std::uint64_t seed) {
  if (x0 == 0.0) throw OnAxis("axis_viscosity_check: center must be away from the origin");
  if (std::abs(x0) <= 2.0 * detail::kAxisGridRadius)
    throw PreconditionNotMet("axis_viscosity_check: local grid would cross the other axis");

  const bool above = side == AxisSide::above_v_on_x_axis;
  AxisCheckResult out;
  out.trials = trials < 0 ? 0 : trials;

  const double hg = detail::kAxisGridRadius / detail::kAxisGridHalf;
  bool first = true;
  for (int i = 0; i < trials; ++i) {
    Rng rng = substream(seed, static_cast<std::uint64_t>(i));
    // Curvature along the axis direction: 'along' must carry the sign the
    // viscosity inequality predicts; the transverse pieces are slack
    // thanks to the kink of v.
    double along = rng.uniform(0.5, 8.0);
    double g_along = 1.0 + along * (0.5 * hg) * rng.uniform(-1.5, 1.5);
    double g_cross = rng.uniform(-0.9, 0.9);
    double cross = rng.uniform(-0.8 * 2.0 * (1.0 - std::abs(g_cross)) / detail::kAxisGridRadius, 8.0);
    double mixed = rng.uniform(-2.0, 2.0);

    AxisQuadratic q;
    if (above) {
      q.center = PlanePoint{x0, 0.0};
      q.gx = x0 > 0 ? g_along : -g_along;
      q.gy = g_cross;
      q.hxx = along;
      q.hyy = cross;
      q.hxy = mixed;
    } else {
      q.center = PlanePoint{0.0, x0};
      q.gy = x0 > 0 ? -g_along : g_along;
      q.gx = g_cross;
      q.hyy = -along;
      q.hxx = -cross;
      q.hxy = mixed;
    }
    if (!detail::touches_on_grid(q, above ? 1.0 : -1.0)) continue;

    SymMat h(2);
    h.at(0, 0) = q.hxx;
    h.at(1, 1) = q.hyy;
    h.at(0, 1) = h.at(1, 0) = q.hxy;
    double residual = coefficient_matrix(q.center).inner(h);
    if (first || (above ? residual < out.extreme_residual : residual > out.extreme_residual)) {
      out.extreme_residual = residual;
      first = false;
    }
    ++out.accepted;
    out.accepted_quadratics.push_back(q);
  }
  if (out.accepted == 0) throw NoTouchingFound("axis_viscosity_check: no quadratic passed the filter");
  out.pass = above ? out.extreme_residual >= -detail::kAxisResidualTol
                   : out.extreme_residual <= detail::kAxisResidualTol;
  return out;
}

struct BoundaryComparison {
  double min_gap = 0.0;  // min over sampled boundary of u - v
  PlanePoint worst_point;
};

/// Samples u - v along the four edges of the diamond {|y| < min(x, 1-x)}.
inline BoundaryComparison boundary_comparison(int samples_per_edge) {
  if (samples_per_edge < 2)
    throw PreconditionNotMet("boundary_comparison: need at least 2 samples per edge");
  BoundaryComparison out;
  bool first = true;
  auto visit = [&](const PlanePoint& p) {
    SolutionValues s = eval_solutions(p);
    double gap = s.u - s.v;
    if (first || gap < out.min_gap) {
      out.min_gap = gap;
      out.worst_point = p;
      first = false;
    }
  };
  const int N = samples_per_edge;
  for (int k = 0; k < N; ++k) {
    double s = 0.5 * static_cast<double>(k) / (N - 1);  // [0, 1/2]
    visit(PlanePoint{s, s});
    visit(PlanePoint{s, -s});
  }
  for (int k = 0; k < N; ++k) {
    double s = 0.5 + 0.5 * static_cast<double>(k) / (N - 1);  // [1/2, 1]
    visit(PlanePoint{s, 1.0 - s});
    visit(PlanePoint{s, -(1.0 - s)});
  }
  return out;
}

struct InteriorViolation {
  double max_gap = 0.0;  // max of v - u on the x-axis segment (0,1)
  double argmax_x = 0.0;
};

/// Coarse grid plus golden-section refinement of x -> x - x^{4/3} on
/// (0, 1). The maximizer is (3/4)^3 with value 27/256.
inline InteriorViolation interior_violation() {
  auto g = [](double x) { return x - pow_four_thirds(x); };
  const int coarse = 2048;
  int best = 1;
  double best_val = g(1.0 / coarse);
  for (int k = 2; k < coarse; ++k) {
    double val = g(static_cast<double>(k) / coarse);
    if (val > best_val) {
      best_val = val;
      best = k;
    }
  }
  double lo = static_cast<double>(best - 1) / coarse;
  double hi = static_cast<double>(best + 1) / coarse;
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - inv_phi * (hi - lo);
  double b = lo + inv_phi * (hi - lo);
  double ga = g(a), gb = g(b);
  while (hi - lo > 1e-10) {
    if (ga < gb) {
      lo = a;
      a = b;
      ga = gb;
      b = lo + inv_phi * (hi - lo);
      gb = g(b);
    } else {
      hi = b;
      b = a;
      gb = ga;
      a = hi - inv_phi * (hi - lo);
      ga = g(a);
    }
  }
  double x = 0.5 * (lo + hi);
  return InteriorViolation{g(x), x};
}

struct GridNode {
  int ix = 0;
  int iy = 0;
};

/// Scalar samples on an axis-aligned grid with integer node coordinates;
/// node k sits at (ix * spacing, iy * spacing).
struct GridFunction {
  double spacing = 0.0;
  std::vector<GridNode> nodes;
  std::vector<double> values;

  PlanePoint point(std::size_t k) const {
    return PlanePoint{nodes[k].ix * spacing, nodes[k].iy * spacing};
  }
};

/// Diamond {|y| <= min(x, 1-x)} sampled at spacing 1/N, boundary included.
/// min_x > 0 cuts away the left corner (the nodes with x < min_x).
inline GridFunction diamond_grid(int N, const std::function<double(PlanePoint)>& fn,
                                 double min_x = 0.0) {
  if (N < 2) throw PreconditionNotMet("diamond_grid: N must be >= 2");
  GridFunction g;
  g.spacing = 1.0 / N;
  for (int ix = 0; ix <= N; ++ix) {
    if (ix * g.spacing < min_x) continue;
    int half = ix < N - ix ? ix : N - ix;
    for (int iy = -half; iy <= half; ++iy) {
      g.nodes.push_back(GridNode{ix, iy});
      g.values.push_back(fn(PlanePoint{ix * g.spacing, iy * g.spacing}));
    }
  }
  return g;
}

/// Disk |p| <= radius at the given spacing.
inline GridFunction disk_grid(double radius, double spacing,
                              const std::function<double(PlanePoint)>& fn) {
  if (radius <= 0.0 || spacing <= 0.0)
    throw PreconditionNotMet("disk_grid: radius and spacing must be > 0");
  GridFunction g;
  g.spacing = spacing;
  int half = static_cast<int>(radius / spacing);
  for (int ix = -half; ix <= half; ++ix)
    for (int iy = -half; iy <= half; ++iy) {
      double px = ix * spacing, py = iy * spacing;
      if (px * px + py * py <= radius * radius) {
        g.nodes.push_back(GridNode{ix, iy});
        g.values.push_back(fn(PlanePoint{px, py}));
      }
    }
  return g;
}

/// Concave quadratic phi(p) = a + b . p - (m/2) |p|^2.
struct TouchingQuadratic {
  double a = 0.0;
  double bx = 0.0, by = 0.0;
  double m = 0.0;

  double eval(const PlanePoint& p) const {
    return a + bx * p.x + by * p.y - 0.5 * m * (p.x * p.x + p.y * p.y);
  }
};

struct TouchingResult {
  TouchingQuadratic phi;
  PlanePoint touch_point;
  std::size_t touch_index = 0;
};

/// Constructive touching quadratic: with beta = max w > 0 and m = beta/R^2,
/// the function c - m|p|^2 with c = max(w + m|p|^2) dominates w and touches
/// it where the max is attained; adding (m/2)|p - p0|^2 keeps the touch
/// while making the domination strict. Boundary nodes (those missing a
/// 4-neighbor) must satisfy w <= 0, which pins the touch point inside.
inline TouchingResult build_touching_quadratic(const GridFunction& w, double R) {
  if (w.spacing <= 0.0 || w.nodes.empty())
    throw PreconditionNotMet("build_touching_quadratic: empty grid");
  if (R <= 0.0) throw PreconditionNotMet("build_touching_quadratic: R must be > 0");
  for (std::size_t k = 0; k < w.nodes.size(); ++k) {
    if (!std::isfinite(w.values[k]))
      throw PreconditionNotMet("build_touching_quadratic: values must be finite");
    if (norm2(w.point(k)) >= R)
      throw PreconditionNotMet("build_touching_quadratic: grid must lie inside B_R");
  }

  auto key = [](int ix, int iy) {
    return (static_cast<long long>(ix) << 32) ^ (static_cast<long long>(iy) & 0xffffffffLL);
  };
  std::unordered_set<long long> present;
  present.reserve(w.nodes.size() * 2);
  for (const GridNode& n : w.nodes) present.insert(key(n.ix, n.iy));
  auto is_boundary = [&](const GridNode& n) {
    return !present.count(key(n.ix + 1, n.iy)) || !present.count(key(n.ix - 1, n.iy)) ||
           !present.count(key(n.ix, n.iy + 1)) || !present.count(key(n.ix, n.iy - 1));
  };

  double beta = 0.0;
  bool any_positive = false;
  for (std::size_t k = 0; k < w.nodes.size(); ++k) {
    if (is_boundary(w.nodes[k]) && w.values[k] > 0.0)
      throw BoundaryViolation("build_touching_quadratic: w > 0 on a boundary node");
    if (w.values[k] > 0.0) any_positive = true;
    if (w.values[k] > beta) beta = w.values[k];
  }
  if (!any_positive) throw NoPositiveMax("build_touching_quadratic: max w <= 0");

  double m = beta / (R * R);
  std::size_t arg = 0;
  double c = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < w.nodes.size(); ++k) {
    PlanePoint p = w.point(k);
    double lift = w.values[k] + m * (p.x * p.x + p.y * p.y);
    if (lift > c) {
      c = lift;
      arg = k;
    }
  }
  PlanePoint p0 = w.point(arg);

  TouchingResult out;
  out.touch_index = arg;
  out.touch_point = p0;
  out.phi.m = m;
  out.phi.a = c + 0.5 * m * (p0.x * p0.x + p0.y * p0.y);
  out.phi.bx = -m * p0.x;
  out.phi.by = -m * p0.y;

  if (is_boundary(w.nodes[arg]))
    throw InternalError("build_touching_quadratic: touch point landed on the boundary");
  if (std::abs(out.phi.eval(p0) - w.values[arg]) > 1e-12)
    throw InternalError("build_touching_quadratic: touch equality violated");
  return out;
}

/// Max entrywise deviation of the coefficient matrix from its closed-form
/// entries (x^{2/3}, -(xy)^{1/3}, y^{2/3}) computed through independent
/// power routines.
inline double coefficient_entry_error(const PlanePoint& p) {
  SymMat a = coefficient_matrix(p);
  double e00 = std::abs(a.at(0, 0) - pow_two_thirds(p.x));
  double e11 = std::abs(a.at(1, 1) - pow_two_thirds(p.y));
  double e01 = std::abs(a.at(0, 1) + std::cbrt(p.x * p.y));
  return std::max(e00, std::max(e01, e11));
}

struct ResidualStats {
  double max_abs = 0.0;
  int samples = 0;
};

struct CounterexampleCertificate {
  BoundaryComparison boundary;
  InteriorViolation interior;
  ResidualStats residual;
  double rank_one_max_error = 0.0;
  AxisCheckResult axis_above;
  AxisCheckResult axis_below;
  TouchingQuadratic touching;
  PlanePoint touch_point;
};

/// Assembles the full comparison-failure certificate: boundary ordering,
/// interior gap, classical residual of u, rank-one coefficient identity,
/// both axis viscosity checks, and the touching quadratic built from
/// v - u on the diamond grid.
inline CounterexampleCertificate build_certificate(int samples_per_edge, int residual_samples,
                                                   int axis_trials, int grid_N,
                                                   std::uint64_t seed) {
  CounterexampleCertificate cert;
  cert.boundary = boundary_comparison(samples_per_edge);
  cert.interior = interior_violation();

  cert.residual.samples = residual_samples;
  std::vector<double> resid(static_cast<std::size_t>(residual_samples), 0.0);
  std::vector<double> entry_err(static_cast<std::size_t>(residual_samples), 0.0);
  parallel_for(static_cast<std::size_t>(residual_samples), [&](std::size_t i) {
    Rng rng = substream(seed, i);
    double sx = rng.uniform() < 0.5 ? -1.0 : 1.0;
    double sy = rng.uniform() < 0.5 ? -1.0 : 1.0;
    PlanePoint p{sx * rng.uniform(0.05, 2.0), sy * rng.uniform(0.05, 2.0)};
    resid[i] = std::abs(classical_residual_u(p));
    entry_err[i] = coefficient_entry_error(p);
  });
  for (std::size_t i = 0; i < resid.size(); ++i) {
    cert.residual.max_abs = std::max(cert.residual.max_abs, resid[i]);
    cert.rank_one_max_error = std::max(cert.rank_one_max_error, entry_err[i]);
  }

  cert.axis_above = axis_viscosity_check(0.5, AxisSide::above_v_on_x_axis, axis_trials,
                                         mix_seed(seed, 101));
  cert.axis_below = axis_viscosity_check(0.5, AxisSide::below_v_on_y_axis, axis_trials,
                                         mix_seed(seed, 102));

  GridFunction w = diamond_grid(grid_N, [](PlanePoint p) {
    SolutionValues s = eval_solutions(p);
    return s.v - s.u;
  });
  TouchingResult touch = build_touching_quadratic(w, 2.0);
  cert.touching = touch.phi;
  cert.touch_point = touch.touch_point;
  return cert;
}

/// CSV profile of both solutions along y = 0; x in [0, 1].
inline std::string profile_csv(int samples) {
  if (samples < 2) throw PreconditionNotMet("profile_csv: need at least 2 samples");
  std::string out = "x,u,v,v_minus_u\n";
  char line[160];
  for (int k = 0; k < samples; ++k) {
    double x = static_cast<double>(k) / (samples - 1);
    SolutionValues s = eval_solutions(PlanePoint{x, 0.0});
    std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g,%.12g\n", x, s.u, s.v, s.v - s.u);
    out += line;
  }
  return out;
}

}  // namespace ellset
