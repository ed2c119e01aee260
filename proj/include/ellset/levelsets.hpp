#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ellset/acdo.hpp"
#include "ellset/errors.hpp"
#include "ellset/operators.hpp"
#include "ellset/parallel.hpp"
#include "ellset/rng.hpp"
#include "ellset/symmat.hpp"

namespace ellset {

/// Operator-norm distance from X to the closed level set of the requested
/// side, computed by ray bisection (the radial projection is exact for
/// these sets). Zero when X is a member.
inline double dist_to_level_set(const EllipticOperator& F, const SymMat& X, const Point& x,
                                Side side, double tol) {
  if (tol <= 0.0) throw PreconditionNotMet("dist_to_level_set: tol must be > 0");
  if (side == Side::plus) {
    int evals = 0;
    auto probe = [&](double t) {
      ++evals;
      return in_level_set(F, X.shifted(t), x, Side::plus);
    };
    auto [lo, hi] = detail::bracket_flip(probe, tol);
    return std::max(0.5 * (lo + hi), 0.0);
  }
  auto probe = [&](double t) { return !in_level_set(F, X.shifted(t), x, Side::minus); };
  auto [lo, hi] = detail::bracket_flip(probe, tol);
  return std::max(-0.5 * (lo + hi), 0.0);
}

/// Closed form for the distance to either level set of the linear
/// operator tr(A Z) - f: |tr(A Z) - f| / ||A||_1.
inline double ascoli_distance(const SymMat& A, double f, const SymMat& Z) {
  double denom = norms(A).trace_norm;
  if (denom <= 0.0) throw ZeroCoefficient("ascoli_distance: coefficient matrix vanishes");
  return std::abs(A.inner(Z) - f) / denom;
}

namespace detail {

/// One member of Theta_side(x): project a random matrix onto the level
/// boundary, then push inside by a PSD bump with smallest eigenvalue
/// beta/2. beta is log-uniform in [tol, scale], so the cloud mixes
/// boundary-hugging and deep samples. Bumping by at least (tol/2) I keeps
/// membership guaranteed despite the projection tolerance.
inline SymMat sample_member(const EllipticOperator& F, const Point& x, Side side, double scale,
                            double tol, Rng& rng) {
  const int n = F.dim();
  SymMat W = random_sym_from(n, rng.uniform(0.5, 3.0), rng);
  SymMat Z = project_to_gamma(F, W, x, tol);
  double beta = tol * std::pow(scale / tol, rng.uniform());
  std::vector<double> v = random_vector(n, 1.0, rng);
  double v2 = 0.0;
  for (double c : v) v2 += c * c;
  SymMat bump = (0.5 * beta) * SymMat::identity(n);
  if (v2 > 0.0) bump.add_outer(v, 0.5 * beta / v2);
  double sign = side == Side::plus ? 1.0 : -1.0;
  Z += sign * bump;
  double nudge = 4.0 * tol;
  for (int iter = 0; iter < 60; ++iter) {
    if (in_level_set(F, Z, x, side)) return Z;
    Z = Z.shifted(sign * nudge);
    nudge *= 2.0;
  }
  throw InternalError("sample_member: nudge cap exceeded");
}

/// Same cloud, but with the operator norm steered to a log-uniform target
/// radius; used where the interesting suprema sit at large |X| capped by
/// the delta |X| < 1 constraint.
inline SymMat sample_member_with_radius(const EllipticOperator& F, const Point& x, Side side,
                                        double radius_lo, double radius_hi, double tol, Rng& rng) {
  const int n = F.dim();
  double r = radius_lo * std::pow(radius_hi / radius_lo, rng.uniform());
  SymMat W = random_sym_from(n, 1.0, rng);
  double opn = op_norm(W);
  if (opn <= 0.0) W = SymMat::identity(n), opn = 1.0;
  W *= r / opn;
  SymMat Z = project_to_gamma(F, W, x, tol);
  double beta = tol * std::pow(std::max(0.05 * r, 2.0 * tol) / tol, rng.uniform());
  std::vector<double> v = random_vector(n, 1.0, rng);
  double v2 = 0.0;
  for (double c : v) v2 += c * c;
  SymMat bump = (0.5 * beta) * SymMat::identity(n);
  if (v2 > 0.0) bump.add_outer(v, 0.5 * beta / v2);
  double sign = side == Side::plus ? 1.0 : -1.0;
  Z += sign * bump;
  double nudge = 4.0 * tol;
  for (int iter = 0; iter < 60; ++iter) {
    if (in_level_set(F, Z, x, side)) return Z;
    Z = Z.shifted(sign * nudge);
    nudge *= 2.0;
  }
  throw InternalError("sample_member_with_radius: nudge cap exceeded");
}

}  // namespace detail

/// count members of Theta_side(x); every result passes in_level_set on
/// the requested side. Deterministic per (seed, index).
inline std::vector<SymMat> sample_level_set(const EllipticOperator& F, const Point& x, Side side,
                                            int count, double scale, std::uint64_t seed,
                                            double tol) {
  if (count < 1) throw InvalidCount("sample_level_set: count must be >= 1");
  if (tol <= 0.0) throw PreconditionNotMet("sample_level_set: tol must be > 0");
  if (scale < tol) throw PreconditionNotMet("sample_level_set: scale must be >= tol");
  std::vector<SymMat> out(static_cast<std::size_t>(count));
  parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
    Rng rng = substream(seed, i);
    out[i] = detail::sample_member(F, x, side, scale, tol, rng);
  });
  return out;
}

/// Sampled lower bound of the excess of the permuted level set
/// Theta^delta_side(x) over Theta_side(y).
struct ExcessEstimate {
  double value = 0.0;
  int samples_in = 0;  // samples surviving the delta |X| < 1 cutoff
  SymMat witness;      // permuted matrix attaining the max
  double delta = 0.0;
};

/// Samples X in Theta_side(x), discards those with delta |X| >= 1, maps
/// them through X (I -+ delta X)^{-1} (minus side uses the opposite shift
/// sign) and takes the sup of distances to Theta_side(y). The value is
/// nondecreasing in count for a fixed seed because sample i depends only
/// on (seed, i).
inline ExcessEstimate excess_estimate(const EllipticOperator& F, const Point& x, const Point& y,
                                      double delta, Side side, int count, std::uint64_t seed,
                                      double tol) {
  if (delta < 0.0) throw PreconditionNotMet("excess_estimate: delta must be >= 0");
  if (count < 1) throw InvalidCount("excess_estimate: count must be >= 1");
  if (tol <= 0.0) throw PreconditionNotMet("excess_estimate: tol must be > 0");
  if (!F.domain().contains(x) || !F.domain().contains(y))
    throw PointOutsideDomain("excess_estimate: base point outside domain");

  const double radius_lo = 0.3;
  const double radius_hi =
      delta > 0.0 ? std::max(2.0 * radius_lo, 0.98 / delta) : 64.0;
  const double sigma = side == Side::plus ? delta : -delta;

  std::vector<std::optional<std::pair<double, SymMat>>> slots(static_cast<std::size_t>(count));
  parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
    Rng rng = substream(seed, i);
    SymMat X = detail::sample_member_with_radius(F, x, side, radius_lo, radius_hi, tol, rng);
    if (delta * op_norm(X) >= 1.0) return;  // outside the permutation's reach
    SymMat Z = resolvent_transform(X, sigma);
    slots[i] = std::make_pair(dist_to_level_set(F, Z, y, side, tol), Z);
  });

  ExcessEstimate est;
  est.delta = delta;
  for (auto& slot : slots) {
    if (!slot) continue;
    ++est.samples_in;
    if (est.samples_in == 1 || slot->first > est.value) {
      est.value = slot->first;
      est.witness = slot->second;
    }
  }
  if (est.samples_in == 0)
    throw NoAcceptedSamples("excess_estimate: every sample violated delta |X| < 1");
  return est;
}

struct ConditionRow {
  double t = 0.0;
  double sup_excess_plus = 0.0;
  double sup_excess_minus = 0.0;
  int pairs_sampled = 0;
  SymMat witness_plus;
  SymMat witness_minus;
};

/// Per-t table of sup-excess values probing level-set continuity near a
/// base point.
struct ConditionReport {
  Point base_point;
  std::vector<ConditionRow> rows;
};

namespace detail {

inline Point sample_in_ball(const Point& center, double radius, Rng& rng) {
  const std::size_t d = center.size();
  Point p(d);
  for (int guard = 0; guard < 4096; ++guard) {
    double r2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      double off = radius * rng.uniform(-1.0, 1.0);
      p[k] = center[k] + off;
      r2 += off * off;
    }
    if (r2 <= radius * radius) return p;
  }
  throw InternalError("sample_in_ball: rejection cap exceeded");
}

}  // namespace detail

/// For each t in the (positive, strictly decreasing) schedule: samples
/// point pairs x, y in the ball of radius t about x0, sets
/// delta = |x-y|^2 / t, and records the sup of excess estimates for both
/// branches. The negative-t branch is the positive branch of the dual
/// operator, which is an exact reformulation.
inline ConditionReport check_condition(const EllipticOperator& F, const Point& x0,
                                       const std::vector<double>& t_schedule, int pairs,
                                       int samples_per_pair, std::uint64_t seed, double tol) {
  if (t_schedule.empty()) throw PreconditionNotMet("check_condition: empty schedule");
  for (std::size_t r = 0; r < t_schedule.size(); ++r) {
    if (t_schedule[r] <= 0.0) throw PreconditionNotMet("check_condition: t must be > 0");
    if (r > 0 && t_schedule[r] >= t_schedule[r - 1])
      throw PreconditionNotMet("check_condition: schedule must be strictly decreasing");
  }
  if (pairs < 1 || samples_per_pair < 1) throw InvalidCount("check_condition: counts must be >= 1");
  const EllipticOperator dual = dual_operator(F);

  ConditionReport report;
  report.base_point = x0;
  for (std::size_t r = 0; r < t_schedule.size(); ++r) {
    double t = t_schedule[r];
    if (!F.domain().contains_ball(x0, t))
      throw BallOutsideDomain("check_condition: ball of radius t leaves the domain");
    ConditionRow row;
    row.t = t;
    row.pairs_sampled = pairs;
    for (int j = 0; j < pairs; ++j) {
      std::uint64_t pair_seed = mix_seed(seed, r, static_cast<std::uint64_t>(j));
      Rng prng(pair_seed);
      Point a = detail::sample_in_ball(x0, t, prng);
      Point b = detail::sample_in_ball(x0, t, prng);
      double d2 = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
      double delta = d2 / t;
      ExcessEstimate plus =
          excess_estimate(F, a, b, delta, Side::plus, samples_per_pair, mix_seed(pair_seed, 1), tol);
      ExcessEstimate minus =
          excess_estimate(dual, a, b, delta, Side::plus, samples_per_pair, mix_seed(pair_seed, 2), tol);
      if (j == 0 || plus.value > row.sup_excess_plus) {
        row.sup_excess_plus = plus.value;
        row.witness_plus = plus.witness;
      }
      if (j == 0 || minus.value > row.sup_excess_minus) {
        row.sup_excess_minus = minus.value;
        row.witness_minus = minus.witness;
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

/// Decision rule for a condition probe. Finite sampling can only show a
/// decay trend, so "pass" means either every row is at the numerical
/// floor, or the log-log slope of sup-excess against t is at least
/// kMinSlope with the final row below kFinalThreshold.
struct ConditionVerdict {
  bool pass = false;
  bool flat_zero = false;
  double slope = 0.0;
  double final_value = 0.0;

  static constexpr double kMinSlope = 0.5;
  static constexpr double kFinalThreshold = 5e-2;
};

inline ConditionVerdict condition_verdict(const ConditionReport& report, double tol) {
  ConditionVerdict v;
  if (report.rows.empty()) return v;
  double floor = std::max(10.0 * tol, 1e-8);
  std::vector<double> vals;
  vals.reserve(report.rows.size());
  bool all_floor = true;
  for (const ConditionRow& row : report.rows) {
    double m = std::max(row.sup_excess_plus, row.sup_excess_minus);
    vals.push_back(m);
    if (m > floor) all_floor = false;
  }
  v.final_value = vals.back();
  if (all_floor) {
    v.flat_zero = true;
    v.pass = true;
    return v;
  }
  double mx = 0.0, my = 0.0;
  std::size_t n = vals.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log(report.rows[i].t);
    ly[i] = std::log(std::max(vals[i], 1e-15));
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  v.slope = den > 0.0 ? num / den : 0.0;
  v.pass = v.slope >= ConditionVerdict::kMinSlope && v.final_value <= ConditionVerdict::kFinalThreshold;
  return v;
}

/// Sampled lower bound of d_R between the plus level sets at two points:
/// sup over |X| < R of |dist(X, Theta_plus(x)) - dist(X, Theta_plus(y))|.
/// Radius sampling is biased toward R, where the sup typically lives.
inline double bounded_hausdorff(const EllipticOperator& F, const Point& x, const Point& y, double R,
                                int count, std::uint64_t seed, double tol) {
  if (R <= 0.0) throw InvalidRadius("bounded_hausdorff: R must be > 0");
  if (count < 1) throw InvalidCount("bounded_hausdorff: count must be >= 1");
  if (!F.domain().contains(x) || !F.domain().contains(y))
    throw PointOutsideDomain("bounded_hausdorff: point outside domain");
  std::vector<double> diffs(static_cast<std::size_t>(count), 0.0);
  parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
    Rng rng = substream(seed, i);
    SymMat W = random_sym_from(F.dim(), 1.0, rng);
    double opn = op_norm(W);
    if (opn <= 0.0) {
      W = SymMat::identity(F.dim());
      opn = 1.0;
    }
    double r = R * (1.0 - 1e-9) * std::pow(rng.uniform(), 0.25);
    W *= r / opn;
    double dx = dist_to_level_set(F, W, x, Side::plus, tol);
    double dy = dist_to_level_set(F, W, y, Side::plus, tol);
    diffs[i] = std::abs(dx - dy);
  });
  double best = 0.0;
  for (double d : diffs) best = std::max(best, d);
  return best;
}

/// Max deviation |F_bar(X0, y) - F_bar(X0, x0)| over sampled y at each
/// probe radius; a decay to 0 across shrinking radii is the numerical
/// trace of null-set continuity in x.
inline std::vector<double> gamma_continuity_probe(const EllipticOperator& F, const SymMat& X0,
                                                  const Point& x0, const std::vector<double>& radii,
                                                  int probes_per_radius, std::uint64_t seed,
                                                  double tol) {
  if (probes_per_radius < 1) throw InvalidCount("gamma_continuity_probe: probes must be >= 1");
  double base = compute_acdo(F, X0, x0, tol).value;
  std::vector<double> out;
  out.reserve(radii.size());
  for (std::size_t r = 0; r < radii.size(); ++r) {
    if (!F.domain().contains_ball(x0, radii[r]))
      throw BallOutsideDomain("gamma_continuity_probe: radius leaves the domain");
    std::vector<double> devs(static_cast<std::size_t>(probes_per_radius), 0.0);
    parallel_for(static_cast<std::size_t>(probes_per_radius), [&](std::size_t i) {
      Rng rng(mix_seed(seed, r, i));
      Point y = detail::sample_in_ball(x0, radii[r], rng);
      devs[i] = std::abs(compute_acdo(F, X0, y, tol).value - base);
    });
    double worst = 0.0;
    for (double d : devs) worst = std::max(worst, d);
    out.push_back(worst);
  }
  return out;
}

/// CSV serialization of a condition report (fixed header, %.12g values);
/// byte-stable for identical inputs.
inline std::string condition_report_csv(const ConditionReport& report) {
  std::string out = "t,sup_excess_plus,sup_excess_minus,pairs_sampled\n";
  char line[160];
  for (const ConditionRow& row : report.rows) {
    std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g,%d\n", row.t, row.sup_excess_plus,
                  row.sup_excess_minus, row.pairs_sampled);
    out += line;
  }
  return out;
}

}  // namespace ellset
