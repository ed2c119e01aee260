#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ellset/errors.hpp"
#include "ellset/rng.hpp"
#include "ellset/symmat.hpp"

namespace ellset {

using Point = std::vector<double>;

enum class Side { plus, minus };

inline const char* side_name(Side s) { return s == Side::plus ? "plus" : "minus"; }

/// Extended real value: a finite double or one of the two infinities.
/// Only ordering is provided; membership tests never need ±inf arithmetic.
class ExtReal {
 public:
  ExtReal() : v_(0.0) {}
  ExtReal(double v) : v_(v) {}  // NOLINT: implicit by design

  static ExtReal pos_inf() { return ExtReal(std::numeric_limits<double>::infinity()); }
  static ExtReal neg_inf() { return ExtReal(-std::numeric_limits<double>::infinity()); }

  bool is_finite() const { return std::isfinite(v_); }

  /// Raw payload; ±inf allowed.
  double raw() const { return v_; }

  /// Finite value accessor.
  double value() const {
    if (!is_finite()) throw Error("ExtReal: value() on infinite");
    return v_;
  }

  ExtReal operator-() const { return ExtReal(-v_); }

  friend bool operator<(ExtReal a, ExtReal b) { return a.v_ < b.v_; }
  friend bool operator>(ExtReal a, ExtReal b) { return a.v_ > b.v_; }
  friend bool operator<=(ExtReal a, ExtReal b) { return a.v_ <= b.v_; }
  friend bool operator>=(ExtReal a, ExtReal b) { return a.v_ >= b.v_; }
  friend bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }

 private:
  double v_;
};

/// Spatial domain descriptor. All catalog operators live on the whole
/// space except the planar rank-one operator, whose coefficient matrix
/// vanishes at the origin (every matrix would be a null matrix there).
struct Domain {
  int space_dim = 2;
  bool exclude_origin = false;

  bool contains(const Point& p) const {
    if (!exclude_origin) return true;
    double s = 0.0;
    for (double c : p) s += c * c;
    return s > 0.0;
  }

  /// Closed ball of radius r about c stays inside the domain.
  bool contains_ball(const Point& c, double r) const {
    if (!exclude_origin) return true;
    double s = 0.0;
    for (double v : c) s += v * v;
    return std::sqrt(s) > r;
  }
};

/// A degenerate elliptic operator F: S(n) x Omega -> extended reals.
/// Immutable after construction; eval is pure, so instances are safe to
/// share across threads.
class EllipticOperator {
 public:
  using Eval = std::function<double(const SymMat&, const Point&)>;

  EllipticOperator(std::string name, int dim, Domain domain, bool autonomous, Eval eval)
      : name_(std::move(name)),
        dim_(dim),
        domain_(domain),
        autonomous_(autonomous),
        eval_(std::move(eval)) {}

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  int space_dim() const { return domain_.space_dim; }
  const Domain& domain() const { return domain_; }
  bool autonomous() const { return autonomous_; }

  ExtReal evaluate(const SymMat& X, const Point& x) const {
    if (X.dim() != dim_) throw DimensionMismatch("evaluate: matrix dim != operator dim");
    if (static_cast<int>(x.size()) != domain_.space_dim)
      throw DimensionMismatch("evaluate: point dim != operator space dim");
    if (!domain_.contains(x)) throw PointOutsideDomain("evaluate: point outside domain of " + name_);
    return ExtReal(eval_(X, x));
  }

 private:
  std::string name_;
  int dim_;
  Domain domain_;
  bool autonomous_;
  Eval eval_;
};

/// Theta_plus(x) = {F >= 0}, Theta_minus(x) = {F <= 0}; F = 0 belongs to
/// both, matching the non-strict level-set definitions.
inline bool in_level_set(const EllipticOperator& F, const SymMat& X, const Point& x, Side side) {
  ExtReal v = F.evaluate(X, x);
  return side == Side::plus ? v >= ExtReal(0.0) : v <= ExtReal(0.0);
}

/// Dual operator (X,x) -> -F(-X,x). Involution on eval values; swaps the
/// roles of the two level sets.
inline EllipticOperator dual_operator(const EllipticOperator& F) {
  return EllipticOperator("dual(" + F.name() + ")", F.dim(), F.domain(), F.autonomous(),
                          [F](const SymMat& X, const Point& x) {
                            return -F.evaluate(-X, x).raw();
                          });
}

/// Signed cube root; the planar coefficient matrix must stay real for
/// negative coordinates.
inline double cbrt_signed(double t) { return std::cbrt(t); }

/// q(x,y) = (x^{1/3}, -y^{1/3}). The coefficient matrix is its outer
/// product, so the rank-one identity A = q q^T holds exactly.
inline std::pair<double, double> plane_linear_q(double x, double y) {
  return {cbrt_signed(x), -cbrt_signed(y)};
}

inline SymMat plane_linear_coefficient(double x, double y) {
  auto [qx, qy] = plane_linear_q(x, y);
  SymMat a(2);
  a.add_outer({qx, qy});
  return a;
}

/// Construction parameters for the operator catalog.
struct OperatorSpec {
  std::string kind;
  int n = 2;
  int space_dim = 2;

  // linear_constant
  SymMat A;
  double f = 0.0;

  // linear_field: A(x) = A0 + sum_k x_k A_coeffs[k], f(x) = f0 + sum_k x_k f_coeffs[k]
  SymMat A0;
  std::vector<SymMat> A_coeffs;
  std::vector<double> f_coeffs;

  // monge_ampere: f(x) = f0 + f_quad |x|^2
  double f0 = 1.0;
  double f_quad = 0.0;

  // plateau half-width
  double width = 1.0;
};

namespace detail {

inline void require_psd_nonzero(const SymMat& a, const std::string& field) {
  if (min_eigenvalue(a) < -1e-12)
    throw InvalidSpec("make_operator: " + field + " must be positive semidefinite");
  if (norms(a).trace_norm <= 0.0)
    throw InvalidSpec("make_operator: " + field + " must not vanish identically");
}

inline double plateau_shape(double r, double w) {
  if (r > w) return r - w;
  if (r < -w) return r + w;
  return 0.0;
}

}  // namespace detail

/// Builds a catalog operator from its validated spec.
inline EllipticOperator make_operator(const OperatorSpec& spec) {
  if (spec.n < 1) throw InvalidSpec("make_operator: n must be >= 1");
  if (spec.space_dim < 1) throw InvalidSpec("make_operator: space_dim must be >= 1");
  const int n = spec.n;
  Domain dom{spec.space_dim, false};

  if (spec.kind == "laplacian") {
    return EllipticOperator("laplacian", n, dom, true,
                            [](const SymMat& X, const Point&) { return X.trace(); });
  }
  if (spec.kind == "max_eigenvalue") {
    return EllipticOperator("max_eigenvalue", n, dom, true,
                            [](const SymMat& X, const Point&) { return max_eigenvalue(X); });
  }
  if (spec.kind == "linear_constant") {
    if (spec.A.dim() != n) throw InvalidSpec("make_operator: A must be n x n");
    detail::require_psd_nonzero(spec.A, "A");
    SymMat A = spec.A;
    double f = spec.f;
    return EllipticOperator("linear_constant", n, dom, true,
                            [A, f](const SymMat& X, const Point&) { return A.inner(X) - f; });
  }
  if (spec.kind == "linear_field") {
    if (spec.A0.dim() != n) throw InvalidSpec("make_operator: A0 must be n x n");
    detail::require_psd_nonzero(spec.A0, "A0");
    if (static_cast<int>(spec.A_coeffs.size()) != spec.space_dim)
      throw InvalidSpec("make_operator: need one coefficient matrix per coordinate");
    for (const SymMat& c : spec.A_coeffs)
      if (c.dim() != n) throw InvalidSpec("make_operator: coefficient matrices must be n x n");
    if (!spec.f_coeffs.empty() && static_cast<int>(spec.f_coeffs.size()) != spec.space_dim)
      throw InvalidSpec("make_operator: f_coeffs size must match space_dim");
    OperatorSpec s = spec;
    if (s.f_coeffs.empty()) s.f_coeffs.assign(static_cast<std::size_t>(s.space_dim), 0.0);
    return EllipticOperator(
        "linear_field", n, dom, false, [s](const SymMat& X, const Point& x) {
          SymMat A = s.A0;
          double f = s.f0;
          for (std::size_t k = 0; k < x.size(); ++k) {
            A += x[k] * s.A_coeffs[k];
            f += x[k] * s.f_coeffs[k];
          }
          return A.inner(X) - f;
        });
  }
  if (spec.kind == "monge_ampere") {
    if (spec.f0 <= 0.0) throw InvalidSpec("make_operator: monge_ampere needs f0 > 0");
    if (spec.f_quad < 0.0) throw InvalidSpec("make_operator: monge_ampere needs f_quad >= 0");
    double f0 = spec.f0, fq = spec.f_quad;
    return EllipticOperator(
        "monge_ampere", n, dom, fq == 0.0, [f0, fq](const SymMat& X, const Point& x) {
          auto ev = eigenvalues(X);
          if (ev.front() < 0.0) return -std::numeric_limits<double>::infinity();
          double det = 1.0;
          for (double l : ev) det *= l;
          double r2 = 0.0;
          for (double c : x) r2 += c * c;
          return det - (f0 + fq * r2);
        });
  }
  if (spec.kind == "plateau") {
    if (spec.width <= 0.0) throw InvalidSpec("make_operator: plateau needs width > 0");
    double w = spec.width;
    return EllipticOperator("plateau", n, dom, true, [w](const SymMat& X, const Point&) {
      return detail::plateau_shape(X.trace(), w);
    });
  }
  if (spec.kind == "counterexample_linear") {
    if (n != 2) throw InvalidSpec("make_operator: counterexample_linear needs n = 2");
    if (spec.space_dim != 2)
      throw InvalidSpec("make_operator: counterexample_linear needs space_dim = 2");
    Domain d{2, true};
    return EllipticOperator("counterexample_linear", 2, d, false,
                            [](const SymMat& X, const Point& x) {
                              return plane_linear_coefficient(x[0], x[1]).inner(X);
                            });
  }
  throw InvalidSpec("make_operator: unknown kind '" + spec.kind + "'");
}

struct EllipticityCheck {
  bool holds = true;
  bool has_witness = false;
  SymMat X;
  SymMat Y;
};

/// Samples ordered pairs X <= Y (PSD bumps of 1 to 3 rank-one terms, so
/// boundary-degenerate orderings are covered) and tests both
/// monotonicity implications: F(X) >= 0 => F(Y) >= 0 and
/// F(X) > 0 => F(Y) > 0. Returns the first violating pair.
inline EllipticityCheck check_ellipticity_at_zero(const EllipticOperator& F, const Point& x,
                                                  int samples, std::uint64_t seed) {
  if (samples < 1) throw PreconditionNotMet("check_ellipticity_at_zero: samples must be >= 1");
  if (!F.domain().contains(x))
    throw PointOutsideDomain("check_ellipticity_at_zero: point outside domain");
  const int n = F.dim();
  for (int i = 0; i < samples; ++i) {
    Rng rng = substream(seed, static_cast<std::uint64_t>(i));
    SymMat X = random_sym_from(n, rng.uniform(0.2, 3.0), rng);
    SymMat Y = X;
    int bumps = 1 + static_cast<int>(rng.below(3));
    for (int b = 0; b < bumps; ++b) Y.add_outer(random_vector(n, rng.uniform(0.1, 1.5), rng));
    ExtReal fx = F.evaluate(X, x);
    ExtReal fy = F.evaluate(Y, x);
    bool ok = (!(fx >= ExtReal(0.0)) || fy >= ExtReal(0.0)) &&
              (!(fx > ExtReal(0.0)) || fy > ExtReal(0.0));
    if (!ok) return EllipticityCheck{false, true, X, Y};
  }
  return EllipticityCheck{};
}

}  // namespace ellset
