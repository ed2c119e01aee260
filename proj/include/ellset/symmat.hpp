#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "ellset/errors.hpp"
#include "ellset/rng.hpp"

namespace ellset {

/// Dense real symmetric n x n matrix, n small (the toolkit targets n <= 8).
/// Symmetry is enforced at construction by averaging M and M^T, so the
/// invariant entries(i,j) == entries(j,i) holds exactly.
class SymMat {
 public:
  SymMat() : dim_(0) {}

  explicit SymMat(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim, 0.0) {
    if (dim < 1) throw DimensionMismatch("SymMat: dim must be >= 1");
  }

  /// Builds from a row-major square array, symmetrizing as (M + M^T)/2.
  static SymMat from_rows(int dim, const std::vector<double>& rows) {
    SymMat m(dim);
    if (rows.size() != m.a_.size()) throw DimensionMismatch("SymMat: entry count != dim^2");
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        m.at(i, j) = 0.5 * (rows[static_cast<std::size_t>(i) * dim + j] +
                            rows[static_cast<std::size_t>(j) * dim + i]);
    return m;
  }

  static SymMat identity(int dim) {
    SymMat m(dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
    return m;
  }

  static SymMat diagonal(const std::vector<double>& d) {
    SymMat m(static_cast<int>(d.size()));
    for (int i = 0; i < m.dim_; ++i) m.at(i, i) = d[static_cast<std::size_t>(i)];
    return m;
  }

  int dim() const { return dim_; }

  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }

  const std::vector<double>& entries() const { return a_; }

  double trace() const {
    double t = 0.0;
    for (int i = 0; i < dim_; ++i) t += at(i, i);
    return t;
  }

  SymMat& operator+=(const SymMat& o) {
    check_same_dim(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
  }
  SymMat& operator-=(const SymMat& o) {
    check_same_dim(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
  }
  SymMat& operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
  }

  friend SymMat operator+(SymMat x, const SymMat& y) { return x += y; }
  friend SymMat operator-(SymMat x, const SymMat& y) { return x -= y; }
  friend SymMat operator*(double s, SymMat x) { return x *= s; }
  friend SymMat operator-(SymMat x) { return x *= -1.0; }

  /// X + t*I.
  SymMat shifted(double t) const {
    SymMat m = *this;
    for (int i = 0; i < dim_; ++i) m.at(i, i) += t;
    return m;
  }

  /// Adds weight * v v^T.
  void add_outer(const std::vector<double>& v, double weight = 1.0) {
    if (static_cast<int>(v.size()) != dim_) throw DimensionMismatch("add_outer: bad vector size");
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        at(i, j) += weight * v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
  }

  /// tr(X Y), the S(n) inner product.
  double inner(const SymMat& o) const {
    check_same_dim(o);
    return std::inner_product(a_.begin(), a_.end(), o.a_.begin(), 0.0);
  }

  double max_abs_entry() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
  }

  double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
  double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }

 private:
  void check_same_dim(const SymMat& o) const {
    if (dim_ != o.dim_) throw DimensionMismatch("SymMat: dimension mismatch");
  }

  int dim_;
  std::vector<double> a_;
};

/// Eigen-decomposition X = Q diag(values) Q^T with values ascending and Q
/// orthonormal (column k paired with values[k], rows-major storage).
struct EigenDecomposition {
  int dim = 0;
  std::vector<double> values;
  std::vector<double> vectors;

  double vec(int row, int col) const { return vectors[static_cast<std::size_t>(row) * dim + col]; }
};

/// Cyclic Jacobi rotations; always converges for symmetric input at these
/// sizes. Sweeps stop when the off-diagonal Frobenius mass drops below
/// 1e-14 * ||X||_2.
inline EigenDecomposition eig_sym(const SymMat& x) {
  const int n = x.dim();
  std::vector<double> a(x.entries());
  std::vector<double> q(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) q[static_cast<std::size_t>(i) * n + i] = 1.0;

  auto A = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
  auto Q = [&](int i, int j) -> double& { return q[static_cast<std::size_t>(i) * n + j]; };

  double frob2 = 0.0;
  for (double v : a) frob2 += v * v;
  const double off_target2 = 1e-28 * frob2;  // (1e-14 * ||X||_2)^2

  auto off2 = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += 2.0 * A(i, j) * A(i, j);
    return s;
  };

  const int max_sweeps = 64;
  int sweep = 0;
  while (off2() > off_target2) {
    if (++sweep > max_sweeps) throw InternalError("eig_sym: Jacobi sweep cap exceeded");
    for (int p = 0; p < n - 1; ++p) {
      for (int r = p + 1; r < n; ++r) {
        double apr = A(p, r);
        if (apr == 0.0) continue;
        double theta = (A(r, r) - A(p, p)) / (2.0 * apr);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        double tau = s / (1.0 + c);

        double app = A(p, p), arr = A(r, r);
        A(p, p) = app - t * apr;
        A(r, r) = arr + t * apr;
        A(p, r) = A(r, p) = 0.0;
        for (int k = 0; k < n; ++k) {
          if (k != p && k != r) {
            double akp = A(k, p), akr = A(k, r);
            A(k, p) = A(p, k) = akp - s * (akr + tau * akp);
            A(k, r) = A(r, k) = akr + s * (akp - tau * akr);
          }
          double qkp = Q(k, p), qkr = Q(k, r);
          Q(k, p) = qkp - s * (qkr + tau * qkp);
          Q(k, r) = qkr + s * (qkp - tau * qkr);
        }
      }
    }
  }

  EigenDecomposition out;
  out.dim = n;
  out.values.resize(static_cast<std::size_t>(n));
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return A(i, i) < A(j, j); });
  out.vectors.resize(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    int src = order[static_cast<std::size_t>(k)];
    out.values[static_cast<std::size_t>(k)] = A(src, src);
    for (int i = 0; i < n; ++i)
      out.vectors[static_cast<std::size_t>(i) * n + k] = Q(i, src);
  }
  return out;
}

inline std::vector<double> eigenvalues(const SymMat& x) { return eig_sym(x).values; }

inline double min_eigenvalue(const SymMat& x) { return eig_sym(x).values.front(); }

inline double max_eigenvalue(const SymMat& x) { return eig_sym(x).values.back(); }

/// The three norms used throughout: operator norm |X| = max{-l_1, l_n},
/// Frobenius ||X||_2 = sqrt(sum l_i^2), trace norm ||X||_1 = sum |l_i|.
struct Norms {
  double op_norm;
  double frob_norm;
  double trace_norm;
};

inline Norms norms(const SymMat& x) {
  auto ev = eigenvalues(x);
  double frob2 = 0.0, tr = 0.0;
  for (double l : ev) {
    frob2 += l * l;
    tr += std::abs(l);
  }
  return Norms{std::max(-ev.front(), ev.back()), std::sqrt(frob2), tr};
}

inline double op_norm(const SymMat& x) {
  auto ev = eigenvalues(x);
  return std::max(-ev.front(), ev.back());
}

/// X <= Y in the semidefinite order, up to tol: smallest eigenvalue of
/// Y - X is allowed to dip to -tol.
inline bool psd_leq(const SymMat& x, const SymMat& y, double tol) {
  if (x.dim() != y.dim()) throw DimensionMismatch("psd_leq: dimension mismatch");
  return min_eigenvalue(y - x) >= -tol;
}

/// Rebuilds Q diag(f(values)) Q^T.
inline SymMat assemble(const EigenDecomposition& e, const std::vector<double>& d) {
  SymMat m(e.dim);
  for (int i = 0; i < e.dim; ++i)
    for (int j = i; j < e.dim; ++j) {
      double s = 0.0;
      for (int k = 0; k < e.dim; ++k) s += e.vec(i, k) * d[static_cast<std::size_t>(k)] * e.vec(j, k);
      m.at(i, j) = m.at(j, i) = s;
    }
  return m;
}

/// X (I - delta X)^{-1}, computed in the eigenbasis as l -> l/(1 - delta l)
/// so the result is symmetric by construction. Requires |delta||X| < 1.
inline SymMat resolvent_transform(const SymMat& x, double delta) {
  EigenDecomposition e = eig_sym(x);
  double opn = std::max(-e.values.front(), e.values.back());
  if (std::abs(delta) * opn >= 1.0)
    throw SingularShift("resolvent_transform: |delta|*|X| >= 1");
  std::vector<double> mapped(e.values.size());
  for (std::size_t k = 0; k < e.values.size(); ++k)
    mapped[k] = e.values[k] / (1.0 - delta * e.values[k]);
  return assemble(e, mapped);
}

inline double determinant(const SymMat& x) {
  double d = 1.0;
  for (double l : eigenvalues(x)) d *= l;
  return d;
}

/// X * X (symmetric by construction).
inline SymMat sym_square(const SymMat& x) {
  const int n = x.dim();
  SymMat out(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += x.at(i, k) * x.at(k, j);
      out.at(i, j) = out.at(j, i) = s;
    }
  return out;
}

/// Entries i.i.d. uniform in [-scale, scale], then symmetrized.
/// Deterministic for a fixed seed.
inline SymMat random_sym(int dim, double scale, std::uint64_t seed) {
  if (dim < 1) throw DimensionMismatch("random_sym: dim must be >= 1");
  if (scale < 0.0) throw Error("random_sym: scale must be >= 0");
  Rng rng(seed);
  std::vector<double> rows(static_cast<std::size_t>(dim) * dim);
  for (double& v : rows) v = rng.uniform(-scale, scale);
  return SymMat::from_rows(dim, rows);
}

inline std::vector<double> random_vector(int dim, double scale, Rng& rng) {
  std::vector<double> v(static_cast<std::size_t>(dim));
  for (double& e : v) e = rng.uniform(-scale, scale);
  return v;
}

inline SymMat random_sym_from(int dim, double scale, Rng& rng) {
  std::vector<double> rows(static_cast<std::size_t>(dim) * dim);
  for (double& v : rows) v = rng.uniform(-scale, scale);
  return SymMat::from_rows(dim, rows);
}

/// Plain dense n x m matrix; just enough for the congruence transforms in
/// the matrix-inequality checks.
class RectMat {
 public:
  RectMat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  static RectMat random(int rows, int cols, double scale, Rng& rng) {
    RectMat m(rows, cols);
    for (double& v : m.a_) v = rng.uniform(-scale, scale);
    return m;
  }

  friend RectMat operator-(const RectMat& x, const RectMat& y) {
    if (x.rows_ != y.rows_ || x.cols_ != y.cols_)
      throw DimensionMismatch("RectMat: dimension mismatch");
    RectMat m(x.rows_, x.cols_);
    for (std::size_t k = 0; k < m.a_.size(); ++k) m.a_[k] = x.a_[k] - y.a_[k];
    return m;
  }

 private:
  int rows_, cols_;
  std::vector<double> a_;
};

/// Q^T X Q in S(m) for Q of shape n x m.
inline SymMat congruence(const RectMat& q, const SymMat& x) {
  if (q.rows() != x.dim()) throw DimensionMismatch("congruence: shape mismatch");
  const int n = q.rows(), m = q.cols();
  SymMat out(m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      double s = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) s += q.at(a, i) * x.at(a, b) * q.at(b, j);
      out.at(i, j) = out.at(j, i) = s;
    }
  return out;
}

/// Q^T Q in S(m).
inline SymMat gram(const RectMat& q) {
  const int n = q.rows(), m = q.cols();
  SymMat out(m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      double s = 0.0;
      for (int a = 0; a < n; ++a) s += q.at(a, i) * q.at(a, j);
      out.at(i, j) = out.at(j, i) = s;
    }
  return out;
}

}  // namespace ellset
