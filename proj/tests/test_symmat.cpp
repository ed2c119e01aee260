#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ellset/errors.hpp"
#include "ellset/rng.hpp"
#include "ellset/symmat.hpp"

using namespace ellset;

namespace {

// Householder reflector I - 2vv^T/|v|^2: exactly orthogonal, handy for
// building matrices with known spectra.
SymMat householder_conjugate(const std::vector<double>& v, const std::vector<double>& d) {
  const int n = static_cast<int>(v.size());
  double vv = 0.0;
  for (double c : v) vv += c * c;
  std::vector<double> h(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      h[static_cast<std::size_t>(i) * n + j] = (i == j ? 1.0 : 0.0) - 2.0 * v[i] * v[j] / vv;
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        a[static_cast<std::size_t>(i) * n + j] +=
            h[static_cast<std::size_t>(i) * n + k] * d[k] * h[static_cast<std::size_t>(j) * n + k];
  return SymMat::from_rows(n, a);
}

}  // namespace

TEST_CASE("from_rows symmetrizes its input") {
  SymMat x = SymMat::from_rows(2, {1.0, 2.0, 0.0, 3.0});
  CHECK(x(0, 0) == 1.0);
  CHECK(x(0, 1) == 1.0);
  CHECK(x(1, 0) == 1.0);
  CHECK(x(1, 1) == 3.0);
}

TEST_CASE("identity, diagonal, trace, shift") {
  SymMat id = SymMat::identity(3);
  CHECK(id.trace() == 3.0);
  SymMat d = SymMat::diagonal({2.0, -1.0, 0.5});
  CHECK(d.trace() == 1.5);
  SymMat s = d.shifted(2.0);
  CHECK(s(0, 0) == 4.0);
  CHECK(s(1, 1) == 1.0);
  CHECK(s(2, 2) == 2.5);
  CHECK(s(0, 1) == 0.0);
}

TEST_CASE("arithmetic and scalar product") {
  SymMat a = SymMat::diagonal({1.0, 2.0});
  SymMat b = SymMat::diagonal({3.0, -1.0});
  SymMat c = a + b;
  CHECK(c(0, 0) == 4.0);
  CHECK(c(1, 1) == 1.0);
  SymMat d = 2.0 * a;
  CHECK(d(1, 1) == 4.0);
  SymMat e = a - b;
  CHECK(e(0, 0) == -2.0);
}

TEST_CASE("add_outer forms rank-one updates") {
  SymMat x(2);
  x.add_outer({1.0, 2.0});
  CHECK(x(0, 0) == 1.0);
  CHECK(x(0, 1) == 2.0);
  CHECK(x(1, 1) == 4.0);
}

TEST_CASE("inner product equals trace of the product") {
  SymMat a = SymMat::diagonal({1.0, 2.0, 3.0});
  SymMat b = SymMat::diagonal({-1.0, 0.5, 2.0});
  CHECK(a.inner(b) == Catch::Approx(-1.0 + 1.0 + 6.0));
}

TEST_CASE("eigenvalues of a diagonal matrix are its sorted entries") {
  SymMat x = SymMat::diagonal({3.0, -2.0, 1.0});
  std::vector<double> ev = eigenvalues(x);
  REQUIRE(ev.size() == 3);
  CHECK(ev[0] == Catch::Approx(-2.0).margin(1e-14));
  CHECK(ev[1] == Catch::Approx(1.0).margin(1e-14));
  CHECK(ev[2] == Catch::Approx(3.0).margin(1e-14));
}

TEST_CASE("2x2 eigen pair oracle") {
  // [[2,1],[1,2]] has eigenvalues 1 and 3.
  SymMat x = SymMat::from_rows(2, {2.0, 1.0, 1.0, 2.0});
  EigenDecomposition eig = eig_sym(x);
  CHECK(eig.values[0] == Catch::Approx(1.0).margin(1e-13));
  CHECK(eig.values[1] == Catch::Approx(3.0).margin(1e-13));
  SymMat rebuilt = assemble(eig, eig.values);
  CHECK((rebuilt - x).max_abs_entry() <= 1e-13);
}

TEST_CASE("Householder conjugation has the planted spectrum") {
  SymMat a = householder_conjugate({1.0, 2.0, 3.0}, {-3.0, 0.5, 4.0});
  std::vector<double> ev = eigenvalues(a);
  CHECK(ev[0] == Catch::Approx(-3.0).margin(1e-12));
  CHECK(ev[1] == Catch::Approx(0.5).margin(1e-12));
  CHECK(ev[2] == Catch::Approx(4.0).margin(1e-12));
  CHECK(min_eigenvalue(a) == Catch::Approx(-3.0).margin(1e-12));
  CHECK(max_eigenvalue(a) == Catch::Approx(4.0).margin(1e-12));
}

TEST_CASE("eigendecomposition reconstructs random matrices") {
  for (int i = 0; i < 200; ++i) {
    Rng rng = substream(41, static_cast<std::uint64_t>(i));
    int n = 1 + static_cast<int>(rng.below(6));
    SymMat x = random_sym_from(n, rng.uniform(0.0, 5.0), rng);
    EigenDecomposition eig = eig_sym(x);
    SymMat rebuilt = assemble(eig, eig.values);
    double scale = 1.0 + op_norm(x);
    CHECK((rebuilt - x).max_abs_entry() <= 1e-12 * scale);
    for (std::size_t k = 1; k < eig.values.size(); ++k) CHECK(eig.values[k - 1] <= eig.values[k]);
  }
}

TEST_CASE("norms oracle") {
  SymMat x = SymMat::diagonal({3.0, -4.0});
  Norms nm = norms(x);
  CHECK(nm.op_norm == Catch::Approx(4.0).margin(1e-14));
  CHECK(nm.frob_norm == Catch::Approx(5.0).margin(1e-14));
  CHECK(nm.trace_norm == Catch::Approx(7.0).margin(1e-14));
}

TEST_CASE("psd ordering") {
  SymMat a = SymMat::identity(2);
  SymMat b = 2.0 * SymMat::identity(2);
  CHECK(psd_leq(a, b, 1e-12));
  CHECK_FALSE(psd_leq(b, a, 1e-12));
  CHECK_THROWS_AS(psd_leq(a, SymMat::identity(3), 1e-12), DimensionMismatch);
}

TEST_CASE("resolvent transform maps eigenvalues to lambda/(1-delta lambda)") {
  SymMat x = SymMat::diagonal({2.0, -1.0});
  SymMat z = resolvent_transform(x, 0.25);
  CHECK(z(0, 0) == Catch::Approx(4.0).margin(1e-12));
  CHECK(z(1, 1) == Catch::Approx(-0.8).margin(1e-12));
  CHECK(z(0, 1) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("resolvent transform rejects singular shifts") {
  SymMat x = SymMat::diagonal({2.0, -1.0});
  CHECK_THROWS_AS(resolvent_transform(x, 0.5), SingularShift);
  CHECK_THROWS_AS(resolvent_transform(x, -0.5), SingularShift);
  CHECK_NOTHROW(resolvent_transform(x, 0.499));
}

TEST_CASE("resolvent transform commutes with the planted basis") {
  SymMat a = householder_conjugate({1.0, -1.0, 2.0}, {1.5, -0.5, 0.25});
  SymMat z = resolvent_transform(a, 0.2);
  std::vector<double> ev = eigenvalues(z);
  // 1.5/(1-0.3)=15/7, -0.5/(1+0.1)=-5/11, 0.25/(1-0.05)=5/19.
  CHECK(ev[0] == Catch::Approx(-5.0 / 11.0).margin(1e-12));
  CHECK(ev[1] == Catch::Approx(5.0 / 19.0).margin(1e-12));
  CHECK(ev[2] == Catch::Approx(15.0 / 7.0).margin(1e-12));
}

TEST_CASE("determinant oracle") {
  SymMat x = SymMat::from_rows(3, {2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0});
  CHECK(determinant(x) == Catch::Approx(8.0).margin(1e-12));
  CHECK(determinant(SymMat::identity(4)) == Catch::Approx(1.0).margin(1e-13));
}

TEST_CASE("sym_square squares the spectrum") {
  SymMat a = householder_conjugate({2.0, 1.0, 1.0}, {-2.0, 0.5, 3.0});
  std::vector<double> ev = eigenvalues(sym_square(a));
  std::vector<double> expected{0.25, 4.0, 9.0};
  for (int k = 0; k < 3; ++k) CHECK(ev[k] == Catch::Approx(expected[k]).margin(1e-11));
}

TEST_CASE("congruence and gram oracles") {
  RectMat q(3, 2);
  q.at(0, 0) = 1.0;
  q.at(1, 0) = 1.0;
  q.at(1, 1) = 1.0;
  q.at(2, 1) = 2.0;
  SymMat g = gram(q);
  CHECK(g(0, 0) == 2.0);
  CHECK(g(0, 1) == 1.0);
  CHECK(g(1, 1) == 5.0);
  SymMat c = congruence(q, SymMat::identity(3));
  CHECK((c - g).max_abs_entry() <= 1e-14);
}

TEST_CASE("random_sym with zero scale is the zero matrix") {
  SymMat x = random_sym(3, 0.0, 5);
  CHECK(x.max_abs_entry() == 0.0);
  CHECK_THROWS_AS(random_sym(3, -1.0, 5), Error);
}

TEST_CASE("random sampling is reproducible by seed and index") {
  SymMat a = random_sym(4, 2.0, 99);
  SymMat b = random_sym(4, 2.0, 99);
  CHECK((a - b).max_abs_entry() == 0.0);
  SymMat c = random_sym(4, 2.0, 100);
  CHECK((a - c).max_abs_entry() > 0.0);
}

TEST_CASE("substreams decorrelate by index") {
  Rng r0 = substream(7, 0);
  Rng r1 = substream(7, 1);
  CHECK(r0.next_u64() != r1.next_u64());
}
