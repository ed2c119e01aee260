#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ellset/acdo.hpp"
#include "ellset/errors.hpp"
#include "ellset/operators.hpp"
#include "ellset/rng.hpp"
#include "ellset/symmat.hpp"

using namespace ellset;

namespace {

const Point kOrigin{0.0, 0.0};
constexpr double kTol = 1e-10;

EllipticOperator catalog(const char* kind, int n) {
  OperatorSpec s;
  s.kind = kind;
  s.n = n;
  return make_operator(s);
}

EllipticOperator constant_operator(double c) {
  return EllipticOperator("constant", 2, Domain{2, false}, true,
                          [c](const SymMat&, const Point&) { return c; });
}

}  // namespace

TEST_CASE("trace operator distance is the mean eigenvalue") {
  EllipticOperator f = catalog("laplacian", 2);
  AcdoResult r = compute_acdo(f, SymMat::diagonal({4.0, 0.0}), kOrigin, kTol);
  CHECK(r.value == Catch::Approx(2.0).margin(1e-9));
  CHECK(r.t_hi - r.t_lo <= kTol);
  CHECK(r.evals > 0);

  for (int i = 0; i < 200; ++i) {
    Rng rng = substream(3, static_cast<std::uint64_t>(i));
    int n = 2 + static_cast<int>(rng.below(3));
    EllipticOperator g = catalog("laplacian", n);
    SymMat x = random_sym_from(n, rng.uniform(0.3, 3.0), rng);
    double got = compute_acdo(g, x, kOrigin, kTol).value;
    CHECK(std::abs(got - x.trace() / n) <= kTol);
  }
}

TEST_CASE("max-eigenvalue operator distance is the top eigenvalue") {
  EllipticOperator f = catalog("max_eigenvalue", 3);
  for (int i = 0; i < 200; ++i) {
    Rng rng = substream(5, static_cast<std::uint64_t>(i));
    SymMat x = random_sym_from(3, rng.uniform(0.3, 3.0), rng);
    double got = compute_acdo(f, x, kOrigin, kTol).value;
    CHECK(std::abs(got - max_eigenvalue(x)) <= kTol + 1e-12);
  }
}

TEST_CASE("linear operator distance matches the closed form") {
  OperatorSpec s;
  s.kind = "linear_constant";
  s.n = 2;
  s.A = SymMat::from_rows(2, {1.0, 0.25, 0.25, 0.5});
  s.f = 0.8;
  EllipticOperator f = make_operator(s);
  for (int i = 0; i < 200; ++i) {
    Rng rng = substream(9, static_cast<std::uint64_t>(i));
    SymMat x = random_sym_from(2, rng.uniform(0.3, 3.0), rng);
    double expected = (s.A.inner(x) - s.f) / s.A.trace();
    double got = compute_acdo(f, x, kOrigin, kTol).value;
    CHECK(std::abs(got - expected) <= kTol);
  }
}

TEST_CASE("determinant operator distance solves det(X + tI) = 1") {
  EllipticOperator f = catalog("monge_ampere", 2);
  // det(diag(4,1) + tI) = 1 at t = (-5 + sqrt(13))/2 on the admissible branch.
  double root = (-5.0 + std::sqrt(13.0)) / 2.0;
  AcdoResult r = compute_acdo(f, SymMat::diagonal({4.0, 1.0}), kOrigin, kTol);
  CHECK(r.value == Catch::Approx(-root).margin(1e-9));
}

TEST_CASE("nondegeneracy along the identity ray") {
  EllipticOperator f = catalog("monge_ampere", 2);
  for (int i = 0; i < 100; ++i) {
    Rng rng = substream(11, static_cast<std::uint64_t>(i));
    SymMat x = random_sym_from(2, rng.uniform(0.3, 2.0), rng);
    double tau = rng.uniform(-4.0, 4.0);
    double base = compute_acdo(f, x, kOrigin, kTol).value;
    double moved = compute_acdo(f, x.shifted(tau), kOrigin, kTol).value;
    CHECK(std::abs(moved - base - tau) <= 2.0 * kTol);
  }
}

TEST_CASE("distance is 1-Lipschitz in the operator norm") {
  EllipticOperator f = catalog("max_eigenvalue", 3);
  for (int i = 0; i < 100; ++i) {
    Rng rng = substream(13, static_cast<std::uint64_t>(i));
    SymMat x = random_sym_from(3, rng.uniform(0.3, 2.0), rng);
    SymMat y = random_sym_from(3, rng.uniform(0.1, 1.5), rng);
    double base = compute_acdo(f, x, kOrigin, kTol).value;
    double moved = compute_acdo(f, x + y, kOrigin, kTol).value;
    CHECK(std::abs(moved - base) <= op_norm(y) + 2.0 * kTol);
  }
}

TEST_CASE("dual distance mirrors the primal at the reflected matrix") {
  for (const char* kind : {"laplacian", "max_eigenvalue"}) {
    EllipticOperator f = catalog(kind, 3);
    EllipticOperator g = dual_operator(f);
    for (int i = 0; i < 100; ++i) {
      Rng rng = substream(15, static_cast<std::uint64_t>(i));
      SymMat x = random_sym_from(3, rng.uniform(0.3, 2.5), rng);
      double primal = compute_acdo(f, -x, kOrigin, kTol).value;
      double dual = compute_acdo(g, x, kOrigin, kTol).value;
      CHECK(std::abs(dual + primal) <= 2.0 * kTol);
    }
  }
}

TEST_CASE("rays that never cross the boundary are rejected") {
  CHECK_THROWS_AS(compute_acdo(constant_operator(1.0), SymMat(2), kOrigin, kTol), NoBracket);
  CHECK_THROWS_AS(compute_acdo(constant_operator(-1.0), SymMat(2), kOrigin, kTol), NoBracket);
}

TEST_CASE("tolerance must be positive") {
  EllipticOperator f = catalog("laplacian", 2);
  CHECK_THROWS_AS(compute_acdo(f, SymMat(2), kOrigin, 0.0), PreconditionNotMet);
  CHECK_THROWS_AS(compute_acdo(f, SymMat(2), kOrigin, -1e-8), PreconditionNotMet);
}

TEST_CASE("signed distance helper agrees with the full result") {
  EllipticOperator f = catalog("laplacian", 3);
  SymMat x = SymMat::diagonal({1.0, 2.0, 3.0});
  CHECK(signed_distance_to_gamma(f, x, kOrigin, kTol) ==
        compute_acdo(f, x, kOrigin, kTol).value);
}

TEST_CASE("projection lands on the null level set") {
  for (const char* kind : {"laplacian", "max_eigenvalue", "monge_ampere"}) {
    EllipticOperator f = catalog(kind, 2);
    for (int i = 0; i < 50; ++i) {
      Rng rng = substream(21, static_cast<std::uint64_t>(i));
      SymMat x = random_sym_from(2, rng.uniform(0.3, 2.0), rng);
      SymMat w = project_to_gamma(f, x, kOrigin, kTol);
      double residual = std::abs(compute_acdo(f, w, kOrigin, kTol).value);
      INFO(kind);
      CHECK(residual <= 3.0 * kTol);
    }
  }
}

TEST_CASE("sup-inf gap vanishes for strictly monotone operators") {
  EllipticOperator f = catalog("max_eigenvalue", 3);
  for (int i = 0; i < 100; ++i) {
    Rng rng = substream(23, static_cast<std::uint64_t>(i));
    SymMat x = random_sym_from(3, rng.uniform(0.3, 2.5), rng);
    SupInfGap g = sup_inf_gap(f, x, kOrigin, kTol);
    CHECK(std::abs(g.gap()) <= 2.0 * kTol);
    CHECK(std::abs(-g.sup_minus - compute_acdo(f, x, kOrigin, kTol).value) <= 2.0 * kTol);
  }
}

TEST_CASE("plateau operator exposes a unit gap at zero") {
  EllipticOperator f = catalog("plateau", 2);
  SupInfGap g = sup_inf_gap(f, SymMat(2), kOrigin, kTol);
  CHECK(g.sup_minus == Catch::Approx(0.5).margin(1e-9));
  CHECK(g.inf_plus == Catch::Approx(-0.5).margin(1e-9));
  CHECK(g.gap() == Catch::Approx(-1.0).margin(1e-9));
}

TEST_CASE("solution pair from a fat zero set") {
  EllipticOperator f = catalog("plateau", 2);
  PolynomialPair pair = solution_pair_from_gap(f, SymMat(2), kOrigin, kTol);
  CHECK(pair.eps == Catch::Approx(0.125).margin(1e-9));
  CHECK(std::abs(f.evaluate(pair.hessian_phi, kOrigin).raw()) <= 1e-12);
  CHECK(std::abs(f.evaluate(pair.hessian_phi.shifted(-2.0 * pair.eps), kOrigin).raw()) <= 1e-12);

  Rng rng(77);
  for (int i = 0; i < 100; ++i) {
    double theta = rng.uniform(0.0, 6.283185307179586);
    Point p{std::cos(theta), std::sin(theta)};
    CHECK(std::abs(pair.psi(p) - pair.phi(p)) <= 1e-12);
  }
  CHECK(pair.psi(kOrigin) - pair.phi(kOrigin) == Catch::Approx(pair.eps));
}

TEST_CASE("solution pair is refused when the zero set is thin") {
  EllipticOperator f = catalog("laplacian", 2);
  CHECK_THROWS_AS(solution_pair_from_gap(f, SymMat::identity(2), kOrigin, kTol),
                  PreconditionNotMet);
}
