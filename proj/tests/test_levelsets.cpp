#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "ellset/errors.hpp"
#include "ellset/levelsets.hpp"
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

// tr A(x) == 1 for all x; the coordinate coefficients are traceless.
OperatorSpec unit_trace_field() {
  OperatorSpec s;
  s.kind = "linear_field";
  s.n = 2;
  s.space_dim = 2;
  s.A0 = SymMat::from_rows(2, {0.5, 0.0, 0.0, 0.5});
  s.A_coeffs = {SymMat::from_rows(2, {0.2, 0.0, 0.0, -0.2}),
                SymMat::from_rows(2, {0.0, 0.1, 0.1, 0.0})};
  s.f0 = 0.0;
  return s;
}

}  // namespace

TEST_CASE("one-sided distances for the trace operator") {
  EllipticOperator f = catalog("laplacian", 2);
  SymMat x = SymMat::diagonal({4.0, 0.0});
  CHECK(dist_to_level_set(f, x, kOrigin, Side::plus, kTol) == 0.0);
  CHECK(dist_to_level_set(f, x, kOrigin, Side::minus, kTol) ==
        Catch::Approx(2.0).margin(1e-9));
  SymMat y = SymMat::diagonal({-3.0, -1.0});
  CHECK(dist_to_level_set(f, y, kOrigin, Side::plus, kTol) ==
        Catch::Approx(2.0).margin(1e-9));
  CHECK(dist_to_level_set(f, y, kOrigin, Side::minus, kTol) == 0.0);
}

TEST_CASE("one-sided distances match the linear closed form") {
  OperatorSpec s;
  s.kind = "linear_constant";
  s.n = 2;
  s.A = SymMat::from_rows(2, {0.6, 0.1, 0.1, 0.4});
  s.f = 0.25;
  EllipticOperator f = make_operator(s);
  double a_trace_norm = norms(s.A).trace_norm;
  for (int i = 0; i < 100; ++i) {
    Rng rng = substream(31, static_cast<std::uint64_t>(i));
    SymMat x = random_sym_from(2, rng.uniform(0.3, 2.5), rng);
    double signed_dist = (s.A.inner(x) - s.f) / a_trace_norm;
    double dplus = dist_to_level_set(f, x, kOrigin, Side::plus, kTol);
    double dminus = dist_to_level_set(f, x, kOrigin, Side::minus, kTol);
    CHECK(std::abs(dplus - std::max(-signed_dist, 0.0)) <= 2.0 * kTol);
    CHECK(std::abs(dminus - std::max(signed_dist, 0.0)) <= 2.0 * kTol);
    CHECK(std::abs(ascoli_distance(s.A, s.f, x) - std::abs(signed_dist)) <= 1e-15);
  }
}

TEST_CASE("ascoli formula rejects a vanishing coefficient") {
  CHECK_THROWS_AS(ascoli_distance(SymMat(2), 1.0, SymMat::identity(2)), ZeroCoefficient);
}

TEST_CASE("sampled clouds are members of the requested side") {
  for (const char* kind : {"max_eigenvalue", "monge_ampere", "plateau"}) {
    EllipticOperator f = catalog(kind, 2);
    for (Side side : {Side::plus, Side::minus}) {
      std::vector<SymMat> cloud = sample_level_set(f, kOrigin, side, 60, 2.0, 404, kTol);
      REQUIRE(cloud.size() == 60);
      for (const SymMat& z : cloud) {
        INFO(kind << " " << side_name(side));
        CHECK(in_level_set(f, z, kOrigin, side));
      }
    }
  }
}

TEST_CASE("sampling validates its arguments") {
  EllipticOperator f = catalog("laplacian", 2);
  CHECK_THROWS_AS(sample_level_set(f, kOrigin, Side::plus, 0, 1.0, 1, kTol), InvalidCount);
  CHECK_THROWS_AS(sample_level_set(f, kOrigin, Side::plus, 5, 1e-12, 1, kTol),
                  PreconditionNotMet);
}

TEST_CASE("sampling is reproducible and worker-count independent") {
  EllipticOperator f = catalog("max_eigenvalue", 3);
  std::vector<SymMat> base = sample_level_set(f, kOrigin, Side::plus, 40, 2.0, 11, kTol);

  const char* saved = std::getenv("TOOLKIT_WORKERS");
  std::string saved_value = saved ? saved : "";
  ::setenv("TOOLKIT_WORKERS", "1", 1);
  std::vector<SymMat> serial = sample_level_set(f, kOrigin, Side::plus, 40, 2.0, 11, kTol);
  ::setenv("TOOLKIT_WORKERS", "3", 1);
  std::vector<SymMat> threaded = sample_level_set(f, kOrigin, Side::plus, 40, 2.0, 11, kTol);
  if (saved)
    ::setenv("TOOLKIT_WORKERS", saved_value.c_str(), 1);
  else
    ::unsetenv("TOOLKIT_WORKERS");

  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK((base[i] - serial[i]).max_abs_entry() == 0.0);
    CHECK((base[i] - threaded[i]).max_abs_entry() == 0.0);
  }
}

TEST_CASE("excess vanishes when both points coincide for the trace operator") {
  EllipticOperator f = catalog("laplacian", 2);
  for (double delta : {0.0, 0.3}) {
    for (Side side : {Side::plus, Side::minus}) {
      ExcessEstimate e = excess_estimate(f, kOrigin, kOrigin, delta, side, 100, 19, kTol);
      INFO("delta " << delta << " side " << side_name(side));
      CHECK(e.value <= 2.0 * kTol);
      CHECK(e.samples_in > 0);
      CHECK(e.delta == delta);
    }
  }
}

TEST_CASE("excess estimate is monotone in the sample count") {
  EllipticOperator f = make_operator(unit_trace_field());
  Point x{0.2, 0.0};
  ExcessEstimate small = excess_estimate(f, x, kOrigin, 0.05, Side::plus, 50, 23, kTol);
  ExcessEstimate large = excess_estimate(f, x, kOrigin, 0.05, Side::plus, 200, 23, kTol);
  CHECK(small.value <= large.value);
  CHECK(small.samples_in <= large.samples_in);
}

TEST_CASE("excess witness reproduces its recorded value") {
  EllipticOperator f = make_operator(unit_trace_field());
  Point x{0.2, 0.0};
  ExcessEstimate e = excess_estimate(f, x, kOrigin, 0.05, Side::plus, 100, 29, kTol);
  CHECK(e.value > 0.0);
  double recomputed = dist_to_level_set(f, e.witness, kOrigin, Side::plus, kTol);
  CHECK(recomputed == Catch::Approx(e.value).margin(1e-12));
}

TEST_CASE("excess estimate rejects bad arguments and starved samplers") {
  EllipticOperator f = catalog("laplacian", 2);
  CHECK_THROWS_AS(excess_estimate(f, kOrigin, kOrigin, -0.1, Side::plus, 10, 1, kTol),
                  PreconditionNotMet);
  CHECK_THROWS_AS(excess_estimate(f, kOrigin, kOrigin, 0.1, Side::plus, 0, 1, kTol),
                  InvalidCount);
  // delta so large that every sampled member fails delta |X| < 1.
  CHECK_THROWS_AS(excess_estimate(f, kOrigin, kOrigin, 1e9, Side::plus, 10, 1, kTol),
                  NoAcceptedSamples);
}

TEST_CASE("condition probe stays at the floor for autonomous operators") {
  EllipticOperator f = catalog("max_eigenvalue", 2);
  std::vector<double> schedule{0.1, 0.05};
  ConditionReport rep = check_condition(f, kOrigin, schedule, 3, 15, 37, kTol);
  REQUIRE(rep.rows.size() == 2);
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    CHECK(rep.rows[i].t == schedule[i]);
    CHECK(rep.rows[i].pairs_sampled == 3);
    CHECK(rep.rows[i].sup_excess_plus <= 2.0 * kTol);
    CHECK(rep.rows[i].sup_excess_minus <= 2.0 * kTol);
  }
  ConditionVerdict verdict = condition_verdict(rep, kTol);
  CHECK(verdict.pass);
  CHECK(verdict.flat_zero);
}

TEST_CASE("condition probe validates schedule and counts") {
  EllipticOperator f = catalog("laplacian", 2);
  CHECK_THROWS_AS(check_condition(f, kOrigin, {}, 2, 5, 1, kTol), PreconditionNotMet);
  CHECK_THROWS_AS(check_condition(f, kOrigin, {0.1, 0.1}, 2, 5, 1, kTol), PreconditionNotMet);
  CHECK_THROWS_AS(check_condition(f, kOrigin, {0.1, -0.05}, 2, 5, 1, kTol), PreconditionNotMet);
  CHECK_THROWS_AS(check_condition(f, kOrigin, {0.1}, 0, 5, 1, kTol), InvalidCount);
  CHECK_THROWS_AS(check_condition(f, kOrigin, {0.1}, 2, 0, 1, kTol), InvalidCount);
}

TEST_CASE("condition probe refuses balls that leave the domain") {
  OperatorSpec s;
  s.kind = "counterexample_linear";
  s.n = 2;
  EllipticOperator f = make_operator(s);
  CHECK_THROWS_AS(check_condition(f, Point{0.5, 0.0}, {0.6, 0.3}, 2, 5, 1, kTol),
                  BallOutsideDomain);
}

TEST_CASE("verdict accepts decay and rejects stalls") {
  ConditionReport decaying;
  decaying.base_point = kOrigin;
  for (double t : {0.1, 0.05, 0.02, 0.01}) {
    ConditionRow row;
    row.t = t;
    row.sup_excess_plus = 0.5 * t;
    row.sup_excess_minus = 0.4 * t;
    row.pairs_sampled = 1;
    decaying.rows.push_back(row);
  }
  ConditionVerdict good = condition_verdict(decaying, kTol);
  CHECK(good.pass);
  CHECK_FALSE(good.flat_zero);
  CHECK(good.slope >= 0.5);

  ConditionReport stalled = decaying;
  for (ConditionRow& row : stalled.rows) {
    row.sup_excess_plus = 0.8;
    row.sup_excess_minus = 0.7;
  }
  ConditionVerdict bad = condition_verdict(stalled, kTol);
  CHECK_FALSE(bad.pass);
  CHECK(bad.final_value == Catch::Approx(0.8));
}

TEST_CASE("bounded Hausdorff distance vanishes at equal points") {
  EllipticOperator f = catalog("monge_ampere", 2);
  CHECK(bounded_hausdorff(f, kOrigin, kOrigin, 2.0, 200, 43, kTol) <= 2.0 * kTol);
  CHECK_THROWS_AS(bounded_hausdorff(f, kOrigin, kOrigin, 0.0, 10, 1, kTol), InvalidRadius);
}

TEST_CASE("bounded Hausdorff distance for a unit-trace linear field") {
  // For half spaces {tr(A(p) X) >= 0} with tr A == 1, the distance
  // difference is |tr((A(x) - A(y)) X)| wherever the clipping at zero is
  // inactive, so d_R equals R times the trace norm of A(x) - A(y); the
  // aligned maximizer is feasible here.
  OperatorSpec s = unit_trace_field();
  EllipticOperator f = make_operator(s);
  Point x{0.3, 0.0};
  SymMat diff = 0.3 * s.A_coeffs[0];
  double exact = 2.0 * norms(diff).trace_norm;
  double est = bounded_hausdorff(f, x, kOrigin, 2.0, 4000, 47, kTol);
  CHECK(est <= exact + 4.0 * kTol);
  CHECK(est >= 0.60 * exact);
}

TEST_CASE("null-set continuity probe decays for smooth data") {
  OperatorSpec s;
  s.kind = "monge_ampere";
  s.n = 2;
  s.f0 = 1.0;
  s.f_quad = 1.0;
  EllipticOperator f = make_operator(s);
  SymMat x0 = SymMat::diagonal({2.0, 1.0});
  std::vector<double> radii{0.2, 0.05};
  std::vector<double> dev = gamma_continuity_probe(f, x0, kOrigin, radii, 60, 53, kTol);
  REQUIRE(dev.size() == 2);
  CHECK(dev[1] <= dev[0]);
  CHECK(dev[0] <= 0.1);

  EllipticOperator flat = catalog("laplacian", 2);
  std::vector<double> none = gamma_continuity_probe(flat, x0, kOrigin, radii, 30, 53, kTol);
  CHECK(none[0] <= 2.0 * kTol);
  CHECK(none[1] <= 2.0 * kTol);
  CHECK_THROWS_AS(gamma_continuity_probe(flat, x0, kOrigin, radii, 0, 53, kTol), InvalidCount);
}

TEST_CASE("condition report serializes to a fixed CSV layout") {
  ConditionReport rep;
  rep.base_point = kOrigin;
  ConditionRow row;
  row.t = 0.1;
  row.sup_excess_plus = 0.25;
  row.sup_excess_minus = 0.125;
  row.pairs_sampled = 4;
  rep.rows.push_back(row);
  CHECK(condition_report_csv(rep) ==
        "t,sup_excess_plus,sup_excess_minus,pairs_sampled\n0.1,0.25,0.125,4\n");
}
