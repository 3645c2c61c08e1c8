#include <doctest.h>

#include <cmath>
#include <random>

#include "ies/conic/solver.hpp"

using namespace ies::conic;

namespace {
SolveOptions tight() {
  SolveOptions o;
  o.ipm.feastol = 1e-9;
  o.ipm.abstol = 1e-10;
  o.ipm.reltol = 1e-10;
  return o;
}
}  // namespace

TEST_CASE("lp: simple bounded minimum") {
  ConicProgram p;
  int x = p.add_continuous("x", 0.0, ies::kInf);
  int y = p.add_continuous("y", 0.0, ies::kInf);
  p.add_linear("cap", Sense::LE, 1.0, {{x, 1.0}, {y, 1.0}});
  p.add_objective_term(x, -1.0);
  p.add_objective_term(y, -2.0);
  auto r = solve_relaxation(p, tight());
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == doctest::Approx(-2.0).epsilon(1e-7));
  CHECK(r.x[y] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x[x] == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
}

TEST_CASE("lp: equality plus bounds") {
  ConicProgram p;
  int x = p.add_continuous("x", 0.0, 2.0);
  int y = p.add_continuous("y", 0.0, 2.0);
  p.add_linear("bal", Sense::EQ, 2.5, {{x, 1.0}, {y, 1.0}});
  p.add_objective_term(x, 1.0);
  p.add_objective_term(y, 3.0);
  auto r = solve_relaxation(p, tight());
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.x[x] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(r.x[y] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.objective == doctest::Approx(3.5).epsilon(1e-7));
}

TEST_CASE("lp: infeasible bounds detected") {
  ConicProgram p;
  int x = p.add_continuous("x", -10.0, 10.0);
  p.add_linear("lo", Sense::GE, 1.0, {{x, 1.0}});
  p.add_linear("hi", Sense::LE, 0.0, {{x, 1.0}});
  p.add_objective_term(x, 1.0);
  auto r = solve_relaxation(p, tight());
  CHECK(r.status == SolveStatus::Infeasible);
}

TEST_CASE("lp: unbounded detected") {
  ConicProgram p;
  int x = p.add_continuous("x", -ies::kInf, 5.0);
  p.add_objective_term(x, 1.0);
  auto r = solve_relaxation(p, tight());
  CHECK(r.status == SolveStatus::Unbounded);
}

TEST_CASE("soc: min x subject to ||(x,0)|| <= 1 gives -1") {
  ConicProgram p;
  int x = p.add_continuous("x", -ies::kInf, ies::kInf);
  SocConstraint soc;
  soc.name = "unit";
  soc.norm_rows = {{{x, 1.0}}, {}};
  soc.norm_offsets = {0.0, 0.0};
  soc.rhs_terms = {};
  soc.rhs_offset = 1.0;
  p.add_soc(std::move(soc));
  p.add_objective_term(x, 1.0);
  auto r = solve_relaxation(p, tight());
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == doctest::Approx(-1.0).epsilon(1e-7));
}

TEST_CASE("soc: epigraph minimum lambda >= (F/C)^2 with F=3, C=1") {
  ConicProgram p;
  int lam = p.add_continuous("lambda", 0.0, ies::kInf);
  // ||(2F/C, lam-1)|| <= lam+1 with F fixed at 3
  SocConstraint soc;
  soc.name = "weymouth";
  soc.norm_rows = {{}, {{lam, 1.0}}};
  soc.norm_offsets = {6.0, -1.0};
  soc.rhs_terms = {{lam, 1.0}};
  soc.rhs_offset = 1.0;
  p.add_soc(std::move(soc));
  p.add_objective_term(lam, 1.0);
  auto r = solve_relaxation(p, tight());
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == doctest::Approx(9.0).epsilon(1e-7));
}

TEST_CASE("quadratic epigraph cone: pure square boundary") {
  ConicProgram p;
  int pv = p.add_continuous("P", 2.0, 2.0);  // pinned
  int f = p.add_continuous("fcost", 0.0, ies::kInf);
  encode_quadratic_epigraph(p, 1.0, 0.0, 0.0, pv, -1, f, "sq");
  p.add_objective_term(f, 1.0);
  auto r = solve_relaxation(p, tight());
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == doctest::Approx(4.0).epsilon(1e-7));
}

TEST_CASE("quadratic epigraph degenerates to linear row when a=0") {
  ConicProgram p;
  int pv = p.add_continuous("P", 1.0, 1.0);
  int u = p.add_continuous("u", 1.0, 1.0);
  int f = p.add_continuous("fcost", -ies::kInf, ies::kInf);
  std::size_t cones_before = p.socs().size();
  encode_quadratic_epigraph(p, 0.0, 2.0, 5.0, pv, u, f, "lin");
  CHECK(p.socs().size() == cones_before);  // no cone emitted
  p.add_objective_term(f, 1.0);
  auto r = solve_relaxation(p, tight());
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == doctest::Approx(7.0).epsilon(1e-7));
}

TEST_CASE("quadratic epigraph rejects negative curvature") {
  ConicProgram p;
  int pv = p.add_continuous("P", 0.0, 1.0);
  int f = p.add_continuous("f", 0.0, ies::kInf);
  CHECK_THROWS_AS(encode_quadratic_epigraph(p, -0.1, 0.0, 0.0, pv, -1, f, "bad"),
                  ies::SolverError);
}

TEST_CASE("unit-2 fuel cost minimized over P in [0.25, 1] sits at the lower bound") {
  // cost increases in P (b > 0), so P* = 0.25
  ConicProgram p;
  int pv = p.add_continuous("P", 0.25, 1.0);
  int u = p.add_continuous("u", 1.0, 1.0);
  int f = p.add_continuous("fcost", 0.0, ies::kInf);
  encode_quadratic_epigraph(p, 0.1058, 46.1591, 945.633, pv, u, f, "fuel2");
  p.add_objective_term(f, 1.0);
  auto r = solve_relaxation(p, tight());
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.x[pv] == doctest::Approx(0.25).epsilon(1e-5));
  double expect = 0.1058 * 0.0625 + 46.1591 * 0.25 + 945.633;
  CHECK(r.objective == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("random conic feasibility: optimal status implies kkt quality") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> un(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    ConicProgram p;
    const int n = 6;
    std::vector<int> xs;
    for (int i = 0; i < n; ++i)
      xs.push_back(p.add_continuous("x" + std::to_string(i), -2.0, 2.0));
    for (int r = 0; r < 3; ++r) {
      std::vector<LinTerm> terms;
      for (int i = 0; i < n; ++i)
        if (rng() % 2) terms.push_back({xs[i], un(rng)});
      if (terms.empty()) terms.push_back({xs[0], 1.0});
      p.add_linear("r" + std::to_string(r), Sense::LE, 1.0 + std::fabs(un(rng)), terms);
    }
    SocConstraint soc;
    soc.name = "ball";
    for (int i = 0; i < 3; ++i) {
      soc.norm_rows.push_back({{xs[i], 1.0}});
      soc.norm_offsets.push_back(0.0);
    }
    soc.rhs_terms = {};
    soc.rhs_offset = 1.5;
    p.add_soc(std::move(soc));
    for (int i = 0; i < n; ++i) p.add_objective_term(xs[i], un(rng));

    auto r = solve_relaxation(p, tight());
    REQUIRE(r.status == SolveStatus::Optimal);
    auto viol = p.check_point(r.x, 1e-6);
    CHECK(viol.empty());
    // duality sandwich within tolerance
    CHECK(r.bound <= r.objective + 1e-6 * std::max(1.0, std::fabs(r.objective)));
    CHECK(r.objective - r.bound <= 1e-5 * std::max(1.0, std::fabs(r.objective)));
  }
}
