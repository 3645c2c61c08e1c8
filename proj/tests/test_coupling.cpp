#include <doctest.h>

#include <cmath>
#include <random>

#include "ies/conic/solver.hpp"
#include "ies/coupling.hpp"

using namespace ies;
using coupling::c2h_output;
using coupling::truck_demand;

TEST_CASE("coal gasification output is the direct product") {
  CHECK(c2h_output(100.0, 0.2, 0.05) == doctest::Approx(1.0));
  CHECK(c2h_output(100.0, 0.0, 0.05) == 0.0);
  CHECK(c2h_output(50.0, 0.1, 400.0) == doctest::Approx(2000.0));
  CHECK_THROWS_AS(c2h_output(10.0, 1.5, 1.0), InputError);
}

TEST_CASE("truck hydrogen demand follows the untrucked share") {
  CHECK(truck_demand(100.0, 1.0, 2.0) == 0.0);
  CHECK(truck_demand(100.0, 0.25, 2.0) == doctest::Approx(150.0));
  CHECK(truck_demand(0.0, 0.3, 2.0) == 0.0);
  CHECK_THROWS_AS(truck_demand(10.0, -0.1, 1.0), InputError);
}

TEST_CASE("coal split monotonicity in beta") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    double b1 = u(rng), b2 = u(rng);
    if (b1 > b2) std::swap(b1, b2);
    double m = 50.0 + 100.0 * u(rng), ac = 10.0 * u(rng), at = 5.0 * u(rng);
    CHECK(c2h_output(m, b2, ac) >= c2h_output(m, b1, ac) - 1e-12);
    CHECK(truck_demand(m, b2, at) <= truck_demand(m, b1, at) + 1e-12);
    // the split is exhaustive
    CHECK(b1 * m + (1 - b1) * m == doctest::Approx(m));
  }
}

TEST_CASE("p2g consumption arithmetic") {
  CHECK(coupling::consumption_ch4(2.0, 0.5, 10.0) == doctest::Approx(85.0));
  CHECK(coupling::consumption_h2(4.5, 200.0) == doctest::Approx(900.0));
  CHECK(coupling::consumption_h2(4.5, 0.0) == 0.0);
  CHECK(coupling::consumption_ch4(2.0, 0.5, 0.0) == 0.0);
  // coefficient structure: 4 alpha_elec + alpha_meth per unit of methane
  CHECK(coupling::consumption_ch4(3.0, 1.0, 1.0) == doctest::Approx(13.0));
}

TEST_CASE("energy content uses the fixed calorific values") {
  model::SafetyLimits q;
  CHECK(coupling::energy_content(1.0, "h2", q) == doctest::Approx(119.96));
  CHECK(coupling::energy_content(1.0, "ch4", q) == doctest::Approx(50.0));
  CHECK(coupling::energy_content(0.0, "h2", q) == 0.0);
  CHECK_THROWS_AS(coupling::energy_content(1.0, "co2", q), InputError);
  CHECK_THROWS_AS(coupling::energy_content(-1.0, "h2", q), InputError);
}

TEST_CASE("safety screen keeps concentrations outside the flammable windows") {
  model::SafetyLimits lim;  // H2 4-75 / 4-77, CH4 5-15 / 5-17
  CHECK(coupling::check_safety(2.0, 0.0, lim).empty());   // below LFL: pass
  auto v = coupling::check_safety(0.0, 10.0, lim);        // CH4 inside [5,15]
  REQUIRE(v.size() == 2);                                 // flammable + explosive windows
  CHECK(v[0].window == "flammability CH4");
  CHECK(coupling::check_safety(0.0, 0.0, lim).empty());
  CHECK_THROWS_AS(coupling::check_safety(-1.0, 0.0, lim), InputError);
  CHECK_THROWS_AS(coupling::check_safety(0.0, 101.0, lim), InputError);
}

TEST_CASE("literal inclusion mode requires the window") {
  model::SafetyLimits lim;
  // H2 at 40% sits inside both windows: literal mode passes, default flags
  CHECK(!coupling::check_safety(40.0, 10.0, lim, false).empty());
  CHECK(coupling::check_safety(40.0, 10.0, lim, true).empty());
}

namespace {

model::Scenario coupling_scn(int t_slots) {
  model::Scenario s;
  s.horizon_t = t_slots;
  s.slot_hours = 1.0;
  s.power_net.buses = {1};
  s.power_net.reference_bus = 1;
  s.wind.bus = 1;
  s.wind.availability.assign(t_slots, 0.0);
  s.gas_net.gas_price = 0.3;
  s.gas_net.nodes = {{1, 30.0, 80.0, 0.0, 1e6}};
  s.p2g.bus = 1;
  s.p2g.gas_node = 1;
  s.p2g.eta_elec.assign(t_slots, 0.7);
  s.p2g.eta_meth.assign(t_slots, 0.6);
  s.p2g.alpha_h2 = 4.6;
  s.p2g.alpha_ch4_elec = 4.6;
  s.p2g.alpha_ch4_meth = 0.5;
  s.p2g.f_h2_max = 1000.0;
  s.p2g.f_ch4_max = 200.0;
  s.coal.mining.assign(t_slots, 100.0);
  s.coal.alpha_coal.assign(t_slots, 10.0);
  s.coal.alpha_truck.assign(t_slots, 1.5);
  return s;
}

}  // namespace

TEST_CASE("hydrogen balance arithmetic: deficit covered by the electrolyzer") {
  auto s = coupling_scn(1);
  conic::ConicProgram prog;
  auto v = coupling::declare_variables(prog, s, true);
  coupling::build_coal_chain(prog, s, v);
  coupling::build_hydrogen_balance(prog, s, v);
  coupling::build_p2g_consumption(prog, s, v);
  // pin f_coal_h2 = 100 and truck demand = 150 via beta bookkeeping:
  // alpha_coal*M = 1000, so beta = 0.1 gives 100; truck = 1.5*(1-0.1)*100 = 135
  prog.vars()[v.beta[0]].lo = prog.vars()[v.beta[0]].hi = 0.1;
  prog.add_objective_term(v.cons_h2[0], 1.0);  // minimize electricity
  prog.add_objective_term(v.cons_ch4[0], 1.0);
  auto r = conic::solve_relaxation(prog);
  REQUIRE(r.status == conic::SolveStatus::Optimal);
  CHECK(r.x[v.f_coal_h2[0]] == doctest::Approx(100.0).epsilon(1e-6));
  CHECK(r.x[v.f_truck_h2[0]] == doctest::Approx(135.0).epsilon(1e-6));
  CHECK(r.x[v.f_h2[0]] == doctest::Approx(35.0).epsilon(1e-5));
}

TEST_CASE("zero truck demand with nonnegative supply forces both sources to zero") {
  auto s = coupling_scn(1);
  s.coal.alpha_truck[0] = 0.0;
  conic::ConicProgram prog;
  auto v = coupling::declare_variables(prog, s, true);
  coupling::build_coal_chain(prog, s, v);
  coupling::build_hydrogen_balance(prog, s, v);
  coupling::build_p2g_consumption(prog, s, v);
  prog.add_objective_term(v.cons_h2[0], 1.0);
  auto r = conic::solve_relaxation(prog);
  REQUIRE(r.status == conic::SolveStatus::Optimal);
  CHECK(r.x[v.f_h2[0]] == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
  CHECK(r.x[v.f_coal_h2[0]] == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
  CHECK(r.x[v.beta[0]] == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
}

TEST_CASE("stoichiometric link and efficiency-scaled consumption rows") {
  auto s = coupling_scn(1);
  conic::ConicProgram prog;
  auto v = coupling::declare_variables(prog, s, true);
  coupling::build_coal_chain(prog, s, v);
  coupling::build_hydrogen_balance(prog, s, v);
  coupling::build_p2g_consumption(prog, s, v);
  prog.vars()[v.f_ch4[0]].lo = 50.0;  // force methanation
  prog.add_objective_term(v.f_ch4[0], 1.0);
  prog.add_objective_term(v.cons_ch4[0], 0.001);
  auto r = conic::solve_relaxation(prog);
  REQUIRE(r.status == conic::SolveStatus::Optimal);
  CHECK(r.x[v.f_h2_prime[0]] == doctest::Approx(4.0 * r.x[v.f_ch4[0]]).epsilon(1e-9));
  double expected = (4.0 * 4.6 / 0.7 + 0.5 / 0.6) * 50.0;
  CHECK(r.x[v.cons_ch4[0]] == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("infeasible hydrogen demand with a pinned split is reported by the solver") {
  auto s = coupling_scn(1);
  s.p2g.f_h2_max = 10.0;  // tiny electrolyzer: supply cannot reach demand at beta = 0
  conic::ConicProgram prog;
  auto v = coupling::declare_variables(prog, s, true);
  coupling::build_coal_chain(prog, s, v);
  coupling::build_hydrogen_balance(prog, s, v);
  coupling::build_p2g_consumption(prog, s, v);
  prog.vars()[v.beta[0]].lo = prog.vars()[v.beta[0]].hi = 0.0;  // no gasification
  auto r = conic::solve_relaxation(prog);
  CHECK(r.status == conic::SolveStatus::Infeasible);
}
