#include <doctest.h>

#include "ies/carbon.hpp"

using namespace ies;
using carbon::compute_ledger;
using carbon::Fleet;
using carbon::LedgerInputs;

namespace {
LedgerInputs zero_inputs(int t_slots) {
  LedgerInputs in;
  in.slot_hours = 1.0;
  in.total_cost = 0.0;
  in.fuel_tons.assign(t_slots, 0.0);
  in.f_coal_h2.assign(t_slots, 0.0);
  in.f_ch4.assign(t_slots, 0.0);
  in.trucked_tons.assign(t_slots, 0.0);
  in.ev_charge_kwh.assign(t_slots, 0.0);
  return in;
}
}  // namespace

TEST_CASE("zero dispatch gives an all-zero ledger") {
  model::EmissionFactors f;
  auto led = compute_ledger(zero_inputs(4), f, 30.0, Fleet::Hydrogen);
  CHECK(led.total_gross == 0.0);
  CHECK(led.total_net == 0.0);
  CHECK(led.carbon_cost == 0.0);
  CHECK(led.adjusted_total == 0.0);
}

TEST_CASE("pure methanation slot has negative net and a discount") {
  model::EmissionFactors f;
  auto in = zero_inputs(1);
  in.total_cost = 1000.0;
  in.f_ch4[0] = 500.0;
  auto led = compute_ledger(in, f, 30.0, Fleet::Hydrogen);
  CHECK(led.total_net < 0.0);
  CHECK(led.adjusted_total < in.total_cost);
  CHECK(led.total_absorbed == doctest::Approx(f.methanation_sink * 500.0));
}

TEST_CASE("ledger is linear: doubling flows doubles every aggregate") {
  model::EmissionFactors f;
  auto in = zero_inputs(2);
  in.fuel_tons = {100.0, 120.0};
  in.f_coal_h2 = {500.0, 0.0};
  in.f_ch4 = {200.0, 300.0};
  in.trucked_tons = {400.0, 350.0};
  auto led1 = compute_ledger(in, f, 10.0, Fleet::Diesel);
  auto in2 = in;
  for (auto* v : {&in2.fuel_tons, &in2.f_coal_h2, &in2.f_ch4, &in2.trucked_tons})
    for (auto& x : *v) x *= 2.0;
  auto led2 = compute_ledger(in2, f, 10.0, Fleet::Diesel);
  CHECK(led2.total_gross == doctest::Approx(2.0 * led1.total_gross));
  CHECK(led2.total_absorbed == doctest::Approx(2.0 * led1.total_absorbed));
  CHECK(led2.total_net == doctest::Approx(2.0 * led1.total_net));
}

TEST_CASE("price monotonicity follows the sign of net emissions") {
  model::EmissionFactors f;
  auto burn = zero_inputs(1);
  burn.total_cost = 1e5;
  burn.fuel_tons[0] = 100.0;  // net > 0
  double a1 = compute_ledger(burn, f, 5.0, Fleet::Hydrogen).adjusted_total;
  double a2 = compute_ledger(burn, f, 33.0, Fleet::Hydrogen).adjusted_total;
  CHECK(a2 >= a1);

  auto sink = zero_inputs(1);
  sink.total_cost = 1e5;
  sink.f_ch4[0] = 1000.0;  // net < 0
  double b1 = compute_ledger(sink, f, 5.0, Fleet::Hydrogen).adjusted_total;
  double b2 = compute_ledger(sink, f, 33.0, Fleet::Hydrogen).adjusted_total;
  CHECK(b2 <= b1);
}

TEST_CASE("fleet factor ablation: zero diesel factor collapses to the hydrogen column") {
  model::EmissionFactors f;
  f.diesel_truck = 0.0;
  auto in = zero_inputs(1);
  in.total_cost = 5000.0;
  in.fuel_tons[0] = 10.0;
  in.trucked_tons[0] = 100.0;
  auto dz = compute_ledger(in, f, 20.0, Fleet::Diesel);
  auto hz = compute_ledger(in, f, 20.0, Fleet::Hydrogen);
  CHECK(dz.adjusted_total == doctest::Approx(hz.adjusted_total));
}

TEST_CASE("carbon price zero collapses the comparison to operating cost") {
  model::EmissionFactors f;
  auto in = zero_inputs(1);
  in.total_cost = 7777.0;
  in.fuel_tons[0] = 50.0;
  auto led = compute_ledger(in, f, 0.0, Fleet::Ev);
  CHECK(led.adjusted_total == doctest::Approx(7777.0));
}

TEST_CASE("cost-is-credit flag flips the carbon term") {
  model::EmissionFactors f;
  auto in = zero_inputs(1);
  in.total_cost = 1000.0;
  in.fuel_tons[0] = 10.0;
  auto plus = compute_ledger(in, f, 10.0, Fleet::Hydrogen, false);
  auto minus = compute_ledger(in, f, 10.0, Fleet::Hydrogen, true);
  CHECK(plus.adjusted_total - 1000.0 == doctest::Approx(-(minus.adjusted_total - 1000.0)));
}

TEST_CASE("ev charging emissions use the grid factor") {
  model::EmissionFactors f;
  auto in = zero_inputs(1);
  in.ev_charge_kwh[0] = 10000.0;
  auto led = compute_ledger(in, f, 1.0, Fleet::Ev);
  CHECK(led.total_gross == doctest::Approx(f.ev_grid * 10000.0));
  // hydrogen fleet ignores the charging series
  auto led2 = compute_ledger(in, f, 1.0, Fleet::Hydrogen);
  CHECK(led2.total_gross == 0.0);
}
