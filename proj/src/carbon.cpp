#include "ies/carbon.hpp"

#include <cmath>

namespace ies::carbon {

const char* to_string(Fleet f) {
  switch (f) {
    case Fleet::Hydrogen: return "hydrogen";
    case Fleet::Ev: return "ev";
    case Fleet::Diesel: return "diesel";
  }
  return "unknown";
}

Fleet fleet_from_string(const std::string& s) {
  if (s == "hydrogen" || s == "h2") return Fleet::Hydrogen;
  if (s == "ev" || s == "electric") return Fleet::Ev;
  if (s == "diesel") return Fleet::Diesel;
  throw InputError(format_msg("unknown fleet `", s, "` (hydrogen|ev|diesel)"));
}

CarbonLedger compute_ledger(const LedgerInputs& in, const model::EmissionFactors& f,
                            double carbon_price, Fleet fleet, bool cost_is_credit) {
  const std::size_t T = in.fuel_tons.size();
  CarbonLedger led;
  led.gross.resize(T);
  led.absorbed.resize(T);
  led.net.resize(T);
  const double h = in.slot_hours;
  for (std::size_t t = 0; t < T; ++t) {
    double gross = f.coal_gen * in.fuel_tons[t];
    gross += f.c2h_process * in.f_coal_h2[t] * h;
    if (fleet == Fleet::Diesel && t < in.trucked_tons.size())
      gross += f.diesel_truck * in.trucked_tons[t];
    if (fleet == Fleet::Ev && t < in.ev_charge_kwh.size())
      gross += f.ev_grid * in.ev_charge_kwh[t];
    double absorbed = (t < in.f_ch4.size()) ? f.methanation_sink * in.f_ch4[t] * h : 0.0;
    led.gross[t] = gross;
    led.absorbed[t] = absorbed;
    led.net[t] = gross - absorbed;
    led.total_gross += gross;
    led.total_absorbed += absorbed;
    led.total_net += led.net[t];
  }
  led.carbon_cost = carbon_price * led.total_net;
  led.adjusted_total =
      cost_is_credit ? in.total_cost - led.carbon_cost : in.total_cost + led.carbon_cost;
  return led;
}

FleetComparison compare_fleets(const model::Scenario& s, const FleetSolve& solve_fn,
                               bool cost_is_credit) {
  FleetComparison cmp;
  cmp.china_price_usd = s.prices.china_carbon_cny / s.prices.cny_per_usd;
  cmp.eu_price_usd = s.prices.eu_carbon_eur / s.prices.eur_per_usd;
  for (Fleet fleet : {Fleet::Hydrogen, Fleet::Ev, Fleet::Diesel}) {
    FleetCell cell;
    cell.fleet = fleet;
    std::string msg;
    auto [ok, inputs] = solve_fn(fleet, &msg);
    cell.message = msg;
    cell.feasible = ok;
    if (ok) {
      auto china = compute_ledger(inputs, s.prices.factors, cmp.china_price_usd, fleet,
                                  cost_is_credit);
      auto eu = compute_ledger(inputs, s.prices.factors, cmp.eu_price_usd, fleet, cost_is_credit);
      cell.operating_total = inputs.total_cost;
      cell.net_emissions = china.total_net;
      cell.adjusted_china = china.adjusted_total;
      cell.adjusted_eu = eu.adjusted_total;
    }
    cmp.rows.push_back(cell);
  }
  return cmp;
}

}  // namespace ies::carbon
