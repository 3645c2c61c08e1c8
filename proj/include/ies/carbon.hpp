#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ies/model.hpp"

namespace ies::carbon {

enum class Fleet { Hydrogen, Ev, Diesel };

const char* to_string(Fleet f);
Fleet fleet_from_string(const std::string& s);

/// Per-slot series of a solved dispatch needed for emissions accounting.
struct LedgerInputs {
  double slot_hours = 1.0;
  double total_cost = 0.0;               // operating total C_total ($)
  std::vector<double> fuel_tons;         // coal burned per slot
  std::vector<double> f_coal_h2;         // m3/h gasification hydrogen
  std::vector<double> f_ch4;             // m3/h methanation
  std::vector<double> trucked_tons;      // (1-beta) M per slot
  std::vector<double> ev_charge_kwh;     // per slot (EV fleet only)
};

struct CarbonLedger {
  std::vector<double> gross, absorbed, net;  // tCO2 per slot
  double total_gross = 0.0, total_absorbed = 0.0, total_net = 0.0;
  double carbon_cost = 0.0;     // price * net ($, signed)
  double adjusted_total = 0.0;  // C_total + price * net (default sign)
};

/// Hydrogen trucks have zero tailpipe emissions; methanation enters the
/// ledger with negative sign. cost_is_credit flips the carbon term to
/// C_total - price * net (the alternative reading of the revised total).
CarbonLedger compute_ledger(const LedgerInputs& in, const model::EmissionFactors& f,
                            double carbon_price, Fleet fleet, bool cost_is_credit = false);

struct FleetCell {
  Fleet fleet = Fleet::Hydrogen;
  bool feasible = false;
  double operating_total = 0.0;
  double net_emissions = 0.0;
  double adjusted_china = 0.0;
  double adjusted_eu = 0.0;
  std::string message;
};

struct FleetComparison {
  std::vector<FleetCell> rows;  // hydrogen, ev, diesel
  double china_price_usd = 0.0, eu_price_usd = 0.0;
};

/// Solves the scenario once per fleet (via the supplied callback) and prices
/// the resulting net emissions under both carbon markets.
using FleetSolve = std::function<std::pair<bool, LedgerInputs>(Fleet, std::string* message)>;
FleetComparison compare_fleets(const model::Scenario& s, const FleetSolve& solve_fn,
                               bool cost_is_credit = false);

}  // namespace ies::carbon
