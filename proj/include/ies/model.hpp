#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ies/common.hpp"

namespace ies::model {

struct Line {
  int from = 0, to = 0;
  double x = 0.0;            // reactance, p.u.
  double p_min = 0.0, p_max = 0.0;  // flow bounds, p.u.
};

struct PowerNetwork {
  std::vector<int> buses;  // sorted ids
  std::vector<Line> lines;
  double base_mva = 100.0;
  double reserve_rho = 0.0;  // hot-spare coefficient
  int reference_bus = -1;    // defaults to the first bus
};

struct ThermalUnit {
  int id = 0, bus = 0;
  double p_max = 0.0, p_min = 0.0;  // p.u.
  double a = 0.0, b = 0.0, c = 0.0;  // ton/(p.u.)^2, ton/p.u., ton
  double ramp_up = 0.0, ramp_down = 0.0;  // p.u./h
  int min_down = 1, min_up = 1;            // slots
  double start_cost = 0.0, stop_cost = 0.0;  // $ per event
  double coal_price = 0.0;                   // $/ton
  bool initial_on = true;
  double initial_output = 0.0;  // p.u. at t = -1
};

struct GasNode {
  int id = 0;
  double p_lo = 0.0, p_hi = 0.0;  // bar
  double s_lo = 0.0, s_hi = 0.0;  // source bounds, m3/h
};

struct GasPipe {
  int from = 0, to = 0;
  double weymouth_c = 0.0;  // m3/h per bar
};

struct GasNetwork {
  std::vector<GasNode> nodes;  // sorted by id
  std::vector<GasPipe> pipes;
  double gas_price = 0.0;  // $/m3
};

struct WindFarm {
  int bus = 0;
  std::vector<double> availability;  // p.u. per slot
  double delta_wp = 0.0;             // $/kWh curtailed
  double cap_kw = 0.0;
  std::map<std::string, std::vector<double>> profiles;  // optional day profiles (p.u.)
};

struct P2GPlant {
  int bus = 0, gas_node = 0;
  std::vector<double> eta_elec, eta_meth;  // per-slot efficiencies
  double alpha_h2 = 0.0;                   // kWh per m3 H2 (station path)
  double alpha_ch4_elec = 0.0;             // kWh per m3 (electrolysis leg of methane path)
  double alpha_ch4_meth = 0.0;             // kWh per m3 (methanation leg)
  double f_h2_max = 0.0, f_ch4_max = 0.0;  // m3/h
};

struct CoalChain {
  std::vector<double> mining;       // ton per slot
  std::vector<double> alpha_coal;   // m3 H2 per ton gasified
  std::vector<double> alpha_truck;  // m3 H2 per ton transported
};

struct SafetyLimits {
  double lfl_h2 = 4.0, ufl_h2 = 75.0, lel_h2 = 4.0, uel_h2 = 77.0;
  double lfl_ch4 = 5.0, ufl_ch4 = 15.0, lel_ch4 = 5.0, uel_ch4 = 17.0;
  double q_h2 = 119.96, q_ch4 = 50.0;  // MJ/kg
};

struct EmissionFactors {
  double coal_gen = 1.8;              // tCO2 per ton coal burned
  double c2h_process = 8.0e-4;        // tCO2 per m3 H2 from gasification
  double methanation_sink = 1.963e-3; // tCO2 absorbed per m3 CH4 (1:1 molar)
  double diesel_truck = 0.03;         // tCO2 per ton transported
  double ev_grid = 8.0e-4;            // tCO2 per kWh charged
};

struct FleetParams {
  double ev_kwh_per_ton = 90.0;       // depot charging demand
  double diesel_fuel_per_ton = 8.0;   // $ per ton transported
};

struct PriceBook {
  double carbon_price = 0.0;   // $/tCO2 applied in the base run
  double mbtu_to_m3 = 28.3;
  double coal_sale_price = 0.0;  // $/ton
  double truck_cost_coeff = 0.0; // $/ton transported
  double china_carbon_cny = 35.0;
  double eu_carbon_eur = 30.0;
  double cny_per_usd = 7.0;
  double eur_per_usd = 0.9;
  EmissionFactors factors;
  FleetParams fleet;
};

/// Complete immutable problem instance. Safe to share across solver workers.
struct Scenario {
  int horizon_t = 0;
  double slot_hours = 1.0;
  PowerNetwork power_net;
  GasNetwork gas_net;
  std::vector<ThermalUnit> units;
  WindFarm wind;
  P2GPlant p2g;
  CoalChain coal;
  SafetyLimits safety;
  PriceBook prices;
  std::map<int, std::vector<double>> loads;        // bus id -> p.u. series
  std::map<int, std::vector<double>> gas_demands;  // node id -> m3/h series

  double base_kw() const { return power_net.base_mva * 1000.0; }
  int bus_index(int id) const;
  int gas_node_index(int id) const;
};

/// Parses and fully validates a scenario file; error messages name the
/// offending field or invariant.
Scenario load_scenario(const std::string& path);
Scenario scenario_from_json(const nlohmann::json& j);
void validate(const Scenario& s);

/// $/MBTU -> $/m3 at 28.3 m3 per MBTU.
double convert_gas_price(double price_per_mbtu);

/// CSV series override: header "slot,value", one row per slot.
std::vector<double> read_series_csv(const std::string& path);

/// Applies a CSV series onto a dotted key of the raw scenario JSON, e.g.
/// "wind.availability", "loads.5", "coal.mining".
void apply_series_override(nlohmann::json& scenario, const std::string& dotted_key,
                           const std::string& csv_path);

}  // namespace ies::model
