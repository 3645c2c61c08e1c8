#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ies/carbon.hpp"
#include "ies/conic/solver.hpp"
#include "ies/coupling.hpp"
#include "ies/gas.hpp"
#include "ies/model.hpp"
#include "ies/uc.hpp"

namespace ies::runner {

struct AssembleFlags {
  bool with_p2g = true;
  carbon::Fleet fleet = carbon::Fleet::Hydrogen;
  std::optional<double> rho_override;
  std::optional<double> delta_wp_override;  // objective-side curtailment price
  std::optional<std::string> day;           // wind profile selector
  bool h2_slack = false;                    // penalized hydrogen-balance slack
};

struct Assembled {
  conic::ConicProgram prog;
  model::Scenario scn;  // effective scenario after flag overrides
  uc::UcVariables uvars;
  gas::GasVariables gvars;
  coupling::CouplingVariables cvars;
  AssembleFlags flags;
  double delta_wp_objective = 0.0;
  // diagnostics
  int n_vars = 0, n_binary = 0, n_pairs = 0, n_rows = 0, n_cones = 0;
  int binary_decisions = 0;  // u count + direction pair count
};

/// Builds the full program from every module's constraints.
Assembled assemble(const model::Scenario& s, const AssembleFlags& flags = {});

/// Rounds direction pairs, tightens lambda to its minimal feasible value and
/// snaps integral commitment variables; used as the branch-and-bound repair
/// callback and for final solution polish.
conic::RepairCallback make_repair_callback(const Assembled& a);

struct CostBreakdown {
  double fuel = 0.0, start = 0.0, stop = 0.0, gas = 0.0, curtail = 0.0, truck = 0.0,
         coal_revenue = 0.0, total = 0.0;  // total = fuel+start+stop+gas+curtail-coal_revenue+truck
};

struct DispatchSolution {
  conic::SolveStatus status = conic::SolveStatus::NumericalFailure;
  // power side
  std::vector<int> unit_ids;
  std::vector<std::vector<int>> u;        // [unit][slot]
  std::vector<std::vector<double>> p;     // [unit][slot]
  std::vector<double> pw, availability, curtailment;  // [slot], p.u.
  // gas side (original pipe orientation)
  std::vector<int> node_ids;
  std::vector<std::vector<double>> source, pressure_sq;  // [node][slot]
  std::vector<std::pair<int, int>> pipe_ends;
  std::vector<double> weymouth_c;
  std::vector<std::vector<double>> flow_signed;  // [pipe][slot]
  std::vector<std::vector<int>> direction;       // +1 forward, -1 backward
  std::vector<std::vector<double>> lambda;       // tightened
  std::vector<std::vector<double>> demand;       // [node][slot]
  // coupling
  std::vector<double> f_h2, f_h2_prime, f_ch4, cons_h2, cons_ch4, f_coal_h2, f_truck_h2, beta;
  std::vector<double> mining;
  std::vector<double> ev_charge_kwh;   // nonzero for the EV fleet variant
  std::vector<double> fuel_tons_slot;  // coal burned per slot, all units
  // economics
  CostBreakdown costs;        // priced at the scenario's base delta_wp
  double objective = 0.0;     // solver objective (swept delta if overridden)
  double bound = 0.0;
  double gap = 0.0;
  long long nodes = 0;
  double delta_wp_objective = 0.0, delta_wp_base = 0.0;
  double slot_hours = 1.0;
  bool with_p2g = true;
  carbon::Fleet fleet = carbon::Fleet::Hydrogen;
  double rho = 0.0;
  gas::TightnessReport tightness;

  carbon::LedgerInputs ledger_inputs(double total_cost_override = kInf) const;
};

struct RunOptions {
  conic::SolveOptions solve;
  AssembleFlags flags;
  double tightness_tol = 1e-4;
  std::optional<std::string> dump_program;  // write the conic text dump here
};

/// Assembles, solves to the configured gap and extracts the polished solution.
DispatchSolution run(const model::Scenario& s, const RunOptions& opt = {});

/// Writes costs.csv, unit_output.csv, gas_state.csv, coupling.csv,
/// tightness.csv and summary.json into out_dir.
void report(const DispatchSolution& sol, const std::string& out_dir);

nlohmann::ordered_json solution_to_json(const DispatchSolution& sol);
DispatchSolution solution_from_json(const nlohmann::json& j);
nlohmann::ordered_json summary_json(const DispatchSolution& sol);

struct SweepPoint {
  double value = 0.0;
  conic::SolveStatus status = conic::SolveStatus::NumericalFailure;
  double objective = 0.0;       // solver objective at the swept parameter
  double economic_total = 0.0;  // cost breakdown priced at the base delta_wp
  double curtailed_kwh = 0.0;
  double gap = 0.0;
  std::string message;
};

struct SweepResult {
  std::string param;  // "delta_wp" | "rho"
  std::vector<SweepPoint> points;
  int argmin_economic = -1;
  bool interior_minimum = false;
};

/// Re-solves per parameter value; points are independent and may run in
/// parallel when the worker count allows.
SweepResult sweep(const model::Scenario& s, const std::string& param,
                  const std::vector<double>& values, const RunOptions& opt = {});

struct FleetRun {
  carbon::FleetComparison table;
  std::vector<DispatchSolution> solutions;  // hydrogen, ev, diesel
};

FleetRun compare_fleets(const model::Scenario& s, const RunOptions& opt = {});

void write_sweep_files(const SweepResult& r, const std::string& out_dir);
void write_carbon_report(const FleetRun& r, const std::string& out_dir);

}  // namespace ies::runner
