#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ies/conic/program.hpp"
#include "ies/gas.hpp"
#include "ies/model.hpp"
#include "ies/uc.hpp"

namespace ies::coupling {

/// Variable handles for the coal/hydrogen/methane loop, indexed per slot.
/// Without P2G the electrolysis/methanation variables are absent (-1); the
/// coal chain and truck demand remain.
struct CouplingVariables {
  bool with_p2g = true;
  std::vector<int> f_h2, f_h2_prime, f_ch4, cons_h2, cons_ch4;  // -1 without P2G
  std::vector<int> f_coal_h2, f_truck_h2, beta;
  std::vector<int> slack_pos, slack_neg;  // present only in slack mode
};

// pure arithmetic (tested directly against the stated examples)
double c2h_output(double mined_tons, double beta, double alpha_coal);
double truck_demand(double mined_tons, double beta, double alpha_truck);
double consumption_h2(double alpha_h2, double f_h2);
double consumption_ch4(double alpha_ch4_elec, double alpha_ch4_meth, double f_ch4);
double energy_content(double mass_kg, const std::string& species, const model::SafetyLimits& q);

struct SafetyViolation {
  std::string window;  // e.g. "flammability H2"
  double value = 0.0, lower = 0.0, upper = 0.0;
};

/// Safe operation keeps each concentration OUTSIDE its flammable/explosive
/// window. literal_inclusion flips to the printed-inequality reading (inside
/// the window required).
std::vector<SafetyViolation> check_safety(double c_h2_pct, double c_ch4_pct,
                                          const model::SafetyLimits& lim,
                                          bool literal_inclusion = false);

CouplingVariables declare_variables(conic::ConicProgram& prog, const model::Scenario& s,
                                    bool with_p2g);

/// Eq-style rows: C2H output, truck demand, beta split bookkeeping.
void build_coal_chain(conic::ConicProgram& prog, const model::Scenario& s,
                      const CouplingVariables& v);

/// Per slot: f_h2 + f_coal_h2 = f_truck_h2 (no storage). Slack mode adds
/// penalized surplus/deficit variables for infeasibility diagnosis.
void build_hydrogen_balance(conic::ConicProgram& prog, const model::Scenario& s,
                            CouplingVariables& v, bool slack_mode = false,
                            double slack_penalty = 1e6);

/// Stoichiometry f_h2' = 4 f_ch4, electrolyzer/methanation capacities and the
/// consumption definitions with efficiency-scaled coefficients.
void build_p2g_consumption(conic::ConicProgram& prog, const model::Scenario& s,
                           const CouplingVariables& v);

/// Electric load terms for the power balance at the plant bus
/// (negative injection, per-unit on base_kw). ev_charge_kw adds a fixed
/// depot-charging load series used by the EV fleet variant.
uc::BusInjections electric_load_terms(const model::Scenario& s, const CouplingVariables& v);

/// Methane injection terms for the gas balance at the plant node.
gas::NodeInjections methane_injection_terms(const model::Scenario& s,
                                            const CouplingVariables& v);

}  // namespace ies::coupling
