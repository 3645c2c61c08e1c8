#pragma once

#include <map>
#include <string>
#include <vector>

#include "ies/conic/program.hpp"
#include "ies/model.hpp"

namespace ies::uc {

/// Variable handles for the power side, indexed [unit][slot] / [bus][slot].
struct UcVariables {
  std::vector<std::vector<int>> u, p, cu, cd, fcost;
  std::vector<int> pw;                  // dispatched wind per slot
  std::vector<std::vector<int>> theta;  // bus voltage angle
  std::vector<std::vector<int>> pl;     // line flow
};

/// Extra per-bus balance terms (injection > 0), e.g. the P2G electric load.
/// Key: bus id; value: per-slot linear terms.
using BusInjections = std::map<int, std::vector<std::vector<conic::LinTerm>>>;

/// Fuel tons burned in one hour at output p (Eq. 28 shape): a p^2 + b p + c
/// when on; an off unit burns nothing.
double fuel_tons(const model::ThermalUnit& unit, double p, bool on);

UcVariables declare_variables(conic::ConicProgram& prog, const model::Scenario& s);

/// fcost >= coal_price * slot_hours * (a P^2 + b P + c u), plus the objective
/// term on fcost.
void build_fuel_cost(conic::ConicProgram& prog, const model::Scenario& s, int unit_idx,
                     const UcVariables& v);

/// Nodal DC balance per bus and slot; extra terms let coupling inject its
/// electric load. The per-slot system balance is the sum of these rows.
void build_balance(conic::ConicProgram& prog, const model::Scenario& s, const UcVariables& v,
                   const BusInjections& extra);

/// Hot spare: sum_i (u_i Pmax_i - P_i) >= rho * total demand, per slot.
void build_reserve(conic::ConicProgram& prog, const model::Scenario& s, const UcVariables& v);

void build_ramp(conic::ConicProgram& prog, const model::Scenario& s, int unit_idx,
                const UcVariables& v);

/// Min stop/start windows, truncated at the horizon end.
void build_min_updown(conic::ConicProgram& prog, const model::Scenario& s, int unit_idx,
                      const UcVariables& v);

/// cu >= H (u_t - u_{t-1}), cd >= J (u_{t-1} - u_t), both added to the objective.
void build_startstop_costs(conic::ConicProgram& prog, const model::Scenario& s, int unit_idx,
                           const UcVariables& v);

/// DC flow definition rows Pl = (theta_from - theta_to)/x plus line limits
/// (limits live on the Pl variable bounds); pins the reference bus angle.
void build_line_flows(conic::ConicProgram& prog, const model::Scenario& s, const UcVariables& v);

/// All power-side variables and constraints.
UcVariables build_power_side(conic::ConicProgram& prog, const model::Scenario& s,
                             const BusInjections& extra);

}  // namespace ies::uc
