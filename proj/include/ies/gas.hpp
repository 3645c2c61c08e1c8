#pragma once

#include <map>
#include <string>
#include <vector>

#include "ies/conic/program.hpp"
#include "ies/model.hpp"

namespace ies::gas {

/// Variable handles for the gas side. Pipes are canonicalized at declaration
/// (from < to, flipped flag kept) so that relabeling a pipe yields the exact
/// same program; reported flows are mapped back to the input orientation.
struct GasVariables {
  std::vector<std::vector<int>> s, pi;  // [node][slot]
  std::vector<std::vector<int>> f, fplus, fminus, dplus, dminus, lambda;  // [pipe][slot]
  std::vector<char> flipped;   // input orientation reversed
  std::vector<int> from, to;   // canonical node indices
  std::vector<double> f_max;   // big-M flow cap per pipe
  std::vector<double> lambda_hi;
};

/// Extra nodal balance terms (injection > 0), e.g. P2G methane.
using NodeInjections = std::map<int, std::vector<std::vector<conic::LinTerm>>>;

/// Pressure-square substitution: (p_lo, p_hi) -> (p_lo^2, p_hi^2).
std::pair<double, double> substitute_pressure(double p_lo, double p_hi);

GasVariables declare_variables(conic::ConicProgram& prog, const model::Scenario& s);

/// Per node and slot: source + inflow - outflow + extra = demand.
void build_nodal_balance(conic::ConicProgram& prog, const model::Scenario& s,
                         const GasVariables& v, const NodeInjections& extra);

/// Direction pair d+ + d- = 1 and the flow split F = F+ + F-,
/// F+ <= Fmax d+, F- <= Fmax d-.
void build_direction_vars(conic::ConicProgram& prog, const model::Scenario& s,
                          const GasVariables& v);

/// The four direction-aware envelope inequalities bounding lambda from below.
void build_mccormick(conic::ConicProgram& prog, const model::Scenario& s, const GasVariables& v);

/// ||(2F/C, lambda-1)|| <= lambda+1, i.e. (F/C)^2 <= lambda.
void build_soc(conic::ConicProgram& prog, const model::Scenario& s, const GasVariables& v);

GasVariables build_gas_side(conic::ConicProgram& prog, const model::Scenario& s,
                            const NodeInjections& extra);

/// The four envelope right-hand sides at a point; the minimal feasible lambda
/// is their maximum. delta = d+ - d-.
double mccormick_rhs_max(double delta, double pi_m, double pi_n, double lo, double hi);

struct TightnessReport {
  struct Entry {
    int pipe = 0, slot = 0;
    double flow = 0.0, lambda = 0.0, flow_over_c_sq = 0.0;
    double residual = 0.0, rel_residual = 0.0;
  };
  std::vector<Entry> entries;
  double max_rel = 0.0, mean_rel = 0.0;
  double tol = 1e-4;
  int violations = 0;  // entries with rel_residual > tol
};

/// Residual lambda - (F/C)^2 per pipe and slot; parallelizable read-only pass.
TightnessReport measure_tightness(const model::Scenario& s,
                                  const std::vector<std::vector<double>>& flow_abs,
                                  const std::vector<std::vector<double>>& lambda, double tol);

}  // namespace ies::gas
