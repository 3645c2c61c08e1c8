#include "ies/coupling.hpp"

#include <cmath>

namespace ies::coupling {

using conic::ConicProgram;
using conic::LinTerm;
using conic::Sense;

double c2h_output(double mined_tons, double beta, double alpha_coal) {
  if (mined_tons < 0 || alpha_coal < 0) throw InputError("c2h inputs must be nonnegative");
  if (beta < 0 || beta > 1) throw InputError("gasification share beta must lie in [0,1]");
  return alpha_coal * beta * mined_tons;
}

double truck_demand(double mined_tons, double beta, double alpha_truck) {
  if (mined_tons < 0 || alpha_truck < 0) throw InputError("truck demand inputs must be nonnegative");
  if (beta < 0 || beta > 1) throw InputError("gasification share beta must lie in [0,1]");
  return alpha_truck * (1.0 - beta) * mined_tons;
}

double consumption_h2(double alpha_h2, double f_h2) { return alpha_h2 * f_h2; }

double consumption_ch4(double alpha_ch4_elec, double alpha_ch4_meth, double f_ch4) {
  return 4.0 * alpha_ch4_elec * f_ch4 + alpha_ch4_meth * f_ch4;
}

double energy_content(double mass_kg, const std::string& species,
                      const model::SafetyLimits& q) {
  if (mass_kg < 0) throw InputError("mass must be nonnegative");
  if (species == "h2" || species == "H2") return mass_kg * q.q_h2;
  if (species == "ch4" || species == "CH4") return mass_kg * q.q_ch4;
  throw InputError(format_msg("unknown species `", species, "`"));
}

std::vector<SafetyViolation> check_safety(double c_h2_pct, double c_ch4_pct,
                                          const model::SafetyLimits& lim,
                                          bool literal_inclusion) {
  if (c_h2_pct < 0 || c_h2_pct > 100 || c_ch4_pct < 0 || c_ch4_pct > 100)
    throw InputError("concentrations must lie in [0, 100] percent");
  std::vector<SafetyViolation> out;
  auto screen = [&](double c, double lo, double hi, const char* what) {
    bool inside = (lo <= c && c <= hi);
    bool bad = literal_inclusion ? !inside : inside;
    if (bad) out.push_back({what, c, lo, hi});
  };
  screen(c_h2_pct, lim.lfl_h2, lim.ufl_h2, "flammability H2");
  screen(c_h2_pct, lim.lel_h2, lim.uel_h2, "explosive H2");
  screen(c_ch4_pct, lim.lfl_ch4, lim.ufl_ch4, "flammability CH4");
  screen(c_ch4_pct, lim.lel_ch4, lim.uel_ch4, "explosive CH4");
  return out;
}

CouplingVariables declare_variables(ConicProgram& prog, const model::Scenario& s,
                                    bool with_p2g) {
  const int T = s.horizon_t;
  CouplingVariables v;
  v.with_p2g = with_p2g;
  for (int t = 0; t < T; ++t) {
    if (with_p2g) {
      v.f_h2.push_back(
          prog.add_continuous(format_msg("f_h2[", t, "]"), 0.0, s.p2g.f_h2_max));
      v.f_h2_prime.push_back(
          prog.add_continuous(format_msg("f_h2'[", t, "]"), 0.0, s.p2g.f_h2_max));
      v.f_ch4.push_back(
          prog.add_continuous(format_msg("f_ch4[", t, "]"), 0.0, s.p2g.f_ch4_max));
      v.cons_h2.push_back(prog.add_continuous(format_msg("cons_h2[", t, "]"), 0.0, kInf));
      v.cons_ch4.push_back(prog.add_continuous(format_msg("cons_ch4[", t, "]"), 0.0, kInf));
    } else {
      v.f_h2.push_back(-1);
      v.f_h2_prime.push_back(-1);
      v.f_ch4.push_back(-1);
      v.cons_h2.push_back(-1);
      v.cons_ch4.push_back(-1);
    }
    double truck_max = s.coal.alpha_truck[t] * s.coal.mining[t];
    double coal_max = s.coal.alpha_coal[t] * s.coal.mining[t];
    v.f_coal_h2.push_back(
        prog.add_continuous(format_msg("f_coal_h2[", t, "]"), 0.0, coal_max));
    v.f_truck_h2.push_back(
        prog.add_continuous(format_msg("f_truck_h2[", t, "]"), 0.0, truck_max));
    v.beta.push_back(prog.add_continuous(format_msg("beta[", t, "]"), 0.0, 1.0));
  }
  return v;
}

void build_coal_chain(ConicProgram& prog, const model::Scenario& s,
                      const CouplingVariables& v) {
  for (int t = 0; t < s.horizon_t; ++t) {
    double m = s.coal.mining[t];
    // f_coal_h2 = alpha_coal * beta * M
    prog.add_linear(format_msg("c2h[", t, "]"), Sense::EQ, 0.0,
                    {{v.f_coal_h2[t], 1.0}, {v.beta[t], -s.coal.alpha_coal[t] * m}});
    // f_truck_h2 = alpha_truck * (1 - beta) * M
    prog.add_linear(format_msg("truckdem[", t, "]"), Sense::EQ, s.coal.alpha_truck[t] * m,
                    {{v.f_truck_h2[t], 1.0}, {v.beta[t], s.coal.alpha_truck[t] * m}});
  }
}

void build_hydrogen_balance(ConicProgram& prog, const model::Scenario& s, CouplingVariables& v,
                            bool slack_mode, double slack_penalty) {
  for (int t = 0; t < s.horizon_t; ++t) {
    std::vector<LinTerm> terms{{v.f_coal_h2[t], 1.0}, {v.f_truck_h2[t], -1.0}};
    if (v.with_p2g) terms.push_back({v.f_h2[t], 1.0});
    if (slack_mode) {
      int sp = prog.add_continuous(format_msg("h2slack+[", t, "]"), 0.0, kInf);
      int sn = prog.add_continuous(format_msg("h2slack-[", t, "]"), 0.0, kInf);
      v.slack_pos.push_back(sp);
      v.slack_neg.push_back(sn);
      terms.push_back({sp, 1.0});
      terms.push_back({sn, -1.0});
      prog.add_objective_term(sp, slack_penalty);
      prog.add_objective_term(sn, slack_penalty);
    }
    prog.add_linear(format_msg("h2bal[", t, "]"), Sense::EQ, 0.0, std::move(terms));
  }
}

void build_p2g_consumption(ConicProgram& prog, const model::Scenario& s,
                           const CouplingVariables& v) {
  if (!v.with_p2g) return;
  for (int t = 0; t < s.horizon_t; ++t) {
    // stoichiometry: the methanation feed is 4 volumes of H2 per volume CH4
    prog.add_linear(format_msg("stoich[", t, "]"), Sense::EQ, 0.0,
                    {{v.f_h2_prime[t], 1.0}, {v.f_ch4[t], -4.0}});
    // electrolyzer output capacity covers both paths
    prog.add_linear(format_msg("elec_cap[", t, "]"), Sense::LE, s.p2g.f_h2_max,
                    {{v.f_h2[t], 1.0}, {v.f_h2_prime[t], 1.0}});
    // consumption with efficiency-scaled coefficients
    double ae = s.p2g.alpha_h2 / s.p2g.eta_elec[t];
    prog.add_linear(format_msg("cons_h2_def[", t, "]"), Sense::EQ, 0.0,
                    {{v.cons_h2[t], 1.0}, {v.f_h2[t], -ae}});
    double am = 4.0 * s.p2g.alpha_ch4_elec / s.p2g.eta_elec[t] +
                s.p2g.alpha_ch4_meth / s.p2g.eta_meth[t];
    prog.add_linear(format_msg("cons_ch4_def[", t, "]"), Sense::EQ, 0.0,
                    {{v.cons_ch4[t], 1.0}, {v.f_ch4[t], -am}});
  }
}

uc::BusInjections electric_load_terms(const model::Scenario& s, const CouplingVariables& v) {
  uc::BusInjections out;
  if (!v.with_p2g) return out;
  auto& terms = out[s.p2g.bus];
  terms.resize(s.horizon_t);
  const double inv_base = 1.0 / s.base_kw();
  for (int t = 0; t < s.horizon_t; ++t) {
    terms[t].push_back({v.cons_h2[t], -inv_base});
    terms[t].push_back({v.cons_ch4[t], -inv_base});
  }
  return out;
}

gas::NodeInjections methane_injection_terms(const model::Scenario& s,
                                            const CouplingVariables& v) {
  gas::NodeInjections out;
  if (!v.with_p2g) return out;
  auto& terms = out[s.p2g.gas_node];
  terms.resize(s.horizon_t);
  for (int t = 0; t < s.horizon_t; ++t) terms[t].push_back({v.f_ch4[t], 1.0});
  return out;
}

}  // namespace ies::coupling
