#include "ies/uc.hpp"

#include <cmath>

#include "ies/conic/solver.hpp"

namespace ies::uc {

using conic::ConicProgram;
using conic::LinTerm;
using conic::Sense;
using conic::VarKind;

double fuel_tons(const model::ThermalUnit& unit, double p, bool on) {
  if (!on) return 0.0;
  return unit.a * p * p + unit.b * p + unit.c;
}

UcVariables declare_variables(ConicProgram& prog, const model::Scenario& s) {
  const int T = s.horizon_t;
  UcVariables v;
  const int nu = static_cast<int>(s.units.size());
  v.u.resize(nu);
  v.p.resize(nu);
  v.cu.resize(nu);
  v.cd.resize(nu);
  v.fcost.resize(nu);
  for (int i = 0; i < nu; ++i) {
    const auto& un = s.units[i];
    for (int t = 0; t < T; ++t) {
      v.u[i].push_back(prog.add_binary(format_msg("u[", un.id, ",", t, "]")));
      v.p[i].push_back(
          prog.add_continuous(format_msg("P[", un.id, ",", t, "]"), 0.0, un.p_max));
      v.cu[i].push_back(prog.add_continuous(format_msg("cu[", un.id, ",", t, "]"), 0.0, kInf));
      v.cd[i].push_back(prog.add_continuous(format_msg("cd[", un.id, ",", t, "]"), 0.0, kInf));
      v.fcost[i].push_back(
          prog.add_continuous(format_msg("fcost[", un.id, ",", t, "]"), 0.0, kInf));
    }
  }
  for (int t = 0; t < T; ++t)
    v.pw.push_back(prog.add_continuous(format_msg("Pw[", t, "]"), 0.0, s.wind.availability[t]));
  const int nb = static_cast<int>(s.power_net.buses.size());
  v.theta.resize(nb);
  for (int b = 0; b < nb; ++b) {
    bool ref = (s.power_net.buses[b] == s.power_net.reference_bus);
    for (int t = 0; t < T; ++t)
      v.theta[b].push_back(prog.add_continuous(
          format_msg("theta[", s.power_net.buses[b], ",", t, "]"), ref ? 0.0 : -kInf,
          ref ? 0.0 : kInf));
  }
  v.pl.resize(s.power_net.lines.size());
  for (std::size_t l = 0; l < s.power_net.lines.size(); ++l) {
    const auto& ln = s.power_net.lines[l];
    for (int t = 0; t < T; ++t)
      v.pl[l].push_back(prog.add_continuous(
          format_msg("Pl[", ln.from, "-", ln.to, ",", t, "]"), ln.p_min, ln.p_max));
  }
  return v;
}

void build_fuel_cost(ConicProgram& prog, const model::Scenario& s, int i, const UcVariables& v) {
  const auto& un = s.units[i];
  if (un.a < 0) throw SolverError(format_msg("unit ", un.id, ": negative a is nonconvex"));
  const double k = un.coal_price * s.slot_hours;
  for (int t = 0; t < s.horizon_t; ++t) {
    conic::encode_quadratic_epigraph(prog, k * un.a, k * un.b, k * un.c, v.p[i][t], v.u[i][t],
                                     v.fcost[i][t], format_msg("fuel[", un.id, ",", t, "]"));
    prog.add_objective_term(v.fcost[i][t], 1.0);
    // output gating: u Pmin <= P <= u Pmax
    prog.add_linear(format_msg("pmin[", un.id, ",", t, "]"), Sense::GE, 0.0,
                    {{v.p[i][t], 1.0}, {v.u[i][t], -un.p_min}});
    prog.add_linear(format_msg("pmax[", un.id, ",", t, "]"), Sense::LE, 0.0,
                    {{v.p[i][t], 1.0}, {v.u[i][t], -un.p_max}});
  }
}

void build_balance(ConicProgram& prog, const model::Scenario& s, const UcVariables& v,
                   const BusInjections& extra) {
  const int T = s.horizon_t;
  for (std::size_t b = 0; b < s.power_net.buses.size(); ++b) {
    int bus = s.power_net.buses[b];
    auto load_it = s.loads.find(bus);
    auto extra_it = extra.find(bus);
    for (int t = 0; t < T; ++t) {
      std::vector<LinTerm> terms;
      for (std::size_t i = 0; i < s.units.size(); ++i)
        if (s.units[i].bus == bus) terms.push_back({v.p[i][t], 1.0});
      if (s.wind.bus == bus) terms.push_back({v.pw[t], 1.0});
      for (std::size_t l = 0; l < s.power_net.lines.size(); ++l) {
        if (s.power_net.lines[l].from == bus) terms.push_back({v.pl[l][t], -1.0});
        if (s.power_net.lines[l].to == bus) terms.push_back({v.pl[l][t], 1.0});
      }
      if (extra_it != extra.end())
        for (const auto& term : extra_it->second[t]) terms.push_back(term);
      double rhs = (load_it != s.loads.end()) ? load_it->second[t] : 0.0;
      if (terms.empty() && rhs == 0.0) continue;
      prog.add_linear(format_msg("balance[", bus, ",", t, "]"), Sense::EQ, rhs, std::move(terms));
    }
  }
}

void build_reserve(ConicProgram& prog, const model::Scenario& s, const UcVariables& v) {
  for (int t = 0; t < s.horizon_t; ++t) {
    double demand = 0.0;
    for (const auto& [bus, series] : s.loads) demand += series[t];
    std::vector<LinTerm> terms;
    for (std::size_t i = 0; i < s.units.size(); ++i) {
      terms.push_back({v.u[i][t], s.units[i].p_max});
      terms.push_back({v.p[i][t], -1.0});
    }
    prog.add_linear(format_msg("reserve[", t, "]"), Sense::GE, s.power_net.reserve_rho * demand,
                    std::move(terms));
  }
}

void build_ramp(ConicProgram& prog, const model::Scenario& s, int i, const UcVariables& v) {
  const auto& un = s.units[i];
  const double up = un.ramp_up * s.slot_hours;
  const double dn = un.ramp_down * s.slot_hours;
  for (int t = 0; t < s.horizon_t; ++t) {
    if (t == 0) {
      double p0 = un.initial_on ? un.initial_output : 0.0;
      prog.add_linear(format_msg("rampup[", un.id, ",0]"), Sense::LE, up + p0,
                      {{v.p[i][0], 1.0}});
      prog.add_linear(format_msg("rampdn[", un.id, ",0]"), Sense::GE, p0 - dn,
                      {{v.p[i][0], 1.0}});
    } else {
      prog.add_linear(format_msg("rampup[", un.id, ",", t, "]"), Sense::LE, up,
                      {{v.p[i][t], 1.0}, {v.p[i][t - 1], -1.0}});
      prog.add_linear(format_msg("rampdn[", un.id, ",", t, "]"), Sense::GE, -dn,
                      {{v.p[i][t], 1.0}, {v.p[i][t - 1], -1.0}});
    }
  }
}

void build_min_updown(ConicProgram& prog, const model::Scenario& s, int i, const UcVariables& v) {
  const auto& un = s.units[i];
  const int T = s.horizon_t;
  const double u_init = un.initial_on ? 1.0 : 0.0;
  for (int t = 0; t < T; ++t) {
    // stop window: sum_{k=t}^{t+L-1} (1 - u_k) >= L (u_{t-1} - u_t)
    {
      int len = std::min(un.min_down, T - t);
      std::vector<LinTerm> terms;
      for (int k = t; k < t + len; ++k) terms.push_back({v.u[i][k], -1.0});
      double rhs = -static_cast<double>(len);
      terms.push_back({v.u[i][t], static_cast<double>(len)});
      if (t == 0)
        rhs += len * u_init;
      else
        terms.push_back({v.u[i][t - 1], -static_cast<double>(len)});
      prog.add_linear(format_msg("mindown[", un.id, ",", t, "]"), Sense::GE, rhs,
                      std::move(terms));
    }
    // start window: sum_{k=t}^{t+L-1} u_k >= L (u_t - u_{t-1})
    {
      int len = std::min(un.min_up, T - t);
      std::vector<LinTerm> terms;
      for (int k = t; k < t + len; ++k) terms.push_back({v.u[i][k], 1.0});
      double rhs = 0.0;
      terms.push_back({v.u[i][t], -static_cast<double>(len)});
      if (t == 0)
        rhs += -len * u_init;
      else
        terms.push_back({v.u[i][t - 1], static_cast<double>(len)});
      prog.add_linear(format_msg("minup[", un.id, ",", t, "]"), Sense::GE, rhs, std::move(terms));
    }
  }
}

void build_startstop_costs(ConicProgram& prog, const model::Scenario& s, int i,
                           const UcVariables& v) {
  const auto& un = s.units[i];
  const double u_init = un.initial_on ? 1.0 : 0.0;
  for (int t = 0; t < s.horizon_t; ++t) {
    std::vector<LinTerm> up{{v.cu[i][t], 1.0}, {v.u[i][t], -un.start_cost}};
    std::vector<LinTerm> dn{{v.cd[i][t], 1.0}, {v.u[i][t], un.stop_cost}};
    double rhs_up = 0.0, rhs_dn = 0.0;
    if (t == 0) {
      rhs_up = -un.start_cost * u_init;
      rhs_dn = un.stop_cost * u_init;
    } else {
      up.push_back({v.u[i][t - 1], un.start_cost});
      dn.push_back({v.u[i][t - 1], -un.stop_cost});
    }
    prog.add_linear(format_msg("startcost[", un.id, ",", t, "]"), Sense::GE, rhs_up,
                    std::move(up));
    prog.add_linear(format_msg("stopcost[", un.id, ",", t, "]"), Sense::GE, rhs_dn,
                    std::move(dn));
    prog.add_objective_term(v.cu[i][t], 1.0);
    prog.add_objective_term(v.cd[i][t], 1.0);
  }
}

void build_line_flows(ConicProgram& prog, const model::Scenario& s, const UcVariables& v) {
  for (std::size_t l = 0; l < s.power_net.lines.size(); ++l) {
    const auto& ln = s.power_net.lines[l];
    int bf = s.bus_index(ln.from);
    int bt = s.bus_index(ln.to);
    double inv_x = 1.0 / ln.x;
    for (int t = 0; t < s.horizon_t; ++t) {
      prog.add_linear(format_msg("flowdef[", ln.from, "-", ln.to, ",", t, "]"), Sense::EQ, 0.0,
                      {{v.pl[l][t], 1.0}, {v.theta[bf][t], -inv_x}, {v.theta[bt][t], inv_x}});
    }
  }
}

UcVariables build_power_side(ConicProgram& prog, const model::Scenario& s,
                             const BusInjections& extra) {
  UcVariables v = declare_variables(prog, s);
  for (std::size_t i = 0; i < s.units.size(); ++i) {
    int ii = static_cast<int>(i);
    build_fuel_cost(prog, s, ii, v);
    build_ramp(prog, s, ii, v);
    build_min_updown(prog, s, ii, v);
    build_startstop_costs(prog, s, ii, v);
  }
  build_balance(prog, s, v, extra);
  build_reserve(prog, s, v);
  build_line_flows(prog, s, v);
  return v;
}

}  // namespace ies::uc
