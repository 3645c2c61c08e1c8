#include "ies/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "ies/parallel.hpp"

namespace ies::runner {

using conic::ConicProgram;
using conic::LinTerm;
using conic::Sense;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

model::Scenario effective_scenario(const model::Scenario& in, const AssembleFlags& flags) {
  model::Scenario s = in;
  if (flags.day) {
    auto it = s.wind.profiles.find(*flags.day);
    if (it == s.wind.profiles.end())
      throw InputError(format_msg("no wind profile named `", *flags.day, "` in the scenario"));
    s.wind.availability = it->second;
  }
  if (flags.rho_override) s.power_net.reserve_rho = *flags.rho_override;
  if (flags.fleet != carbon::Fleet::Hydrogen) {
    // trucks stop drawing hydrogen; transport energy is remapped below
    for (auto& a : s.coal.alpha_truck) a = 0.0;
    if (flags.fleet == carbon::Fleet::Ev) {
      // depot charging load at the hub bus, (1-beta)-scaled part handled as
      // an injection term during assembly
      auto& load = s.loads[s.p2g.bus];
      if (load.empty()) load.assign(s.horizon_t, 0.0);
      const double k = s.prices.fleet.ev_kwh_per_ton / s.base_kw();
      for (int t = 0; t < s.horizon_t; ++t) load[t] += k * s.coal.mining[t];
    }
  }
  model::validate(s);
  return s;
}

}  // namespace

Assembled assemble(const model::Scenario& s_in, const AssembleFlags& flags) {
  Assembled a;
  a.flags = flags;
  a.scn = effective_scenario(s_in, flags);
  const model::Scenario& s = a.scn;
  a.delta_wp_objective = flags.delta_wp_override.value_or(s.wind.delta_wp);
  ConicProgram& prog = a.prog;
  const int T = s.horizon_t;
  const double h = s.slot_hours;

  a.uvars = uc::declare_variables(prog, s);
  a.gvars = gas::declare_variables(prog, s);
  a.cvars = coupling::declare_variables(prog, s, flags.with_p2g);

  // ramp-locked commitments: a unit whose minimum output exceeds what one
  // slot can ramp can never legally stop (or start); pin its status
  for (std::size_t i = 0; i < s.units.size(); ++i) {
    const auto& un = s.units[i];
    bool locked_on = un.initial_on && un.p_min > un.ramp_down * h + 1e-12;
    bool locked_off = !un.initial_on && un.p_min > un.ramp_up * h + 1e-12;
    if (locked_on || locked_off) {
      double v = locked_on ? 1.0 : 0.0;
      for (int t = 0; t < T; ++t) {
        prog.vars()[a.uvars.u[i][t]].lo = v;
        prog.vars()[a.uvars.u[i][t]].hi = v;
      }
    }
  }

  for (std::size_t i = 0; i < s.units.size(); ++i) {
    int ii = static_cast<int>(i);
    uc::build_fuel_cost(prog, s, ii, a.uvars);
    uc::build_ramp(prog, s, ii, a.uvars);
    uc::build_min_updown(prog, s, ii, a.uvars);
    uc::build_startstop_costs(prog, s, ii, a.uvars);
  }

  uc::BusInjections einj = coupling::electric_load_terms(s, a.cvars);
  if (flags.fleet == carbon::Fleet::Ev) {
    // charging need is (1-beta) M k; the constant part went into the load
    // series, the beta part comes back as an injection credit
    auto& terms = einj[s.p2g.bus];
    if (terms.empty()) terms.resize(T);
    const double k = s.prices.fleet.ev_kwh_per_ton / s.base_kw();
    for (int t = 0; t < T; ++t)
      terms[t].push_back({a.cvars.beta[t], k * s.coal.mining[t]});
  }
  uc::build_balance(prog, s, a.uvars, einj);
  uc::build_reserve(prog, s, a.uvars);
  uc::build_line_flows(prog, s, a.uvars);

  gas::build_nodal_balance(prog, s, a.gvars, coupling::methane_injection_terms(s, a.cvars));
  gas::build_direction_vars(prog, s, a.gvars);
  gas::build_mccormick(prog, s, a.gvars);
  gas::build_soc(prog, s, a.gvars);

  coupling::build_coal_chain(prog, s, a.cvars);
  coupling::build_hydrogen_balance(prog, s, a.cvars, flags.h2_slack);
  coupling::build_p2g_consumption(prog, s, a.cvars);

  // gas purchase cost
  for (std::size_t m = 0; m < s.gas_net.nodes.size(); ++m)
    for (int t = 0; t < T; ++t)
      prog.add_objective_term(a.gvars.s[m][t], s.gas_net.gas_price * h);

  // curtailment penalty: delta * (availability - Pw) in kWh
  const double e_pu = s.base_kw() * h;  // kWh per p.u.-slot
  double avail_const = 0.0;
  for (int t = 0; t < T; ++t) {
    avail_const += a.delta_wp_objective * e_pu * s.wind.availability[t];
    prog.add_objective_term(a.uvars.pw[t], -a.delta_wp_objective * e_pu);
  }
  prog.add_objective_constant(avail_const);

  // trucking cost, coal sale revenue, diesel fuel: all linear in beta
  for (int t = 0; t < T; ++t) {
    double m = s.coal.mining[t];
    double beta_coef = 0.0, constant = 0.0;
    constant += s.prices.truck_cost_coeff * m;
    beta_coef -= s.prices.truck_cost_coeff * m;
    constant -= s.prices.coal_sale_price * m;
    beta_coef += s.prices.coal_sale_price * m;
    if (flags.fleet == carbon::Fleet::Diesel) {
      constant += s.prices.fleet.diesel_fuel_per_ton * m;
      beta_coef -= s.prices.fleet.diesel_fuel_per_ton * m;
    }
    prog.add_objective_constant(constant);
    if (beta_coef != 0.0) prog.add_objective_term(a.cvars.beta[t], beta_coef);
  }

  prog.validate();
  a.n_vars = static_cast<int>(prog.vars().size());
  a.n_binary = static_cast<int>(prog.binary_vars().size());
  a.n_pairs = static_cast<int>(prog.complement_pairs().size());
  a.n_rows = static_cast<int>(prog.linear().size());
  a.n_cones = static_cast<int>(prog.socs().size());
  a.binary_decisions = a.n_binary - a.n_pairs;  // each pair is one decision
  return a;
}

conic::RepairCallback make_repair_callback(const Assembled& a) {
  // capture everything by value so the callback owns its data
  const int T = a.scn.horizon_t;
  const double h = a.scn.slot_hours;
  struct UnitData {
    int u, p, cu, cd, fcost;
    double a, b, c, price, p_min, p_max, start_cost, stop_cost;
    double u_init;
  };
  std::vector<std::vector<UnitData>> units(a.scn.units.size());
  for (std::size_t i = 0; i < a.scn.units.size(); ++i) {
    const auto& un = a.scn.units[i];
    for (int t = 0; t < T; ++t)
      units[i].push_back({a.uvars.u[i][t], a.uvars.p[i][t], a.uvars.cu[i][t], a.uvars.cd[i][t],
                          a.uvars.fcost[i][t], un.a, un.b, un.c, un.coal_price, un.p_min,
                          un.p_max, un.start_cost, un.stop_cost,
                          un.initial_on ? 1.0 : 0.0});
  }
  struct PipeData {
    int f, fp, fm, dp, dm, lam, pim, pin;
    double c, lo, hi, lam_hi;
  };
  std::vector<std::vector<PipeData>> pipes(a.scn.gas_net.pipes.size());
  for (std::size_t e = 0; e < a.scn.gas_net.pipes.size(); ++e) {
    int mi = a.gvars.from[e], ni = a.gvars.to[e];
    auto [pim_lo, pim_hi] = gas::substitute_pressure(a.scn.gas_net.nodes[mi].p_lo,
                                                     a.scn.gas_net.nodes[mi].p_hi);
    auto [pin_lo, pin_hi] = gas::substitute_pressure(a.scn.gas_net.nodes[ni].p_lo,
                                                     a.scn.gas_net.nodes[ni].p_hi);
    for (int t = 0; t < T; ++t)
      pipes[e].push_back({a.gvars.f[e][t], a.gvars.fplus[e][t], a.gvars.fminus[e][t],
                          a.gvars.dplus[e][t], a.gvars.dminus[e][t], a.gvars.lambda[e][t],
                          a.gvars.pi[mi][t], a.gvars.pi[ni][t], a.scn.gas_net.pipes[e].weymouth_c,
                          pim_lo - pin_hi, pim_hi - pin_lo, a.gvars.lambda_hi[e]});
  }

  struct UnitMeta {
    int min_down, min_up;
    bool initial_on;
  };
  std::vector<UnitMeta> meta;
  for (const auto& un : a.scn.units) meta.push_back({un.min_down, un.min_up, un.initial_on});

  auto counter = std::make_shared<long long>(0);

  return [units, pipes, meta, h, counter](const ConicProgram& prog,
                                          const std::vector<double>& xr)
             -> std::optional<std::vector<double>> {
    const double int_tol = 1e-6;

    // polish an iterate whose commitments are integral: snap binaries, zero
    // off-slot output, lift the epigraph variables, settle flow directions
    // and tighten lambda to its minimal feasible value
    auto polish = [&](std::vector<double> x) {
      for (const auto& series : units) {
        double prev = series.empty() ? 1.0 : series[0].u_init;
        for (const auto& d : series) {
          double uv = std::round(x[d.u]);
          x[d.u] = uv;
          if (uv == 0.0) x[d.p] = 0.0;
          double fmin = d.price * h * (d.a * x[d.p] * x[d.p] + d.b * x[d.p] + d.c * uv);
          x[d.fcost] = std::max(x[d.fcost], fmin);
          x[d.cu] = std::max({x[d.cu], d.start_cost * (uv - prev), 0.0});
          x[d.cd] = std::max({x[d.cd], d.stop_cost * (prev - uv), 0.0});
          prev = uv;
        }
      }
      for (const auto& series : pipes) {
        for (const auto& d : series) {
          double signed_flow = x[d.fp] - x[d.fm];
          double dir = (signed_flow >= 0.0) ? 1.0 : 0.0;
          x[d.dp] = dir;
          x[d.dm] = 1.0 - dir;
          x[d.fp] = std::max(signed_flow, 0.0);
          x[d.fm] = std::max(-signed_flow, 0.0);
          x[d.f] = std::fabs(signed_flow);
          double fc = x[d.f] / d.c;
          double lam = gas::mccormick_rhs_max(2.0 * dir - 1.0, x[d.pim], x[d.pin], d.lo, d.hi);
          lam = std::max({lam, fc * fc, 0.0});
          x[d.lam] = std::min(lam, d.lam_hi);
        }
      }
      return x;
    };

    bool integral = true;
    for (const auto& series : units) {
      for (const auto& d : series) {
        double uv = xr[d.u];
        if (std::min(std::fabs(uv), std::fabs(1.0 - uv)) > int_tol) {
          integral = false;
          break;
        }
      }
      if (!integral) break;
    }
    if (integral) return polish(xr);

    // fractional commitments: legalize a rounded pattern against the minimum
    // stop/start windows, pin it and solve the continuous restriction.
    // Rate-limited; the completion costs one extra conic solve.
    if ((*counter)++ % 8 != 0) return std::nullopt;

    ConicProgram restricted = prog;
    for (std::size_t i = 0; i < units.size(); ++i) {
      const auto& series = units[i];
      const int T = static_cast<int>(series.size());
      std::vector<int> pat(T);
      for (int t = 0; t < T; ++t) pat[t] = xr[series[t].u] >= 0.45 ? 1 : 0;
      // fill stop runs shorter than the (truncated) window by staying on
      int prev = meta[i].initial_on ? 1 : 0;
      for (int t = 0; t < T; ++t) {
        if (prev == 1 && pat[t] == 0) {
          int len = 0;
          while (t + len < T && pat[t + len] == 0) len++;
          int need = std::min(meta[i].min_down, T - t);
          if (len < need)
            for (int k = t; k < t + len; ++k) pat[k] = 1;
          else
            t += len - 1;
        }
        prev = pat[t];
      }
      // extend start runs shorter than the window
      prev = meta[i].initial_on ? 1 : 0;
      for (int t = 0; t < T; ++t) {
        if (prev == 0 && pat[t] == 1) {
          int len = 0;
          while (t + len < T && pat[t + len] == 1) len++;
          int need = std::min(meta[i].min_up, T - t);
          for (int k = t + len; k < t + need; ++k) pat[k] = 1;
        }
        prev = pat[t];
      }
      for (int t = 0; t < T; ++t) {
        restricted.vars()[series[t].u].lo = pat[t];
        restricted.vars()[series[t].u].hi = pat[t];
      }
    }
    conic::SolveOptions ropt;
    auto sol = conic::solve_relaxation(restricted, ropt);
    if (sol.status != conic::SolveStatus::Optimal) return std::nullopt;
    return polish(sol.x);
  };
}

namespace {

DispatchSolution extract(const Assembled& a, const conic::SolveResult& res,
                         double tightness_tol) {
  const model::Scenario& s = a.scn;
  const int T = s.horizon_t;
  const double h = s.slot_hours;
  DispatchSolution sol;
  sol.status = res.status;
  sol.objective = res.objective;
  sol.bound = res.bound;
  sol.gap = res.gap();
  sol.nodes = res.nodes;
  sol.slot_hours = h;
  sol.with_p2g = a.flags.with_p2g;
  sol.fleet = a.flags.fleet;
  sol.rho = s.power_net.reserve_rho;
  sol.delta_wp_objective = a.delta_wp_objective;
  sol.delta_wp_base = s.wind.delta_wp;
  if (res.x.empty()) return sol;

  std::vector<double> x = res.x;
  if (auto polished = make_repair_callback(a)(a.prog, x)) x = *polished;

  const std::size_t nu = s.units.size();
  sol.u.assign(nu, std::vector<int>(T, 0));
  sol.p.assign(nu, std::vector<double>(T, 0.0));
  for (std::size_t i = 0; i < nu; ++i) {
    sol.unit_ids.push_back(s.units[i].id);
    for (int t = 0; t < T; ++t) {
      sol.u[i][t] = static_cast<int>(std::lround(x[a.uvars.u[i][t]]));
      sol.p[i][t] = x[a.uvars.p[i][t]];
    }
  }
  sol.pw.resize(T);
  sol.availability = s.wind.availability;
  sol.curtailment.resize(T);
  for (int t = 0; t < T; ++t) {
    sol.pw[t] = std::clamp(x[a.uvars.pw[t]], 0.0, s.wind.availability[t]);
    sol.curtailment[t] = s.wind.availability[t] - sol.pw[t];
  }

  const std::size_t nn = s.gas_net.nodes.size();
  sol.source.assign(nn, std::vector<double>(T, 0.0));
  sol.pressure_sq.assign(nn, std::vector<double>(T, 0.0));
  sol.demand.assign(nn, std::vector<double>(T, 0.0));
  for (std::size_t m = 0; m < nn; ++m) {
    sol.node_ids.push_back(s.gas_net.nodes[m].id);
    auto dem = s.gas_demands.find(s.gas_net.nodes[m].id);
    for (int t = 0; t < T; ++t) {
      sol.source[m][t] = x[a.gvars.s[m][t]];
      sol.pressure_sq[m][t] = x[a.gvars.pi[m][t]];
      if (dem != s.gas_demands.end()) sol.demand[m][t] = dem->second[t];
    }
  }

  const std::size_t np = s.gas_net.pipes.size();
  sol.flow_signed.assign(np, std::vector<double>(T, 0.0));
  sol.direction.assign(np, std::vector<int>(T, 1));
  sol.lambda.assign(np, std::vector<double>(T, 0.0));
  std::vector<std::vector<double>> flow_abs(np, std::vector<double>(T, 0.0));
  for (std::size_t e = 0; e < np; ++e) {
    sol.pipe_ends.emplace_back(s.gas_net.pipes[e].from, s.gas_net.pipes[e].to);
    sol.weymouth_c.push_back(s.gas_net.pipes[e].weymouth_c);
    for (int t = 0; t < T; ++t) {
      double signed_flow = x[a.gvars.fplus[e][t]] - x[a.gvars.fminus[e][t]];
      double canon_dir = (x[a.gvars.dplus[e][t]] >= 0.5) ? 1.0 : -1.0;
      if (a.gvars.flipped[e]) {
        signed_flow = -signed_flow;
        canon_dir = -canon_dir;
      }
      sol.flow_signed[e][t] = signed_flow;
      sol.direction[e][t] = static_cast<int>(canon_dir);
      sol.lambda[e][t] = x[a.gvars.lambda[e][t]];
      flow_abs[e][t] = std::fabs(signed_flow);
    }
  }
  sol.tightness = gas::measure_tightness(s, flow_abs, sol.lambda, tightness_tol);

  sol.mining = s.coal.mining;
  auto grab = [&](const std::vector<int>& idx) {
    std::vector<double> out(T, 0.0);
    for (int t = 0; t < T; ++t) out[t] = (idx[t] >= 0) ? x[idx[t]] : 0.0;
    return out;
  };
  // re-derive the coupling block exactly from (beta, f_ch4): the equalities
  // then hold bit-exactly in the emitted series
  sol.beta = grab(a.cvars.beta);
  sol.f_ch4 = grab(a.cvars.f_ch4);
  sol.f_h2 = grab(a.cvars.f_h2);
  sol.f_h2_prime.assign(T, 0.0);
  sol.cons_h2.assign(T, 0.0);
  sol.cons_ch4.assign(T, 0.0);
  sol.f_coal_h2.assign(T, 0.0);
  sol.f_truck_h2.assign(T, 0.0);
  for (int t = 0; t < T; ++t) {
    sol.beta[t] = std::clamp(sol.beta[t], 0.0, 1.0);
    if (!a.flags.with_p2g) {
      // gasification alone feeds the trucks; the split is then unique
      double denom = s.coal.alpha_coal[t] + s.coal.alpha_truck[t];
      if (s.coal.mining[t] > 0.0 && denom > 0.0 && s.coal.alpha_truck[t] > 0.0)
        sol.beta[t] = s.coal.alpha_truck[t] / denom;
    }
    if (a.flags.with_p2g) sol.f_ch4[t] = std::clamp(sol.f_ch4[t], 0.0, s.p2g.f_ch4_max);
    sol.f_coal_h2[t] = coupling::c2h_output(s.coal.mining[t], sol.beta[t], s.coal.alpha_coal[t]);
    sol.f_truck_h2[t] =
        coupling::truck_demand(s.coal.mining[t], sol.beta[t], s.coal.alpha_truck[t]);
    if (a.flags.with_p2g) {
      sol.f_h2[t] = std::max(0.0, sol.f_truck_h2[t] - sol.f_coal_h2[t]);
      sol.f_h2_prime[t] = 4.0 * sol.f_ch4[t];
      sol.cons_h2[t] = s.p2g.alpha_h2 / s.p2g.eta_elec[t] * sol.f_h2[t];
      sol.cons_ch4[t] = (4.0 * s.p2g.alpha_ch4_elec / s.p2g.eta_elec[t] +
                         s.p2g.alpha_ch4_meth / s.p2g.eta_meth[t]) *
                        sol.f_ch4[t];
    } else {
      sol.f_h2[t] = 0.0;
    }
  }
  if (a.flags.fleet == carbon::Fleet::Ev) {
    sol.ev_charge_kwh.resize(T);
    for (int t = 0; t < T; ++t)
      sol.ev_charge_kwh[t] =
          s.prices.fleet.ev_kwh_per_ton * (1.0 - sol.beta[t]) * s.coal.mining[t];
  }

  // cost breakdown, curtailment priced at the scenario's base delta
  CostBreakdown cb;
  sol.fuel_tons_slot.assign(T, 0.0);
  for (std::size_t i = 0; i < nu; ++i) {
    const auto& un = s.units[i];
    int prev = un.initial_on ? 1 : 0;
    for (int t = 0; t < T; ++t) {
      double tons = h * uc::fuel_tons(un, sol.p[i][t], sol.u[i][t] == 1);
      sol.fuel_tons_slot[t] += tons;
      cb.fuel += un.coal_price * tons;
      if (sol.u[i][t] == 1 && prev == 0) cb.start += un.start_cost;
      if (sol.u[i][t] == 0 && prev == 1) cb.stop += un.stop_cost;
      prev = sol.u[i][t];
    }
  }
  for (std::size_t m = 0; m < nn; ++m)
    for (int t = 0; t < T; ++t) cb.gas += s.gas_net.gas_price * h * sol.source[m][t];
  const double e_pu = s.base_kw() * h;
  for (int t = 0; t < T; ++t) cb.curtail += sol.delta_wp_base * e_pu * sol.curtailment[t];
  for (int t = 0; t < T; ++t) {
    double trucked = (1.0 - sol.beta[t]) * s.coal.mining[t];
    cb.truck += s.prices.truck_cost_coeff * trucked;
    if (a.flags.fleet == carbon::Fleet::Diesel)
      cb.truck += s.prices.fleet.diesel_fuel_per_ton * trucked;
    cb.coal_revenue += s.prices.coal_sale_price * trucked;
  }
  cb.total = cb.fuel + cb.start + cb.stop + cb.gas + cb.curtail + cb.truck - cb.coal_revenue;
  sol.costs = cb;
  return sol;
}

}  // namespace

DispatchSolution run(const model::Scenario& s, const RunOptions& opt) {
  Assembled a = assemble(s, opt.flags);
  if (opt.dump_program) {
    std::ofstream f(*opt.dump_program);
    if (!f) throw InputError(format_msg("cannot write program dump to ", *opt.dump_program));
    a.prog.write_text(f);
  }
  auto cb = make_repair_callback(a);
  conic::SolveResult res = conic::branch_and_bound(a.prog, opt.solve, cb);

  // final polish: re-solve the incumbent's commitment pattern tightly so the
  // reported dispatch carries solve noise at the tolerance level, not the
  // branching level
  if ((res.status == conic::SolveStatus::Optimal ||
       res.status == conic::SolveStatus::GapLimit) &&
      !res.x.empty()) {
    conic::ConicProgram pinned = a.prog;
    for (int v : pinned.binary_vars()) {
      double val = std::round(res.x[v]);
      pinned.vars()[v].lo = val;
      pinned.vars()[v].hi = val;
    }
    conic::SolveOptions popt;
    popt.ipm.feastol = 1e-9;
    popt.ipm.abstol = 1e-10;
    popt.ipm.reltol = 1e-10;
    popt.ipm.max_iter = 300;
    auto polished = conic::solve_relaxation(pinned, popt);
    if (polished.status == conic::SolveStatus::Optimal &&
        polished.objective <=
            res.objective + 1e-6 * std::max(1.0, std::fabs(res.objective))) {
      if (auto fixed = cb(a.prog, polished.x)) {
        res.x = *fixed;
        res.objective = a.prog.objective_value(*fixed);
        res.bound = std::min(res.bound, res.objective);
      }
    }
  }
  return extract(a, res, opt.tightness_tol);
}

carbon::LedgerInputs DispatchSolution::ledger_inputs(double total_cost_override) const {
  carbon::LedgerInputs in;
  in.slot_hours = slot_hours;
  in.total_cost = (total_cost_override == kInf) ? costs.total : total_cost_override;
  const int T = static_cast<int>(pw.size());
  in.fuel_tons = fuel_tons_slot;
  in.trucked_tons.assign(T, 0.0);
  for (int t = 0; t < T; ++t) in.trucked_tons[t] = (1.0 - beta[t]) * mining[t];
  in.f_coal_h2 = f_coal_h2;
  in.f_ch4 = f_ch4;
  in.ev_charge_kwh = ev_charge_kwh;
  return in;
}

void report(const DispatchSolution& sol, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  auto open = [&](const std::string& name) {
    std::ofstream f(fs::path(out_dir) / name);
    if (!f) throw InputError(format_msg("cannot write ", name, " under ", out_dir));
    return f;
  };
  const int T = static_cast<int>(sol.pw.size());

  {
    auto f = open("costs.csv");
    f << "component,value\n";
    f << "fuel," << fmt_double(sol.costs.fuel) << "\n";
    f << "start," << fmt_double(sol.costs.start) << "\n";
    f << "stop," << fmt_double(sol.costs.stop) << "\n";
    f << "gas," << fmt_double(sol.costs.gas) << "\n";
    f << "curtail," << fmt_double(sol.costs.curtail) << "\n";
    f << "truck," << fmt_double(sol.costs.truck) << "\n";
    f << "coal_revenue," << fmt_double(-sol.costs.coal_revenue) << "\n";
  }
  {
    auto f = open("unit_output.csv");
    f << "unit,slot,u,p_pu\n";
    for (std::size_t i = 0; i < sol.u.size(); ++i)
      for (int t = 0; t < T; ++t)
        f << sol.unit_ids[i] << "," << t << "," << sol.u[i][t] << ","
          << fmt_double(sol.p[i][t]) << "\n";
  }
  {
    auto f = open("gas_state.csv");
    f << "slot,node,source_m3h,pressure_sq_bar2,pressure_bar,demand_m3h\n";
    for (int t = 0; t < T; ++t)
      for (std::size_t m = 0; m < sol.node_ids.size(); ++m)
        f << t << "," << sol.node_ids[m] << "," << fmt_double(sol.source[m][t]) << ","
          << fmt_double(sol.pressure_sq[m][t]) << ","
          << fmt_double(std::sqrt(std::max(0.0, sol.pressure_sq[m][t]))) << ","
          << fmt_double(sol.demand[m][t]) << "\n";
  }
  {
    auto f = open("coupling.csv");
    f << "slot,f_h2,f_h2_prime,f_ch4,f_coal_h2,f_truck_h2,beta,cons_h2_kw,cons_ch4_kw,"
         "mining_tons,gasified_tons,trucked_tons\n";
    for (int t = 0; t < T; ++t) {
      double gasified = sol.beta[t] * sol.mining[t];
      f << t << "," << fmt_double(sol.f_h2[t]) << "," << fmt_double(sol.f_h2_prime[t]) << ","
        << fmt_double(sol.f_ch4[t]) << "," << fmt_double(sol.f_coal_h2[t]) << ","
        << fmt_double(sol.f_truck_h2[t]) << "," << fmt_double(sol.beta[t]) << ","
        << fmt_double(sol.cons_h2[t]) << "," << fmt_double(sol.cons_ch4[t]) << ","
        << fmt_double(sol.mining[t]) << "," << fmt_double(gasified) << ","
        << fmt_double(sol.mining[t] - gasified) << "\n";
    }
  }
  {
    auto f = open("tightness.csv");
    f << "pipe,from,to,slot,flow_m3h,direction,lambda,flow_over_c_sq,residual,rel_residual\n";
    for (const auto& en : sol.tightness.entries) {
      f << en.pipe << "," << sol.pipe_ends[en.pipe].first << ","
        << sol.pipe_ends[en.pipe].second << "," << en.slot << ","
        << fmt_double(sol.flow_signed[en.pipe][en.slot]) << ","
        << sol.direction[en.pipe][en.slot] << "," << fmt_double(en.lambda) << ","
        << fmt_double(en.flow_over_c_sq) << "," << fmt_double(en.residual) << ","
        << fmt_double(en.rel_residual) << "\n";
    }
  }
  {
    auto f = open("summary.json");
    f << summary_json(sol).dump(2) << "\n";
  }
}

ordered_json summary_json(const DispatchSolution& sol) {
  ordered_json j;
  j["status"] = conic::to_string(sol.status);
  j["objective"] = sol.objective;
  j["bound"] = sol.bound;
  j["gap"] = sol.gap;
  j["nodes"] = sol.nodes;
  j["total"] = sol.costs.total;
  ordered_json b;
  b["fuel"] = sol.costs.fuel;
  b["start"] = sol.costs.start;
  b["stop"] = sol.costs.stop;
  b["gas"] = sol.costs.gas;
  b["curtail"] = sol.costs.curtail;
  b["truck"] = sol.costs.truck;
  b["coal_revenue"] = -sol.costs.coal_revenue;
  j["breakdown"] = b;
  j["delta_wp"] = {{"objective", sol.delta_wp_objective}, {"base", sol.delta_wp_base}};
  j["rho"] = sol.rho;
  j["with_p2g"] = sol.with_p2g;
  j["fleet"] = carbon::to_string(sol.fleet);
  j["tightness"] = {{"max_rel", sol.tightness.max_rel},
                    {"mean_rel", sol.tightness.mean_rel},
                    {"violations", sol.tightness.violations},
                    {"tol", sol.tightness.tol}};
  double curtailed_kwh = 0.0;
  for (std::size_t t = 0; t < sol.curtailment.size(); ++t) curtailed_kwh += sol.curtailment[t];
  j["curtailed_pu_h"] = curtailed_kwh;
  return j;
}

namespace {

json mat_to_json(const std::vector<std::vector<double>>& m) {
  json out = json::array();
  for (const auto& row : m) out.push_back(row);
  return out;
}
json imat_to_json(const std::vector<std::vector<int>>& m) {
  json out = json::array();
  for (const auto& row : m) out.push_back(row);
  return out;
}

}  // namespace

ordered_json solution_to_json(const DispatchSolution& sol) {
  ordered_json j = summary_json(sol);
  j["slot_hours"] = sol.slot_hours;
  j["unit_ids"] = sol.unit_ids;
  j["u"] = imat_to_json(sol.u);
  j["p"] = mat_to_json(sol.p);
  j["pw"] = sol.pw;
  j["availability"] = sol.availability;
  j["curtailment"] = sol.curtailment;
  j["node_ids"] = sol.node_ids;
  j["source"] = mat_to_json(sol.source);
  j["pressure_sq"] = mat_to_json(sol.pressure_sq);
  j["demand"] = mat_to_json(sol.demand);
  json ends = json::array();
  for (auto& [a, b] : sol.pipe_ends) ends.push_back({a, b});
  j["pipe_ends"] = ends;
  j["weymouth_c"] = sol.weymouth_c;
  j["flow_signed"] = mat_to_json(sol.flow_signed);
  j["direction"] = imat_to_json(sol.direction);
  j["lambda"] = mat_to_json(sol.lambda);
  j["f_h2"] = sol.f_h2;
  j["f_h2_prime"] = sol.f_h2_prime;
  j["f_ch4"] = sol.f_ch4;
  j["cons_h2"] = sol.cons_h2;
  j["cons_ch4"] = sol.cons_ch4;
  j["f_coal_h2"] = sol.f_coal_h2;
  j["f_truck_h2"] = sol.f_truck_h2;
  j["beta"] = sol.beta;
  j["mining"] = sol.mining;
  j["ev_charge_kwh"] = sol.ev_charge_kwh;
  j["fuel_tons_slot"] = sol.fuel_tons_slot;
  return j;
}

DispatchSolution solution_from_json(const json& j) {
  DispatchSolution sol;
  auto mat = [&](const char* key) {
    std::vector<std::vector<double>> out;
    for (const auto& row : j.at(key)) out.push_back(row.get<std::vector<double>>());
    return out;
  };
  auto imat = [&](const char* key) {
    std::vector<std::vector<int>> out;
    for (const auto& row : j.at(key)) out.push_back(row.get<std::vector<int>>());
    return out;
  };
  std::string st = j.at("status").get<std::string>();
  sol.status = st == "optimal"     ? conic::SolveStatus::Optimal
               : st == "gap-limit" ? conic::SolveStatus::GapLimit
               : st == "node-limit" ? conic::SolveStatus::NodeLimit
               : st == "time-limit" ? conic::SolveStatus::TimeLimit
               : st == "infeasible" ? conic::SolveStatus::Infeasible
                                    : conic::SolveStatus::NumericalFailure;
  sol.objective = j.at("objective").get<double>();
  sol.bound = j.at("bound").get<double>();
  sol.gap = j.at("gap").get<double>();
  sol.nodes = j.at("nodes").get<long long>();
  const auto& b = j.at("breakdown");
  sol.costs.fuel = b.at("fuel").get<double>();
  sol.costs.start = b.at("start").get<double>();
  sol.costs.stop = b.at("stop").get<double>();
  sol.costs.gas = b.at("gas").get<double>();
  sol.costs.curtail = b.at("curtail").get<double>();
  sol.costs.truck = b.at("truck").get<double>();
  sol.costs.coal_revenue = -b.at("coal_revenue").get<double>();
  sol.costs.total = j.at("total").get<double>();
  sol.delta_wp_objective = j.at("delta_wp").at("objective").get<double>();
  sol.delta_wp_base = j.at("delta_wp").at("base").get<double>();
  sol.rho = j.at("rho").get<double>();
  sol.with_p2g = j.at("with_p2g").get<bool>();
  sol.fleet = carbon::fleet_from_string(j.at("fleet").get<std::string>());
  sol.slot_hours = j.at("slot_hours").get<double>();
  sol.unit_ids = j.at("unit_ids").get<std::vector<int>>();
  sol.u = imat("u");
  sol.p = mat("p");
  sol.pw = j.at("pw").get<std::vector<double>>();
  sol.availability = j.at("availability").get<std::vector<double>>();
  sol.curtailment = j.at("curtailment").get<std::vector<double>>();
  sol.node_ids = j.at("node_ids").get<std::vector<int>>();
  sol.source = mat("source");
  sol.pressure_sq = mat("pressure_sq");
  sol.demand = mat("demand");
  for (const auto& e : j.at("pipe_ends"))
    sol.pipe_ends.emplace_back(e[0].get<int>(), e[1].get<int>());
  sol.weymouth_c = j.at("weymouth_c").get<std::vector<double>>();
  sol.flow_signed = mat("flow_signed");
  sol.direction = imat("direction");
  sol.lambda = mat("lambda");
  sol.f_h2 = j.at("f_h2").get<std::vector<double>>();
  sol.f_h2_prime = j.at("f_h2_prime").get<std::vector<double>>();
  sol.f_ch4 = j.at("f_ch4").get<std::vector<double>>();
  sol.cons_h2 = j.at("cons_h2").get<std::vector<double>>();
  sol.cons_ch4 = j.at("cons_ch4").get<std::vector<double>>();
  sol.f_coal_h2 = j.at("f_coal_h2").get<std::vector<double>>();
  sol.f_truck_h2 = j.at("f_truck_h2").get<std::vector<double>>();
  sol.beta = j.at("beta").get<std::vector<double>>();
  sol.mining = j.at("mining").get<std::vector<double>>();
  sol.ev_charge_kwh = j.at("ev_charge_kwh").get<std::vector<double>>();
  sol.fuel_tons_slot = j.at("fuel_tons_slot").get<std::vector<double>>();
  // rebuild tightness from the stored arrays
  const int T = static_cast<int>(sol.pw.size());
  sol.tightness.tol = j.at("tightness").at("tol").get<double>();
  for (std::size_t e = 0; e < sol.weymouth_c.size(); ++e) {
    for (int t = 0; t < T; ++t) {
      gas::TightnessReport::Entry en;
      en.pipe = static_cast<int>(e);
      en.slot = t;
      en.flow = std::fabs(sol.flow_signed[e][t]);
      en.lambda = sol.lambda[e][t];
      double fc = en.flow / sol.weymouth_c[e];
      en.flow_over_c_sq = fc * fc;
      en.residual = en.lambda - en.flow_over_c_sq;
      en.rel_residual = en.residual / std::max(1.0, en.flow_over_c_sq);
      sol.tightness.entries.push_back(en);
      sol.tightness.max_rel = std::max(sol.tightness.max_rel, en.rel_residual);
      if (en.rel_residual > sol.tightness.tol) sol.tightness.violations++;
    }
  }
  if (!sol.tightness.entries.empty()) {
    double sum = 0.0;
    for (const auto& en : sol.tightness.entries) sum += en.rel_residual;
    sol.tightness.mean_rel = sum / sol.tightness.entries.size();
  }
  return sol;
}

SweepResult sweep(const model::Scenario& s, const std::string& param,
                  const std::vector<double>& values, const RunOptions& opt) {
  if (values.empty()) throw InputError("sweep needs at least one value");
  if (param != "delta_wp" && param != "rho")
    throw InputError(format_msg("unknown sweep parameter `", param, "` (delta_wp|rho)"));
  SweepResult out;
  out.param = param;
  out.points.resize(values.size());

  auto eval_point = [&](std::size_t k) {
    SweepPoint& pt = out.points[k];
    pt.value = values[k];
    if (values[k] < 0) {
      pt.message = "negative parameter value";
      return;
    }
    try {
      RunOptions ro = opt;
      if (param == "delta_wp")
        ro.flags.delta_wp_override = values[k];
      else
        ro.flags.rho_override = values[k];
      DispatchSolution sol = run(s, ro);
      pt.status = sol.status;
      pt.objective = sol.objective;
      pt.economic_total = sol.costs.total;
      pt.gap = sol.gap;
      double e_pu = sol.slot_hours * s.base_kw();
      for (double c : sol.curtailment) pt.curtailed_kwh += c * e_pu;
    } catch (const std::exception& e) {
      pt.message = e.what();
      pt.status = conic::SolveStatus::NumericalFailure;
    }
  };

#if defined(_OPENMP)
  if (ies::parallel::num_threads() > 1 && values.size() > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(ies::parallel::num_threads())
    for (long long k = 0; k < static_cast<long long>(values.size()); ++k)
      eval_point(static_cast<std::size_t>(k));
  } else {
    for (std::size_t k = 0; k < values.size(); ++k) eval_point(k);
  }
#else
  for (std::size_t k = 0; k < values.size(); ++k) eval_point(k);
#endif

  double best = kInf;
  for (std::size_t k = 0; k < out.points.size(); ++k) {
    if (out.points[k].status == conic::SolveStatus::Optimal ||
        out.points[k].status == conic::SolveStatus::GapLimit) {
      if (out.points[k].economic_total < best) {
        best = out.points[k].economic_total;
        out.argmin_economic = static_cast<int>(k);
      }
    }
  }
  if (out.argmin_economic > 0 &&
      out.argmin_economic < static_cast<int>(out.points.size()) - 1) {
    out.interior_minimum =
        out.points[out.argmin_economic].economic_total < out.points.front().economic_total &&
        out.points[out.argmin_economic].economic_total < out.points.back().economic_total;
  }
  return out;
}

FleetRun compare_fleets(const model::Scenario& s, const RunOptions& opt) {
  FleetRun fr;
  fr.solutions.reserve(3);
  std::map<carbon::Fleet, std::size_t> index;
  for (carbon::Fleet fleet :
       {carbon::Fleet::Hydrogen, carbon::Fleet::Ev, carbon::Fleet::Diesel}) {
    RunOptions ro = opt;
    ro.flags.fleet = fleet;
    fr.solutions.push_back(run(s, ro));
    index[fleet] = fr.solutions.size() - 1;
  }
  auto solve_fn = [&](carbon::Fleet fleet, std::string* msg)
      -> std::pair<bool, carbon::LedgerInputs> {
    const DispatchSolution& sol = fr.solutions[index[fleet]];
    bool ok = sol.status == conic::SolveStatus::Optimal ||
              sol.status == conic::SolveStatus::GapLimit;
    if (!ok && msg) *msg = conic::to_string(sol.status);
    return {ok, sol.ledger_inputs()};
  };
  fr.table = carbon::compare_fleets(s, solve_fn);
  return fr;
}

void write_sweep_files(const SweepResult& r, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  {
    std::ofstream f(fs::path(out_dir) / "sweep.csv");
    f << r.param << ",status,objective,economic_total,curtailed_kwh,gap\n";
    for (const auto& pt : r.points)
      f << fmt_double(pt.value) << "," << conic::to_string(pt.status) << ","
        << fmt_double(pt.objective) << "," << fmt_double(pt.economic_total) << ","
        << fmt_double(pt.curtailed_kwh) << "," << fmt_double(pt.gap) << "\n";
  }
  {
    ordered_json j;
    j["param"] = r.param;
    j["points"] = json::array();
    for (const auto& pt : r.points) {
      ordered_json p;
      p["value"] = pt.value;
      p["status"] = conic::to_string(pt.status);
      p["objective"] = pt.objective;
      p["economic_total"] = pt.economic_total;
      p["curtailed_kwh"] = pt.curtailed_kwh;
      p["gap"] = pt.gap;
      if (!pt.message.empty()) p["message"] = pt.message;
      j["points"].push_back(p);
    }
    j["argmin_economic"] = r.argmin_economic;
    j["interior_minimum"] = r.interior_minimum;
    std::ofstream f(fs::path(out_dir) / "sweep.json");
    f << j.dump(2) << "\n";
  }
}

void write_carbon_report(const FleetRun& r, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  {
    std::ofstream f(fs::path(out_dir) / "carbon_report.csv");
    f << "fleet,feasible,operating_total,net_emissions_tco2,adjusted_china,adjusted_eu\n";
    for (const auto& row : r.table.rows)
      f << carbon::to_string(row.fleet) << "," << (row.feasible ? 1 : 0) << ","
        << fmt_double(row.operating_total) << "," << fmt_double(row.net_emissions) << ","
        << fmt_double(row.adjusted_china) << "," << fmt_double(row.adjusted_eu) << "\n";
  }
  {
    ordered_json j;
    j["china_price_usd"] = r.table.china_price_usd;
    j["eu_price_usd"] = r.table.eu_price_usd;
    j["rows"] = json::array();
    for (const auto& row : r.table.rows) {
      ordered_json c;
      c["fleet"] = carbon::to_string(row.fleet);
      c["feasible"] = row.feasible;
      c["operating_total"] = row.operating_total;
      c["net_emissions_tco2"] = row.net_emissions;
      c["adjusted_china"] = row.adjusted_china;
      c["adjusted_eu"] = row.adjusted_eu;
      if (!row.message.empty()) c["message"] = row.message;
      j["rows"].push_back(c);
    }
    std::ofstream f(fs::path(out_dir) / "carbon_report.json");
    f << j.dump(2) << "\n";
  }
}

}  // namespace ies::runner
