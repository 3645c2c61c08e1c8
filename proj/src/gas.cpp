#include "ies/gas.hpp"

#include <algorithm>
#include <cmath>

#include "ies/parallel.hpp"

namespace ies::gas {

using conic::ConicProgram;
using conic::LinTerm;
using conic::Sense;
using conic::SocConstraint;

std::pair<double, double> substitute_pressure(double p_lo, double p_hi) {
  if (p_lo < 0 || p_hi < 0) throw InputError("pressure bounds must be nonnegative");
  return {p_lo * p_lo, p_hi * p_hi};
}

double mccormick_rhs_max(double delta, double pi_m, double pi_n, double lo, double hi) {
  double w = pi_m - pi_n;
  double r1 = -w + (delta + 1.0) * lo;
  double r2 = w + (delta - 1.0) * hi;
  double r3 = -w + (delta + 1.0) * hi;
  double r4 = w + (delta - 1.0) * lo;
  return std::max({r1, r2, r3, r4});
}

namespace {

double lambda_upper_bound(double lo, double hi, double fmax_over_c) {
  // max over delta in {-1, +1} and w in [lo, hi] of the four envelope RHS
  double at_plus = std::max({hi, 2.0 * hi - lo});
  double at_minus = std::max({-lo, hi - 2.0 * lo});
  return std::max({at_plus, at_minus, fmax_over_c * fmax_over_c, 0.0});
}

}  // namespace

GasVariables declare_variables(ConicProgram& prog, const model::Scenario& s) {
  const int T = s.horizon_t;
  GasVariables v;
  const auto& net = s.gas_net;
  v.s.resize(net.nodes.size());
  v.pi.resize(net.nodes.size());
  for (std::size_t m = 0; m < net.nodes.size(); ++m) {
    const auto& nd = net.nodes[m];
    auto [pi_lo, pi_hi] = substitute_pressure(nd.p_lo, nd.p_hi);
    for (int t = 0; t < T; ++t) {
      v.s[m].push_back(
          prog.add_continuous(format_msg("s[", nd.id, ",", t, "]"), nd.s_lo, nd.s_hi));
      v.pi[m].push_back(
          prog.add_continuous(format_msg("pi[", nd.id, ",", t, "]"), pi_lo, pi_hi));
    }
  }

  const std::size_t np = net.pipes.size();
  v.f.resize(np);
  v.fplus.resize(np);
  v.fminus.resize(np);
  v.dplus.resize(np);
  v.dminus.resize(np);
  v.lambda.resize(np);
  v.flipped.resize(np);
  v.from.resize(np);
  v.to.resize(np);
  v.f_max.resize(np);
  v.lambda_hi.resize(np);
  for (std::size_t e = 0; e < np; ++e) {
    const auto& pe = net.pipes[e];
    int a = pe.from, b = pe.to;
    bool flip = a > b;
    if (flip) std::swap(a, b);
    v.flipped[e] = flip;
    int mi = s.gas_node_index(a), ni = s.gas_node_index(b);
    v.from[e] = mi;
    v.to[e] = ni;
    auto [pim_lo, pim_hi] = substitute_pressure(net.nodes[mi].p_lo, net.nodes[mi].p_hi);
    auto [pin_lo, pin_hi] = substitute_pressure(net.nodes[ni].p_lo, net.nodes[ni].p_hi);
    double fmax = pe.weymouth_c * std::sqrt(std::max(pim_hi, pin_hi));
    v.f_max[e] = fmax;
    v.lambda_hi[e] =
        lambda_upper_bound(pim_lo - pin_hi, pim_hi - pin_lo, fmax / pe.weymouth_c);
    std::string tag = format_msg(a, "-", b);
    for (int t = 0; t < T; ++t) {
      v.f[e].push_back(prog.add_continuous(format_msg("F[", tag, ",", t, "]"), 0.0, fmax));
      v.fplus[e].push_back(prog.add_continuous(format_msg("F+[", tag, ",", t, "]"), 0.0, fmax));
      v.fminus[e].push_back(
          prog.add_continuous(format_msg("F-[", tag, ",", t, "]"), 0.0, fmax));
      v.dplus[e].push_back(prog.add_binary(format_msg("d+[", tag, ",", t, "]")));
      v.dminus[e].push_back(prog.add_binary(format_msg("d-[", tag, ",", t, "]")));
      v.lambda[e].push_back(
          prog.add_continuous(format_msg("lambda[", tag, ",", t, "]"), 0.0, v.lambda_hi[e]));
    }
  }
  return v;
}

void build_nodal_balance(ConicProgram& prog, const model::Scenario& s, const GasVariables& v,
                         const NodeInjections& extra) {
  const int T = s.horizon_t;
  const auto& net = s.gas_net;
  for (std::size_t m = 0; m < net.nodes.size(); ++m) {
    int node_id = net.nodes[m].id;
    auto dem_it = s.gas_demands.find(node_id);
    auto extra_it = extra.find(node_id);
    for (int t = 0; t < T; ++t) {
      std::vector<LinTerm> terms{{v.s[m][t], 1.0}};
      for (std::size_t e = 0; e < net.pipes.size(); ++e) {
        double sgn = 0.0;
        if (v.to[e] == static_cast<int>(m)) sgn = 1.0;    // canonical flow arrives
        if (v.from[e] == static_cast<int>(m)) sgn = -1.0; // canonical flow leaves
        if (sgn == 0.0) continue;
        terms.push_back({v.fplus[e][t], sgn});
        terms.push_back({v.fminus[e][t], -sgn});
      }
      if (extra_it != extra.end())
        for (const auto& term : extra_it->second[t]) terms.push_back(term);
      double rhs = (dem_it != s.gas_demands.end()) ? dem_it->second[t] : 0.0;
      prog.add_linear(format_msg("gasbal[", node_id, ",", t, "]"), Sense::EQ, rhs,
                      std::move(terms));
    }
  }
}

void build_direction_vars(ConicProgram& prog, const model::Scenario& s, const GasVariables& v) {
  const int T = s.horizon_t;
  for (std::size_t e = 0; e < s.gas_net.pipes.size(); ++e) {
    for (int t = 0; t < T; ++t) {
      prog.add_complement_pair(v.dplus[e][t], v.dminus[e][t]);
      prog.add_linear(format_msg("fsplit[", e, ",", t, "]"), Sense::EQ, 0.0,
                      {{v.f[e][t], 1.0}, {v.fplus[e][t], -1.0}, {v.fminus[e][t], -1.0}});
      prog.add_linear(format_msg("fpluscap[", e, ",", t, "]"), Sense::LE, 0.0,
                      {{v.fplus[e][t], 1.0}, {v.dplus[e][t], -v.f_max[e]}});
      prog.add_linear(format_msg("fminuscap[", e, ",", t, "]"), Sense::LE, 0.0,
                      {{v.fminus[e][t], 1.0}, {v.dminus[e][t], -v.f_max[e]}});
    }
  }
}

void build_mccormick(ConicProgram& prog, const model::Scenario& s, const GasVariables& v) {
  const int T = s.horizon_t;
  const auto& net = s.gas_net;
  for (std::size_t e = 0; e < net.pipes.size(); ++e) {
    int mi = v.from[e], ni = v.to[e];
    auto [pim_lo, pim_hi] = substitute_pressure(net.nodes[mi].p_lo, net.nodes[mi].p_hi);
    auto [pin_lo, pin_hi] = substitute_pressure(net.nodes[ni].p_lo, net.nodes[ni].p_hi);
    if (!std::isfinite(pim_hi) || !std::isfinite(pin_hi))
      throw SolverError(format_msg("pipe ", e, ": unbounded pressure box"));
    const double lo = pim_lo - pin_hi;
    const double hi = pim_hi - pin_lo;
    for (int t = 0; t < T; ++t) {
      int lam = v.lambda[e][t], pim = v.pi[mi][t], pin = v.pi[ni][t];
      int dp = v.dplus[e][t], dm = v.dminus[e][t];
      // lambda >= pi_n - pi_m + (d+ - d- + 1) lo
      prog.add_linear(format_msg("mc1[", e, ",", t, "]"), Sense::GE, lo,
                      {{lam, 1.0}, {pim, 1.0}, {pin, -1.0}, {dp, -lo}, {dm, lo}});
      // lambda >= pi_m - pi_n + (d+ - d- - 1) hi
      prog.add_linear(format_msg("mc2[", e, ",", t, "]"), Sense::GE, -hi,
                      {{lam, 1.0}, {pim, -1.0}, {pin, 1.0}, {dp, -hi}, {dm, hi}});
      // lambda >= pi_n - pi_m + (d+ - d- + 1) hi
      prog.add_linear(format_msg("mc3[", e, ",", t, "]"), Sense::GE, hi,
                      {{lam, 1.0}, {pim, 1.0}, {pin, -1.0}, {dp, -hi}, {dm, hi}});
      // lambda >= pi_m - pi_n + (d+ - d- - 1) lo
      prog.add_linear(format_msg("mc4[", e, ",", t, "]"), Sense::GE, -lo,
                      {{lam, 1.0}, {pim, -1.0}, {pin, 1.0}, {dp, -lo}, {dm, lo}});
    }
  }
}

void build_soc(ConicProgram& prog, const model::Scenario& s, const GasVariables& v) {
  const int T = s.horizon_t;
  for (std::size_t e = 0; e < s.gas_net.pipes.size(); ++e) {
    double c = s.gas_net.pipes[e].weymouth_c;
    if (c <= 0) throw InputError(format_msg("pipe ", e, ": Weymouth constant must be positive"));
    // written over lambda/k so the cone block is internally balanced;
    // (F/(C sqrt(k)))^2 <= lambda/k is the same constraint
    const double k = std::max(1.0, v.lambda_hi[e]);
    const double sk = std::sqrt(k);
    for (int t = 0; t < T; ++t) {
      SocConstraint soc;
      soc.name = format_msg("weymouth[", e, ",", t, "]");
      soc.norm_rows = {{{v.f[e][t], 2.0 / (c * sk)}}, {{v.lambda[e][t], 1.0 / k}}};
      soc.norm_offsets = {0.0, -1.0};
      soc.rhs_terms = {{v.lambda[e][t], 1.0 / k}};
      soc.rhs_offset = 1.0;
      prog.add_soc(std::move(soc));
    }
  }
}

GasVariables build_gas_side(ConicProgram& prog, const model::Scenario& s,
                            const NodeInjections& extra) {
  GasVariables v = declare_variables(prog, s);
  build_nodal_balance(prog, s, v, extra);
  build_direction_vars(prog, s, v);
  build_mccormick(prog, s, v);
  build_soc(prog, s, v);
  return v;
}

TightnessReport measure_tightness(const model::Scenario& s,
                                  const std::vector<std::vector<double>>& flow_abs,
                                  const std::vector<std::vector<double>>& lambda, double tol) {
  TightnessReport rep;
  rep.tol = tol;
  const int T = s.horizon_t;
  const std::size_t np = s.gas_net.pipes.size();
  rep.entries.resize(np * static_cast<std::size_t>(T));
  ies::parallel::parallel_for(np * static_cast<std::size_t>(T), [&](std::size_t k) {
    std::size_t e = k / T;
    int t = static_cast<int>(k % T);
    double c = s.gas_net.pipes[e].weymouth_c;
    double fc = flow_abs[e][t] / c;
    TightnessReport::Entry& en = rep.entries[k];
    en.pipe = static_cast<int>(e);
    en.slot = t;
    en.flow = flow_abs[e][t];
    en.lambda = lambda[e][t];
    en.flow_over_c_sq = fc * fc;
    en.residual = en.lambda - en.flow_over_c_sq;
    en.rel_residual = en.residual / std::max(1.0, en.flow_over_c_sq);
  });
  double sum = 0.0;
  for (const auto& en : rep.entries) {
    rep.max_rel = std::max(rep.max_rel, en.rel_residual);
    sum += en.rel_residual;
    if (en.rel_residual > tol) rep.violations++;
  }
  rep.mean_rel = rep.entries.empty() ? 0.0 : sum / rep.entries.size();
  return rep;
}

}  // namespace ies::gas
