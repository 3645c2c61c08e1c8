#include "ies/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace ies::oracle {

namespace {

// Economic dispatch for one slot over the committed set: bisection on the
// marginal price of min sum price*(a P^2 + b P) s.t. sum P = load, bounds.
// Requires a > 0 for every unit so the marginal map is strictly monotone.
bool dispatch_slot(const std::vector<const UcToyUnit*>& on, double load, std::vector<double>& p,
                   double* cost) {
  double cap_lo = 0.0, cap_hi = 0.0;
  for (auto* u : on) {
    cap_lo += u->p_min;
    cap_hi += u->p_max;
  }
  if (load < cap_lo - 1e-9 || load > cap_hi + 1e-9) return false;
  if (on.empty()) {
    *cost = 0.0;
    return std::fabs(load) <= 1e-9;
  }
  for (auto* u : on)
    if (u->a <= 0) throw InputError("oracle dispatch requires strictly convex fuel curves");

  auto output_at = [&](double mu, const UcToyUnit* u) {
    double p_free = (mu - u->coal_price * u->b) / (2.0 * u->coal_price * u->a);
    return std::clamp(p_free, u->p_min, u->p_max);
  };
  double lo = kInf, hi = -kInf;
  for (auto* u : on) {
    lo = std::min(lo, u->coal_price * (u->b + 2 * u->a * u->p_min));
    hi = std::max(hi, u->coal_price * (u->b + 2 * u->a * u->p_max));
  }
  for (int it = 0; it < 200; ++it) {
    double mu = 0.5 * (lo + hi);
    double total = 0.0;
    for (auto* u : on) total += output_at(mu, u);
    if (total < load)
      lo = mu;
    else
      hi = mu;
  }
  double mu = 0.5 * (lo + hi);
  p.clear();
  double total = 0.0, c = 0.0;
  for (auto* u : on) {
    double pi = output_at(mu, u);
    p.push_back(pi);
    total += pi;
  }
  // distribute any residual to interior units (flat region safety)
  double resid = load - total;
  for (std::size_t i = 0; i < on.size() && std::fabs(resid) > 1e-12; ++i) {
    double room_up = on[i]->p_max - p[i], room_dn = p[i] - on[i]->p_min;
    double d = std::clamp(resid, -room_dn, room_up);
    p[i] += d;
    resid -= d;
  }
  if (std::fabs(resid) > 1e-7) return false;
  for (std::size_t i = 0; i < on.size(); ++i) {
    const auto* u = on[i];
    c += u->coal_price * (u->a * p[i] * p[i] + u->b * p[i] + u->c);
  }
  *cost = c;
  return true;
}

// Minimum stop/start windows, run-length reading with horizon truncation:
// a transition at t must hold for min(T_min, T - t) slots.
bool updown_ok(const std::vector<int>& u, bool initial_on, int min_down, int min_up) {
  const int T = static_cast<int>(u.size());
  for (int t = 0; t < T; ++t) {
    int prev = (t == 0) ? (initial_on ? 1 : 0) : u[t - 1];
    if (prev == 1 && u[t] == 0) {
      int need = std::min(min_down, T - t);
      for (int k = t; k < t + need; ++k)
        if (u[k] != 0) return false;
    }
    if (prev == 0 && u[t] == 1) {
      int need = std::min(min_up, T - t);
      for (int k = t; k < t + need; ++k)
        if (u[k] != 1) return false;
    }
  }
  return true;
}

}  // namespace

UcOracleResult enumerate_uc(const UcToy& toy) {
  const int n = static_cast<int>(toy.units.size());
  const int t_slots = static_cast<int>(toy.load.size());
  const int bits = n * t_slots;
  if (bits > 12) throw InputError(format_msg("oracle instance too large: ", bits, " binaries (max 12)"));
  for (const auto& u : toy.units) {
    if (u.ramp_up < u.p_max - 1e-12 || u.ramp_down < u.p_max - 1e-12)
      throw InputError("oracle requires ramp limits >= p_max so slot dispatches decouple");
  }

  UcOracleResult best;
  best.feasible = false;
  best.objective = kInf;

  std::vector<std::vector<int>> u(n, std::vector<int>(t_slots, 0));
  for (long long mask = 0; mask < (1LL << bits); ++mask) {
    best.patterns_checked++;
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < t_slots; ++t) u[i][t] = (mask >> (i * t_slots + t)) & 1;

    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      ok = updown_ok(u[i], toy.units[i].initial_on, toy.units[i].min_down, toy.units[i].min_up);
    if (!ok) continue;

    double cost = 0.0;
    for (int i = 0; i < n; ++i) {
      int prev = toy.units[i].initial_on ? 1 : 0;
      for (int t = 0; t < t_slots; ++t) {
        if (u[i][t] == 1 && prev == 0) cost += toy.units[i].start_cost;
        if (u[i][t] == 0 && prev == 1) cost += toy.units[i].stop_cost;
        prev = u[i][t];
      }
    }

    for (int t = 0; t < t_slots && ok; ++t) {
      std::vector<const UcToyUnit*> on;
      double cap = 0.0;
      for (int i = 0; i < n; ++i)
        if (u[i][t]) {
          on.push_back(&toy.units[i]);
          cap += toy.units[i].p_max;
        }
      // hot spare: committed headroom covers rho * demand given balance
      if (cap < (1.0 + toy.reserve_rho) * toy.load[t] - 1e-9) {
        ok = false;
        break;
      }
      std::vector<double> p;
      double c = 0.0;
      if (!dispatch_slot(on, toy.load[t], p, &c)) {
        ok = false;
        break;
      }
      cost += c;
    }
    if (!ok) continue;

    if (cost < best.objective) {
      best.feasible = true;
      best.objective = cost;
      best.schedule = u;
    }
  }
  return best;
}

GasOracleResult grid_search_gas(const GasToy& toy, int grid_points, double balance_tol) {
  const int n = static_cast<int>(toy.nodes.size());
  if (n > 3) throw InputError("gas oracle supports at most 3 nodes");
  if (grid_points < 2) throw InputError("gas oracle needs at least 2 grid points");

  GasOracleResult best;
  best.feasible = false;
  best.objective = kInf;

  std::vector<int> idx(n, 0);
  std::vector<double> pi(n), flow(toy.pipes.size()), source(n);
  auto pi_at = [&](int node, int k) {
    const auto& nd = toy.nodes[node];
    return nd.pi_lo + (nd.pi_hi - nd.pi_lo) * k / (grid_points - 1);
  };

  long long total = 1;
  for (int i = 0; i < n; ++i) total *= grid_points;
  for (long long step = 0; step < total; ++step) {
    long long rem = step;
    for (int i = 0; i < n; ++i) {
      idx[i] = static_cast<int>(rem % grid_points);
      rem /= grid_points;
    }
    for (int i = 0; i < n; ++i) pi[i] = pi_at(i, idx[i]);

    // Weymouth equality: sign(f) f^2 = C^2 (pi_m - pi_n)
    for (std::size_t e = 0; e < toy.pipes.size(); ++e) {
      const auto& pe = toy.pipes[e];
      double dpi = pi[pe.from] - pi[pe.to];
      double mag = pe.c * std::sqrt(std::fabs(dpi));
      flow[e] = (dpi >= 0) ? mag : -mag;
    }
    bool ok = true;
    double obj = 0.0;
    for (int m = 0; m < n && ok; ++m) {
      double out = 0.0, in = 0.0;
      for (std::size_t e = 0; e < toy.pipes.size(); ++e) {
        if (toy.pipes[e].from == m) out += flow[e];
        if (toy.pipes[e].to == m) in += flow[e];
      }
      double s = toy.nodes[m].demand + out - in;
      if (s < toy.nodes[m].s_lo - balance_tol || s > toy.nodes[m].s_hi + balance_tol) {
        ok = false;
        break;
      }
      source[m] = s;
      obj += toy.gas_price * s;
    }
    if (!ok) continue;
    if (obj < best.objective) {
      best.feasible = true;
      best.objective = obj;
      best.pi = pi;
      best.flow = flow;
      best.source = source;
    }
  }
  if (!best.feasible)
    best.message = "no feasible grid point: resolution too coarse or instance infeasible";
  return best;
}

double mccormick_min(int direction, double pi_m, double pi_n, double pi_m_lo, double pi_m_hi,
                     double pi_n_lo, double pi_n_hi) {
  if (direction != 1 && direction != -1)
    throw InputError("mccormick_min: direction must be +1 or -1");
  const double d = direction;
  const double lo = pi_m_lo - pi_n_hi;  // lower bound of pi_m - pi_n over the boxes
  const double hi = pi_m_hi - pi_n_lo;  // upper bound
  const double w = pi_m - pi_n;
  double r1 = -w + (d + 1.0) * lo;
  double r2 = w + (d - 1.0) * hi;
  double r3 = -w + (d + 1.0) * hi;
  double r4 = w + (d - 1.0) * lo;
  return std::max({r1, r2, r3, r4});
}

}  // namespace ies::oracle
