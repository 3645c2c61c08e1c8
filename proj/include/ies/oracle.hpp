#pragma once

#include <string>
#include <vector>

#include "ies/common.hpp"

namespace ies::oracle {

/// Independent brute-force references used by the test suites. These are
/// deliberately written against the raw equations, sharing no code with the
/// production constraint builders, so agreement between the two is evidence.

// --- exhaustive unit commitment ------------------------------------------

struct UcToyUnit {
  double p_min = 0.0, p_max = 0.0;
  double a = 0.0, b = 0.0, c = 0.0;  // fuel tons: a P^2 + b P + c when on
  double coal_price = 1.0;           // $/ton
  double ramp_up = 0.0, ramp_down = 0.0;
  int min_down = 1, min_up = 1;
  double start_cost = 0.0, stop_cost = 0.0;
  bool initial_on = true;
  double initial_output = 0.0;
};

struct UcToy {
  std::vector<UcToyUnit> units;
  std::vector<double> load;  // p.u. per slot
  double reserve_rho = 0.0;
};

struct UcOracleResult {
  bool feasible = false;
  double objective = 0.0;
  std::vector<std::vector<int>> schedule;  // [unit][slot]
  long long patterns_checked = 0;
};

/// Enumerates all 2^(N*T) commitment patterns (limit: 12 binaries), solving
/// each per-slot dispatch by bisection on the marginal price. Requires
/// ramp limits weaker than the output range so slot dispatches decouple.
UcOracleResult enumerate_uc(const UcToy& toy);

// --- discretized Weymouth search -----------------------------------------

struct GasToyNode {
  double pi_lo = 0.0, pi_hi = 0.0;  // pressure-square box, bar^2
  double s_lo = 0.0, s_hi = 0.0;    // source bounds, m3/h
  double demand = 0.0;              // m3/h
};

struct GasToyPipe {
  int from = 0, to = 0;
  double c = 1.0;
};

struct GasToy {
  std::vector<GasToyNode> nodes;  // at most 3
  std::vector<GasToyPipe> pipes;
  double gas_price = 1.0;  // $/m3 on total source injection
};

struct GasOracleResult {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> pi, source, flow;  // flow signed along pipe orientation
  std::string message;
};

/// Grid search over pressure squares with exact Weymouth equality
/// sign(f) f^2 = C^2 (pi_m - pi_n) at each grid point. balance_tol relaxes
/// the source bounds to absorb discretization error.
GasOracleResult grid_search_gas(const GasToy& toy, int grid_points, double balance_tol);

// --- McCormick envelope minimum ------------------------------------------

/// Minimal lambda subject to the four direction-aware envelope inequalities,
/// with the direction indicator fixed to +1 or -1 and given pressure boxes.
double mccormick_min(int direction, double pi_m, double pi_n, double pi_m_lo, double pi_m_hi,
                     double pi_n_lo, double pi_n_hi);

}  // namespace ies::oracle
