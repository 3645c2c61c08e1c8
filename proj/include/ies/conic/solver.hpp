#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ies/conic/ipm.hpp"
#include "ies/conic/program.hpp"

namespace ies::conic {

enum class SolveStatus {
  Optimal,
  Infeasible,
  Unbounded,
  GapLimit,
  NodeLimit,
  TimeLimit,
  NumericalFailure,
};

const char* to_string(SolveStatus s);

struct SolveOptions {
  double rel_gap_tol = 1e-4;
  double feas_tol = 1e-6;
  double int_tol = 1e-6;
  long long max_nodes = 2'000'000;
  double time_limit_s = kInf;
  double accept_gap = -1.0;  // <0: same as rel_gap_tol
  enum class Branching { MostFractional, PseudoCost };
  enum class NodeOrder { BestFirst, DepthFirst };
  Branching branching = Branching::MostFractional;
  NodeOrder node_order = NodeOrder::BestFirst;
  int workers = 1;
  int heur_every = 16;  // cadence of the round-and-fix incumbent heuristic
  IpmOptions ipm;
  bool verbose = false;
};

struct SolveResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  std::vector<double> x;  // incumbent / relaxation point, full variable space
  double objective = kInf;
  double bound = -kInf;
  long long nodes = 0;
  long long ipm_iterations = 0;
  std::vector<double> cone_slacks;  // rhs - ||.|| per SOC constraint at x
  std::string message;

  double gap() const {
    if (objective == kInf || bound == -kInf) return kInf;
    return (objective - bound) / std::max(1.0, std::fabs(objective));
  }
};

/// Given the relaxed point, produce a feasible completion with integral
/// binaries (or nothing). The solver re-verifies any candidate against the
/// program before accepting it as an incumbent.
using RepairCallback = std::function<std::optional<std::vector<double>>(
    const ConicProgram&, const std::vector<double>&)>;

/// Continuous relaxation: binaries become boxes inside [0,1].
SolveResult solve_relaxation(const ConicProgram& prog, const SolveOptions& opt = {});

/// Branch and bound over binaries (complement pairs branch as one decision).
SolveResult branch_and_bound(const ConicProgram& prog, const SolveOptions& opt = {},
                             const RepairCallback& repair = nullptr);

/// fcost >= a P^2 + b P + c u as the cone ||(2 sqrt(a) P, t-1)|| <= t+1 with
/// t = fcost - b P - c u; degenerates to a linear row when a == 0.
void encode_quadratic_epigraph(ConicProgram& prog, double a, double b, double c, int p_var,
                               int u_var, int fcost_var, const std::string& name);

}  // namespace ies::conic
