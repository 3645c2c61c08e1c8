#pragma once

#include <string>
#include <vector>

#include "ies/conic/cones.hpp"
#include "ies/conic/sparse.hpp"

namespace ies::conic {

/// Conic standard form:  min c'x  s.t.  A x = b,  G x + s = h,  s in K.
struct StdProblem {
  int n = 0;
  CsMat A, G;    // CSR
  CsMat At, Gt;  // transposes, for gather-style products
  std::vector<double> b, h, c;
  ConeLayout cone;

  void finalize() {
    At = transpose(A);
    Gt = transpose(G);
  }
};

struct IpmOptions {
  double feastol = 1e-8;
  double abstol = 1e-9;
  double reltol = 1e-9;
  int max_iter = 150;
  double static_reg = 1e-7;
  int refine_rounds = 6;
  bool equilibrate = true;
  bool verbose = false;
};

enum class IpmStatus {
  Optimal,
  PrimalInfeasible,
  DualInfeasible,
  IterLimit,
  NumericalFailure,
};

struct IpmResult {
  IpmStatus status = IpmStatus::NumericalFailure;
  std::vector<double> x, y, z, s;  // de-homogenized at Optimal; certificates otherwise
  double pcost = 0.0;
  double dcost = 0.0;  // valid lower bound on the optimum (within dres)
  double gap = 0.0, relgap = 0.0, pres = 0.0, dres = 0.0;
  // residuals of the de-homogenized point measured in original units,
  // relative to each row's own scale (basis for bound safety margins)
  double pres_orig = 0.0, dres_orig = 0.0;
  int iters = 0;
  std::string message;
};

/// Homogeneous self-dual primal-dual interior point method with
/// Nesterov-Todd scaling and Mehrotra predictor-corrector steps.
IpmResult ipm_solve(const StdProblem& prob, const IpmOptions& opt);

}  // namespace ies::conic
