#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ies/common.hpp"

namespace ies::conic {

enum class VarKind { Continuous, Binary };
enum class Sense { LE, GE, EQ };

struct LinTerm {
  int var;
  double coef;
};

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lo = -kInf;
  double hi = kInf;
};

struct LinearConstraint {
  std::string name;
  Sense sense = Sense::LE;
  double rhs = 0.0;
  std::vector<LinTerm> terms;
};

/// ||A x + b||_2 <= c^T x + d
struct SocConstraint {
  std::string name;
  std::vector<std::vector<LinTerm>> norm_rows;
  std::vector<double> norm_offsets;
  std::vector<LinTerm> rhs_terms;
  double rhs_offset = 0.0;
};

/// Solver-facing intermediate representation: variables, linear rows, cones
/// and a linear objective over epigraph variables.
class ConicProgram {
public:
  int add_var(std::string name, VarKind kind, double lo, double hi);
  int add_continuous(std::string name, double lo, double hi) {
    return add_var(std::move(name), VarKind::Continuous, lo, hi);
  }
  int add_binary(std::string name) { return add_var(std::move(name), VarKind::Binary, 0.0, 1.0); }

  void add_linear(std::string name, Sense sense, double rhs, std::vector<LinTerm> terms);
  void add_soc(SocConstraint soc);
  void add_objective_term(int var, double coef);
  void add_objective_constant(double c) { obj_constant_ += c; }

  /// Marks two binaries as complementary (a + b = 1); also emits the row.
  /// Branch and bound treats the pair as one logical decision.
  void add_complement_pair(int a, int b);

  const std::vector<Variable>& vars() const { return vars_; }
  std::vector<Variable>& vars() { return vars_; }
  const std::vector<LinearConstraint>& linear() const { return lin_; }
  const std::vector<SocConstraint>& socs() const { return socs_; }
  const std::vector<LinTerm>& objective() const { return obj_; }
  double objective_constant() const { return obj_constant_; }
  const std::vector<std::pair<int, int>>& complement_pairs() const { return pairs_; }
  std::vector<int> binary_vars() const;

  double objective_value(std::span<const double> x) const;

  struct Violation {
    std::string what;
    double amount;
  };
  /// All constraint violations beyond tol at the point x (bounds, linear
  /// rows, cones; binaries must sit within int_tol of 0/1).
  std::vector<Violation> check_point(std::span<const double> x, double tol,
                                     double int_tol = 1e-6) const;

  /// Structural validation: every referenced variable exists, binaries have
  /// [0,1] bounds, objective references declared variables. Throws SolverError.
  void validate() const;

  /// Plain-text interchange dump, one variable/constraint per line.
  /// The format is documented in docs/format.md.
  void write_text(std::ostream& os) const;

private:
  std::vector<Variable> vars_;
  std::vector<LinearConstraint> lin_;
  std::vector<SocConstraint> socs_;
  std::vector<LinTerm> obj_;
  double obj_constant_ = 0.0;
  std::vector<std::pair<int, int>> pairs_;
};

}  // namespace ies::conic
