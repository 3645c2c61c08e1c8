#pragma once

#include <vector>

namespace ies::conic {

/// Sparse LDL^T factorization of a symmetric quasi-definite matrix, given in
/// upper-triangular CSC form (column j holds row indices i <= j, unsorted,
/// duplicates summed). A fill-reducing permutation is computed once in
/// analyze(); factor() refreshes values with the fixed pattern, applying
/// dynamic regularization so pivots keep their expected sign.
class LdlSolver {
public:
  // Pattern-only analysis. expected_sign[i] is +1 or -1 per row/column.
  void analyze(int n, const std::vector<int>& cp, const std::vector<int>& ri,
               const std::vector<int>& expected_sign);

  // Numeric factorization; vx matches the (cp, ri) pattern given to analyze().
  // Returns false only on a structural breakdown (never expected).
  bool factor(const std::vector<double>& vx);

  // In-place solve of K x = b using the most recent factorization.
  void solve(std::vector<double>& b) const;

  int dim() const { return n_; }
  long long l_nnz() const { return static_cast<long long>(li_.size()); }
  double dynamic_reg() const { return dyn_reg_; }
  void set_dynamic_reg(double r) { dyn_reg_ = r; }

private:
  int n_ = 0;
  double dyn_reg_ = 1e-12;
  std::vector<int> perm_, iperm_;
  std::vector<int> sign_;              // expected pivot signs, permuted
  std::vector<int> pcp_, pri_;         // permuted upper CSC pattern
  std::vector<int> entry_map_;         // original entry -> permuted slot
  std::vector<double> pvx_;            // permuted values
  std::vector<int> parent_, lnz_, lp_; // etree and column counts/pointers
  std::vector<int> li_;
  std::vector<double> lx_, d_;
  // scratch
  mutable std::vector<double> work_;
  std::vector<double> y_;
  std::vector<int> flag_, pattern_, stack_, lhead_;
};

}  // namespace ies::conic
