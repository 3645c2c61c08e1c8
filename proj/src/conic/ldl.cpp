#include "ies/conic/ldl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ies/common.hpp"
#include "ies/conic/ordering.hpp"

namespace ies::conic {

void LdlSolver::analyze(int n, const std::vector<int>& cp, const std::vector<int>& ri,
                        const std::vector<int>& expected_sign) {
  n_ = n;

  // adjacency (off-diagonal, both directions) for the ordering
  std::vector<int> deg(n, 0);
  for (int j = 0; j < n; ++j) {
    for (int p = cp[j]; p < cp[j + 1]; ++p) {
      int i = ri[p];
      if (i != j) {
        deg[i]++;
        deg[j]++;
      }
    }
  }
  std::vector<int> adj_ptr(n + 1, 0);
  std::partial_sum(deg.begin(), deg.end(), adj_ptr.begin() + 1);
  std::vector<int> adj_idx(adj_ptr[n]);
  std::vector<int> next(adj_ptr.begin(), adj_ptr.end() - 1);
  for (int j = 0; j < n; ++j) {
    for (int p = cp[j]; p < cp[j + 1]; ++p) {
      int i = ri[p];
      if (i != j) {
        adj_idx[next[i]++] = j;
        adj_idx[next[j]++] = i;
      }
    }
  }
  perm_ = min_degree_order(n, adj_ptr, adj_idx);
  iperm_.assign(n, 0);
  for (int k = 0; k < n; ++k) iperm_[perm_[k]] = k;

  sign_.assign(n, 1);
  for (int k = 0; k < n; ++k) sign_[k] = expected_sign[perm_[k]];

  // permuted upper pattern + entry map
  const int nz = cp[n];
  entry_map_.assign(nz, 0);
  std::vector<int> count(n + 1, 0);
  std::vector<int> prow(nz), pcol(nz);
  for (int j = 0; j < n; ++j) {
    for (int p = cp[j]; p < cp[j + 1]; ++p) {
      int pi = iperm_[ri[p]], pj = iperm_[j];
      if (pi > pj) std::swap(pi, pj);
      prow[p] = pi;
      pcol[p] = pj;
      count[pj + 1]++;
    }
  }
  pcp_.assign(n + 1, 0);
  std::partial_sum(count.begin(), count.end(), pcp_.begin());
  pri_.assign(nz, 0);
  next.assign(pcp_.begin(), pcp_.end() - 1);
  for (int p = 0; p < nz; ++p) {
    int slot = next[pcol[p]]++;
    pri_[slot] = prow[p];
    entry_map_[p] = slot;
  }
  pvx_.assign(nz, 0.0);

  // elimination tree and column counts (LDL symbolic pass)
  parent_.assign(n, -1);
  lnz_.assign(n, 0);
  flag_.assign(n, -1);
  for (int k = 0; k < n; ++k) {
    parent_[k] = -1;
    flag_[k] = k;
    for (int p = pcp_[k]; p < pcp_[k + 1]; ++p) {
      int i = pri_[p];
      while (i < k && flag_[i] != k) {
        if (parent_[i] == -1) parent_[i] = k;
        lnz_[i]++;
        flag_[i] = k;
        i = parent_[i];
      }
    }
  }
  lp_.assign(n + 1, 0);
  for (int k = 0; k < n; ++k) lp_[k + 1] = lp_[k] + lnz_[k];
  li_.assign(lp_[n], 0);
  lx_.assign(lp_[n], 0.0);
  d_.assign(n, 0.0);
  y_.assign(n, 0.0);
  pattern_.assign(n, 0);
  stack_.assign(n, 0);
  lhead_.assign(n, 0);
  work_.assign(n, 0.0);
}

bool LdlSolver::factor(const std::vector<double>& vx) {
  const int n = n_;
  for (std::size_t p = 0; p < vx.size(); ++p) pvx_[entry_map_[p]] = 0.0;
  for (std::size_t p = 0; p < vx.size(); ++p) pvx_[entry_map_[p]] += vx[p];

  std::fill(flag_.begin(), flag_.end(), -1);
  std::fill(y_.begin(), y_.end(), 0.0);
  for (int k = 0; k < n; ++k) lhead_[k] = lp_[k];

  for (int k = 0; k < n; ++k) {
    int top = n;
    flag_[k] = k;
    for (int p = pcp_[k]; p < pcp_[k + 1]; ++p) {
      int i = pri_[p];
      y_[i] += pvx_[p];
      int len = 0;
      while (i < k && flag_[i] != k) {
        stack_[len++] = i;
        flag_[i] = k;
        i = parent_[i];
      }
      while (len > 0) pattern_[--top] = stack_[--len];
    }
    double dk = y_[k];
    y_[k] = 0.0;
    for (; top < n; ++top) {
      int i = pattern_[top];
      double yi = y_[i];
      y_[i] = 0.0;
      int p2 = lhead_[i];
      for (int p = lp_[i]; p < p2; ++p) y_[li_[p]] -= lx_[p] * yi;
      double lki = yi / d_[i];
      dk -= lki * yi;
      li_[p2] = k;
      lx_[p2] = lki;
      lhead_[i]++;
    }
    // dynamic regularization: keep the quasi-definite pivot sign
    if (sign_[k] > 0) {
      if (dk < dyn_reg_) dk = dyn_reg_;
    } else {
      if (dk > -dyn_reg_) dk = -dyn_reg_;
    }
    d_[k] = dk;
  }
  return true;
}

void LdlSolver::solve(std::vector<double>& b) const {
  const int n = n_;
  auto& w = work_;
  for (int k = 0; k < n; ++k) w[k] = b[perm_[k]];
  for (int k = 0; k < n; ++k) {
    double wk = w[k];
    if (wk != 0.0) {
      for (int p = lp_[k]; p < lp_[k + 1]; ++p) w[li_[p]] -= lx_[p] * wk;
    }
  }
  for (int k = 0; k < n; ++k) w[k] /= d_[k];
  for (int k = n - 1; k >= 0; --k) {
    double acc = w[k];
    for (int p = lp_[k]; p < lp_[k + 1]; ++p) acc -= lx_[p] * w[li_[p]];
    w[k] = acc;
  }
  for (int k = 0; k < n; ++k) b[perm_[k]] = w[k];
}

}  // namespace ies::conic
