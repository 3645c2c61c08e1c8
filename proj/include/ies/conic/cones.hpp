#pragma once

#include <span>
#include <vector>

namespace ies::conic {

/// Layout of the cone K = R+^l x SOC(q_1) x ... x SOC(q_k).
struct ConeLayout {
  int nonneg = 0;
  std::vector<int> soc_dims;

  int total() const {
    int m = nonneg;
    for (int q : soc_dims) m += q;
    return m;
  }
  // barrier degree: one per nonneg coordinate, one per second-order cone
  int degree() const { return nonneg + static_cast<int>(soc_dims.size()); }
};

/// Nesterov-Todd scaling point for the current (s, z) pair; W z = W^{-1} s.
struct NtScaling {
  std::vector<double> w_lp;  // per nonneg coordinate, W_ii = w_lp[i]
  struct SocBlock {
    double eta = 1.0;
    std::vector<double> wbar;  // normalized scaling point, wbar'J wbar = 1
  };
  std::vector<SocBlock> socs;

  void set_identity(const ConeLayout& k);
};

// All vector arguments are laid out per ConeLayout (nonneg first, then cones).
bool in_cone_interior(const ConeLayout& k, std::span<const double> v);
void unit_element(const ConeLayout& k, std::span<double> e);

// false if s or z is not strictly interior (scaling undefined)
bool compute_nt_scaling(const ConeLayout& k, std::span<const double> s,
                        std::span<const double> z, NtScaling& w,
                        std::span<double> lambda);

void mul_w(const ConeLayout& k, const NtScaling& w, std::span<const double> in,
           std::span<double> out);
void mul_w_inv(const ConeLayout& k, const NtScaling& w, std::span<const double> in,
               std::span<double> out);

// Dense q x q block of W^2 for SOC cone index c (row-major).
void w2_block(const NtScaling& w, int c, int q, std::vector<double>& block);

// Jordan-algebra product u o v and the solve lambda o x = d.
void jordan_product(const ConeLayout& k, std::span<const double> u,
                    std::span<const double> v, std::span<double> out);
void jordan_solve(const ConeLayout& k, std::span<const double> lambda,
                  std::span<const double> d, std::span<double> out);

// sup { a >= 0 : v + a dv in K }, capped at `cap`.
double step_to_boundary(const ConeLayout& k, std::span<const double> v,
                        std::span<const double> dv, double cap);

}  // namespace ies::conic
