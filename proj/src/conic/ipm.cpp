#include "ies/conic/ipm.hpp"

#include <algorithm>
#include <cmath>

#include "ies/common.hpp"
#include "ies/conic/ldl.hpp"

namespace ies::conic {

namespace {

// ---------------------------------------------------------------------------
// Ruiz equilibration. Row scales are uniform across each SOC block so the
// cone geometry survives; columns are scaled independently.
// ---------------------------------------------------------------------------
struct Equilibration {
  std::vector<double> dra, drg, dc;  // row scales for A, G; column scales
  double cscale = 1.0;
  double rhs_scale = 1.0;  // primal scale: cones are invariant under it
};

void scale_problem(StdProblem& p, Equilibration& eq, int rounds) {
  const int n = p.n, np = p.A.rows, m = p.G.rows;
  eq.dra.assign(np, 1.0);
  eq.drg.assign(m, 1.0);
  eq.dc.assign(n, 1.0);

  // map each G row to its cone block (-1 for the nonneg rows)
  std::vector<int> block_of(m, -1);
  {
    int off = p.cone.nonneg;
    for (std::size_t c = 0; c < p.cone.soc_dims.size(); ++c) {
      for (int i = 0; i < p.cone.soc_dims[c]; ++i) block_of[off + i] = static_cast<int>(c);
      off += p.cone.soc_dims[c];
    }
  }

  std::vector<double> rowmax_a(np), rowmax_g(m), colmax(n), blockmax(p.cone.soc_dims.size());
  for (int round = 0; round < rounds; ++round) {
    std::fill(rowmax_a.begin(), rowmax_a.end(), 0.0);
    std::fill(rowmax_g.begin(), rowmax_g.end(), 0.0);
    std::fill(colmax.begin(), colmax.end(), 0.0);
    std::fill(blockmax.begin(), blockmax.end(), 0.0);
    for (int i = 0; i < np; ++i)
      for (int q = p.A.rp[i]; q < p.A.rp[i + 1]; ++q) {
        double v = std::fabs(p.A.vx[q]);
        rowmax_a[i] = std::max(rowmax_a[i], v);
        colmax[p.A.ci[q]] = std::max(colmax[p.A.ci[q]], v);
      }
    for (int i = 0; i < m; ++i)
      for (int q = p.G.rp[i]; q < p.G.rp[i + 1]; ++q) {
        double v = std::fabs(p.G.vx[q]);
        rowmax_g[i] = std::max(rowmax_g[i], v);
        colmax[p.G.ci[q]] = std::max(colmax[p.G.ci[q]], v);
      }
    // right-hand sides join the row norms: rows stated in large physical
    // units must not dominate the de-scaled residuals
    for (int i = 0; i < np; ++i) rowmax_a[i] = std::max(rowmax_a[i], std::fabs(p.b[i]));
    for (int i = 0; i < m; ++i) rowmax_g[i] = std::max(rowmax_g[i], std::fabs(p.h[i]));
    for (int i = 0; i < m; ++i)
      if (block_of[i] >= 0) blockmax[block_of[i]] = std::max(blockmax[block_of[i]], rowmax_g[i]);
    for (int i = 0; i < m; ++i)
      if (block_of[i] >= 0) rowmax_g[i] = blockmax[block_of[i]];

    auto step = [](double v) { return v > 0.0 ? 1.0 / std::sqrt(v) : 1.0; };
    for (int i = 0; i < np; ++i) {
      double f = step(rowmax_a[i]);
      eq.dra[i] *= f;
      for (int q = p.A.rp[i]; q < p.A.rp[i + 1]; ++q) p.A.vx[q] *= f;
      p.b[i] *= f;
    }
    for (int i = 0; i < m; ++i) {
      double f = step(rowmax_g[i]);
      eq.drg[i] *= f;
      for (int q = p.G.rp[i]; q < p.G.rp[i + 1]; ++q) p.G.vx[q] *= f;
      p.h[i] *= f;
    }
    // column pass (gather over transposes is not built yet; scan rows again)
    std::vector<double> colf(n, 1.0);
    for (int j = 0; j < n; ++j) colf[j] = step(colmax[j]);
    for (int i = 0; i < np; ++i)
      for (int q = p.A.rp[i]; q < p.A.rp[i + 1]; ++q) p.A.vx[q] *= colf[p.A.ci[q]];
    for (int i = 0; i < m; ++i)
      for (int q = p.G.rp[i]; q < p.G.rp[i + 1]; ++q) p.G.vx[q] *= colf[p.G.ci[q]];
    for (int j = 0; j < n; ++j) {
      eq.dc[j] *= colf[j];
      p.c[j] *= colf[j];
    }
  }
  double cn = norm_inf(p.c);
  eq.cscale = std::max(1.0, cn);
  for (int j = 0; j < n; ++j) p.c[j] /= eq.cscale;

  // keep the homogenizing variable near 1 at the solution
  eq.rhs_scale = std::max({1.0, norm_inf(p.b), norm_inf(p.h)});
  for (auto& v : p.b) v /= eq.rhs_scale;
  for (auto& v : p.h) v /= eq.rhs_scale;
}

// ---------------------------------------------------------------------------
// KKT system
//   [ d_f   A'   Gk' ] [dx]   [r1 + fold(r3)]
//   [ A     0    0   ] [dy] = [r2]
//   [ Gk    0   -W^2 ] [dz]   [r3_keep]
// where single-entry nonneg rows of G have been eliminated into the x-block
// diagonal d_f (exact Schur elimination, no fill).
// ---------------------------------------------------------------------------
class KktSolver {
public:
  void init(const StdProblem& p, double static_reg) {
    prob_ = &p;
    reg_ = static_reg;
    const int n = p.n, np = p.A.rows, m = p.G.rows;
    const int l = p.cone.nonneg;

    fold_row_.assign(m, 0);
    fold_col_.assign(m, -1);
    fold_coef_.assign(m, 0.0);
    keep_pos_.assign(m, -1);
    int nkeep = 0;
    for (int r = 0; r < m; ++r) {
      int nnz = p.G.rp[r + 1] - p.G.rp[r];
      if (r < l && nnz == 1) {
        fold_row_[r] = 1;
        fold_col_[r] = p.G.ci[p.G.rp[r]];
        fold_coef_[r] = p.G.vx[p.G.rp[r]];
      } else {
        keep_pos_[r] = nkeep++;
      }
    }
    nkeep_ = nkeep;
    dim_ = n + np + nkeep;

    // entry list: (row <= col, source kind)
    std::vector<Entry> entries;
    auto push = [&](int r, int c, int kind, double v, int a0 = 0, int a1 = 0, int a2 = 0) {
      if (r > c) std::swap(r, c);
      entries.push_back({r, c, kind, v, a0, a1, a2});
    };

    for (int j = 0; j < n; ++j) push(j, j, 1, reg_);  // x diagonal regularization
    fold_of_col_.assign(n, {});
    for (int r = 0; r < m; ++r)
      if (fold_row_[r]) {
        fold_of_col_[fold_col_[r]].push_back(r);
        push(fold_col_[r], fold_col_[r], 4, 0.0, r);
      }
    for (int i = 0; i < np; ++i) {
      push(n + i, n + i, 1, -reg_);
      for (int q = p.A.rp[i]; q < p.A.rp[i + 1]; ++q) push(p.A.ci[q], n + i, 0, p.A.vx[q]);
    }
    for (int r = 0; r < m; ++r) {
      if (fold_row_[r]) continue;
      int zr = n + np + keep_pos_[r];
      push(zr, zr, 1, -reg_);
      for (int q = p.G.rp[r]; q < p.G.rp[r + 1]; ++q) push(p.G.ci[q], zr, 0, p.G.vx[q]);
      if (r < l) push(zr, zr, 2, 0.0, r);
    }
    {
      int off = l;
      for (std::size_t c = 0; c < p.cone.soc_dims.size(); ++c) {
        const int q = p.cone.soc_dims[c];
        for (int a = 0; a < q; ++a)
          for (int bmem = a; bmem < q; ++bmem) {
            int ra = n + np + keep_pos_[off + a];
            int rb = n + np + keep_pos_[off + bmem];
            push(ra, rb, 3, 0.0, static_cast<int>(c), a, bmem);
          }
        off += q;
      }
    }

    // unique slots, column-major upper CSC
    std::vector<int> order(entries.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (entries[a].c != entries[b].c) return entries[a].c < entries[b].c;
      return entries[a].r < entries[b].r;
    });
    cp_.assign(dim_ + 1, 0);
    ri_.clear();
    src_slot_.assign(entries.size(), -1);
    int prev_c = -1, prev_r = -1;
    for (int oi : order) {
      const auto& e = entries[oi];
      if (e.c != prev_c || e.r != prev_r) {
        ri_.push_back(e.r);
        cp_[e.c + 1]++;
        prev_c = e.c;
        prev_r = e.r;
      }
      src_slot_[oi] = static_cast<int>(ri_.size()) - 1;
    }
    for (int j = 0; j < dim_; ++j) cp_[j + 1] += cp_[j];
    entries_ = std::move(entries);

    vreg_.assign(ri_.size(), 0.0);
    vraw_.assign(ri_.size(), 0.0);

    std::vector<int> esign(dim_, 1);
    for (int i = 0; i < np + nkeep; ++i) esign[n + i] = -1;
    ldl_.analyze(dim_, cp_, ri_, esign);

    rhs_.assign(dim_, 0.0);
    tmp_.assign(dim_, 0.0);
    resid_.assign(dim_, 0.0);
  }

  bool update(const NtScaling& w) {
    w_ = &w;
    std::fill(vreg_.begin(), vreg_.end(), 0.0);
    std::fill(vraw_.begin(), vraw_.end(), 0.0);
    std::vector<double> block;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      double v = 0.0;
      bool raw = true;
      switch (e.kind) {
        case 0: v = e.v; break;
        case 1: v = e.v; raw = false; break;
        case 2: {
          double wi = w.w_lp[e.a0];
          v = -(wi * wi);
          break;
        }
        case 3: {
          w2_block(w, e.a0, prob_->cone.soc_dims[e.a0], block);
          v = -block[static_cast<std::size_t>(e.a1) * prob_->cone.soc_dims[e.a0] + e.a2];
          break;
        }
        case 4: {
          int r = e.a0;
          double wi = w.w_lp[r];
          double g = fold_coef_[r];
          v = g * g / (wi * wi);
          break;
        }
      }
      vreg_[src_slot_[i]] += v;
      if (raw) vraw_[src_slot_[i]] += v;
    }
    return ldl_.factor(vreg_);
  }

  // Solves the full 3-block system including folded rows; dz has size m.
  void solve(std::span<const double> r1, std::span<const double> r2,
             std::span<const double> r3, std::vector<double>& dx, std::vector<double>& dy,
             std::vector<double>& dz, int refine_rounds) const {
    const StdProblem& p = *prob_;
    const int n = p.n, np = p.A.rows, m = p.G.rows;
    auto& rhs = rhs_;
    for (int j = 0; j < n; ++j) rhs[j] = r1[j];
    for (int r = 0; r < m; ++r)
      if (fold_row_[r]) {
        double w2 = w_->w_lp[r] * w_->w_lp[r];
        rhs[fold_col_[r]] += fold_coef_[r] * r3[r] / w2;
      }
    for (int i = 0; i < np; ++i) rhs[n + i] = r2[i];
    for (int r = 0; r < m; ++r)
      if (!fold_row_[r]) rhs[n + np + keep_pos_[r]] = r3[r];

    tmp_ = rhs;
    ldl_.solve(tmp_);
    double rhs_norm = 0.0;
    for (int i = 0; i < dim_; ++i) rhs_norm = std::max(rhs_norm, std::fabs(rhs[i]));
    double prev_rn = kInf;
    for (int round = 0; round < refine_rounds; ++round) {
      sym_mul(vraw_, tmp_, resid_);
      double rn = 0.0;
      for (int i = 0; i < dim_; ++i) {
        resid_[i] = rhs[i] - resid_[i];
        rn = std::max(rn, std::fabs(resid_[i]));
      }
      if (!std::isfinite(rn) || rn < 1e-13 * std::max(1.0, rhs_norm) || rn >= prev_rn) break;
      prev_rn = rn;
      ldl_.solve(resid_);
      for (int i = 0; i < dim_; ++i) tmp_[i] += resid_[i];
    }

    dx.assign(tmp_.begin(), tmp_.begin() + n);
    dy.assign(tmp_.begin() + n, tmp_.begin() + n + np);
    dz.assign(m, 0.0);
    for (int r = 0; r < m; ++r) {
      if (fold_row_[r]) {
        double w2 = w_->w_lp[r] * w_->w_lp[r];
        dz[r] = (fold_coef_[r] * dx[fold_col_[r]] - r3[r]) / w2;
      } else {
        dz[r] = tmp_[n + np + keep_pos_[r]];
      }
    }
  }

private:
  void sym_mul(const std::vector<double>& vals, const std::vector<double>& x,
               std::vector<double>& y) const {
    std::fill(y.begin(), y.end(), 0.0);
    for (int j = 0; j < dim_; ++j) {
      double xj = x[j];
      for (int q = cp_[j]; q < cp_[j + 1]; ++q) {
        int i = ri_[q];
        double v = vals[q];
        y[i] += v * xj;
        if (i != j) y[j] += v * x[i];
      }
    }
  }

  struct Entry {
    int r, c;
    int kind;  // 0 static both, 1 static reg-only, 2 lp w2, 3 soc w2, 4 fold diag
    double v;
    int a0 = 0, a1 = 0, a2 = 0;
  };

  const StdProblem* prob_ = nullptr;
  const NtScaling* w_ = nullptr;
  double reg_ = 1e-8;
  int dim_ = 0, nkeep_ = 0;
  std::vector<char> fold_row_;
  std::vector<int> fold_col_, keep_pos_;
  std::vector<double> fold_coef_;
  std::vector<std::vector<int>> fold_of_col_;
  std::vector<Entry> entries_;
  std::vector<int> src_slot_;
  std::vector<int> cp_, ri_;
  std::vector<double> vreg_, vraw_;
  LdlSolver ldl_;
  mutable std::vector<double> rhs_, tmp_, resid_;
};

}  // namespace

IpmResult ipm_solve(const StdProblem& prob_in, const IpmOptions& opt) {
  StdProblem p = prob_in;  // scaled working copy
  Equilibration eq;
  if (opt.equilibrate) {
    scale_problem(p, eq, 8);
  } else {
    eq.dra.assign(p.A.rows, 1.0);
    eq.drg.assign(p.G.rows, 1.0);
    eq.dc.assign(p.n, 1.0);
    eq.rhs_scale = std::max({1.0, norm_inf(p.b), norm_inf(p.h)});
    for (auto& v : p.b) v /= eq.rhs_scale;
    for (auto& v : p.h) v /= eq.rhs_scale;
  }
  p.finalize();

  const int n = p.n, np = p.A.rows, m = p.G.rows;
  const ConeLayout& K = p.cone;
  const int nu = K.degree() + 1;

  IpmResult res;
  res.x.assign(n, 0.0);
  res.y.assign(np, 0.0);
  res.z.assign(m, 0.0);
  res.s.assign(m, 0.0);

  KktSolver kkt;
  kkt.init(p, opt.static_reg);

  std::vector<double> x(n, 0.0), y(np, 0.0), z(m, 0.0), s(m, 0.0);
  unit_element(K, s);
  unit_element(K, z);
  double tau = 1.0, kappa = 1.0;

  std::vector<double> rx(n), ry(np), rz(m);
  std::vector<double> lambda(m), ds(m), dtz(m), e_unit(m);
  unit_element(K, e_unit);
  std::vector<double> u1x, u1y, u1z, u2x, u2y, u2z;
  std::vector<double> dx(n), dy(np), dz(m), dsv(m);
  std::vector<double> dx_a(n), dy_a(np), dz_a(m), ds_a(m);
  std::vector<double> t1(m), t2(m), t3(m), gx(m), aty(n), gtz(n), axv(np);
  NtScaling W;

  const double normb = std::max(1.0, norm2(p.b));
  const double normh = std::max(1.0, norm2(p.h));
  const double normc = std::max(1.0, norm2(p.c));

  // per-row/column factors mapping scaled residuals into original units,
  // relative to each row's own magnitude
  std::vector<double> fac_a(np), fac_g(m), fac_c(n);
  for (int i = 0; i < np; ++i) {
    double borig = p.b[i] * eq.rhs_scale / eq.dra[i];
    fac_a[i] = (eq.rhs_scale / eq.dra[i]) / std::max(1.0, std::fabs(borig));
  }
  for (int r = 0; r < m; ++r) {
    double horig = p.h[r] * eq.rhs_scale / eq.drg[r];
    fac_g[r] = (eq.rhs_scale / eq.drg[r]) / std::max(1.0, std::fabs(horig));
  }
  for (int j = 0; j < n; ++j) {
    double corig = p.c[j] * eq.cscale / eq.dc[j];
    fac_c[j] = (eq.cscale / eq.dc[j]) / std::max(1.0, std::fabs(corig));
  }

  auto dehomogenize = [&](IpmStatus st, const std::string& msg) {
    res.status = st;
    res.message = msg;
    for (int j = 0; j < n; ++j) res.x[j] = eq.rhs_scale * eq.dc[j] * x[j] / tau;
    for (int i = 0; i < np; ++i) res.y[i] = eq.cscale * eq.dra[i] * y[i] / tau;
    for (int r = 0; r < m; ++r) {
      res.z[r] = eq.cscale * eq.drg[r] * z[r] / tau;
      res.s[r] = eq.rhs_scale * s[r] / (eq.drg[r] * tau);
    }
  };

  double best_merit = kInf;
  int small_steps = 0;
  bool stalled = false;
  double mu0 = 0.0, resnorm0 = 0.0;

  for (int iter = 0; iter <= opt.max_iter; ++iter) {
    // residuals
    spmv(p.At, y, rx);
    spmv(p.Gt, z, gtz);
    for (int j = 0; j < n; ++j) rx[j] = -rx[j] - gtz[j] - p.c[j] * tau;
    spmv(p.A, x, axv);
    for (int i = 0; i < np; ++i) ry[i] = axv[i] - p.b[i] * tau;
    spmv(p.G, x, gx);
    for (int r = 0; r < m; ++r) rz[r] = s[r] + gx[r] - p.h[r] * tau;
    double cx = dot(p.c, x), by = dot(p.b, y), hz = dot(p.h, z);
    double rtau = kappa + cx + by + hz;
    double sz = dot(s, z);
    double mu = (sz + tau * kappa) / nu;

    if (!std::isfinite(mu) || !std::isfinite(tau) || !std::isfinite(kappa)) {
      dehomogenize(IpmStatus::NumericalFailure, "non-finite iterate");
      return res;
    }
    double resnorm_hom =
        std::max({norm2(rx), norm2(ry), norm2(rz), std::fabs(rtau)});
    if (iter == 0) {
      mu0 = mu;
      resnorm0 = std::max(resnorm_hom, 1e-12);
    }
    double pcost = cx / tau;
    double dcost = -(by + hz) / tau;
    double pres = std::max(norm2(ry) / normb, norm2(rz) / normh) / tau;
    double dres = (norm2(rx) / normc) / tau;
    double gap_abs = sz / (tau * tau);
    double relgap = gap_abs / std::max(1.0, std::fabs(pcost));

    double pres_orig = 0.0, dres_orig = 0.0;
    for (int i = 0; i < np; ++i)
      pres_orig = std::max(pres_orig, std::fabs(ry[i]) * fac_a[i]);
    for (int r = 0; r < m; ++r)
      pres_orig = std::max(pres_orig, std::fabs(rz[r]) * fac_g[r]);
    for (int j = 0; j < n; ++j) dres_orig = std::max(dres_orig, std::fabs(rx[j]) * fac_c[j]);
    pres_orig /= tau;
    dres_orig /= tau;

    res.pcost = eq.cscale * eq.rhs_scale * pcost;
    res.dcost = eq.cscale * eq.rhs_scale * dcost;
    res.gap = eq.cscale * eq.rhs_scale * gap_abs;
    res.relgap = relgap;
    res.pres = pres;
    res.dres = dres;
    res.pres_orig = pres_orig;
    res.dres_orig = dres_orig;
    res.iters = iter;

    if (opt.verbose) {
      std::fprintf(stderr, "ipm %3d pcost=%+.6e dcost=%+.6e pres=%.2e dres=%.2e gap=%.2e tau=%.2e kap=%.2e\n",
                   iter, res.pcost, res.dcost, pres, dres, gap_abs, tau, kappa);
    }

    if (pres <= opt.feastol && dres <= opt.feastol &&
        (gap_abs <= opt.abstol || relgap <= opt.reltol)) {
      dehomogenize(IpmStatus::Optimal, "optimal");
      return res;
    }

    // infeasibility certificates: accept a Farkas ray when its residual is
    // tiny relative to the ray норм, the objective-side negativity stands
    // well above that noise, and tau has collapsed relative to the ray
    auto primal_infeasible_now = [&]() {
      if (by + hz >= 0) return false;
      double neg = -(by + hz);
      double certres = 0.0;
      for (int j = 0; j < n; ++j) certres = std::max(certres, std::fabs(rx[j] + p.c[j] * tau));
      double raynorm = std::max(norm_inf(y), norm_inf(z));
      if (raynorm <= 0) return false;
      return certres <= opt.feastol * std::max(1.0, raynorm) && neg >= 1e3 * certres &&
             tau <= 1e-6 * std::max(1.0, raynorm);
    };
    auto dual_infeasible_now = [&]() {
      if (cx >= 0) return false;
      double neg = -cx;
      double r1 = norm_inf(axv);
      double r2m = 0.0;
      for (int r = 0; r < m; ++r) r2m = std::max(r2m, std::fabs(gx[r] + s[r]));
      double raynorm = std::max(norm_inf(x), norm_inf(s));
      if (raynorm <= 0) return false;
      double resid = std::max(r1, r2m);
      return resid <= opt.feastol * std::max(1.0, raynorm) && neg >= 1e3 * resid &&
             tau <= 1e-6 * std::max(1.0, raynorm);
    };
    auto declare_primal_infeasible = [&]() {
      double scale = -(by + hz);
      for (int i = 0; i < np; ++i) y[i] /= scale;
      for (int r = 0; r < m; ++r) z[r] /= scale;
      tau = 1.0;  // keep certificates finite in dehomogenize
      dehomogenize(IpmStatus::PrimalInfeasible, "primal infeasible (Farkas certificate)");
    };
    auto declare_dual_infeasible = [&]() {
      double scale = -cx;
      for (int j = 0; j < n; ++j) x[j] /= scale;
      for (int r = 0; r < m; ++r) s[r] /= scale;
      tau = 1.0;
      dehomogenize(IpmStatus::DualInfeasible, "dual infeasible (unbounded ray)");
    };
    if (primal_infeasible_now()) {
      declare_primal_infeasible();
      return res;
    }
    if (dual_infeasible_now()) {
      declare_dual_infeasible();
      return res;
    }

    // reduced-accuracy acceptance: highly degenerate subproblems saturate
    // around 1e-6 scaled residuals; report them optimal with the achieved
    // residuals rather than failing outright
    auto acceptable_reduced = [&]() {
      double ftol = std::max(5e-6, 50 * opt.feastol);
      double gtol = std::max(1e-6, 50 * opt.reltol);
      return pres <= ftol && dres <= ftol && (gap_abs <= 50 * opt.abstol || relgap <= gtol);
    };

    // stall handling: classify before giving up
    if (stalled) {
      if (acceptable_reduced()) {
        dehomogenize(IpmStatus::Optimal, "optimal (reduced accuracy at stall)");
        return res;
      }
      dehomogenize(IpmStatus::NumericalFailure,
                   format_msg("stalled: pres=", pres, " dres=", dres, " gap=", gap_abs,
                              " tau=", tau, " kappa=", kappa));
      return res;
    }

    if (iter == opt.max_iter) {
      if (acceptable_reduced()) {
        dehomogenize(IpmStatus::Optimal, "optimal (reduced accuracy at iteration limit)");
        return res;
      }
      break;
    }

    if (!compute_nt_scaling(K, s, z, W, lambda)) {
      dehomogenize(IpmStatus::NumericalFailure, "iterate left the cone interior");
      return res;
    }
    if (!kkt.update(W)) {
      dehomogenize(IpmStatus::NumericalFailure, "KKT factorization breakdown");
      return res;
    }

    std::vector<double> negc(p.c);
    for (auto& v : negc) v = -v;
    kkt.solve(negc, p.b, p.h, u1x, u1y, u1z, opt.refine_rounds);
    double dot1 = dot(p.c, u1x) + dot(p.b, u1y) + dot(p.h, u1z);

    auto direction = [&](const std::vector<double>& dsx, double dkap, double scale_res,
                         std::vector<double>& ox, std::vector<double>& oy,
                         std::vector<double>& oz, std::vector<double>& os, double& otau,
                         double& okap) {
      // targets: dx = -scale_res*rx, dy = -scale_res*ry, dz = -scale_res*rz,
      //          dtau = -scale_res*rtau, ds = dsx, dkappa = dkap
      jordan_solve(K, lambda, dsx, t1);
      mul_w(K, W, t1, t2);  // W (lambda \ ds)
      for (int r = 0; r < m; ++r) dtz[r] = -scale_res * rz[r] - t2[r];
      std::vector<double> r1(n), r2(np);
      for (int j = 0; j < n; ++j) r1[j] = scale_res * rx[j];
      for (int i = 0; i < np; ++i) r2[i] = -scale_res * ry[i];
      kkt.solve(r1, r2, dtz, u2x, u2y, u2z, opt.refine_rounds);
      double dot2 = dot(p.c, u2x) + dot(p.b, u2y) + dot(p.h, u2z);
      double dtau_num = -scale_res * rtau - dkap / tau - dot2;
      otau = dtau_num / (dot1 - kappa / tau);
      ox = u2x;
      oy = u2y;
      oz = u2z;
      for (int j = 0; j < n; ++j) ox[j] += otau * u1x[j];
      for (int i = 0; i < np; ++i) oy[i] += otau * u1y[i];
      for (int r = 0; r < m; ++r) oz[r] += otau * u1z[r];
      // ds = W(lambda\ds - W dz)
      mul_w(K, W, oz, t3);
      for (int r = 0; r < m; ++r) t3[r] = t1[r] - t3[r];
      mul_w(K, W, t3, os);
      okap = (dkap - kappa * otau) / tau;
    };

    // predictor
    jordan_product(K, lambda, lambda, t3);
    for (int r = 0; r < m; ++r) ds[r] = -t3[r];
    double dtau_a, dkap_a;
    direction(ds, -tau * kappa, 1.0, dx_a, dy_a, dz_a, ds_a, dtau_a, dkap_a);

    double alpha_a = step_to_boundary(K, s, ds_a, 2.0);
    alpha_a = std::min(alpha_a, step_to_boundary(K, z, dz_a, 2.0));
    if (dtau_a < 0.0) alpha_a = std::min(alpha_a, -tau / dtau_a);
    if (dkap_a < 0.0) alpha_a = std::min(alpha_a, -kappa / dkap_a);
    alpha_a = std::min(alpha_a, 1.0);

    double sigma = std::pow(1.0 - alpha_a, 3);
    sigma = std::clamp(sigma, 0.0, 0.9999);

    // corrector with Mehrotra second-order term
    mul_w_inv(K, W, ds_a, t1);
    mul_w(K, W, dz_a, t2);
    jordan_product(K, t1, t2, t3);
    jordan_product(K, lambda, lambda, ds);
    for (int r = 0; r < m; ++r) ds[r] = -ds[r] - t3[r] + sigma * mu * e_unit[r];
    double dkap_c = -tau * kappa - dtau_a * dkap_a + sigma * mu;
    double dtau_c, dkapv;
    direction(ds, dkap_c, 1.0 - sigma, dx, dy, dz, dsv, dtau_c, dkapv);

    double alpha = step_to_boundary(K, s, dsv, 10.0);
    alpha = std::min(alpha, step_to_boundary(K, z, dz, 10.0));
    if (dtau_c < 0.0) alpha = std::min(alpha, -tau / dtau_c);
    if (dkapv < 0.0) alpha = std::min(alpha, -kappa / dkapv);
    alpha = std::min(1.0, 0.99 * alpha);

    // balance guard: complementarity may not collapse far below the
    // (homogeneous) residual progress, or the scaling becomes singular
    {
      auto mu_after = [&](double aa) {
        double acc = (tau + aa * dtau_c) * (kappa + aa * dkapv);
        for (int r = 0; r < m; ++r)
          acc += (s[r] + aa * dsv[r]) * (z[r] + aa * dz[r]);
        return acc / nu;
      };
      for (int shrink = 0; shrink < 30; ++shrink) {
        double res_ratio = (1.0 - alpha * (1.0 - sigma)) * resnorm_hom / resnorm0;
        if (mu_after(alpha) >= res_ratio * mu0 / 100.0) break;
        alpha *= 0.8;
      }
    }

    if (!(alpha > 1e-10) || !std::isfinite(alpha)) {
      if (++small_steps >= 2) {
        stalled = true;  // classified at the top of the next iteration
        continue;
      }
    } else {
      small_steps = 0;
    }

    for (int j = 0; j < n; ++j) x[j] += alpha * dx[j];
    for (int i = 0; i < np; ++i) y[i] += alpha * dy[i];
    for (int r = 0; r < m; ++r) {
      z[r] += alpha * dz[r];
      s[r] += alpha * dsv[r];
    }
    tau += alpha * dtau_c;
    kappa += alpha * dkapv;

    // the embedding is positively homogeneous: renormalize when the iterate
    // drifts in scale, otherwise it can collapse toward the trivial origin
    double scale_ref = std::max(tau, kappa);
    if (scale_ref < 0.5 || scale_ref > 2.0) {
      double gamma = 1.0 / scale_ref;
      for (auto& v : x) v *= gamma;
      for (auto& v : y) v *= gamma;
      for (auto& v : z) v *= gamma;
      for (auto& v : s) v *= gamma;
      tau *= gamma;
      kappa *= gamma;
    }

    double merit = std::max({pres, dres, relgap});
    best_merit = std::min(best_merit, merit);
  }

  dehomogenize(IpmStatus::IterLimit,
               format_msg("iteration limit: pres=", res.pres, " dres=", res.dres,
                          " relgap=", res.relgap));
  return res;
}

}  // namespace ies::conic
