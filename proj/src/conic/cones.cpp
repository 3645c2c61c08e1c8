#include "ies/conic/cones.hpp"

#include <algorithm>
#include <cmath>

namespace ies::conic {

namespace {

// residual z0^2 - |z1|^2 of a second-order cone point
double soc_res(std::span<const double> v) {
  double acc = v[0] * v[0];
  for (std::size_t i = 1; i < v.size(); ++i) acc -= v[i] * v[i];
  return acc;
}

}  // namespace

void NtScaling::set_identity(const ConeLayout& k) {
  w_lp.assign(k.nonneg, 1.0);
  socs.assign(k.soc_dims.size(), SocBlock{});
  for (std::size_t c = 0; c < k.soc_dims.size(); ++c) {
    socs[c].eta = 1.0;
    socs[c].wbar.assign(k.soc_dims[c], 0.0);
    socs[c].wbar[0] = 1.0;
  }
}

bool in_cone_interior(const ConeLayout& k, std::span<const double> v) {
  for (int i = 0; i < k.nonneg; ++i)
    if (v[i] <= 0.0) return false;
  int off = k.nonneg;
  for (int q : k.soc_dims) {
    auto blk = v.subspan(off, q);
    if (blk[0] <= 0.0 || soc_res(blk) <= 0.0) return false;
    off += q;
  }
  return true;
}

void unit_element(const ConeLayout& k, std::span<double> e) {
  std::fill(e.begin(), e.end(), 0.0);
  for (int i = 0; i < k.nonneg; ++i) e[i] = 1.0;
  int off = k.nonneg;
  for (int q : k.soc_dims) {
    e[off] = 1.0;
    off += q;
  }
}

bool compute_nt_scaling(const ConeLayout& k, std::span<const double> s,
                        std::span<const double> z, NtScaling& w,
                        std::span<double> lambda) {
  w.w_lp.resize(k.nonneg);
  w.socs.resize(k.soc_dims.size());
  for (int i = 0; i < k.nonneg; ++i) {
    if (s[i] <= 0.0 || z[i] <= 0.0) return false;
    w.w_lp[i] = std::sqrt(s[i] / z[i]);
    lambda[i] = std::sqrt(s[i] * z[i]);
  }
  int off = k.nonneg;
  for (std::size_t c = 0; c < k.soc_dims.size(); ++c) {
    const int q = k.soc_dims[c];
    auto sb = s.subspan(off, q);
    auto zb = z.subspan(off, q);
    double sres = soc_res(sb), zres = soc_res(zb);
    if (sb[0] <= 0.0 || zb[0] <= 0.0 || sres <= 0.0 || zres <= 0.0) return false;
    double snorm = std::sqrt(sres), znorm = std::sqrt(zres);

    auto& blk = w.socs[c];
    blk.wbar.resize(q);
    double zbar_dot_sbar = 0.0;
    {
      double acc = sb[0] / snorm * (zb[0] / znorm);
      for (int i = 1; i < q; ++i) acc += sb[i] / snorm * (zb[i] / znorm);
      zbar_dot_sbar = acc;
    }
    double gamma = std::sqrt((1.0 + zbar_dot_sbar) / 2.0);
    // NT scaling point w with w'Jw = 1
    std::vector<double> ntp(q);
    ntp[0] = (sb[0] / snorm + zb[0] / znorm) / (2.0 * gamma);
    for (int i = 1; i < q; ++i) ntp[i] = (sb[i] / snorm - zb[i] / znorm) / (2.0 * gamma);
    // store its Jordan square root v, so that W = eta (2 v v' - J) gives W^2 = Q_w
    double denom = std::sqrt(2.0 * (ntp[0] + 1.0));
    blk.wbar[0] = (ntp[0] + 1.0) / denom;
    for (int i = 1; i < q; ++i) blk.wbar[i] = ntp[i] / denom;
    blk.eta = std::sqrt(snorm / znorm);

    // lambda = W z = eta (2 wbar (wbar' z) - J z)
    double wz = blk.wbar[0] * zb[0];
    for (int i = 1; i < q; ++i) wz += blk.wbar[i] * zb[i];
    lambda[off] = blk.eta * (2.0 * blk.wbar[0] * wz - zb[0]);
    for (int i = 1; i < q; ++i)
      lambda[off + i] = blk.eta * (2.0 * blk.wbar[i] * wz + zb[i]);
    off += q;
  }
  return true;
}

void mul_w(const ConeLayout& k, const NtScaling& w, std::span<const double> in,
           std::span<double> out) {
  for (int i = 0; i < k.nonneg; ++i) out[i] = w.w_lp[i] * in[i];
  int off = k.nonneg;
  for (std::size_t c = 0; c < k.soc_dims.size(); ++c) {
    const int q = k.soc_dims[c];
    const auto& blk = w.socs[c];
    double wv = 0.0;
    for (int i = 0; i < q; ++i) wv += blk.wbar[i] * in[off + i];
    out[off] = blk.eta * (2.0 * blk.wbar[0] * wv - in[off]);
    for (int i = 1; i < q; ++i)
      out[off + i] = blk.eta * (2.0 * blk.wbar[i] * wv + in[off + i]);
    off += q;
  }
}

void mul_w_inv(const ConeLayout& k, const NtScaling& w, std::span<const double> in,
               std::span<double> out) {
  for (int i = 0; i < k.nonneg; ++i) out[i] = in[i] / w.w_lp[i];
  int off = k.nonneg;
  for (std::size_t c = 0; c < k.soc_dims.size(); ++c) {
    const int q = k.soc_dims[c];
    const auto& blk = w.socs[c];
    // W^{-1} = (1/eta) (2 J wbar wbar' J - J)
    double jwv = blk.wbar[0] * in[off];
    for (int i = 1; i < q; ++i) jwv -= blk.wbar[i] * in[off + i];
    out[off] = (2.0 * blk.wbar[0] * jwv - in[off]) / blk.eta;
    for (int i = 1; i < q; ++i)
      out[off + i] = (-2.0 * blk.wbar[i] * jwv + in[off + i]) / blk.eta;
    off += q;
  }
}

void w2_block(const NtScaling& w, int c, int q, std::vector<double>& block) {
  const auto& blk = w.socs[c];
  block.assign(static_cast<std::size_t>(q) * q, 0.0);
  double uu = 0.0;
  for (int i = 0; i < q; ++i) uu += blk.wbar[i] * blk.wbar[i];
  const double e2 = blk.eta * blk.eta;
  for (int a = 0; a < q; ++a) {
    double ja = (a == 0) ? blk.wbar[0] : -blk.wbar[a];
    for (int b = 0; b < q; ++b) {
      double jb = (b == 0) ? blk.wbar[0] : -blk.wbar[b];
      double v = 4.0 * uu * blk.wbar[a] * blk.wbar[b] - 2.0 * blk.wbar[a] * jb -
                 2.0 * ja * blk.wbar[b] + ((a == b) ? 1.0 : 0.0);
      block[static_cast<std::size_t>(a) * q + b] = e2 * v;
    }
  }
}

void jordan_product(const ConeLayout& k, std::span<const double> u,
                    std::span<const double> v, std::span<double> out) {
  for (int i = 0; i < k.nonneg; ++i) out[i] = u[i] * v[i];
  int off = k.nonneg;
  for (int q : k.soc_dims) {
    double dotv = 0.0;
    for (int i = 0; i < q; ++i) dotv += u[off + i] * v[off + i];
    double u0 = u[off], v0 = v[off];
    out[off] = dotv;
    for (int i = 1; i < q; ++i) out[off + i] = u0 * v[off + i] + v0 * u[off + i];
    off += q;
  }
}

void jordan_solve(const ConeLayout& k, std::span<const double> lambda,
                  std::span<const double> d, std::span<double> out) {
  for (int i = 0; i < k.nonneg; ++i) out[i] = d[i] / lambda[i];
  int off = k.nonneg;
  for (int q : k.soc_dims) {
    double l0 = lambda[off];
    double l1d1 = 0.0, l1l1 = 0.0;
    for (int i = 1; i < q; ++i) {
      l1d1 += lambda[off + i] * d[off + i];
      l1l1 += lambda[off + i] * lambda[off + i];
    }
    double den = l0 * l0 - l1l1;
    double x0 = (l0 * d[off] - l1d1) / den;
    out[off] = x0;
    for (int i = 1; i < q; ++i) out[off + i] = (d[off + i] - x0 * lambda[off + i]) / l0;
    off += q;
  }
}

double step_to_boundary(const ConeLayout& k, std::span<const double> v,
                        std::span<const double> dv, double cap) {
  double alpha = cap;
  for (int i = 0; i < k.nonneg; ++i) {
    if (dv[i] < 0.0) alpha = std::min(alpha, -v[i] / dv[i]);
  }
  int off = k.nonneg;
  for (int q : k.soc_dims) {
    double a = dv[off] * dv[off];
    double b2 = v[off] * dv[off];
    double c0 = v[off] * v[off];
    for (int i = 1; i < q; ++i) {
      a -= dv[off + i] * dv[off + i];
      b2 -= v[off + i] * dv[off + i];
      c0 -= v[off + i] * v[off + i];
    }
    // roots of a t^2 + 2 b2 t + c0 = 0 with c0 > 0 (interior)
    if (std::fabs(a) < 1e-300) {
      if (b2 < 0.0) alpha = std::min(alpha, -c0 / (2.0 * b2));
    } else {
      double disc = b2 * b2 - a * c0;
      if (disc >= 0.0) {
        double sq = std::sqrt(disc);
        double qq = -(b2 + (b2 >= 0 ? sq : -sq));
        double r1 = (qq != 0.0) ? c0 / qq : 0.0;
        double r2 = qq / a;
        double best = cap;
        if (r1 > 0.0) best = std::min(best, r1);
        if (r2 > 0.0) best = std::min(best, r2);
        alpha = std::min(alpha, best);
      }
    }
    if (dv[off] < 0.0) alpha = std::min(alpha, -v[off] / dv[off]);
    off += q;
  }
  return alpha;
}

}  // namespace ies::conic
