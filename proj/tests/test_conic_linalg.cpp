#include <doctest.h>

#include <cmath>
#include <random>

#include "ies/conic/cones.hpp"
#include "ies/conic/ldl.hpp"
#include "ies/conic/ordering.hpp"
#include "ies/conic/sparse.hpp"
#include "ies/parallel.hpp"

using namespace ies::conic;

TEST_CASE("csr build sums duplicates and sorts columns") {
  Triplets t;
  t.rows = 2;
  t.cols = 3;
  t.add(0, 2, 1.0);
  t.add(0, 0, 2.0);
  t.add(0, 2, 0.5);
  t.add(1, 1, -1.0);
  CsMat a = build_csr(t);
  CHECK(a.nnz() == 3);
  CHECK(a.ci[0] == 0);
  CHECK(a.vx[0] == 2.0);
  CHECK(a.ci[1] == 2);
  CHECK(a.vx[1] == doctest::Approx(1.5));
  CHECK(a.ci[2] == 1);
}

TEST_CASE("spmv serial and omp agree") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  Triplets t;
  t.rows = 200;
  t.cols = 150;
  for (int k = 0; k < 3000; ++k)
    t.add(static_cast<int>(rng() % 200), static_cast<int>(rng() % 150), u(rng));
  CsMat a = build_csr(t);
  std::vector<double> x(150), y1(200), y2(200);
  for (auto& v : x) v = u(rng);
  spmv_serial(a, x, y1);
  ies::parallel::set_num_threads(2);
  spmv_omp(a, x, y2);
  ies::parallel::set_num_threads(1);
  for (int i = 0; i < 200; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-13));
}

TEST_CASE("minimum degree returns a permutation") {
  // ring graph
  const int n = 50;
  std::vector<int> ptr(n + 1), idx;
  for (int i = 0; i < n; ++i) {
    ptr[i] = static_cast<int>(idx.size());
    idx.push_back((i + 1) % n);
    idx.push_back((i + n - 1) % n);
  }
  ptr[n] = static_cast<int>(idx.size());
  auto perm = min_degree_order(n, ptr, idx);
  REQUIRE(perm.size() == static_cast<std::size_t>(n));
  std::vector<char> seen(n, 0);
  for (int v : perm) {
    CHECK(v >= 0);
    CHECK(v < n);
    CHECK(!seen[v]);
    seen[v] = 1;
  }
}

namespace {

// dense reference solve for the LDL test
std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(a[i][k]) > std::fabs(a[piv][k])) piv = i;
    std::swap(a[k], a[piv]);
    std::swap(b[k], b[piv]);
    for (int i = k + 1; i < n; ++i) {
      double f = a[i][k] / a[k][k];
      for (int j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double acc = b[i];
    for (int j = i + 1; j < n; ++j) acc -= a[i][j] * x[j];
    x[i] = acc / a[i][i];
  }
  return x;
}

}  // namespace

TEST_CASE("sparse ldl matches dense solve on random quasi-definite systems") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const int n1 = 8, n2 = 6, n = n1 + n2;
    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
    std::vector<int> cp{0}, ri;
    std::vector<double> vx;
    // random sparse upper pattern with strong diagonal
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i <= j; ++i) {
        bool diag = (i == j);
        if (!diag && (rng() % 4 != 0)) continue;
        double v = diag ? ((j < n1 ? 4.0 : -4.0) + 0.1 * u(rng)) : 0.4 * u(rng);
        ri.push_back(i);
        vx.push_back(v);
        dense[i][j] += v;
        if (i != j) dense[j][i] += v;
      }
      cp.push_back(static_cast<int>(ri.size()));
    }
    std::vector<int> sign(n, 1);
    for (int i = n1; i < n; ++i) sign[i] = -1;

    LdlSolver ldl;
    ldl.analyze(n, cp, ri, sign);
    REQUIRE(ldl.factor(vx));

    std::vector<double> b(n);
    for (auto& v : b) v = u(rng);
    std::vector<double> x = b;
    ldl.solve(x);
    auto xref = dense_solve(dense, b);
    for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(xref[i]).epsilon(1e-8));
  }
}

TEST_CASE("nt scaling satisfies W z = W^{-1} s = lambda") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  ConeLayout k;
  k.nonneg = 3;
  k.soc_dims = {3, 4};
  const int m = k.total();
  std::vector<double> s(m), z(m);
  for (int i = 0; i < k.nonneg; ++i) {
    s[i] = u(rng);
    z[i] = u(rng);
  }
  int off = k.nonneg;
  for (int q : k.soc_dims) {
    double snorm1 = 0, znorm1 = 0;
    for (int i = 1; i < q; ++i) {
      s[off + i] = 0.3 * (u(rng) - 1.0);
      z[off + i] = 0.3 * (u(rng) - 1.0);
      snorm1 += s[off + i] * s[off + i];
      znorm1 += z[off + i] * z[off + i];
    }
    s[off] = std::sqrt(snorm1) + u(rng);
    z[off] = std::sqrt(znorm1) + u(rng);
    off += q;
  }
  REQUIRE(in_cone_interior(k, s));
  REQUIRE(in_cone_interior(k, z));

  NtScaling w;
  std::vector<double> lambda(m), wz(m), wis(m);
  REQUIRE(compute_nt_scaling(k, s, z, w, lambda));
  mul_w(k, w, z, wz);
  mul_w_inv(k, w, s, wis);
  for (int i = 0; i < m; ++i) {
    CHECK(wz[i] == doctest::Approx(lambda[i]).epsilon(1e-10));
    CHECK(wis[i] == doctest::Approx(lambda[i]).epsilon(1e-10));
  }

  // W^2 block consistency: W2 * z == W * lambda
  std::vector<double> wl(m);
  mul_w(k, w, lambda, wl);
  off = k.nonneg;
  for (std::size_t c = 0; c < k.soc_dims.size(); ++c) {
    int q = k.soc_dims[c];
    std::vector<double> blk;
    w2_block(w, static_cast<int>(c), q, blk);
    for (int a = 0; a < q; ++a) {
      double acc = 0.0;
      for (int b2 = 0; b2 < q; ++b2) acc += blk[a * q + b2] * z[off + b2];
      CHECK(acc == doctest::Approx(wl[off + a]).epsilon(1e-9));
    }
    off += q;
  }
}

TEST_CASE("jordan solve inverts the jordan product") {
  ConeLayout k;
  k.nonneg = 2;
  k.soc_dims = {3};
  std::vector<double> lam{1.5, 0.7, 2.0, 0.5, -0.3}, d{0.4, -1.0, 0.9, 0.2, 0.1};
  std::vector<double> x(5), back(5);
  jordan_solve(k, lam, d, x);
  jordan_product(k, lam, x, back);
  for (int i = 0; i < 5; ++i) CHECK(back[i] == doctest::Approx(d[i]).epsilon(1e-12));
}

TEST_CASE("step to boundary on the second-order cone") {
  ConeLayout k;
  k.soc_dims = {2};
  std::vector<double> v{1.0, 0.0}, dv{-1.0, 0.0};
  CHECK(step_to_boundary(k, v, dv, 100.0) == doctest::Approx(1.0));
  std::vector<double> dv2{0.0, 1.0};
  CHECK(step_to_boundary(k, v, dv2, 100.0) == doctest::Approx(1.0));
  std::vector<double> dv3{1.0, 0.0};
  CHECK(step_to_boundary(k, v, dv3, 100.0) == doctest::Approx(100.0));
}
