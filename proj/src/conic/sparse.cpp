#include "ies/conic/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ies/common.hpp"
#include "ies/parallel.hpp"

namespace ies::conic {

CsMat build_csr(const Triplets& t) {
  CsMat a;
  a.rows = t.rows;
  a.cols = t.cols;
  const std::size_t nz = t.v.size();
  std::vector<int> count(static_cast<std::size_t>(t.rows) + 1, 0);
  for (std::size_t k = 0; k < nz; ++k) count[static_cast<std::size_t>(t.r[k]) + 1]++;
  std::partial_sum(count.begin(), count.end(), count.begin());
  a.rp = count;
  a.ci.resize(nz);
  a.vx.resize(nz);
  std::vector<int> next(a.rp.begin(), a.rp.end() - 1);
  for (std::size_t k = 0; k < nz; ++k) {
    int p = next[t.r[k]]++;
    a.ci[p] = t.c[k];
    a.vx[p] = t.v[k];
  }
  // sort each row, merge duplicates
  std::vector<int> order;
  CsMat out;
  out.rows = a.rows;
  out.cols = a.cols;
  out.rp.assign(static_cast<std::size_t>(a.rows) + 1, 0);
  out.ci.reserve(nz);
  out.vx.reserve(nz);
  for (int i = 0; i < a.rows; ++i) {
    int lo = a.rp[i], hi = a.rp[i + 1];
    order.resize(hi - lo);
    std::iota(order.begin(), order.end(), lo);
    std::sort(order.begin(), order.end(), [&](int p, int q) { return a.ci[p] < a.ci[q]; });
    int last_col = -1;
    for (int p : order) {
      if (a.ci[p] == last_col) {
        out.vx.back() += a.vx[p];
      } else {
        out.ci.push_back(a.ci[p]);
        out.vx.push_back(a.vx[p]);
        last_col = a.ci[p];
      }
    }
    out.rp[i + 1] = static_cast<int>(out.ci.size());
  }
  return out;
}

CsMat transpose(const CsMat& a) {
  CsMat t;
  t.rows = a.cols;
  t.cols = a.rows;
  t.rp.assign(static_cast<std::size_t>(a.cols) + 1, 0);
  t.ci.resize(a.nnz());
  t.vx.resize(a.nnz());
  for (std::size_t k = 0; k < a.nnz(); ++k) t.rp[static_cast<std::size_t>(a.ci[k]) + 1]++;
  std::partial_sum(t.rp.begin(), t.rp.end(), t.rp.begin());
  std::vector<int> next(t.rp.begin(), t.rp.end() - 1);
  for (int i = 0; i < a.rows; ++i) {
    for (int p = a.rp[i]; p < a.rp[i + 1]; ++p) {
      int q = next[a.ci[p]]++;
      t.ci[q] = i;
      t.vx[q] = a.vx[p];
    }
  }
  return t;
}

void spmv_serial(const CsMat& a, std::span<const double> x, std::span<double> y) {
  for (int i = 0; i < a.rows; ++i) {
    double acc = 0.0;
    for (int p = a.rp[i]; p < a.rp[i + 1]; ++p) acc += a.vx[p] * x[a.ci[p]];
    y[i] = acc;
  }
}

void spmv_omp(const CsMat& a, std::span<const double> x, std::span<double> y) {
#if defined(_OPENMP)
#pragma omp parallel for schedule(static) num_threads(ies::parallel::num_threads())
  for (int i = 0; i < a.rows; ++i) {
    double acc = 0.0;
    for (int p = a.rp[i]; p < a.rp[i + 1]; ++p) acc += a.vx[p] * x[a.ci[p]];
    y[i] = acc;
  }
#else
  spmv_serial(a, x, y);
#endif
}

void spmv(const CsMat& a, std::span<const double> x, std::span<double> y) {
  if (ies::parallel::num_threads() > 1 && a.nnz() >= ies::parallel::kMinParallelWork) {
    spmv_omp(a, x, y);
  } else {
    spmv_serial(a, x, y);
  }
}

void spmv_acc(const CsMat& a, double alpha, std::span<const double> x, std::span<double> y) {
  for (int i = 0; i < a.rows; ++i) {
    double acc = 0.0;
    for (int p = a.rp[i]; p < a.rp[i + 1]; ++p) acc += a.vx[p] * x[a.ci[p]];
    y[i] += alpha * acc;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

double norm2(std::span<const double> a) {
  double acc = 0.0;
  for (double v : a) acc += v * v;
  return std::sqrt(acc);
}

}  // namespace ies::conic
