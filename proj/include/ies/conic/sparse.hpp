#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ies::conic {

/// Compressed sparse row matrix. Column indices are sorted within each row
/// and duplicates have been summed by the builder.
struct CsMat {
  int rows = 0;
  int cols = 0;
  std::vector<int> rp;   // row pointers, size rows+1
  std::vector<int> ci;   // column indices
  std::vector<double> vx;

  std::size_t nnz() const { return ci.size(); }
};

/// Triplet accumulator used by all matrix builders.
struct Triplets {
  int rows = 0;
  int cols = 0;
  std::vector<int> r, c;
  std::vector<double> v;

  void add(int i, int j, double x) {
    r.push_back(i);
    c.push_back(j);
    v.push_back(x);
  }
  void clear() {
    r.clear();
    c.clear();
    v.clear();
  }
};

CsMat build_csr(const Triplets& t);
CsMat transpose(const CsMat& a);

// y = A x. The _omp variant fans out over rows when the worker count allows;
// both produce the same values up to reduction order (rows are independent,
// so they are in fact identical).
void spmv_serial(const CsMat& a, std::span<const double> x, std::span<double> y);
void spmv_omp(const CsMat& a, std::span<const double> x, std::span<double> y);
void spmv(const CsMat& a, std::span<const double> x, std::span<double> y);

// y += alpha * A x
void spmv_acc(const CsMat& a, double alpha, std::span<const double> x, std::span<double> y);

double dot(std::span<const double> a, std::span<const double> b);
double norm_inf(std::span<const double> a);
double norm2(std::span<const double> a);

}  // namespace ies::conic
