#include <doctest.h>

#include <random>

#include "ies/conic/sparse.hpp"
#include "ies/parallel.hpp"

using namespace ies;

TEST_CASE("thread count setter clamps to serial without openmp") {
  parallel::set_num_threads(4);
  if (parallel::openmp_enabled())
    CHECK(parallel::num_threads() == 4);
  else
    CHECK(parallel::num_threads() == 1);
  parallel::set_num_threads(1);
  CHECK(parallel::num_threads() == 1);
}

TEST_CASE("parallel_for covers every index exactly once") {
  std::vector<int> hits(10000, 0);
  parallel::set_num_threads(2);
  parallel::parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  parallel::set_num_threads(1);
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("dispatch wrapper picks identical results for large inputs") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  conic::Triplets t;
  t.rows = 500;
  t.cols = 500;
  for (int k = 0; k < 20000; ++k)
    t.add(static_cast<int>(rng() % 500), static_cast<int>(rng() % 500), u(rng));
  auto a = conic::build_csr(t);
  std::vector<double> x(500), y1(500), y2(500);
  for (auto& v : x) v = u(rng);
  conic::spmv_serial(a, x, y1);
  parallel::set_num_threads(2);
  conic::spmv(a, x, y2);
  parallel::set_num_threads(1);
  for (int i = 0; i < 500; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-13));
}
