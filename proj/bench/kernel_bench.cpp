// Compares the serial reference kernels against their OpenMP variants on the
// matrices of an assembled scenario. Usage: kernel_bench [scenario.json] [reps]
#include <chrono>
#include <cstdio>
#include <string>

#include "ies/conic/solver.hpp"
#include "ies/model.hpp"
#include "ies/parallel.hpp"
#include "ies/runner.hpp"

using namespace ies;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

conic::CsMat program_matrix(const conic::ConicProgram& prog) {
  conic::Triplets t;
  t.rows = static_cast<int>(prog.linear().size());
  t.cols = static_cast<int>(prog.vars().size());
  for (int r = 0; r < t.rows; ++r)
    for (const auto& term : prog.linear()[r].terms) t.add(r, term.var, term.coef);
  return conic::build_csr(t);
}

}  // namespace

int main(int argc, char** argv) {
  std::string path = argc > 1 ? argv[1] : std::string(IES_FIXTURE_DIR) + "/tiny3bus2gas.json";
  int reps = argc > 2 ? std::atoi(argv[2]) : 2000;

  auto scn = model::load_scenario(path);
  auto assembled = runner::assemble(scn);
  conic::CsMat a = program_matrix(assembled.prog);
  conic::CsMat at = conic::transpose(a);
  std::printf("matrix: %d x %d, nnz=%zu, reps=%d\n", a.rows, a.cols, a.nnz(), reps);

  std::vector<double> x(a.cols, 1.0), y(a.rows, 0.0), xt(a.rows, 1.0), yt(a.cols, 0.0);

  auto t0 = Clock::now();
  for (int r = 0; r < reps; ++r) conic::spmv_serial(a, x, y);
  double serial_ms = ms_since(t0);

  parallel::set_num_threads(parallel::openmp_enabled() ? 2 : 1);
  t0 = Clock::now();
  for (int r = 0; r < reps; ++r) conic::spmv_omp(a, x, y);
  double omp_ms = ms_since(t0);

  t0 = Clock::now();
  for (int r = 0; r < reps; ++r) conic::spmv_serial(at, xt, yt);
  double serial_t_ms = ms_since(t0);

  t0 = Clock::now();
  for (int r = 0; r < reps; ++r) conic::spmv_omp(at, xt, yt);
  double omp_t_ms = ms_since(t0);
  parallel::set_num_threads(1);

  std::printf("%-22s %10s %10s %8s\n", "kernel", "serial ms", "omp ms", "speedup");
  std::printf("%-22s %10.2f %10.2f %7.2fx\n", "spmv", serial_ms, omp_ms, serial_ms / omp_ms);
  std::printf("%-22s %10.2f %10.2f %7.2fx\n", "spmv transpose", serial_t_ms, omp_t_ms,
              serial_t_ms / omp_t_ms);

  // end to end: one relaxation solve, serial vs threaded kernels
  conic::SolveOptions so;
  t0 = Clock::now();
  auto r1 = conic::solve_relaxation(assembled.prog, so);
  double solve_serial = ms_since(t0);
  parallel::set_num_threads(parallel::openmp_enabled() ? 2 : 1);
  t0 = Clock::now();
  auto r2 = conic::solve_relaxation(assembled.prog, so);
  double solve_omp = ms_since(t0);
  parallel::set_num_threads(1);
  std::printf("%-22s %10.2f %10.2f %7.2fx  (obj %.6g / %.6g)\n", "relaxation solve",
              solve_serial, solve_omp, solve_serial / solve_omp, r1.objective, r2.objective);
  return 0;
}
