#include <doctest.h>

#include <cmath>
#include <random>

#include "ies/conic/solver.hpp"

using namespace ies::conic;

namespace {

SolveOptions bnb_opts() {
  SolveOptions o;
  o.rel_gap_tol = 1e-8;
  o.ipm.feastol = 1e-9;
  o.ipm.abstol = 1e-10;
  o.ipm.reltol = 1e-10;
  return o;
}

// 0/1 knapsack-style toy: min c'u s.t. sum w u >= demand
struct Knap {
  std::vector<double> w, c;
  double demand;
};

double enumerate_knap(const Knap& k) {
  const int n = static_cast<int>(k.w.size());
  double best = ies::kInf;
  for (int mask = 0; mask < (1 << n); ++mask) {
    double wt = 0, cost = 0;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) {
        wt += k.w[i];
        cost += k.c[i];
      }
    if (wt >= k.demand - 1e-12) best = std::min(best, cost);
  }
  return best;
}

ConicProgram knap_program(const Knap& k) {
  ConicProgram p;
  std::vector<LinTerm> cover;
  for (std::size_t i = 0; i < k.w.size(); ++i) {
    int u = p.add_binary("u" + std::to_string(i));
    p.add_objective_term(u, k.c[i]);
    cover.push_back({u, k.w[i]});
  }
  p.add_linear("cover", Sense::GE, k.demand, cover);
  return p;
}

}  // namespace

TEST_CASE("bnb matches exhaustive enumeration on random covers") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> uw(0.5, 2.0), uc(1.0, 10.0);
  for (int trial = 0; trial < 15; ++trial) {
    Knap k;
    int n = 4 + static_cast<int>(rng() % 5);  // 4..8 binaries
    for (int i = 0; i < n; ++i) {
      k.w.push_back(uw(rng));
      k.c.push_back(uc(rng));
    }
    k.demand = 0.6 * n;
    double ref = enumerate_knap(k);
    auto prog = knap_program(k);
    auto r = branch_and_bound(prog, bnb_opts());
    if (ref == ies::kInf) {
      CHECK(r.status == SolveStatus::Infeasible);
    } else {
      REQUIRE(r.status == SolveStatus::Optimal);
      CHECK(r.objective == doctest::Approx(ref).epsilon(1e-7));
      CHECK(r.bound <= r.objective + 1e-6);
    }
  }
}

TEST_CASE("bnb with integral relaxation does not branch") {
  ConicProgram p;
  int u = p.add_binary("u");
  p.add_linear("force", Sense::GE, 1.0, {{u, 1.0}});
  p.add_objective_term(u, 3.0);
  auto r = branch_and_bound(p, bnb_opts());
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == doctest::Approx(3.0));
  CHECK(r.nodes == 1);
}

TEST_CASE("bnb infeasible integer program reported as infeasible") {
  ConicProgram p;
  int a = p.add_binary("a");
  int b = p.add_binary("b");
  p.add_linear("need2", Sense::GE, 1.5, {{a, 1.0}, {b, 1.0}});
  p.add_linear("atmost0", Sense::LE, 0.5, {{a, 1.0}, {b, 1.0}});
  p.add_objective_term(a, 1.0);
  auto r = branch_and_bound(p, bnb_opts());
  CHECK(r.status == SolveStatus::Infeasible);
}

TEST_CASE("complement pairs branch as one decision") {
  ConicProgram p;
  int dp = p.add_binary("dplus");
  int dm = p.add_binary("dminus");
  p.add_complement_pair(dp, dm);
  int x = p.add_continuous("x", 0.0, 10.0);
  // x <= 10*dplus, x >= 2 forces dplus = 1
  p.add_linear("cap", Sense::LE, 0.0, {{x, 1.0}, {dp, -10.0}});
  p.add_linear("dem", Sense::GE, 2.0, {{x, 1.0}});
  p.add_objective_term(x, 1.0);
  p.add_objective_term(dm, -0.5);  // tempts dminus=1, excluded by the pair
  auto r = branch_and_bound(p, bnb_opts());
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.x[dp] == doctest::Approx(1.0));
  CHECK(r.x[dm] == doctest::Approx(0.0));
  CHECK(r.objective == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("bnb determinism: identical runs, identical node counts") {
  Knap k;
  k.w = {1.0, 0.8, 0.7, 1.2, 0.9, 1.1};
  k.c = {5.0, 4.1, 3.3, 6.2, 4.4, 5.6};
  k.demand = 3.1;
  auto prog = knap_program(k);
  auto r1 = branch_and_bound(prog, bnb_opts());
  auto r2 = branch_and_bound(prog, bnb_opts());
  REQUIRE(r1.status == SolveStatus::Optimal);
  CHECK(r1.objective == r2.objective);
  CHECK(r1.nodes == r2.nodes);
  CHECK(r1.x == r2.x);
}

TEST_CASE("bnb repair callback supplies incumbents that get verified") {
  Knap k;
  k.w = {1.0, 1.0, 1.0, 1.0};
  k.c = {2.0, 2.5, 3.0, 3.5};
  k.demand = 2.0;
  auto prog = knap_program(k);
  int calls = 0;
  RepairCallback cb = [&](const ConicProgram& pr,
                          const std::vector<double>& xr) -> std::optional<std::vector<double>> {
    calls++;
    std::vector<double> cand(xr.size(), 0.0);
    cand[0] = cand[1] = 1.0;  // cheapest cover, always feasible here
    (void)pr;
    return cand;
  };
  auto r = branch_and_bound(prog, bnb_opts(), cb);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == doctest::Approx(4.5));
}

TEST_CASE("node limit reported honestly") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uw(0.5, 2.0), uc(1.0, 10.0);
  Knap k;
  for (int i = 0; i < 10; ++i) {
    k.w.push_back(uw(rng));
    k.c.push_back(uc(rng));
  }
  k.demand = 6.0;
  auto prog = knap_program(k);
  SolveOptions o = bnb_opts();
  o.max_nodes = 1;
  o.heur_every = 0;
  auto r = branch_and_bound(prog, o);
  CHECK((r.status == SolveStatus::NodeLimit || r.status == SolveStatus::GapLimit ||
         r.status == SolveStatus::Optimal));
}
