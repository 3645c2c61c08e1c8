#include "ies/conic/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <map>
#include <queue>
#include <set>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace ies::conic {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::GapLimit: return "gap-limit";
    case SolveStatus::NodeLimit: return "node-limit";
    case SolveStatus::TimeLimit: return "time-limit";
    case SolveStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

namespace {

struct StdMap {
  std::vector<int> col;
  std::vector<double> fixed;
  double obj_shift = 0.0;
  int ncols = 0;
};

// Substitutes fixed variables and lowers the program to conic standard form.
// Returns a reason string when a fixing makes the program trivially infeasible.
std::optional<std::string> build_std(const ConicProgram& prog,
                                     const std::vector<std::pair<int, double>>& fixings,
                                     double feas_tol, StdProblem& out, StdMap& map) {
  const auto& vars = prog.vars();
  const int nv = static_cast<int>(vars.size());
  map.col.assign(nv, -1);
  map.fixed.assign(nv, 0.0);
  map.obj_shift = prog.objective_constant();

  std::vector<char> is_fixed(nv, 0);
  for (const auto& [v, val] : fixings) {
    is_fixed[v] = 1;
    map.fixed[v] = val;
  }
  for (int v = 0; v < nv; ++v) {
    if (!is_fixed[v] && vars[v].lo == vars[v].hi) {
      is_fixed[v] = 1;
      map.fixed[v] = vars[v].lo;
    }
  }
  int ncols = 0;
  for (int v = 0; v < nv; ++v)
    if (!is_fixed[v]) map.col[v] = ncols++;
  map.ncols = ncols;
  out.n = ncols;

  for (const auto& t : prog.objective()) {
    if (is_fixed[t.var]) map.obj_shift += t.coef * map.fixed[t.var];
  }
  out.c.assign(ncols, 0.0);
  for (const auto& t : prog.objective())
    if (!is_fixed[t.var]) out.c[map.col[t.var]] += t.coef;

  Triplets ta, tg;
  ta.cols = ncols;
  tg.cols = ncols;
  out.b.clear();
  out.h.clear();

  // 1) bound rows for unfixed variables
  for (int v = 0; v < nv; ++v) {
    if (is_fixed[v]) continue;
    const auto& vr = vars[v];
    if (vr.lo > -kInf) {
      tg.add(static_cast<int>(out.h.size()), map.col[v], -1.0);
      out.h.push_back(-vr.lo);
      tg.rows++;
    }
    if (vr.hi < kInf) {
      tg.add(static_cast<int>(out.h.size()), map.col[v], 1.0);
      out.h.push_back(vr.hi);
      tg.rows++;
    }
  }

  // 2) linear rows
  for (const auto& row : prog.linear()) {
    double rhs = row.rhs;
    int live = 0;
    for (const auto& t : row.terms) {
      if (is_fixed[t.var])
        rhs -= t.coef * map.fixed[t.var];
      else
        live++;
    }
    if (live == 0) {
      bool bad = (row.sense == Sense::LE && 0.0 > rhs + feas_tol) ||
                 (row.sense == Sense::GE && 0.0 < rhs - feas_tol) ||
                 (row.sense == Sense::EQ && std::fabs(rhs) > feas_tol);
      if (bad) return format_msg("row ", row.name, " infeasible after fixing");
      continue;
    }
    if (row.sense == Sense::EQ) {
      int r = static_cast<int>(out.b.size());
      for (const auto& t : row.terms)
        if (!is_fixed[t.var]) ta.add(r, map.col[t.var], t.coef);
      out.b.push_back(rhs);
      ta.rows++;
    } else {
      double sgn = (row.sense == Sense::LE) ? 1.0 : -1.0;
      int r = static_cast<int>(out.h.size());
      for (const auto& t : row.terms)
        if (!is_fixed[t.var]) tg.add(r, map.col[t.var], sgn * t.coef);
      out.h.push_back(sgn * rhs);
      tg.rows++;
    }
  }
  out.cone.nonneg = tg.rows;
  out.cone.soc_dims.clear();

  // 3) second-order cones: s0 = rhs_terms x + d, s_i = norm_i x + b_i
  for (const auto& soc : prog.socs()) {
    auto reduce = [&](const std::vector<LinTerm>& terms, double offset, double& cval,
                      std::vector<std::pair<int, double>>& live) {
      cval = offset;
      live.clear();
      for (const auto& t : terms) {
        if (is_fixed[t.var])
          cval += t.coef * map.fixed[t.var];
        else
          live.emplace_back(map.col[t.var], t.coef);
      }
    };
    std::vector<std::pair<int, double>> live;
    double cval;
    bool all_const = true;
    reduce(soc.rhs_terms, soc.rhs_offset, cval, live);
    all_const = all_const && live.empty();
    for (std::size_t r = 0; r < soc.norm_rows.size(); ++r) {
      std::vector<std::pair<int, double>> lv;
      double cv;
      reduce(soc.norm_rows[r], soc.norm_offsets[r], cv, lv);
      all_const = all_const && lv.empty();
    }
    if (all_const) {
      double nn = 0.0;
      for (std::size_t r = 0; r < soc.norm_rows.size(); ++r) {
        double cv;
        reduce(soc.norm_rows[r], soc.norm_offsets[r], cv, live);
        nn += cv * cv;
      }
      reduce(soc.rhs_terms, soc.rhs_offset, cval, live);
      if (std::sqrt(nn) > cval + feas_tol)
        return format_msg("cone ", soc.name, " infeasible after fixing");
      continue;
    }
    int r0 = static_cast<int>(out.h.size());
    reduce(soc.rhs_terms, soc.rhs_offset, cval, live);
    for (auto& [cidx, coef] : live) tg.add(r0, cidx, -coef);
    out.h.push_back(cval);
    tg.rows++;
    for (std::size_t r = 0; r < soc.norm_rows.size(); ++r) {
      double cv;
      reduce(soc.norm_rows[r], soc.norm_offsets[r], cv, live);
      int rr = static_cast<int>(out.h.size());
      for (auto& [cidx, coef] : live) tg.add(rr, cidx, -coef);
      out.h.push_back(cv);
      tg.rows++;
    }
    out.cone.soc_dims.push_back(static_cast<int>(soc.norm_rows.size()) + 1);
  }

  ta.rows = static_cast<int>(out.b.size());
  tg.rows = static_cast<int>(out.h.size());
  out.A = build_csr(ta);
  out.G = build_csr(tg);
  out.finalize();
  return std::nullopt;
}

std::vector<double> expand(const StdMap& map, const std::vector<double>& xs) {
  std::vector<double> x(map.col.size(), 0.0);
  for (std::size_t v = 0; v < map.col.size(); ++v)
    x[v] = (map.col[v] >= 0) ? xs[map.col[v]] : map.fixed[v];
  return x;
}

struct EvalOutcome {
  enum class Kind { Optimal, Infeasible, Unbounded, Failure } kind = Kind::Failure;
  double bound = -kInf;
  double pobj = kInf;
  std::vector<double> x_full;
  int iters = 0;
  std::string message;
};

EvalOutcome evaluate_fixings(const ConicProgram& prog,
                             const std::vector<std::pair<int, double>>& fixings,
                             const SolveOptions& opt) {
  EvalOutcome out;
  StdProblem sp;
  StdMap map;
  auto infeas = build_std(prog, fixings, opt.feas_tol, sp, map);
  if (infeas) {
    out.kind = EvalOutcome::Kind::Infeasible;
    out.message = *infeas;
    out.bound = kInf;
    return out;
  }
  IpmOptions iopt = opt.ipm;
  for (int attempt = 0; attempt < 3; ++attempt) {
    IpmResult r = ipm_solve(sp, iopt);
    out.iters += r.iters;
    switch (r.status) {
      case IpmStatus::Optimal: {
        out.kind = EvalOutcome::Kind::Optimal;
        out.pobj = r.pcost + map.obj_shift;
        // safety pad covering the achieved accuracy keeps the bound valid
        double acc = std::max({r.pres_orig, r.dres_orig, r.relgap});
        double pad = 20.0 * acc * std::max(1.0, std::fabs(r.pcost + map.obj_shift));
        out.bound = std::min(r.pcost, r.dcost) + map.obj_shift - pad;
        out.x_full = expand(map, r.x);
        return out;
      }
      case IpmStatus::PrimalInfeasible:
        out.kind = EvalOutcome::Kind::Infeasible;
        out.bound = kInf;
        out.message = r.message;
        return out;
      case IpmStatus::DualInfeasible:
        out.kind = EvalOutcome::Kind::Unbounded;
        out.bound = -kInf;
        out.message = r.message;
        return out;
      case IpmStatus::IterLimit:
      case IpmStatus::NumericalFailure:
        out.message = r.message;
        iopt.static_reg *= 10.0;
        iopt.refine_rounds += 2;
        iopt.max_iter += 50;
        iopt.feastol = std::min(1e-7, iopt.feastol * 10.0);
        iopt.abstol *= 10.0;
        iopt.reltol *= 10.0;
        break;
    }
  }
  out.kind = EvalOutcome::Kind::Failure;
  return out;
}

void fill_cone_slacks(const ConicProgram& prog, const std::vector<double>& x,
                      std::vector<double>& slacks) {
  slacks.clear();
  for (const auto& soc : prog.socs()) {
    double nn = 0.0;
    for (std::size_t r = 0; r < soc.norm_rows.size(); ++r) {
      double v = soc.norm_offsets[r];
      for (const auto& t : soc.norm_rows[r]) v += t.coef * x[t.var];
      nn += v * v;
    }
    double rhs = soc.rhs_offset;
    for (const auto& t : soc.rhs_terms) rhs += t.coef * x[t.var];
    slacks.push_back(rhs - std::sqrt(nn));
  }
}

}  // namespace

SolveResult solve_relaxation(const ConicProgram& prog, const SolveOptions& opt) {
  prog.validate();
  SolveResult res;
  EvalOutcome ev = evaluate_fixings(prog, {}, opt);
  res.nodes = 0;
  res.ipm_iterations = ev.iters;
  res.message = ev.message;
  switch (ev.kind) {
    case EvalOutcome::Kind::Optimal:
      res.status = SolveStatus::Optimal;
      res.objective = ev.pobj;
      res.bound = ev.bound;
      res.x = ev.x_full;
      fill_cone_slacks(prog, res.x, res.cone_slacks);
      break;
    case EvalOutcome::Kind::Infeasible:
      res.status = SolveStatus::Infeasible;
      break;
    case EvalOutcome::Kind::Unbounded:
      res.status = SolveStatus::Unbounded;
      res.bound = -kInf;
      break;
    case EvalOutcome::Kind::Failure:
      res.status = SolveStatus::NumericalFailure;
      break;
  }
  return res;
}

namespace {

struct Node {
  double bound;
  long long id;
  int depth;
  int branch_var = -1;       // variable branched to create this node
  double branch_frac = 0.0;  // parent fractional value of that variable
  int branch_dir = 0;        // 1 up, 0 down
  std::vector<std::pair<int, double>> fixings;
};

struct NodeCmp {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.id > b.id;
  }
};

}  // namespace

SolveResult branch_and_bound(const ConicProgram& prog, const SolveOptions& opt,
                             const RepairCallback& repair) {
  prog.validate();
  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  };

  const std::vector<int> binaries = prog.binary_vars();
  std::map<int, int> partner;
  for (auto [a, b] : prog.complement_pairs()) {
    partner[a] = b;
    partner[b] = a;
  }
  // pair followers never branch on their own
  std::set<int> follower;
  for (auto [a, b] : prog.complement_pairs()) follower.insert(std::max(a, b));

  SolveResult res;
  double best_obj = kInf;
  std::vector<double> best_x;
  bool stopped_nodes = false, stopped_time = false;
  long long failed_leaves = 0;
  double pruned_min_bound = kInf;

  const double accept_gap = opt.accept_gap < 0 ? opt.rel_gap_tol : opt.accept_gap;

  auto prune_margin = [&] { return opt.rel_gap_tol * std::max(1.0, std::fabs(best_obj)); };

  // Returns true when the candidate is a VALID feasible integral point
  // (whether or not it improves the incumbent).
  auto try_incumbent = [&](const std::vector<double>& cand) {
    if (cand.size() != prog.vars().size()) return false;
    std::vector<double> snapped = cand;
    for (int v : binaries) {
      double r = std::round(snapped[v]);
      if (std::fabs(snapped[v] - r) > opt.int_tol) return false;
      snapped[v] = r;
    }
    auto viol = prog.check_point(snapped, opt.feas_tol * 10.0, opt.int_tol);
    if (!viol.empty()) {
      if (std::getenv("IES_BNB_TRACE_REJECT")) {
        double worst = 0;
        std::string nm;
        for (auto& vv : viol)
          if (vv.amount > worst) {
            worst = vv.amount;
            nm = vv.what;
          }
        std::fprintf(stderr, "reject candidate obj=%.6f worst: %s %.3e (of %zu)\n",
                     prog.objective_value(snapped), nm.c_str(), worst, viol.size());
      }
      return false;
    }
    double obj = prog.objective_value(snapped);
    if (best_obj == kInf || obj < best_obj - 1e-12 * std::max(1.0, std::fabs(best_obj))) {
      best_obj = obj;
      best_x = std::move(snapped);
    }
    return true;
  };

  // pseudo-cost state
  std::map<int, std::pair<double, long long>> pc_up, pc_down;
  auto pc_update = [&](int var, int dir, double frac, double gain) {
    if (var < 0 || gain < 0 || !std::isfinite(gain)) return;
    if (dir == 1) {
      auto& [s, c] = pc_up[var];
      s += gain / std::max(1e-6, 1.0 - frac);
      c += 1;
    } else {
      auto& [s, c] = pc_down[var];
      s += gain / std::max(1e-6, frac);
      c += 1;
    }
  };

  // Most-fractional by default; ties break on the lowest variable id because
  // iteration is ascending and only strict improvements replace the choice.
  // Pair leaders are deferred while standalone binaries remain fractional:
  // complementary direction decisions are usually settled by the repair pass.
  auto select_branch_var_group = [&](const std::vector<double>& x, bool pairs_only) {
    int best = -1;
    double best_score = 0.0;
    for (int v : binaries) {
      if (follower.count(v)) continue;
      if (pairs_only != (partner.count(v) > 0)) continue;
      double dist = std::min(std::fabs(x[v]), std::fabs(1.0 - x[v]));
      if (dist <= opt.int_tol) continue;
      double frac = std::clamp(x[v], 0.0, 1.0);
      double score;
      if (opt.branching == SolveOptions::Branching::PseudoCost) {
        auto iu = pc_up.find(v);
        auto id = pc_down.find(v);
        double up = (iu != pc_up.end() && iu->second.second > 0)
                        ? iu->second.first / iu->second.second
                        : -1.0;
        double dn = (id != pc_down.end() && id->second.second > 0)
                        ? id->second.first / id->second.second
                        : -1.0;
        if (up >= 0 && dn >= 0)
          score = std::max(up * (1.0 - frac), 1e-9) * std::max(dn * frac, 1e-9);
        else
          score = dist * dist;  // uninitialized: fall back to fractionality
      } else {
        score = dist;
      }
      if (best < 0 || score > best_score) {
        best_score = score;
        best = v;
      }
    }
    return best;
  };
  auto select_branch_var = [&](const std::vector<double>& x) {
    int v = select_branch_var_group(x, false);
    if (v < 0) v = select_branch_var_group(x, true);
    return v;
  };

  auto make_children = [&](const Node& parent, int var, double frac, long long& next_id,
                           std::vector<Node>& out) {
    int pref = (frac >= 0.5) ? 1 : 0;
    for (int k = 0; k < 2; ++k) {
      int dir = (k == 0) ? pref : 1 - pref;
      Node child;
      child.bound = parent.bound;
      child.id = next_id++;
      child.depth = parent.depth + 1;
      child.branch_var = var;
      child.branch_frac = frac;
      child.branch_dir = dir;
      child.fixings = parent.fixings;
      child.fixings.emplace_back(var, static_cast<double>(dir));
      auto it = partner.find(var);
      if (it != partner.end()) child.fixings.emplace_back(it->second, 1.0 - dir);
      out.push_back(std::move(child));
    }
  };

  std::priority_queue<Node, std::vector<Node>, NodeCmp> open;
  std::vector<Node> stack;  // depth-first storage
  std::multiset<double> open_bounds;
  long long next_id = 0;
  long long explored = 0;
  long long last_heur = -1;

  auto push_node = [&](Node&& nd) {
    open_bounds.insert(nd.bound);
    if (opt.node_order == SolveOptions::NodeOrder::DepthFirst)
      stack.push_back(std::move(nd));
    else
      open.push(std::move(nd));
  };

  auto pop_node = [&]() -> Node {
    Node nd;
    if (opt.node_order == SolveOptions::NodeOrder::DepthFirst) {
      nd = stack.back();
      stack.pop_back();
    } else {
      nd = open.top();
      open.pop();
    }
    open_bounds.erase(open_bounds.find(nd.bound));
    return nd;
  };

  auto open_empty = [&] { return open.empty() && stack.empty(); };

  auto global_lb = [&] {
    double lb = std::min(best_obj, pruned_min_bound);
    if (!open_bounds.empty()) lb = std::min(lb, *open_bounds.begin());
    return lb;
  };

  {
    Node root;
    root.bound = -kInf;
    root.id = next_id++;
    root.depth = 0;
    push_node(std::move(root));
  }

  while (!open_empty()) {
    if (explored >= opt.max_nodes) {
      stopped_nodes = true;
      break;
    }
    if (elapsed() > opt.time_limit_s) {
      stopped_time = true;
      break;
    }
    if (best_obj < kInf) {
      double gap = (best_obj - global_lb()) / std::max(1.0, std::fabs(best_obj));
      if (gap <= opt.rel_gap_tol) break;
    }

    Node nd = pop_node();
    bool contains_ref = false;
    if (std::getenv("IES_BNB_REF")) {
      static std::vector<double> refpt;
      if (refpt.empty()) {
        FILE* f = std::fopen(std::getenv("IES_BNB_REF"), "r");
        double v;
        while (f && std::fscanf(f, "%lf", &v) == 1) refpt.push_back(v);
        if (f) std::fclose(f);
      }
      contains_ref = !refpt.empty();
      for (auto& [v, val] : nd.fixings)
        if (std::fabs(refpt[v] - val) > 1e-6) contains_ref = false;
      if (contains_ref)
        std::fprintf(stderr, "ref node id=%lld depth=%d inherited=%.6f\n", nd.id, nd.depth,
                     nd.bound);
    }
    if (best_obj < kInf && nd.bound >= best_obj - prune_margin()) {
      if (contains_ref)
        std::fprintf(stderr, "ref node id=%lld PRUNED bound=%.6f best=%.6f\n", nd.id, nd.bound,
                     best_obj);
      pruned_min_bound = std::min(pruned_min_bound, nd.bound);
      continue;
    }

    EvalOutcome ev = evaluate_fixings(prog, nd.fixings, opt);
    explored++;
    res.ipm_iterations += ev.iters;
    if (opt.verbose && explored % 10 == 0) {
      std::fprintf(stderr, "bnb node %lld depth=%d bound=%.8e best=%.8e open=%zu\n", explored,
                   nd.depth, ev.bound, best_obj, open_bounds.size());
    }

    if (getenv("IES_BNB_TRACE"))
      std::fprintf(stderr, "node %lld depth=%d kind=%d bound=%.6e best=%.6e fix=%zu msg=%s\n",
                   explored, nd.depth, (int)ev.kind, ev.bound, best_obj, nd.fixings.size(),
                   ev.message.c_str());
    if (opt.verbose)
      std::fprintf(stderr, "  node %lld kind=%d bound=%.6e pobj=%.6e msg=%s\n", explored,
                   (int)ev.kind, ev.bound, ev.pobj, ev.message.c_str());
    if (ev.kind == EvalOutcome::Kind::Infeasible) continue;
    if (ev.kind == EvalOutcome::Kind::Unbounded) {
      res.status = SolveStatus::Unbounded;
      res.nodes = explored;
      res.message = "relaxation unbounded";
      return res;
    }
    if (ev.kind == EvalOutcome::Kind::Failure) {
      if (const char* dump = std::getenv("IES_BNB_DUMP_FAIL")) {
        static bool dumped = false;
        if (!dumped) {
          dumped = true;
          FILE* f = std::fopen(dump, "w");
          for (auto& [v, val] : nd.fixings) std::fprintf(f, "%d %g\n", v, val);
          std::fclose(f);
        }
      }
      if (opt.verbose)
        std::fprintf(stderr, "bnb node %lld FAILED depth=%d: %s\n", explored, nd.depth,
                     ev.message.c_str());
      bool all_fixed = nd.fixings.size() >= binaries.size();
      if (all_fixed) {
        failed_leaves++;
        pruned_min_bound = std::min(pruned_min_bound, nd.bound);
        continue;
      }
      // keep completeness: branch on the first unfixed leader with inherited bound
      std::set<int> fixed_vars;
      for (auto& [v, val] : nd.fixings) fixed_vars.insert(v);
      int var = -1;
      for (int v : binaries)
        if (!fixed_vars.count(v) && !follower.count(v)) {
          var = v;
          break;
        }
      if (var < 0) {
        failed_leaves++;
        pruned_min_bound = std::min(pruned_min_bound, nd.bound);
        continue;
      }
      std::vector<Node> children;
      make_children(nd, var, 0.5, next_id, children);
      for (auto& ch : children) push_node(std::move(ch));
      continue;
    }

    double node_bound = std::max(nd.bound, ev.bound);
    pc_update(nd.branch_var, nd.branch_dir, nd.branch_frac, ev.bound - nd.bound);

    if (best_obj < kInf && node_bound >= best_obj - prune_margin()) {
      pruned_min_bound = std::min(pruned_min_bound, node_bound);
      continue;
    }

    // incumbent attempts: relaxed point itself, then the repair callback
    bool integral = true;
    for (int v : binaries) {
      if (std::min(std::fabs(ev.x_full[v]), std::fabs(1.0 - ev.x_full[v])) > opt.int_tol) {
        integral = false;
        break;
      }
    }
    bool candidate_seen = false;
    if (integral) {
      candidate_seen = try_incumbent(ev.x_full);
      if (!candidate_seen) {
        // resolve with binaries pinned to get a clean continuous point
        std::vector<std::pair<int, double>> fx = nd.fixings;
        std::set<int> already;
        for (auto& [v, val] : fx) already.insert(v);
        for (int v : binaries)
          if (!already.count(v)) fx.emplace_back(v, std::round(ev.x_full[v]));
        EvalOutcome h = evaluate_fixings(prog, fx, opt);
        res.ipm_iterations += h.iters;
        if (h.kind == EvalOutcome::Kind::Optimal)
          candidate_seen = try_incumbent(h.x_full);
        else if (h.kind == EvalOutcome::Kind::Failure)
          failed_leaves++;
      }
      // the captured candidate proves nothing about the rest of the subtree:
      // only the bound can close the node
      if (best_obj < kInf && node_bound >= best_obj - prune_margin()) {
        pruned_min_bound = std::min(pruned_min_bound, node_bound);
        continue;
      }
    } else if (repair) {
      auto cand = repair(prog, ev.x_full);
      if (cand) try_incumbent(*cand);
      if (best_obj < kInf && node_bound >= best_obj - prune_margin()) {
        pruned_min_bound = std::min(pruned_min_bound, node_bound);
        continue;
      }
    }

    // periodic round-and-fix restriction: pin the standalone binaries,
    // leave complement pairs to the continuous solve + repair pass
    if (explored == 1 || (opt.heur_every > 0 && explored - last_heur >= opt.heur_every)) {
      last_heur = explored;
      for (double threshold : {0.5, 0.25, 0.1}) {
        std::vector<std::pair<int, double>> fx = nd.fixings;
        std::set<int> already;
        for (auto& [v, val] : fx) already.insert(v);
        for (int v : binaries) {
          if (already.count(v) || follower.count(v) || partner.count(v)) continue;
          fx.emplace_back(v, (ev.x_full[v] >= threshold) ? 1.0 : 0.0);
        }
        EvalOutcome h = evaluate_fixings(prog, fx, opt);
        res.ipm_iterations += h.iters;
        if (h.kind != EvalOutcome::Kind::Optimal) continue;
        bool ok = try_incumbent(h.x_full);
        if (!ok && repair) {
          auto cand = repair(prog, h.x_full);
          if (cand) ok = try_incumbent(*cand);
        }
        if (ok) break;
      }
    }

    int var = select_branch_var(ev.x_full);
    if (var < 0) {
      // integral within tolerance but the bound cannot close the node yet:
      // split on the first unfixed leader to keep the search exact
      std::set<int> fixed_vars;
      for (auto& [v, val] : nd.fixings) fixed_vars.insert(v);
      for (int v : binaries)
        if (!fixed_vars.count(v) && !follower.count(v)) {
          var = v;
          break;
        }
    }
    if (var < 0) {
      // every binary pinned: the evaluation itself is the subtree optimum
      pruned_min_bound = std::min(pruned_min_bound, node_bound);
      if (!candidate_seen) failed_leaves++;
      continue;
    }
    Node nd2 = nd;
    nd2.bound = node_bound;
    std::vector<Node> children;
    make_children(nd2, var, std::clamp(ev.x_full[var], 0.0, 1.0), next_id, children);
    // push preferred child last for depth-first (pops first), first for best-first
    if (opt.node_order == SolveOptions::NodeOrder::DepthFirst) {
      push_node(std::move(children[1]));
      push_node(std::move(children[0]));
    } else {
      push_node(std::move(children[0]));
      push_node(std::move(children[1]));
    }
  }

  res.nodes = explored;
  double lb = global_lb();
  if (best_obj < kInf) {
    res.objective = best_obj;
    res.bound = std::min(lb, best_obj);
    res.x = best_x;
    fill_cone_slacks(prog, res.x, res.cone_slacks);
    double gap = (best_obj - res.bound) / std::max(1.0, std::fabs(best_obj));
    if (gap <= opt.rel_gap_tol)
      res.status = SolveStatus::Optimal;
    else if (gap <= accept_gap)
      res.status = SolveStatus::GapLimit;
    else if (stopped_time)
      res.status = SolveStatus::TimeLimit;
    else if (stopped_nodes)
      res.status = SolveStatus::NodeLimit;
    else if (failed_leaves > 0)
      res.status = SolveStatus::NumericalFailure;
    else
      res.status = SolveStatus::Optimal;
    res.message = format_msg("gap=", gap, " nodes=", explored);
  } else {
    res.bound = lb;
    if (stopped_time)
      res.status = SolveStatus::TimeLimit;
    else if (stopped_nodes)
      res.status = SolveStatus::NodeLimit;
    else if (failed_leaves > 0) {
      res.status = SolveStatus::NumericalFailure;
      res.message = format_msg(failed_leaves, " subproblems failed numerically");
    } else {
      res.status = SolveStatus::Infeasible;
      res.message = "all nodes infeasible";
    }
  }
  return res;
}

void encode_quadratic_epigraph(ConicProgram& prog, double a, double b, double c, int p_var,
                               int u_var, int fcost_var, const std::string& name) {
  if (a < 0) throw SolverError(format_msg(name, ": negative quadratic coefficient (nonconvex)"));
  if (a == 0.0) {
    std::vector<LinTerm> terms{{fcost_var, -1.0}, {p_var, b}};
    double rhs = 0.0;
    if (u_var >= 0)
      terms.push_back({u_var, c});
    else
      rhs = -c;
    prog.add_linear(name, Sense::LE, rhs, std::move(terms));
    return;
  }
  // t = fcost - b P - c u; the cone is written over t/k so the affine terms
  // and the unit offsets live on the same scale
  const double k = std::max(1.0, 4.0 * a + 2.0 * std::fabs(b) + std::fabs(c));
  SocConstraint soc;
  soc.name = name;
  std::vector<LinTerm> t{{fcost_var, 1.0 / k}, {p_var, -b / k}};
  double off = 0.0;
  if (u_var >= 0)
    t.push_back({u_var, -c / k});
  else
    off = -c / k;
  soc.norm_rows.push_back({{p_var, 2.0 * std::sqrt(a / k)}});
  soc.norm_offsets.push_back(0.0);
  soc.norm_rows.push_back(t);
  soc.norm_offsets.push_back(off - 1.0);
  soc.rhs_terms = t;
  soc.rhs_offset = off + 1.0;
  prog.add_soc(std::move(soc));
}

}  // namespace ies::conic
