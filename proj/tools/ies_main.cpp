#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "ies/model.hpp"
#include "ies/oracle.hpp"
#include "ies/parallel.hpp"
#include "ies/runner.hpp"

namespace {

using ies::conic::SolveStatus;
using nlohmann::json;

constexpr int kExitOptimal = 0;
constexpr int kExitLimit = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitInput = 4;

int exit_code(SolveStatus st) {
  switch (st) {
    case SolveStatus::Optimal: return kExitOptimal;
    case SolveStatus::GapLimit:
    case SolveStatus::NodeLimit:
    case SolveStatus::TimeLimit: return kExitLimit;
    case SolveStatus::Infeasible: return kExitInfeasible;
    default: return kExitLimit;
  }
}

ies::model::Scenario load_with_overrides(const std::string& path,
                                         const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ies::InputError("cannot open scenario file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ies::InputError(std::string("scenario is not valid JSON: ") + e.what());
  }
  for (const auto& ov : overrides) {
    auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw ies::InputError("series override must look like key.path=file.csv");
    ies::model::apply_series_override(j, ov.substr(0, eq), ov.substr(eq + 1));
  }
  return ies::model::scenario_from_json(j);
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    auto comma = csv.find(',', pos);
    if (comma == std::string::npos) comma = csv.size();
    out.push_back(std::stod(csv.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

void write_solution_json(const ies::runner::DispatchSolution& sol, const std::string& dir) {
  std::ofstream f(std::filesystem::path(dir) / "solution.json");
  f << ies::runner::solution_to_json(sol).dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"integrated electric-gas dispatch engine"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = "out", day, fleet = "hydrogen";
  std::vector<std::string> series_overrides;
  bool no_p2g = false;
  double rho = -1.0, gap = 1e-4, time_limit = 0.0;
  int threads = 1;
  std::string dump_path, branching = "most-fractional", node_order = "best-first";

  auto add_solver_flags = [&](CLI::App* cmd) {
    cmd->add_option("--gap", gap, "relative MIP gap tolerance")->capture_default_str();
    cmd->add_option("--threads", threads, "worker threads for parallel kernels")
        ->capture_default_str();
    cmd->add_option("--time-limit", time_limit, "wall clock limit in seconds (0 = none)");
    cmd->add_option("--branching", branching, "most-fractional | pseudo-cost");
    cmd->add_option("--node-order", node_order, "best-first | depth-first");
  };
  auto make_solve_options = [&]() {
    ies::conic::SolveOptions o;
    o.rel_gap_tol = gap;
    if (time_limit > 0) o.time_limit_s = time_limit;
    if (branching == "pseudo-cost")
      o.branching = ies::conic::SolveOptions::Branching::PseudoCost;
    if (node_order == "depth-first")
      o.node_order = ies::conic::SolveOptions::NodeOrder::DepthFirst;
    ies::parallel::set_num_threads(threads);
    return o;
  };

  // run
  auto* run_cmd = app.add_subcommand("run", "solve a scenario and write reports");
  run_cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run_cmd->add_flag("--no-p2g", no_p2g, "ablate electrolysis/methanation (keeps C2H)");
  run_cmd->add_option("--rho", rho, "hot spare coefficient override");
  run_cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
  run_cmd->add_option("--day", day, "wind profile selector (winter|summer|annual)");
  run_cmd->add_option("--fleet", fleet, "truck fleet variant (hydrogen|ev|diesel)")
      ->capture_default_str();
  run_cmd->add_option("--dump", dump_path, "write the conic program text dump here");
  run_cmd->add_option("--series", series_overrides,
                      "CSV series override, e.g. wind.availability=file.csv");
  add_solver_flags(run_cmd);

  // sweep
  std::string sweep_param = "delta_wp", sweep_values;
  auto* sweep_cmd = app.add_subcommand("sweep", "re-solve across a parameter grid");
  sweep_cmd->add_option("scenario", scenario_path)->required();
  sweep_cmd->add_option("--param", sweep_param, "delta_wp | rho")->capture_default_str();
  sweep_cmd->add_option("--values", sweep_values, "comma separated values")->required();
  sweep_cmd->add_option("--out", out_dir)->capture_default_str();
  sweep_cmd->add_flag("--no-p2g", no_p2g);
  add_solver_flags(sweep_cmd);

  // report
  std::string solution_path;
  auto* report_cmd = app.add_subcommand("report", "re-emit CSV reports from a solution.json");
  report_cmd->add_option("solution", solution_path, "solution.json from a previous run")
      ->required();
  report_cmd->add_option("--out", out_dir)->capture_default_str();

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "check a scenario file");
  validate_cmd->add_option("scenario", scenario_path)->required();
  validate_cmd->add_option("--series", series_overrides,
                           "CSV series override, e.g. wind.availability=file.csv");

  // carbon
  auto* carbon_cmd = app.add_subcommand("carbon", "fleet comparison under carbon pricing");
  carbon_cmd->add_option("scenario", scenario_path)->required();
  carbon_cmd->add_option("--out", out_dir)->capture_default_str();
  add_solver_flags(carbon_cmd);

  // oracle
  std::string oracle_kind, oracle_fixture;
  auto* oracle_cmd = app.add_subcommand("oracle", "run a brute-force reference");
  oracle_cmd->add_option("kind", oracle_kind, "uc | gas | mccormick")->required();
  oracle_cmd->add_option("fixture", oracle_fixture, "oracle fixture JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      auto s = load_with_overrides(scenario_path, series_overrides);
      ies::runner::RunOptions opt;
      opt.solve = make_solve_options();
      opt.flags.with_p2g = !no_p2g;
      opt.flags.fleet = ies::carbon::fleet_from_string(fleet);
      if (rho >= 0) opt.flags.rho_override = rho;
      if (!day.empty()) opt.flags.day = day;
      if (!dump_path.empty()) opt.dump_program = dump_path;
      auto sol = ies::runner::run(s, opt);
      if (!sol.pw.empty()) {
        ies::runner::report(sol, out_dir);
        write_solution_json(sol, out_dir);
      }
      std::cout << "status=" << ies::conic::to_string(sol.status)
                << " objective=" << ies::fmt_double(sol.objective)
                << " total=" << ies::fmt_double(sol.costs.total)
                << " gap=" << ies::fmt_double(sol.gap) << " nodes=" << sol.nodes << "\n";
      return exit_code(sol.status);
    }
    if (*sweep_cmd) {
      auto s = load_with_overrides(scenario_path, series_overrides);
      ies::runner::RunOptions opt;
      opt.solve = make_solve_options();
      opt.flags.with_p2g = !no_p2g;
      auto sw = ies::runner::sweep(s, sweep_param, parse_values(sweep_values), opt);
      ies::runner::write_sweep_files(sw, out_dir);
      int bad = 0;
      for (const auto& pt : sw.points) {
        std::cout << sweep_param << "=" << ies::fmt_double(pt.value)
                  << " status=" << ies::conic::to_string(pt.status)
                  << " objective=" << ies::fmt_double(pt.objective)
                  << " economic_total=" << ies::fmt_double(pt.economic_total) << "\n";
        if (pt.status != SolveStatus::Optimal && pt.status != SolveStatus::GapLimit) bad++;
      }
      if (sw.interior_minimum)
        std::cout << "interior minimum at " << sweep_param << "="
                  << ies::fmt_double(sw.points[sw.argmin_economic].value) << "\n";
      return bad == 0 ? kExitOptimal : kExitLimit;
    }
    if (*report_cmd) {
      std::ifstream f(solution_path);
      if (!f) throw ies::InputError("cannot open solution file " + solution_path);
      json j;
      f >> j;
      auto sol = ies::runner::solution_from_json(j);
      ies::runner::report(sol, out_dir);
      std::cout << "wrote reports to " << out_dir << "\n";
      return kExitOptimal;
    }
    if (*validate_cmd) {
      auto s = load_with_overrides(scenario_path, series_overrides);
      std::cout << "ok: " << s.power_net.buses.size() << " buses, " << s.units.size()
                << " units, " << s.gas_net.nodes.size() << " gas nodes, T=" << s.horizon_t
                << "\n";
      return kExitOptimal;
    }
    if (*carbon_cmd) {
      auto s = load_with_overrides(scenario_path, series_overrides);
      ies::runner::RunOptions opt;
      opt.solve = make_solve_options();
      auto fr = ies::runner::compare_fleets(s, opt);
      ies::runner::write_carbon_report(fr, out_dir);
      for (const auto& row : fr.table.rows)
        std::cout << ies::carbon::to_string(row.fleet)
                  << " adjusted_china=" << ies::fmt_double(row.adjusted_china)
                  << " adjusted_eu=" << ies::fmt_double(row.adjusted_eu)
                  << (row.feasible ? "" : " (infeasible)") << "\n";
      for (const auto& row : fr.table.rows)
        if (!row.feasible) return kExitInfeasible;
      return kExitOptimal;
    }
    if (*oracle_cmd) {
      std::ifstream f(oracle_fixture);
      if (!f) throw ies::InputError("cannot open oracle fixture " + oracle_fixture);
      json j;
      f >> j;
      json out;
      if (oracle_kind == "uc") {
        ies::oracle::UcToy toy;
        for (const auto& u : j.at("units")) {
          ies::oracle::UcToyUnit t;
          t.p_min = u.at("p_min");
          t.p_max = u.at("p_max");
          t.a = u.at("a");
          t.b = u.at("b");
          t.c = u.at("c");
          t.coal_price = u.value("coal_price", 1.0);
          t.ramp_up = t.ramp_down = u.value("ramp", t.p_max);
          t.min_down = u.value("min_down", 1);
          t.min_up = u.value("min_up", 1);
          t.start_cost = u.value("start_cost", 0.0);
          t.stop_cost = u.value("stop_cost", 0.0);
          t.initial_on = u.value("initial_on", true);
          t.initial_output = u.value("initial_output", t.initial_on ? t.p_min : 0.0);
          toy.units.push_back(t);
        }
        toy.load = j.at("load").get<std::vector<double>>();
        toy.reserve_rho = j.value("reserve_rho", 0.0);
        auto r = ies::oracle::enumerate_uc(toy);
        out["feasible"] = r.feasible;
        out["objective"] = r.objective;
        out["patterns_checked"] = r.patterns_checked;
        if (r.feasible) out["schedule"] = r.schedule;
      } else if (oracle_kind == "gas") {
        ies::oracle::GasToy toy;
        for (const auto& n : j.at("nodes"))
          toy.nodes.push_back({n.at("pi_lo"), n.at("pi_hi"), n.value("s_lo", 0.0),
                               n.value("s_hi", 0.0), n.value("demand", 0.0)});
        for (const auto& p : j.at("pipes"))
          toy.pipes.push_back({p.at("from"), p.at("to"), p.at("c")});
        toy.gas_price = j.value("gas_price", 1.0);
        auto r = ies::oracle::grid_search_gas(toy, j.value("grid", 41), j.value("tol", 1e-6));
        out["feasible"] = r.feasible;
        out["objective"] = r.objective;
        if (r.feasible) {
          out["pi"] = r.pi;
          out["flow"] = r.flow;
          out["source"] = r.source;
        } else {
          out["message"] = r.message;
        }
      } else if (oracle_kind == "mccormick") {
        double v = ies::oracle::mccormick_min(
            j.at("direction"), j.at("pi_m"), j.at("pi_n"), j.at("pi_m_lo"), j.at("pi_m_hi"),
            j.at("pi_n_lo"), j.at("pi_n_hi"));
        out["lambda_min"] = v;
      } else {
        throw ies::InputError("oracle kind must be uc, gas or mccormick");
      }
      std::cout << out.dump(2) << "\n";
      return kExitOptimal;
    }
  } catch (const ies::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitLimit;
  }
  return kExitInput;
}
