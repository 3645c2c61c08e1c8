#include "ies/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace ies::model {

using nlohmann::json;

int Scenario::bus_index(int id) const {
  auto it = std::lower_bound(power_net.buses.begin(), power_net.buses.end(), id);
  if (it == power_net.buses.end() || *it != id)
    throw InputError(format_msg("unknown bus id ", id));
  return static_cast<int>(it - power_net.buses.begin());
}

int Scenario::gas_node_index(int id) const {
  for (std::size_t i = 0; i < gas_net.nodes.size(); ++i)
    if (gas_net.nodes[i].id == id) return static_cast<int>(i);
  throw InputError(format_msg("unknown gas node id ", id));
}

double convert_gas_price(double price_per_mbtu) {
  if (price_per_mbtu < 0) throw InputError("gas price per MBTU must be nonnegative");
  return price_per_mbtu / 28.3;
}

namespace {

const json& require(const json& j, const std::string& key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw InputError(format_msg("missing field `", where, key, "`"));
  return *it;
}

double num(const json& j, const std::string& key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number()) throw InputError(format_msg("field `", where, key, "` must be a number"));
  return v.get<double>();
}

double num_or(const json& j, const std::string& key, double fallback) {
  auto it = j.find(key);
  return (it == j.end()) ? fallback : it->get<double>();
}

int integer(const json& j, const std::string& key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number_integer()) throw InputError(format_msg("field `", where, key, "` must be an integer"));
  return v.get<int>();
}

// number -> broadcast to horizon; array -> checked length
std::vector<double> series(const json& v, int horizon, const std::string& name) {
  if (v.is_number()) return std::vector<double>(horizon, v.get<double>());
  if (!v.is_array())
    throw InputError(format_msg("series `", name, "` must be a number or an array"));
  if (static_cast<int>(v.size()) != horizon)
    throw InputError(format_msg("series-length mismatch: `", name, "` has ", v.size(),
                                " entries, horizon is ", horizon));
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(e.get<double>());
  return out;
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  Scenario s;
  s.horizon_t = integer(j, "horizon", "");
  if (s.horizon_t < 1) throw InputError("horizon must be >= 1");
  s.slot_hours = num(j, "slot_hours", "");
  if (s.slot_hours <= 0) throw InputError("slot_hours must be positive");
  const int T = s.horizon_t;

  {
    const json& p = require(j, "power", "");
    s.power_net.base_mva = num(p, "base_mva", "power.");
    s.power_net.reserve_rho = num(p, "reserve_rho", "power.");
    for (const auto& b : require(p, "buses", "power."))
      s.power_net.buses.push_back(b.get<int>());
    std::sort(s.power_net.buses.begin(), s.power_net.buses.end());
    for (const auto& l : require(p, "lines", "power.")) {
      Line ln;
      ln.from = integer(l, "from", "power.lines.");
      ln.to = integer(l, "to", "power.lines.");
      ln.x = num(l, "x", "power.lines.");
      ln.p_min = num(l, "p_min", "power.lines.");
      ln.p_max = num(l, "p_max", "power.lines.");
      s.power_net.lines.push_back(ln);
    }
    s.power_net.reference_bus =
        p.contains("reference_bus") ? p["reference_bus"].get<int>() : s.power_net.buses.front();
  }

  {
    const json& g = require(j, "gas", "");
    s.gas_net.gas_price = num(g, "gas_price", "gas.");
    for (const auto& n : require(g, "nodes", "gas.")) {
      GasNode nd;
      nd.id = integer(n, "id", "gas.nodes.");
      nd.p_lo = num(n, "p_lo", "gas.nodes.");
      nd.p_hi = num(n, "p_hi", "gas.nodes.");
      nd.s_lo = num_or(n, "s_lo", 0.0);
      nd.s_hi = num_or(n, "s_hi", 0.0);
      s.gas_net.nodes.push_back(nd);
    }
    std::sort(s.gas_net.nodes.begin(), s.gas_net.nodes.end(),
              [](const GasNode& a, const GasNode& b) { return a.id < b.id; });
    for (const auto& pp : require(g, "pipes", "gas.")) {
      GasPipe pe;
      pe.from = integer(pp, "from", "gas.pipes.");
      pe.to = integer(pp, "to", "gas.pipes.");
      pe.weymouth_c = num(pp, "weymouth_c", "gas.pipes.");
      s.gas_net.pipes.push_back(pe);
    }
  }

  for (const auto& u : require(j, "units", "")) {
    ThermalUnit t;
    t.id = integer(u, "id", "units.");
    t.bus = integer(u, "bus", "units.");
    t.p_max = num(u, "p_max", "units.");
    t.p_min = num(u, "p_min", "units.");
    t.a = num(u, "a", "units.");
    t.b = num(u, "b", "units.");
    t.c = num(u, "c", "units.");
    t.ramp_up = num(u, "ramp_up", "units.");
    t.ramp_down = num(u, "ramp_down", "units.");
    t.min_down = integer(u, "min_down", "units.");
    t.min_up = integer(u, "min_up", "units.");
    t.start_cost = num(u, "start_cost", "units.");
    t.stop_cost = num(u, "stop_cost", "units.");
    t.coal_price = num(u, "coal_price", "units.");
    t.initial_on = u.contains("initial_on") ? u["initial_on"].get<bool>() : true;
    t.initial_output = num_or(u, "initial_output", t.initial_on ? t.p_min : 0.0);
    s.units.push_back(t);
  }

  {
    const json& w = require(j, "wind", "");
    s.wind.bus = integer(w, "bus", "wind.");
    s.wind.delta_wp = num(w, "delta_wp", "wind.");
    s.wind.cap_kw = num(w, "cap_kw", "wind.");
    s.wind.availability = series(require(w, "availability", "wind."), T, "wind.availability");
    if (w.contains("profiles")) {
      for (auto it = w["profiles"].begin(); it != w["profiles"].end(); ++it)
        s.wind.profiles[it.key()] = series(it.value(), T, "wind.profiles." + it.key());
    }
  }

  {
    const json& p = require(j, "p2g", "");
    s.p2g.bus = integer(p, "bus", "p2g.");
    s.p2g.gas_node = integer(p, "gas_node", "p2g.");
    s.p2g.eta_elec = series(require(p, "eta_elec", "p2g."), T, "p2g.eta_elec");
    s.p2g.eta_meth = series(require(p, "eta_meth", "p2g."), T, "p2g.eta_meth");
    s.p2g.alpha_h2 = num(p, "alpha_h2", "p2g.");
    s.p2g.alpha_ch4_elec = num(p, "alpha_ch4_elec", "p2g.");
    s.p2g.alpha_ch4_meth = num(p, "alpha_ch4_meth", "p2g.");
    s.p2g.f_h2_max = num(p, "f_h2_max", "p2g.");
    s.p2g.f_ch4_max = num(p, "f_ch4_max", "p2g.");
  }

  {
    const json& c = require(j, "coal", "");
    s.coal.mining = series(require(c, "mining", "coal."), T, "coal.mining");
    s.coal.alpha_coal = series(require(c, "alpha_coal", "coal."), T, "coal.alpha_coal");
    s.coal.alpha_truck = series(require(c, "alpha_truck", "coal."), T, "coal.alpha_truck");
  }

  {
    const json& f = require(j, "safety", "");
    s.safety.lfl_h2 = num(f, "lfl_h2", "safety.");
    s.safety.ufl_h2 = num(f, "ufl_h2", "safety.");
    s.safety.lel_h2 = num(f, "lel_h2", "safety.");
    s.safety.uel_h2 = num(f, "uel_h2", "safety.");
    s.safety.lfl_ch4 = num(f, "lfl_ch4", "safety.");
    s.safety.ufl_ch4 = num(f, "ufl_ch4", "safety.");
    s.safety.lel_ch4 = num(f, "lel_ch4", "safety.");
    s.safety.uel_ch4 = num(f, "uel_ch4", "safety.");
    s.safety.q_h2 = num_or(f, "q_h2", 119.96);
    s.safety.q_ch4 = num_or(f, "q_ch4", 50.0);
  }

  {
    const json& p = require(j, "prices", "");
    s.prices.carbon_price = num_or(p, "carbon_price", 0.0);
    s.prices.mbtu_to_m3 = num_or(p, "mbtu_to_m3", 28.3);
    s.prices.coal_sale_price = num(p, "coal_sale_price", "prices.");
    s.prices.truck_cost_coeff = num(p, "truck_cost_coeff", "prices.");
    if (p.contains("carbon")) {
      const json& c = p["carbon"];
      s.prices.china_carbon_cny = num_or(c, "china_carbon_cny", 35.0);
      s.prices.eu_carbon_eur = num_or(c, "eu_carbon_eur", 30.0);
      s.prices.cny_per_usd = num_or(c, "cny_per_usd", 7.0);
      s.prices.eur_per_usd = num_or(c, "eur_per_usd", 0.9);
      if (c.contains("factors")) {
        const json& f = c["factors"];
        s.prices.factors.coal_gen = num_or(f, "coal_gen", s.prices.factors.coal_gen);
        s.prices.factors.c2h_process = num_or(f, "c2h_process", s.prices.factors.c2h_process);
        s.prices.factors.methanation_sink =
            num_or(f, "methanation_sink", s.prices.factors.methanation_sink);
        s.prices.factors.diesel_truck = num_or(f, "diesel_truck", s.prices.factors.diesel_truck);
        s.prices.factors.ev_grid = num_or(f, "ev_grid", s.prices.factors.ev_grid);
      }
      if (c.contains("fleet")) {
        const json& f = c["fleet"];
        s.prices.fleet.ev_kwh_per_ton = num_or(f, "ev_kwh_per_ton", s.prices.fleet.ev_kwh_per_ton);
        s.prices.fleet.diesel_fuel_per_ton =
            num_or(f, "diesel_fuel_per_ton", s.prices.fleet.diesel_fuel_per_ton);
      }
    }
  }

  for (auto it = require(j, "loads", "").begin(); it != require(j, "loads", "").end(); ++it)
    s.loads[std::stoi(it.key())] = series(it.value(), T, "loads." + it.key());
  for (auto it = require(j, "gas_demands", "").begin(); it != require(j, "gas_demands", "").end();
       ++it)
    s.gas_demands[std::stoi(it.key())] = series(it.value(), T, "gas_demands." + it.key());

  validate(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(format_msg("cannot open scenario file ", path));
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError(format_msg("scenario file ", path, " is not valid JSON: ", e.what()));
  }
  return scenario_from_json(j);
}

void validate(const Scenario& s) {
  const int T = s.horizon_t;
  if (T < 1) throw InputError("horizon must be >= 1");

  std::set<int> buses(s.power_net.buses.begin(), s.power_net.buses.end());
  if (buses.size() != s.power_net.buses.size()) throw InputError("duplicate bus ids");
  if (!buses.count(s.power_net.reference_bus)) throw InputError("reference_bus not in buses");
  if (s.power_net.reserve_rho < 0 || s.power_net.reserve_rho >= 1)
    throw InputError("reserve_rho must satisfy 0 <= rho < 1");
  for (const auto& l : s.power_net.lines) {
    if (!buses.count(l.from) || !buses.count(l.to))
      throw InputError(format_msg("line ", l.from, "-", l.to, " references an unknown bus"));
    if (l.x <= 0) throw InputError(format_msg("line ", l.from, "-", l.to, " reactance must be positive"));
    if (!(l.p_min <= 0 && 0 <= l.p_max))
      throw InputError(format_msg("line ", l.from, "-", l.to, " limits must satisfy p_min <= 0 <= p_max"));
  }

  std::set<int> gnodes;
  for (const auto& n : s.gas_net.nodes) {
    if (!gnodes.insert(n.id).second) throw InputError("duplicate gas node ids");
    if (n.p_lo < 0 || n.p_lo >= n.p_hi)
      throw InputError(format_msg("gas node ", n.id, " pressure bounds must satisfy 0 <= lo < hi"));
    if (n.s_lo > n.s_hi) throw InputError(format_msg("gas node ", n.id, " source bounds inverted"));
  }
  for (const auto& p : s.gas_net.pipes) {
    if (!gnodes.count(p.from) || !gnodes.count(p.to))
      throw InputError(format_msg("pipe ", p.from, "-", p.to, " references an unknown gas node"));
    if (p.weymouth_c <= 0)
      throw InputError(format_msg("pipe ", p.from, "-", p.to, " Weymouth constant must be positive"));
  }
  if (s.gas_net.gas_price < 0) throw InputError("gas_price must be nonnegative");

  std::set<int> unit_ids;
  for (const auto& u : s.units) {
    if (!unit_ids.insert(u.id).second) throw InputError("duplicate unit ids");
    if (!buses.count(u.bus)) throw InputError(format_msg("unit ", u.id, " references unknown bus ", u.bus));
    if (!(0 <= u.p_min && u.p_min <= u.p_max))
      throw InputError(format_msg("unit ", u.id, " must satisfy 0 <= p_min <= p_max"));
    if (u.a < 0) throw InputError(format_msg("unit ", u.id, " cost coefficient a must be nonnegative (convex)"));
    if (u.ramp_up <= 0 || u.ramp_down <= 0)
      throw InputError(format_msg("unit ", u.id, " ramp limits must be positive"));
    if (u.min_down < 1 || u.min_up < 1)
      throw InputError(format_msg("unit ", u.id, " min up/down times must be >= 1 slot"));
    if (u.start_cost < 0 || u.stop_cost < 0)
      throw InputError(format_msg("unit ", u.id, " start/stop costs must be nonnegative"));
    if (u.coal_price < 0) throw InputError(format_msg("unit ", u.id, " coal_price must be nonnegative"));
  }

  if (!buses.count(s.wind.bus)) throw InputError("wind farm references an unknown bus");
  if (s.wind.delta_wp < 0) throw InputError("wind delta_wp must be nonnegative");
  if (static_cast<int>(s.wind.availability.size()) != T)
    throw InputError("series-length mismatch: `wind.availability`");
  for (int t = 0; t < T; ++t) {
    if (s.wind.availability[t] < 0)
      throw InputError(format_msg("wind availability negative at slot ", t));
    if (s.wind.availability[t] * s.base_kw() > s.wind.cap_kw * (1 + 1e-9))
      throw InputError(format_msg("wind availability exceeds nameplate cap at slot ", t));
  }
  for (const auto& [name, prof] : s.wind.profiles) {
    if (static_cast<int>(prof.size()) != T)
      throw InputError(format_msg("series-length mismatch: `wind.profiles.", name, "`"));
    for (double v : prof)
      if (v < 0) throw InputError(format_msg("wind profile `", name, "` has a negative entry"));
  }

  if (!buses.count(s.p2g.bus)) throw InputError("p2g references an unknown bus");
  if (!gnodes.count(s.p2g.gas_node)) throw InputError("p2g references an unknown gas node");
  if (s.p2g.alpha_h2 < 0 || s.p2g.alpha_ch4_elec < 0 || s.p2g.alpha_ch4_meth < 0)
    throw InputError("p2g consumption parameters must be nonnegative");
  if (s.p2g.f_h2_max < 0 || s.p2g.f_ch4_max < 0)
    throw InputError("p2g capacities must be nonnegative");
  for (int t = 0; t < T; ++t) {
    double ee = s.p2g.eta_elec[t], em = s.p2g.eta_meth[t];
    if (!(0.57 <= ee && ee <= 0.73))
      throw InputError(format_msg("p2g.eta_elec out of [0.57, 0.73] at slot ", t));
    if (!(0.50 <= em && em <= 0.64))
      throw InputError(format_msg("p2g.eta_meth out of [0.50, 0.64] at slot ", t));
    if (!(ee > em))
      throw InputError(format_msg("p2g efficiency ordering violated at slot ", t,
                                  ": eta_elec must exceed eta_meth"));
  }

  if (static_cast<int>(s.coal.mining.size()) != T)
    throw InputError("series-length mismatch: `coal.mining`");
  for (int t = 0; t < T; ++t) {
    if (s.coal.mining[t] < 0) throw InputError(format_msg("coal mining negative at slot ", t));
    if (s.coal.alpha_coal[t] < 0 || s.coal.alpha_truck[t] < 0)
      throw InputError(format_msg("coal alpha coefficients must be nonnegative (slot ", t, ")"));
  }

  auto window = [](double lo, double hi, const char* what) {
    if (!(0 < lo && lo < hi && hi < 100))
      throw InputError(format_msg("safety window ", what, " must satisfy 0 < lower < upper < 100"));
  };
  window(s.safety.lfl_h2, s.safety.ufl_h2, "flammability H2");
  window(s.safety.lel_h2, s.safety.uel_h2, "explosive H2");
  window(s.safety.lfl_ch4, s.safety.ufl_ch4, "flammability CH4");
  window(s.safety.lel_ch4, s.safety.uel_ch4, "explosive CH4");

  if (s.prices.carbon_price < 0 || s.prices.coal_sale_price < 0 || s.prices.truck_cost_coeff < 0)
    throw InputError("prices must be nonnegative");

  for (const auto& [bus, ld] : s.loads) {
    if (!buses.count(bus)) throw InputError(format_msg("loads reference unknown bus ", bus));
    if (static_cast<int>(ld.size()) != T)
      throw InputError(format_msg("series-length mismatch: `loads.", bus, "`"));
  }
  for (const auto& [node, gd] : s.gas_demands) {
    if (!gnodes.count(node))
      throw InputError(format_msg("gas_demands reference unknown node ", node));
    if (static_cast<int>(gd.size()) != T)
      throw InputError(format_msg("series-length mismatch: `gas_demands.", node, "`"));
    for (double v : gd)
      if (v < 0) throw InputError(format_msg("gas demand negative at node ", node));
  }
}

std::vector<double> read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(format_msg("cannot open series file ", path));
  std::string line;
  if (!std::getline(in, line)) throw InputError(format_msg("series file ", path, " is empty"));
  // tolerate but do not require the "slot,value" header
  auto parse_row = [&](const std::string& row) -> std::pair<int, double> {
    auto comma = row.find(',');
    if (comma == std::string::npos)
      throw InputError(format_msg("series file ", path, ": expected `slot,value` rows"));
    return {std::stoi(row.substr(0, comma)), std::stod(row.substr(comma + 1))};
  };
  std::vector<std::pair<int, double>> rows;
  if (line != "slot,value") rows.push_back(parse_row(line));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(parse_row(line));
  }
  std::vector<double> out(rows.size(), 0.0);
  for (auto& [slot, v] : rows) {
    if (slot < 0 || slot >= static_cast<int>(rows.size()))
      throw InputError(format_msg("series file ", path, ": slot ", slot, " out of range"));
    out[slot] = v;
  }
  return out;
}

void apply_series_override(nlohmann::json& scenario, const std::string& dotted_key,
                           const std::string& csv_path) {
  auto values = read_series_csv(csv_path);
  json arr = json::array();
  for (double v : values) arr.push_back(v);
  json* cur = &scenario;
  std::string rest = dotted_key;
  while (true) {
    auto dot = rest.find('.');
    std::string key = rest.substr(0, dot);
    if (dot == std::string::npos) {
      (*cur)[key] = arr;
      return;
    }
    if (!cur->contains(key))
      throw InputError(format_msg("override key `", dotted_key, "`: no such section `", key, "`"));
    cur = &(*cur)[key];
    rest = rest.substr(dot + 1);
  }
}

}  // namespace ies::model
