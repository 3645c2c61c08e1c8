#include <doctest.h>

#include <fstream>

#include "ies/model.hpp"

using namespace ies;
using nlohmann::json;

namespace {
json tiny_json() {
  std::ifstream in(std::string(IES_FIXTURE_DIR) + "/tiny3bus2gas.json");
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}
}  // namespace

TEST_CASE("gas price conversion follows the 28.3 m3 per MBTU rule") {
  CHECK(model::convert_gas_price(1.0) == doctest::Approx(0.0353).epsilon(2e-3));
  CHECK(model::convert_gas_price(0.0) == 0.0);
  CHECK(model::convert_gas_price(28.3) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(model::convert_gas_price(-1.0), InputError);
}

TEST_CASE("gas price conversion is linear") {
  for (double x : {0.5, 2.0, 7.3}) {
    for (double k : {0.0, 1.5, 10.0}) {
      CHECK(model::convert_gas_price(k * x) ==
            doctest::Approx(k * model::convert_gas_price(x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("tiny fixture loads and validates") {
  auto s = model::scenario_from_json(tiny_json());
  CHECK(s.horizon_t == 4);
  CHECK(s.power_net.buses.size() == 3);
  CHECK(s.units.size() == 1);
  CHECK(s.gas_net.nodes.size() == 2);
  CHECK(s.wind.availability.size() == 4);
  CHECK(s.loads.at(3).size() == 4);
}

TEST_CASE("loading is deterministic: identical bytes give identical scenarios") {
  auto a = model::scenario_from_json(tiny_json());
  auto b = model::scenario_from_json(tiny_json());
  CHECK(a.horizon_t == b.horizon_t);
  CHECK(a.wind.availability == b.wind.availability);
  CHECK(a.loads == b.loads);
  CHECK(a.gas_demands == b.gas_demands);
  CHECK(a.units.size() == b.units.size());
  for (std::size_t i = 0; i < a.units.size(); ++i) {
    CHECK(a.units[i].a == b.units[i].a);
    CHECK(a.units[i].coal_price == b.units[i].coal_price);
  }
}

TEST_CASE("negative wind availability is rejected by name") {
  json j = tiny_json();
  j["wind"]["availability"][3] = -1.0;
  CHECK_THROWS_WITH_AS(model::scenario_from_json(j),
                       doctest::Contains("wind availability negative"), InputError);
}

TEST_CASE("series length mismatches are rejected") {
  json j = tiny_json();
  j["loads"]["3"] = {0.5, 0.6};
  CHECK_THROWS_WITH_AS(model::scenario_from_json(j), doctest::Contains("series-length mismatch"),
                       InputError);
}

TEST_CASE("missing fields are named") {
  json j = tiny_json();
  j["gas"].erase("gas_price");
  CHECK_THROWS_WITH_AS(model::scenario_from_json(j), doctest::Contains("gas_price"), InputError);
}

TEST_CASE("efficiency ordering eta_elec > eta_meth is enforced per slot") {
  json j = tiny_json();
  j["p2g"]["eta_elec"] = 0.58;
  j["p2g"]["eta_meth"] = 0.60;
  CHECK_THROWS_WITH_AS(model::scenario_from_json(j), doctest::Contains("efficiency ordering"),
                       InputError);
}

TEST_CASE("efficiency range windows are enforced") {
  json j = tiny_json();
  j["p2g"]["eta_elec"] = 0.80;
  CHECK_THROWS_WITH_AS(model::scenario_from_json(j), doctest::Contains("eta_elec"), InputError);
}

TEST_CASE("device references to unknown buses are rejected") {
  json j = tiny_json();
  j["wind"]["bus"] = 99;
  CHECK_THROWS_AS(model::scenario_from_json(j), InputError);
}

TEST_CASE("csv series override replaces a dotted key") {
  std::string path = "/tmp/ies_test_series.csv";
  {
    std::ofstream f(path);
    f << "slot,value\n0,0.1\n1,0.2\n2,0.3\n3,0.4\n";
  }
  json j = tiny_json();
  model::apply_series_override(j, "wind.availability", path);
  auto s = model::scenario_from_json(j);
  CHECK(s.wind.availability[0] == doctest::Approx(0.1));
  CHECK(s.wind.availability[3] == doctest::Approx(0.4));
}

TEST_CASE("wind availability above nameplate is rejected") {
  json j = tiny_json();
  j["wind"]["availability"] = {0.3, 1.5, 0.2, 0.5};  // 1.5 pu > 100 MW cap
  CHECK_THROWS_WITH_AS(model::scenario_from_json(j), doctest::Contains("nameplate"), InputError);
}
