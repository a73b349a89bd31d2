#include <doctest.h>

#include "irsevo/errors.hpp"
#include "irsevo/scenario.hpp"
#include "test_paths.hpp"

using namespace irsevo;

namespace {

Scenario from_text(const std::string& text) {
  Scenario scenario = parse_scenario(text);
  validate_scenario(scenario);
  scenario.strategies = enumerate_strategies(scenario);
  return scenario;
}

const char* kSingleService = R"({
  "physics": { "carrier_frequency_hz": 3.0e11 },
  "user": { "position": [50, 0], "population": 10 },
  "providers": [{
    "id": 1, "bs_position": [100, 20], "antennas": 4, "bandwidth_hz": 2e6,
    "power_levels_dbm": [30], "price_per_element": 1e-4, "price_per_watt": 0.05,
    "unit_data_value": 1e-6
  }],
  "irs": [{ "owner_sp": 1, "position": [80, 20], "modules": 1, "elements_per_module": 8 }]
})";

}  // namespace

TEST_CASE("benchmark scenario enumerates six services in canonical order") {
  const Scenario scenario = load_scenario(test_paths::baseline());
  REQUIRE(scenario.group_count() == 6);
  const std::vector<std::string> expected = {"sp1.irs1.k1.j1", "sp1.irs1.k2.j1",
                                             "sp1.irs2.k1.j1", "sp1.irs2.k2.j1",
                                             "sp2.irs1.k1.j1", "sp2.irs1.k1.j2"};
  for (std::size_t g = 0; g < expected.size(); ++g) {
    CHECK(scenario.strategies[g].label() == expected[g]);
  }
  // provider 1 alone offers four services
  int sp1_services = 0;
  for (const auto& s : scenario.strategies) sp1_services += s.sp == 1 ? 1 : 0;
  CHECK(sp1_services == 4);
}

TEST_CASE("degenerate strategy space has a single entry") {
  const Scenario scenario = from_text(kSingleService);
  CHECK(scenario.group_count() == 1);
  CHECK(scenario.strategies[0].active_elements == 8);
}

TEST_CASE("module subsets multiply out") {
  std::string text = kSingleService;
  text.replace(text.find("\"modules\": 1"), 12, "\"modules\": 3");
  const Scenario scenario = from_text(text);
  REQUIRE(scenario.group_count() == 3);
  for (int k = 1; k <= 3; ++k) {
    CHECK(scenario.strategies[k - 1].subset_size == k);
    CHECK(scenario.strategies[k - 1].active_elements == 8 * k);
  }
}

TEST_CASE("active elements equal subset size times module size everywhere") {
  const Scenario scenario = load_scenario(test_paths::baseline());
  for (const auto& s : scenario.strategies) {
    CHECK(s.active_elements ==
          s.subset_size * scenario.panel(s.sp, s.irs).elements_per_module);
  }
}

TEST_CASE("reload yields an identical enumeration") {
  const Scenario a = load_scenario(test_paths::baseline());
  const Scenario b = load_scenario(test_paths::baseline());
  REQUIRE(a.group_count() == b.group_count());
  for (int g = 0; g < a.group_count(); ++g) {
    CHECK(a.strategies[g].label() == b.strategies[g].label());
  }
}

TEST_CASE("dbm conversion") {
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dbm_to_watts(25.0) == doctest::Approx(0.31622776601683794).epsilon(1e-12));
  CHECK(dbm_to_watts(35.0) == doctest::Approx(3.1622776601683795).epsilon(1e-12));
}

TEST_CASE("validation errors name the offending field") {
  std::string text = kSingleService;

  SUBCASE("empty provider list") {
    const auto start = text.find("\"providers\": [");
    std::string broken = text;
    broken.replace(start, text.find("],", start) - start + 1, "\"providers\": [");
    CHECK_THROWS_AS(from_text(broken), ValidationError);
  }
  SUBCASE("non-increasing power levels") {
    std::string broken = text;
    broken.replace(broken.find("[30]"), 4, "[30, 30]");
    CHECK_THROWS_WITH_AS(from_text(broken),
                         doctest::Contains("providers[0].power_levels_dbm"), ValidationError);
  }
  SUBCASE("population below strategy count") {
    std::string broken = text;
    broken.replace(broken.find("\"population\": 10"), 16, "\"population\": 0");
    CHECK_THROWS_WITH_AS(from_text(broken), doctest::Contains("user.population"),
                         ValidationError);
  }
  SUBCASE("orphan panel owner") {
    std::string broken = text;
    broken.replace(broken.find("\"owner_sp\": 1"), 13, "\"owner_sp\": 7");
    CHECK_THROWS_AS(from_text(broken), ValidationError);
  }
  SUBCASE("malformed json") {
    CHECK_THROWS_AS(parse_scenario("{ not json"), ValidationError);
  }
  SUBCASE("negative price") {
    std::string broken = text;
    broken.replace(broken.find("\"price_per_watt\": 0.05"), 22, "\"price_per_watt\": -1");
    CHECK_THROWS_WITH_AS(from_text(broken), doctest::Contains("price_per_watt"),
                         ValidationError);
  }
}

TEST_CASE("missing file raises an io error") {
  CHECK_THROWS_AS(load_scenario("no/such/file.json"), IoError);
}
