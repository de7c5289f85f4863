#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "geeopt/model.hpp"
#include "geeopt/scenario_gen.hpp"

using namespace geeopt;

TEST_CASE("stock noise power: -173 dBm/Hz over 10930 Hz") {
  Scenario s = generate_scenario(GenConfig{});
  // 10^((-173 - 30)/10) W/Hz * 10930 Hz
  double expected = 5.477976463546085e-17;
  REQUIRE(static_cast<int>(s.noise_w.size()) == 4);
  for (double n : s.noise_w) {
    CHECK(n == doctest::Approx(expected).epsilon(1e-9));
    CHECK(n == doctest::Approx(10930.0 * std::pow(10.0, -20.3)).epsilon(1e-12));
  }
  CHECK(s.users == 12);
  CHECK(s.subcarriers == 4);
  CHECK(s.bandwidth_hz == 10930.0);
  // -20 dBW budgets and static power
  for (double v : s.p_max_w) CHECK(v == doctest::Approx(0.01).epsilon(1e-12));
  for (double v : s.p_static_w) CHECK(v > 0.0);
  for (int k = 0; k < s.users; ++k)
    for (int n = 0; n < s.subcarriers; ++n) CHECK(s.mu(k, n) == 1.02);
}

TEST_CASE("generation is deterministic in the seed and sensitive to it") {
  GenConfig g;
  g.users = 5;
  g.subcarriers = 3;
  g.seed = 42;
  Scenario a = generate_scenario(g);
  Scenario b = generate_scenario(g);
  CHECK(a == b);
  g.seed = 43;
  Scenario c = generate_scenario(g);
  CHECK(a.alpha.v != c.alpha.v);
}

TEST_CASE("self-interference is exactly the configured fraction of the direct gain") {
  for (double ratio : {0.0, 0.01, 0.1}) {
    GenConfig g;
    g.users = 4;
    g.subcarriers = 2;
    g.xi_ratio = ratio;
    g.seed = 7;
    Scenario s = generate_scenario(g);
    for (int k = 0; k < s.users; ++k)
      for (int n = 0; n < s.subcarriers; ++n) CHECK(s.xi(k, n) == ratio * s.alpha(k, n));
  }
}

TEST_CASE("single-center topology: every receiver hears a transmitter identically") {
  GenConfig g;
  g.users = 5;
  g.subcarriers = 3;
  g.topology = Topology::single_center;
  g.seed = 11;
  Scenario s = generate_scenario(g);
  for (int l = 0; l < s.users; ++l)
    for (int n = 0; n < s.subcarriers; ++n) {
      double common = -1.0;
      for (int k = 0; k < s.users; ++k) {
        if (k == l) continue;
        if (common < 0.0)
          common = s.beta(l, k, n);
        else
          CHECK(s.beta(l, k, n) == common);
      }
    }
  // Paired topology has independent receiver positions, so gains differ.
  g.topology = Topology::paired;
  Scenario t = generate_scenario(g);
  bool any_differ = false;
  for (int n = 0; n < t.subcarriers && !any_differ; ++n)
    if (t.beta(0, 1, n) != t.beta(0, 2, n)) any_differ = true;
  CHECK(any_differ);
}

TEST_CASE("scenario files round-trip exactly, including the generator config") {
  GenConfig g;
  g.users = 3;
  g.subcarriers = 2;
  g.seed = 99;
  g.rmin_bit_s_hz = 0.25;
  Scenario s = generate_scenario(g);
  REQUIRE(s.origin.has_value());

  std::string text = scenario_to_json(s);
  Scenario back = scenario_from_json(text);
  CHECK(back == s);
  CHECK(scenario_to_json(back) == text);

  const char* path = "roundtrip_scenario_tmp.json";
  save_scenario(s, path);
  Scenario from_file = load_scenario(path);
  CHECK(from_file == s);
  std::remove(path);
}

TEST_CASE("scenario parsing errors name the field") {
  GenConfig g;
  g.users = 2;
  g.subcarriers = 2;
  Scenario s = generate_scenario(g);
  nlohmann::json j = nlohmann::json::parse(scenario_to_json(s));

  nlohmann::json missing = j;
  missing.erase("alpha");
  CHECK_THROWS_WITH_AS(scenario_from_json(missing.dump()),
                       "scenario file: missing field \"alpha\"", std::runtime_error);

  nlohmann::json bad_type = j;
  bad_type["bandwidth_hz"] = "wide";
  CHECK_THROWS_AS(scenario_from_json(bad_type.dump()), std::runtime_error);

  nlohmann::json negative = j;
  negative["alpha"][0][0] = -1.0;
  CHECK_THROWS_AS(scenario_from_json(negative.dump()), std::invalid_argument);

  CHECK_THROWS_AS(scenario_from_json("{ not json"), std::runtime_error);
  CHECK_THROWS_AS(load_scenario("definitely_missing_file.json"), std::runtime_error);
}

TEST_CASE("generator config: defaults, overrides, unknown keys") {
  GenConfig def = gen_config_from_json("{}");
  CHECK(def == GenConfig{});

  GenConfig g = gen_config_from_json(
      R"({"users": 6, "subcarriers": 3, "pmax_dbw": -10, "topology": "single-center", "seed": 5})");
  CHECK(g.users == 6);
  CHECK(g.subcarriers == 3);
  CHECK(g.pmax_dbw == -10.0);
  CHECK(g.topology == Topology::single_center);
  CHECK(g.seed == 5);

  CHECK_THROWS_WITH_AS(gen_config_from_json(R"({"bogus": 1})"),
                       "gen config: unknown field \"bogus\"", std::runtime_error);
  CHECK_THROWS_AS(gen_config_from_json(R"({"topology": "ring"})"), std::invalid_argument);
  CHECK_THROWS_AS(gen_config_from_json(R"({"users": 0})"), std::invalid_argument);

  std::string text = gen_config_to_json(g);
  GenConfig back = gen_config_from_json(text);
  CHECK(back == g);
}

TEST_CASE("generated scenarios are valid and physically scaled") {
  GenConfig g;
  g.users = 6;
  g.subcarriers = 3;
  g.seed = 123;
  Scenario s = generate_scenario(g);
  s.validate();
  // Path loss over >= 1 m at exponent 4 keeps gains finite; everything
  // non-negative with a zero diagonal is covered by validate(). Spot-check
  // scale: direct gains should dwarf the noise floor.
  double min_alpha = 1e300;
  for (double a : s.alpha.v) min_alpha = std::min(min_alpha, a);
  CHECK(min_alpha > 0.0);
  CHECK(s.noise_w[0] < 1e-12);
}
