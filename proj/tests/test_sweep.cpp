#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "geeopt/sweep.hpp"

using namespace geeopt;

namespace {

SweepConfig tiny_config() {
  SweepConfig cfg;
  cfg.sweep_param = "rmin";
  cfg.values = {0.1, 0.3};
  cfg.seed_count = 2;
  cfg.base_seed = 11;
  cfg.qos_modes = {"none", "barrier"};
  cfg.gen.users = 3;
  cfg.gen.subcarriers = 2;
  return cfg;
}

struct EnvGuard {
  std::string name;
  std::string old_value;
  bool had = false;
  explicit EnvGuard(const char* n) : name(n) {
    if (const char* v = std::getenv(n)) {
      had = true;
      old_value = v;
    }
  }
  ~EnvGuard() {
    if (had)
      setenv(name.c_str(), old_value.c_str(), 1);
    else
      unsetenv(name.c_str());
  }
};

}  // namespace

TEST_CASE("sweep config validation names the offending entry") {
  SweepConfig cfg = tiny_config();
  cfg.sweep_param = "bogus";
  CHECK_THROWS_WITH_AS(cfg.validate(), "sweep: unknown sweep_param \"bogus\"",
                       std::invalid_argument);
  cfg = tiny_config();
  cfg.values.clear();
  CHECK_THROWS_WITH_AS(cfg.validate(), "sweep: values must not be empty", std::invalid_argument);
  cfg = tiny_config();
  cfg.seed_count = 0;
  CHECK_THROWS_WITH_AS(cfg.validate(), "sweep: seed_count must be >= 1", std::invalid_argument);
  cfg = tiny_config();
  cfg.qos_modes.clear();
  CHECK_THROWS_WITH_AS(cfg.validate(), "sweep: qos_modes must not be empty",
                       std::invalid_argument);
  cfg = tiny_config();
  cfg.qos_modes = {"none", "soft"};
  CHECK_THROWS_WITH_AS(cfg.validate(), "sweep: unknown qos mode \"soft\"", std::invalid_argument);
}

TEST_CASE("mode names map onto the mode variants") {
  QosMode none = qos_mode_from_string("none", 2.0, -7.0);
  CHECK(std::holds_alternative<QosNone>(none));
  QosMode barrier = qos_mode_from_string("barrier", 2.0, -7.0);
  const auto* b = std::get_if<QosBarrier>(&barrier);
  REQUIRE(b != nullptr);
  CHECK(b->rho == 2.0);
  CHECK(b->relax_value == -7.0);
  CHECK(std::holds_alternative<QosGeneralized>(qos_mode_from_string("generalized", 1.0, -1.0)));
  CHECK_THROWS_WITH_AS(qos_mode_from_string("hard", 1.0, -1.0), "unknown qos mode \"hard\"",
                       std::invalid_argument);
}

TEST_CASE("sweep config json: defaults, overrides and rejection of unknown keys") {
  SweepConfig minimal = sweep_config_from_json(R"({"sweep_param":"rmin","values":[0.1]})");
  CHECK(minimal.sweep_param == "rmin");
  CHECK(minimal.values == std::vector<double>{0.1});
  CHECK(minimal.seed_count == 1);
  CHECK(minimal.base_seed == 1);
  CHECK(minimal.qos_modes == std::vector<std::string>{"none"});

  SweepConfig full = sweep_config_from_json(R"({
    "sweep_param": "pmax_dbw",
    "values": [-25, -20],
    "seed_count": 3,
    "base_seed": 42,
    "qos_modes": ["none", "generalized"],
    "gen": {"users": 5, "subcarriers": 3, "rmin_bit_s_hz": 0.2},
    "solver": {"eps": 1e-3, "max_outer": 50, "barrier_rho": 4.0, "learning_tol": 1e-5}
  })");
  CHECK(full.values.size() == 2);
  CHECK(full.seed_count == 3);
  CHECK(full.base_seed == 42);
  CHECK(full.gen.users == 5);
  CHECK(full.gen.subcarriers == 3);
  CHECK(full.gen.rmin_bit_s_hz == 0.2);
  CHECK(full.solver.eps == 1e-3);
  CHECK(full.solver.max_outer == 50);
  CHECK(full.solver.learning.tol == 1e-5);
  const auto* b = std::get_if<QosBarrier>(&full.solver.qos);
  REQUIRE(b != nullptr);  // the solver block carries the barrier knobs
  CHECK(b->rho == 4.0);

  CHECK_THROWS_WITH_AS(sweep_config_from_json(R"({"sweep_param":"rmin","values":[1],"extra":0})"),
                       "sweep config: unknown field \"extra\"", std::runtime_error);
  CHECK_THROWS_WITH_AS(
      sweep_config_from_json(R"({"sweep_param":"rmin","values":[1],"solver":{"nope":1}})"),
      "sweep config: unknown solver field \"nope\"", std::runtime_error);
  CHECK_THROWS_WITH_AS(sweep_config_from_json(R"({"values":[1]})"),
                       "sweep config: missing field \"sweep_param\"", std::runtime_error);
  CHECK_THROWS_WITH_AS(sweep_config_from_json(R"({"sweep_param":"rmin"})"),
                       "sweep config: missing field \"values\"", std::runtime_error);
  CHECK_THROWS_WITH_AS(
      sweep_config_from_json(R"({"sweep_param":"rmin","values":"all"})"),
      "sweep config: field \"values\" has the wrong type", std::runtime_error);
  CHECK_THROWS_AS(sweep_config_from_json("{nope"), std::runtime_error);
}

TEST_CASE("csv header is stable and rows mirror the result") {
  SweepResult r;
  r.sweep_param = "rmin";
  SweepRow row;
  row.value = 0.25;
  row.qos_mode = "barrier";
  row.seed_count = 4;
  row.mean_gee = 123456.789;
  row.nonconverged_count = 1;
  r.rows.push_back(row);
  std::string csv = sweep_to_csv(r);

  const std::string header =
      "sweep_param,value,qos_mode,seed_count,mean_gee,mean_sum_rate,mean_user_rate,"
      "satisfied_ratio,mean_I_D,mean_I_B,mean_I_L,nonconverged_count\n";
  REQUIRE(csv.size() > header.size());
  CHECK(csv.substr(0, header.size()) == header);
  CHECK(csv.find("rmin,0.25,barrier,4,123456.789,0,0,0,0,0,0,1\n") != std::string::npos);
}

TEST_CASE("a small sweep fills every cell and groups rows value-major") {
  SweepConfig cfg = tiny_config();
  SweepResult r = run_sweep(cfg);
  REQUIRE(r.rows.size() == 4);
  CHECK(r.rows[0].value == 0.1);
  CHECK(r.rows[0].qos_mode == "none");
  CHECK(r.rows[1].value == 0.1);
  CHECK(r.rows[1].qos_mode == "barrier");
  CHECK(r.rows[2].value == 0.3);
  CHECK(r.rows[2].qos_mode == "none");
  CHECK(r.rows[3].value == 0.3);
  CHECK(r.rows[3].qos_mode == "barrier");
  REQUIRE(r.satisfied_samples.size() == 4);
  REQUIRE(r.gee_samples.size() == 4);
  for (const auto& v : r.satisfied_samples) CHECK(v.size() == 2);
  for (const auto& v : r.gee_samples) CHECK(v.size() == 2);
  for (const SweepRow& row : r.rows) {
    CHECK(row.seed_count == 2);
    CHECK(row.mean_gee > 0.0);
    CHECK(row.satisfied_ratio >= 0.0);
    CHECK(row.satisfied_ratio <= 1.0);
    CHECK(row.mean_outer_iterations >= 1.0);
  }

  // The requirement value only matters to modes that enforce it: the
  // unconstrained rows solve the identical problem at both values.
  CHECK(r.rows[0].mean_gee == r.rows[2].mean_gee);
  CHECK(r.rows[0].mean_sum_rate == r.rows[2].mean_sum_rate);
  CHECK(r.gee_samples[0] == r.gee_samples[2]);
}

TEST_CASE("a barrier-weight sweep leaves unconstrained rows untouched") {
  SweepConfig cfg = tiny_config();
  cfg.sweep_param = "rho";
  cfg.values = {0.5, 2.0};
  cfg.gen.rmin_bit_s_hz = 0.2;
  SweepResult r = run_sweep(cfg);
  REQUIRE(r.rows.size() == 4);
  CHECK(r.rows[0].mean_gee == r.rows[2].mean_gee);          // none @ 0.5 vs none @ 2.0
  CHECK(r.gee_samples[0] == r.gee_samples[2]);
  CHECK(r.satisfied_samples[0] == r.satisfied_samples[2]);
}

TEST_CASE("byte-identical output for repeated runs and any thread cap") {
  SweepConfig cfg = tiny_config();
  cfg.values = {0.2};  // keep it quick: 1 value x 2 modes x 2 seeds
  std::string first = sweep_to_csv(run_sweep(cfg));
  std::string second = sweep_to_csv(run_sweep(cfg));
  CHECK(first == second);

  EnvGuard guard("GEEOPT_THREADS");
  setenv("GEEOPT_THREADS", "1", 1);
  std::string serial = sweep_to_csv(run_sweep(cfg));
  setenv("GEEOPT_THREADS", "3", 1);
  std::string threaded = sweep_to_csv(run_sweep(cfg));
  CHECK(first == serial);
  CHECK(first == threaded);
}

TEST_CASE("worker count follows the environment override") {
  EnvGuard guard("GEEOPT_THREADS");
  setenv("GEEOPT_THREADS", "7", 1);
  CHECK(worker_count() == 7);
  setenv("GEEOPT_THREADS", "0", 1);
  CHECK(worker_count() >= 1);  // invalid cap falls back to the hardware count
  setenv("GEEOPT_THREADS", "abc", 1);
  CHECK(worker_count() >= 1);
  unsetenv("GEEOPT_THREADS");
  CHECK(worker_count() >= 1);
}

TEST_CASE("csv file writing matches the in-memory serialization") {
  SweepConfig cfg = tiny_config();
  cfg.values = {0.2};
  cfg.qos_modes = {"none"};
  SweepResult r = run_sweep(cfg);
  const std::string path = "sweep_unit_test_out.csv";
  write_sweep_csv(r, path);
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == sweep_to_csv(r));
  std::remove(path.c_str());

  CHECK_THROWS_WITH_AS(write_sweep_csv(r, "/nonexistent_dir_xyz/out.csv"),
                       "cannot open output file: /nonexistent_dir_xyz/out.csv",
                       std::runtime_error);
}
