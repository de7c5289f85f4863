#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geeopt/optimizer.hpp"
#include "geeopt/scenario_gen.hpp"

namespace geeopt {

// One Monte Carlo experiment: a base generator config, one swept parameter,
// and a fixed seed block shared by every (value, mode) pair so that curves
// over the swept value use common random scenarios.
struct SweepConfig {
  std::string sweep_param;  // "pmax_dbw" | "xi_ratio" | "rmin" | "rho"
  std::vector<double> values;
  int seed_count = 1;
  std::uint64_t base_seed = 1;
  std::vector<std::string> qos_modes = {"none"};  // "none" | "barrier" | "generalized"
  GenConfig gen;
  SolverOptions solver;

  void validate() const;  // throws on unknown names or empty dimensions
};

struct SweepRow {
  double value = 0.0;
  std::string qos_mode;
  int seed_count = 0;
  double mean_gee = 0.0;
  double mean_sum_rate = 0.0;
  double mean_user_rate = 0.0;
  double satisfied_ratio = 0.0;
  double mean_outer_iterations = 0.0;
  double mean_brd_rounds = 0.0;
  double mean_learn_iterations = 0.0;
  int nonconverged_count = 0;
};

struct SweepResult {
  std::string sweep_param;
  std::vector<SweepRow> rows;  // values in config order, modes inner
  // Per-seed satisfied ratios per row, for significance checks downstream.
  std::vector<std::vector<double>> satisfied_samples;
  std::vector<std::vector<double>> gee_samples;
};

QosMode qos_mode_from_string(const std::string& name, double rho, double relax_value);

// Runs values x modes x seeds cells. Cells execute concurrently (capped by the
// GEEOPT_THREADS environment variable); the reduction is sequential in seed
// order, so the result is identical for any thread count.
SweepResult run_sweep(const SweepConfig& cfg);

// Fixed column set; floating point printed with %.12g, so the bytes are
// reproducible for identical results.
std::string sweep_to_csv(const SweepResult& r);
void write_sweep_csv(const SweepResult& r, const std::string& path);

SweepConfig sweep_config_from_json(const std::string& text);
SweepConfig load_sweep_config(const std::string& path);

// Thread cap from GEEOPT_THREADS (>= 1); hardware concurrency when unset.
int worker_count();

}  // namespace geeopt
