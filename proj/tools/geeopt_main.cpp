#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "geeopt/optimizer.hpp"
#include "geeopt/scenario_gen.hpp"
#include "geeopt/sweep.hpp"
#include "geeopt/validation.hpp"

namespace {

void print_run_report(const geeopt::Scenario& s, const std::string& qos_name,
                      const geeopt::RunReport& rep) {
  std::printf("network: %d users, %d subcarriers, bandwidth %.6g Hz\n", s.users, s.subcarriers,
              s.bandwidth_hz);
  std::printf("qos mode: %s\n", qos_name.c_str());
  std::printf("outer iterations: %d (%s%s)\n", rep.outer_iterations,
              rep.converged ? "converged" : "iteration cap reached",
              rep.stopped_gap_negative ? ", stopped on a negative gap" : "");
  std::printf("final power price: %.12g per watt\n",
              rep.lambda_trace.empty() ? 0.0 : rep.lambda_trace.back());
  std::printf("energy efficiency: %.12g bit/J\n", rep.gee);
  std::printf("sum rate: %.12g bit/s/Hz (%.12g bit/s)\n", rep.sum_rate,
              rep.sum_rate * s.bandwidth_hz);
  std::printf("user rates (bit/s/Hz):");
  for (double r : rep.user_rates) std::printf(" %.6g", r);
  std::printf("\n");
  int sat = 0;
  for (char c : rep.satisfied) sat += c ? 1 : 0;
  std::printf("rate requirements satisfied: %d/%d (ratio %.4f)\n", sat, s.users,
              rep.satisfied_ratio);
  if (!rep.relaxed_users.empty()) {
    std::printf("relaxed users:");
    for (int k : rep.relaxed_users) std::printf(" %d", k);
    std::printf("\n");
  }
  std::printf("mean play rounds per outer step: %.3g\n", rep.mean_brd_rounds);
  std::printf("mean learning iterations per response: %.3g\n", rep.mean_learn_iterations);
  std::printf("allocation (W):\n");
  for (int k = 0; k < s.users; ++k) {
    std::printf("  user %d:", k);
    for (int n = 0; n < s.subcarriers; ++n) std::printf(" %.6g", rep.allocation(k, n));
    std::printf("\n");
  }
}

std::string run_report_json(const geeopt::Scenario& s, const std::string& qos_name,
                            const geeopt::RunReport& rep) {
  nlohmann::json j;
  j["users"] = s.users;
  j["subcarriers"] = s.subcarriers;
  j["bandwidth_hz"] = s.bandwidth_hz;
  j["qos_mode"] = qos_name;
  j["outer_iterations"] = rep.outer_iterations;
  j["converged"] = rep.converged;
  j["stopped_gap_negative"] = rep.stopped_gap_negative;
  j["lambda_trace"] = rep.lambda_trace;
  j["gap_trace"] = rep.gap_trace;
  j["gee_bit_per_joule"] = rep.gee;
  j["sum_rate_bit_s_hz"] = rep.sum_rate;
  j["user_rates_bit_s_hz"] = rep.user_rates;
  std::vector<bool> satisfied(rep.satisfied.begin(), rep.satisfied.end());
  j["satisfied"] = satisfied;
  j["satisfied_ratio"] = rep.satisfied_ratio;
  j["relaxed_users"] = rep.relaxed_users;
  j["mean_brd_rounds"] = rep.mean_brd_rounds;
  j["mean_learn_iterations"] = rep.mean_learn_iterations;
  std::vector<std::vector<double>> alloc(s.users);
  for (int k = 0; k < s.users; ++k)
    alloc[k].assign(rep.allocation.row(k).begin(), rep.allocation.row(k).end());
  j["allocation_w"] = alloc;
  return j.dump(1) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-efficient power allocation for multi-carrier interference networks"};
  app.require_subcommand(1);
  int exit_code = 0;

  // ---- gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "Generate a random network scenario file");
  std::string gen_config_path, gen_out_path;
  std::uint64_t gen_seed = 0;
  gen->add_option("--config", gen_config_path,
                  "Generator config JSON; stock settings when omitted");
  gen->add_option("--out", gen_out_path, "Scenario JSON output path")->required();
  auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "Override the generator seed");
  gen->callback([&] {
    geeopt::GenConfig cfg;
    if (!gen_config_path.empty()) cfg = geeopt::load_gen_config(gen_config_path);
    if (gen_seed_opt->count() > 0) cfg.seed = gen_seed;
    geeopt::Scenario s = geeopt::generate_scenario(cfg);
    geeopt::save_scenario(s, gen_out_path);
    std::printf("wrote %s: %d users, %d subcarriers, seed %llu\n", gen_out_path.c_str(), s.users,
                s.subcarriers, static_cast<unsigned long long>(cfg.seed));
  });

  // ---- run ----------------------------------------------------------------
  auto* run = app.add_subcommand("run", "Maximize energy efficiency on one scenario");
  std::string run_scenario_path, run_qos = "none";
  double run_rho = 1.0, run_relax = -1e3, run_rmin = 0.0, run_eps = 1e-4;
  int run_max_outer = 100;
  bool run_json = false;
  run->add_option("--scenario", run_scenario_path, "Scenario JSON path")->required();
  run->add_option("--qos", run_qos, "Rate-requirement handling: none | barrier | generalized")
      ->check(CLI::IsMember({"none", "barrier", "generalized"}));
  run->add_option("--rho", run_rho, "Barrier weight (barrier mode)");
  run->add_option("--relax", run_relax, "Barrier value at violated requirements");
  auto* rmin_opt = run->add_option("--rmin", run_rmin,
                                   "Override every user's rate requirement (bit/s/Hz)");
  run->add_option("--eps", run_eps, "Outer stopping tolerance");
  run->add_option("--max-outer", run_max_outer, "Outer iteration cap");
  run->add_flag("--json", run_json, "Emit the report as JSON");
  run->callback([&] {
    geeopt::Scenario s = geeopt::load_scenario(run_scenario_path);
    if (rmin_opt->count() > 0)
      for (int k = 0; k < s.users; ++k) s.r_min[k] = run_rmin;
    geeopt::SolverOptions opt;
    opt.eps = run_eps;
    opt.max_outer = run_max_outer;
    opt.qos = geeopt::qos_mode_from_string(run_qos, run_rho, run_relax);
    geeopt::RunReport rep = geeopt::maximize_gee(s, opt);
    if (run_json)
      std::fputs(run_report_json(s, run_qos, rep).c_str(), stdout);
    else
      print_run_report(s, run_qos, rep);
  });

  // ---- sweep --------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over a parameter, CSV output");
  std::string sweep_config_path, sweep_out_path;
  sweep->add_option("--config", sweep_config_path, "Sweep config JSON path")->required();
  sweep->add_option("--out", sweep_out_path, "CSV output path")->required();
  sweep->callback([&] {
    geeopt::SweepConfig cfg = geeopt::load_sweep_config(sweep_config_path);
    geeopt::SweepResult res = geeopt::run_sweep(cfg);
    geeopt::write_sweep_csv(res, sweep_out_path);
    std::printf("wrote %s: %zu rows (%zu values x %zu modes), %d seeds each\n",
                sweep_out_path.c_str(), res.rows.size(), cfg.values.size(),
                cfg.qos_modes.size(), cfg.seed_count);
  });

  // ---- validate -----------------------------------------------------------
  auto* validate = app.add_subcommand("validate", "Run the built-in invariant checks");
  bool quick = false;
  validate->add_flag("--quick", quick, "Reduced sample counts (a few seconds)");
  validate->callback([&] {
    std::vector<geeopt::CheckResult> results = geeopt::run_validation(quick);
    int passed = 0;
    for (const auto& r : results) {
      std::printf("[%s] %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
      passed += r.passed ? 1 : 0;
    }
    std::printf("validation: %d/%zu checks passed\n", passed, results.size());
    if (!geeopt::all_passed(results)) exit_code = 1;
  });

  try {
    CLI11_PARSE(app, argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return exit_code;
}
