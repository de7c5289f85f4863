#include "geeopt/sweep.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace geeopt {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct CellOutcome {
  double gee = 0.0;
  double sum_rate = 0.0;
  double mean_user_rate = 0.0;
  double satisfied_ratio = 0.0;
  double outer = 0.0;
  double brd_rounds = 0.0;
  double learn_iters = 0.0;
  bool nonconverged = false;
};

}  // namespace

void SweepConfig::validate() const {
  if (sweep_param != "pmax_dbw" && sweep_param != "xi_ratio" && sweep_param != "rmin" &&
      sweep_param != "rho")
    throw std::invalid_argument("sweep: unknown sweep_param \"" + sweep_param + "\"");
  if (values.empty()) throw std::invalid_argument("sweep: values must not be empty");
  if (seed_count < 1) throw std::invalid_argument("sweep: seed_count must be >= 1");
  if (qos_modes.empty()) throw std::invalid_argument("sweep: qos_modes must not be empty");
  for (const auto& m : qos_modes)
    if (m != "none" && m != "barrier" && m != "generalized")
      throw std::invalid_argument("sweep: unknown qos mode \"" + m + "\"");
}

QosMode qos_mode_from_string(const std::string& name, double rho, double relax_value) {
  if (name == "none") return QosNone{};
  if (name == "barrier") return QosBarrier{rho, relax_value};
  if (name == "generalized") return QosGeneralized{};
  throw std::invalid_argument("unknown qos mode \"" + name + "\"");
}

int worker_count() {
  if (const char* env = std::getenv("GEEOPT_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const int V = static_cast<int>(cfg.values.size());
  const int M = static_cast<int>(cfg.qos_modes.size());
  const int S = cfg.seed_count;
  const long long cells = static_cast<long long>(V) * M * S;

  double base_rho = 1.0, base_relax = -1e3;
  if (const auto* b = std::get_if<QosBarrier>(&cfg.solver.qos)) {
    base_rho = b->rho;
    base_relax = b->relax_value;
  }

  std::vector<CellOutcome> out(cells);
  std::atomic<long long> next{0};
  auto work = [&] {
    for (;;) {
      long long c = next.fetch_add(1);
      if (c >= cells) break;
      int vi = static_cast<int>(c / (static_cast<long long>(M) * S));
      int mi = static_cast<int>((c / S) % M);
      int si = static_cast<int>(c % S);

      GenConfig gen = cfg.gen;
      double value = cfg.values[vi];
      double rho = base_rho;
      if (cfg.sweep_param == "pmax_dbw")
        gen.pmax_dbw = value;
      else if (cfg.sweep_param == "xi_ratio")
        gen.xi_ratio = value;
      else if (cfg.sweep_param == "rmin")
        gen.rmin_bit_s_hz = value;
      else
        rho = value;
      gen.seed = cfg.base_seed + static_cast<std::uint64_t>(si);

      SolverOptions solver = cfg.solver;
      solver.qos = qos_mode_from_string(cfg.qos_modes[mi], rho, base_relax);

      Scenario s = generate_scenario(gen);
      RunReport rep = maximize_gee(s, solver);

      CellOutcome& o = out[c];
      o.gee = rep.gee;
      o.sum_rate = rep.sum_rate;
      o.mean_user_rate = rep.sum_rate / s.users;
      o.satisfied_ratio = rep.satisfied_ratio;
      o.outer = rep.outer_iterations;
      o.brd_rounds = rep.mean_brd_rounds;
      o.learn_iters = rep.mean_learn_iterations;
      o.nonconverged = !rep.converged || rep.any_learn_nonconverged || rep.any_brd_nonconverged;
    }
  };

  int workers = std::min<long long>(worker_count(), cells);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  SweepResult res;
  res.sweep_param = cfg.sweep_param;
  for (int vi = 0; vi < V; ++vi)
    for (int mi = 0; mi < M; ++mi) {
      SweepRow row;
      row.value = cfg.values[vi];
      row.qos_mode = cfg.qos_modes[mi];
      row.seed_count = S;
      std::vector<double> sat_samples, gee_samples;
      sat_samples.reserve(S);
      gee_samples.reserve(S);
      for (int si = 0; si < S; ++si) {  // fixed seed order keeps the sums reproducible
        const CellOutcome& o = out[(static_cast<long long>(vi) * M + mi) * S + si];
        row.mean_gee += o.gee;
        row.mean_sum_rate += o.sum_rate;
        row.mean_user_rate += o.mean_user_rate;
        row.satisfied_ratio += o.satisfied_ratio;
        row.mean_outer_iterations += o.outer;
        row.mean_brd_rounds += o.brd_rounds;
        row.mean_learn_iterations += o.learn_iters;
        row.nonconverged_count += o.nonconverged ? 1 : 0;
        sat_samples.push_back(o.satisfied_ratio);
        gee_samples.push_back(o.gee);
      }
      row.mean_gee /= S;
      row.mean_sum_rate /= S;
      row.mean_user_rate /= S;
      row.satisfied_ratio /= S;
      row.mean_outer_iterations /= S;
      row.mean_brd_rounds /= S;
      row.mean_learn_iterations /= S;
      res.rows.push_back(std::move(row));
      res.satisfied_samples.push_back(std::move(sat_samples));
      res.gee_samples.push_back(std::move(gee_samples));
    }
  return res;
}

std::string sweep_to_csv(const SweepResult& r) {
  std::string csv =
      "sweep_param,value,qos_mode,seed_count,mean_gee,mean_sum_rate,mean_user_rate,"
      "satisfied_ratio,mean_I_D,mean_I_B,mean_I_L,nonconverged_count\n";
  for (const SweepRow& row : r.rows) {
    csv += r.sweep_param;
    csv += ',';
    csv += fmt_double(row.value);
    csv += ',';
    csv += row.qos_mode;
    csv += ',';
    csv += std::to_string(row.seed_count);
    csv += ',';
    csv += fmt_double(row.mean_gee);
    csv += ',';
    csv += fmt_double(row.mean_sum_rate);
    csv += ',';
    csv += fmt_double(row.mean_user_rate);
    csv += ',';
    csv += fmt_double(row.satisfied_ratio);
    csv += ',';
    csv += fmt_double(row.mean_outer_iterations);
    csv += ',';
    csv += fmt_double(row.mean_brd_rounds);
    csv += ',';
    csv += fmt_double(row.mean_learn_iterations);
    csv += ',';
    csv += std::to_string(row.nonconverged_count);
    csv += '\n';
  }
  return csv;
}

void write_sweep_csv(const SweepResult& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: byte-identical across platforms
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << sweep_to_csv(r);
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

template <typename T>
void opt_field(const json& j, const char* key, T& dst, const char* ctx) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::runtime_error(std::string(ctx) + ": field \"" + key + "\" has the wrong type");
  }
}

}  // namespace

SweepConfig sweep_config_from_json(const std::string& text) {
  const char* ctx = "sweep config";
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string(ctx) + ": parse error: " + e.what());
  }
  static const char* known[] = {"sweep_param", "values",   "seed_count", "base_seed",
                                "qos_modes",   "gen",      "solver"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) ok = true;
    if (!ok) throw std::runtime_error(std::string(ctx) + ": unknown field \"" + it.key() + "\"");
  }

  SweepConfig cfg;
  if (!j.contains("sweep_param")) throw std::runtime_error("sweep config: missing field \"sweep_param\"");
  if (!j.contains("values")) throw std::runtime_error("sweep config: missing field \"values\"");
  opt_field(j, "sweep_param", cfg.sweep_param, ctx);
  opt_field(j, "values", cfg.values, ctx);
  opt_field(j, "seed_count", cfg.seed_count, ctx);
  opt_field(j, "base_seed", cfg.base_seed, ctx);
  opt_field(j, "qos_modes", cfg.qos_modes, ctx);
  if (j.contains("gen")) cfg.gen = gen_config_from_json(j.at("gen").dump());

  if (j.contains("solver")) {
    const json& sj = j.at("solver");
    static const char* sknown[] = {"eps",
                                   "max_outer",
                                   "brd_eps",
                                   "brd_max_rounds",
                                   "warm_start_scores",
                                   "learning_delta0",
                                   "learning_exponent",
                                   "learning_tol",
                                   "learning_max_iterations",
                                   "barrier_rho",
                                   "barrier_relax"};
    for (auto it = sj.begin(); it != sj.end(); ++it) {
      bool ok = false;
      for (const char* k : sknown)
        if (it.key() == k) ok = true;
      if (!ok)
        throw std::runtime_error(std::string(ctx) + ": unknown solver field \"" + it.key() + "\"");
    }
    opt_field(sj, "eps", cfg.solver.eps, ctx);
    opt_field(sj, "max_outer", cfg.solver.max_outer, ctx);
    opt_field(sj, "brd_eps", cfg.solver.brd.eps_potential, ctx);
    opt_field(sj, "brd_max_rounds", cfg.solver.brd.max_rounds, ctx);
    opt_field(sj, "warm_start_scores", cfg.solver.brd.warm_start_scores, ctx);
    opt_field(sj, "learning_delta0", cfg.solver.learning.delta0, ctx);
    opt_field(sj, "learning_exponent", cfg.solver.learning.exponent, ctx);
    opt_field(sj, "learning_tol", cfg.solver.learning.tol, ctx);
    opt_field(sj, "learning_max_iterations", cfg.solver.learning.max_iterations, ctx);
    double rho = 1.0, relax = -1e3;
    if (const auto* b = std::get_if<QosBarrier>(&cfg.solver.qos)) {
      rho = b->rho;
      relax = b->relax_value;
    }
    opt_field(sj, "barrier_rho", rho, ctx);
    opt_field(sj, "barrier_relax", relax, ctx);
    cfg.solver.qos = QosBarrier{rho, relax};  // carries barrier knobs; per-row mode overrides
  }
  cfg.validate();
  return cfg;
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sweep config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return sweep_config_from_json(ss.str());
}

}  // namespace geeopt
