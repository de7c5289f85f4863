#include "geeopt/scenario_gen.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace geeopt {

namespace {

using nlohmann::json;

// Variate transforms are hand-rolled on top of mt19937_64 so that a seed maps
// to the same scenario bytes regardless of the standard library's
// distribution internals.
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}

  double uniform01() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  double exp1() { return -std::log1p(-uniform01()); }
};

struct Point {
  double x, y;
};

double dist(Point a, Point b) {
  double dx = a.x - b.x, dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

void check_config(const GenConfig& c) {
  auto bad = [](const std::string& f) { throw std::invalid_argument("gen config: " + f); };
  if (c.users < 1) bad("users must be >= 1");
  if (c.subcarriers < 1) bad("subcarriers must be >= 1");
  if (!(c.area_edge_m > 2.0)) bad("area_edge_m must exceed 2");
  if (!(c.bandwidth_hz > 0.0)) bad("bandwidth_hz must be positive");
  if (!(c.pathloss_exponent > 0.0)) bad("pathloss_exponent must be positive");
  if (c.xi_ratio < 0.0) bad("xi_ratio must be non-negative");
  if (!(c.power_weight > 0.0)) bad("power_weight must be positive");
  if (c.rmin_bit_s_hz < 0.0) bad("rmin_bit_s_hz must be non-negative");
}

}  // namespace

std::string to_string(Topology t) {
  return t == Topology::paired ? "paired" : "single-center";
}

Topology topology_from_string(const std::string& name) {
  if (name == "paired") return Topology::paired;
  if (name == "single-center") return Topology::single_center;
  throw std::invalid_argument("topology must be \"paired\" or \"single-center\", got \"" + name + "\"");
}

Scenario generate_scenario(const GenConfig& cfg) {
  check_config(cfg);
  const int K = cfg.users, N = cfg.subcarriers;
  const double L = cfg.area_edge_m;
  Rng rng(cfg.seed);

  Point center{L / 2.0, L / 2.0};
  std::vector<Point> tx(K);
  for (int k = 0; k < K; ++k) {
    // In single-center mode the shared receiver sits at the center, so keep
    // transmitters at least 1 m away from it at draw time.
    do {
      tx[k] = {rng.uniform(0.0, L), rng.uniform(0.0, L)};
    } while (cfg.topology == Topology::single_center && dist(tx[k], center) < 1.0);
  }

  std::vector<Point> rx(K, center);
  if (cfg.topology == Topology::paired) {
    for (int k = 0; k < K; ++k) {
      bool ok = false;
      while (!ok) {
        rx[k] = {rng.uniform(0.0, L), rng.uniform(0.0, L)};
        ok = true;
        for (int l = 0; l < K && ok; ++l)
          if (dist(tx[l], rx[k]) < 1.0) ok = false;  // path loss blows up below 1 m
      }
    }
  }

  Scenario s;
  s.users = K;
  s.subcarriers = N;
  s.bandwidth_hz = cfg.bandwidth_hz;
  s.noise_w.assign(N, std::pow(10.0, (cfg.noise_dbm_per_hz - 30.0) / 10.0) * cfg.bandwidth_hz);
  s.alpha = Grid2(K, N);
  s.xi = Grid2(K, N);
  s.beta = Grid3(K, K, N);
  s.mu = Grid2(K, N, cfg.power_weight);
  s.p_static_w.assign(K, std::pow(10.0, cfg.static_power_dbw / 10.0));
  s.p_max_w.assign(K, std::pow(10.0, cfg.pmax_dbw / 10.0));
  s.r_min.assign(K, cfg.rmin_bit_s_hz);
  s.origin = cfg;

  if (cfg.topology == Topology::paired) {
    // One independent fading draw per (receiver, transmitter, subcarrier).
    for (int k = 0; k < K; ++k)
      for (int l = 0; l < K; ++l)
        for (int n = 0; n < N; ++n) {
          double g = rng.exp1() * std::pow(dist(tx[l], rx[k]), -cfg.pathloss_exponent);
          if (l == k)
            s.alpha(k, n) = g;
          else
            s.beta(l, k, n) = g;
        }
  } else {
    // Everyone hears the same physical receiver: one coefficient per
    // (transmitter, subcarrier), reused as direct gain and as cross gain.
    Grid2 g(K, N);
    for (int l = 0; l < K; ++l)
      for (int n = 0; n < N; ++n)
        g(l, n) = rng.exp1() * std::pow(dist(tx[l], center), -cfg.pathloss_exponent);
    for (int k = 0; k < K; ++k)
      for (int n = 0; n < N; ++n) {
        s.alpha(k, n) = g(k, n);
        for (int l = 0; l < K; ++l)
          if (l != k) s.beta(l, k, n) = g(l, n);
      }
  }

  for (int k = 0; k < K; ++k)
    for (int n = 0; n < N; ++n) s.xi(k, n) = cfg.xi_ratio * s.alpha(k, n);

  s.validate();
  return s;
}

namespace {

const json& require(const json& j, const char* key, const char* ctx) {
  auto it = j.find(key);
  if (it == j.end())
    throw std::runtime_error(std::string(ctx) + ": missing field \"" + key + "\"");
  return *it;
}

template <typename T>
T field(const json& j, const char* key, const char* ctx) {
  try {
    return require(j, key, ctx).get<T>();
  } catch (const json::exception&) {
    throw std::runtime_error(std::string(ctx) + ": field \"" + key + "\" has the wrong type");
  }
}

json grid_to_json(const Grid2& g) {
  json rows = json::array();
  for (int r = 0; r < g.rows; ++r) {
    json row = json::array();
    for (int c = 0; c < g.cols; ++c) row.push_back(g(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Grid2 grid_from_json(const json& j, int rows, int cols, const char* key) {
  std::string ctx = "scenario file";
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw std::runtime_error(ctx + ": field \"" + key + "\" must be a " + std::to_string(rows) +
                             "-row array");
  Grid2 g(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw std::runtime_error(ctx + ": field \"" + key + "\" row " + std::to_string(r) +
                               " must have " + std::to_string(cols) + " entries");
    for (int c = 0; c < cols; ++c) {
      if (!row[c].is_number())
        throw std::runtime_error(ctx + ": field \"" + key + "\" has a non-numeric entry");
      g(r, c) = row[c].get<double>();
    }
  }
  return g;
}

json gen_config_to_jobj(const GenConfig& c) {
  return json{{"users", c.users},
              {"subcarriers", c.subcarriers},
              {"area_edge_m", c.area_edge_m},
              {"bandwidth_hz", c.bandwidth_hz},
              {"noise_dbm_per_hz", c.noise_dbm_per_hz},
              {"static_power_dbw", c.static_power_dbw},
              {"pathloss_exponent", c.pathloss_exponent},
              {"xi_ratio", c.xi_ratio},
              {"power_weight", c.power_weight},
              {"pmax_dbw", c.pmax_dbw},
              {"rmin_bit_s_hz", c.rmin_bit_s_hz},
              {"topology", to_string(c.topology)},
              {"seed", c.seed}};
}

GenConfig gen_config_from_jobj(const json& j, const char* ctx) {
  static const char* known[] = {"users",         "subcarriers",    "area_edge_m",
                                "bandwidth_hz",  "noise_dbm_per_hz", "static_power_dbw",
                                "pathloss_exponent", "xi_ratio",   "power_weight",
                                "pmax_dbw",      "rmin_bit_s_hz",  "topology",
                                "seed"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) ok = true;
    if (!ok) throw std::runtime_error(std::string(ctx) + ": unknown field \"" + it.key() + "\"");
  }
  GenConfig c;
  auto opt = [&](const char* key, auto& dst) {
    using T = std::remove_reference_t<decltype(dst)>;
    if (j.contains(key)) dst = field<T>(j, key, ctx);
  };
  opt("users", c.users);
  opt("subcarriers", c.subcarriers);
  opt("area_edge_m", c.area_edge_m);
  opt("bandwidth_hz", c.bandwidth_hz);
  opt("noise_dbm_per_hz", c.noise_dbm_per_hz);
  opt("static_power_dbw", c.static_power_dbw);
  opt("pathloss_exponent", c.pathloss_exponent);
  opt("xi_ratio", c.xi_ratio);
  opt("power_weight", c.power_weight);
  opt("pmax_dbw", c.pmax_dbw);
  opt("rmin_bit_s_hz", c.rmin_bit_s_hz);
  opt("seed", c.seed);
  if (j.contains("topology")) c.topology = topology_from_string(field<std::string>(j, "topology", ctx));
  check_config(c);  // a config file that cannot generate should fail at load
  return c;
}

}  // namespace

std::string gen_config_to_json(const GenConfig& cfg) { return gen_config_to_jobj(cfg).dump(1) + "\n"; }

GenConfig gen_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("gen config: parse error: ") + e.what());
  }
  return gen_config_from_jobj(j, "gen config");
}

GenConfig load_gen_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return gen_config_from_json(ss.str());
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["users"] = s.users;
  j["subcarriers"] = s.subcarriers;
  j["bandwidth_hz"] = s.bandwidth_hz;
  j["noise_w"] = s.noise_w;
  j["alpha"] = grid_to_json(s.alpha);
  j["xi"] = grid_to_json(s.xi);
  j["mu"] = grid_to_json(s.mu);
  json beta = json::array();
  for (int l = 0; l < s.users; ++l) {
    json per_rx = json::array();
    for (int k = 0; k < s.users; ++k) {
      json per_n = json::array();
      for (int n = 0; n < s.subcarriers; ++n) per_n.push_back(s.beta(l, k, n));
      per_rx.push_back(std::move(per_n));
    }
    beta.push_back(std::move(per_rx));
  }
  j["beta"] = std::move(beta);
  j["static_power_w"] = s.p_static_w;
  j["pmax_w"] = s.p_max_w;
  j["rmin_bit_s_hz"] = s.r_min;
  if (s.origin) j["meta"] = gen_config_to_jobj(*s.origin);
  return j.dump(1) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  const char* ctx = "scenario file";
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string(ctx) + ": parse error: " + e.what());
  }
  Scenario s;
  s.users = field<int>(j, "users", ctx);
  s.subcarriers = field<int>(j, "subcarriers", ctx);
  if (s.users < 1 || s.subcarriers < 1)
    throw std::runtime_error(std::string(ctx) + ": users and subcarriers must be >= 1");
  s.bandwidth_hz = field<double>(j, "bandwidth_hz", ctx);
  s.noise_w = field<std::vector<double>>(j, "noise_w", ctx);
  s.alpha = grid_from_json(require(j, "alpha", ctx), s.users, s.subcarriers, "alpha");
  s.xi = grid_from_json(require(j, "xi", ctx), s.users, s.subcarriers, "xi");
  s.mu = grid_from_json(require(j, "mu", ctx), s.users, s.subcarriers, "mu");
  const json& jb = require(j, "beta", ctx);
  if (!jb.is_array() || static_cast<int>(jb.size()) != s.users)
    throw std::runtime_error(std::string(ctx) + ": field \"beta\" must have one entry per transmitter");
  s.beta = Grid3(s.users, s.users, s.subcarriers);
  for (int l = 0; l < s.users; ++l) {
    Grid2 slab = grid_from_json(jb[l], s.users, s.subcarriers, "beta");
    for (int k = 0; k < s.users; ++k)
      for (int n = 0; n < s.subcarriers; ++n) s.beta(l, k, n) = slab(k, n);
  }
  s.p_static_w = field<std::vector<double>>(j, "static_power_w", ctx);
  s.p_max_w = field<std::vector<double>>(j, "pmax_w", ctx);
  s.r_min = field<std::vector<double>>(j, "rmin_bit_s_hz", ctx);
  if (j.contains("meta")) s.origin = gen_config_from_jobj(j["meta"], "scenario meta");
  s.validate();
  return s;
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << scenario_to_json(s);
  if (!out) throw std::runtime_error("write failed: " + path);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

}  // namespace geeopt
