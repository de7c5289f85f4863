#include "geeopt/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "geeopt/brd.hpp"
#include "geeopt/model.hpp"
#include "geeopt/optimizer.hpp"
#include "geeopt/oracle.hpp"
#include "geeopt/qos.hpp"
#include "geeopt/scenario_gen.hpp"
#include "geeopt/sweep.hpp"
#include "geeopt/testing.hpp"

namespace geeopt {

namespace {

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

// Mixed fixture pool: mostly order-one synthetic networks, some physically
// scaled ones from the generator (tiny noise, strong direct gains).
Scenario mixed_scenario(testing::DetRng& rng, int users_min, int users_max, int subc_min,
                        int subc_max) {
  int users = users_min + static_cast<int>(rng.below(users_max - users_min + 1));
  int subc = subc_min + static_cast<int>(rng.below(subc_max - subc_min + 1));
  if (rng.chance(0.7)) return testing::unit_scenario(rng, users, subc);
  GenConfig g;
  g.users = users;
  g.subcarriers = subc;
  g.pmax_dbw = rng.uniform(-35.0, 0.0);
  static constexpr double kRatios[3] = {0.0, 0.01, 0.1};
  g.xi_ratio = kRatios[rng.below(3)];
  g.topology = rng.chance(0.5) ? Topology::paired : Topology::single_center;
  g.seed = rng.eng();
  return generate_scenario(g);
}

// A power price on the scale the outer loop would visit.
double draw_price(const Scenario& s, const PowerAllocation& p, testing::DetRng& rng) {
  if (rng.chance(0.15)) return 0.0;
  double sr = sum_rate(s, p);
  if (!(sr > 0.0)) return 0.0;
  return rng.uniform01() * 2.0 * sr / total_weighted_power(s, p);
}

// Distance (in own-power units) from the sample point to the nearest log
// singularity among the terms the own-power coordinate appears in. A
// finite-difference stencil must stay far below this scale to resolve the
// local derivative: at physical noise floors the curvature near zero power
// is enormous and a budget-proportional step would straddle it.
double min_curvature_scale(const Scenario& s, int k, int n, const PowerAllocation& p) {
  double x = p(k, n);
  double own = s.noise_w[n] + interference_at(s, p, k, n);
  double tmin = std::numeric_limits<double>::infinity();
  double eta = s.alpha(k, n) + s.xi(k, n);
  if (eta > 0.0) tmin = std::min(tmin, (own + eta * x) / eta);
  if (s.xi(k, n) > 0.0) tmin = std::min(tmin, (own + s.xi(k, n) * x) / s.xi(k, n));
  for (int i = 0; i < s.users; ++i) {
    if (i == k) continue;
    double b = s.beta(k, i, n);
    if (b == 0.0) continue;
    double den =
        s.noise_w[n] + (s.alpha(i, n) + s.xi(i, n)) * p(i, n) + interference_at(s, p, i, n);
    tmin = std::min(tmin, den / b);
  }
  return tmin;
}

// Sum of the magnitudes of the terms composing the marginal utility; the
// floor for relative-error denominators (a derivative can cancel to near
// zero while its pieces are large, and finite differences cannot resolve
// far below the pieces' scale).
double marginal_magnitude(const Scenario& s, int k, int n, const PowerAllocation& p, double nu) {
  double eta = s.alpha(k, n) + s.xi(k, n);
  double own = s.noise_w[n] + interference_at(s, p, k, n);
  double pkn = p(k, n);
  double acc = eta / (own + eta * pkn) + s.xi(k, n) / (own + s.xi(k, n) * pkn);
  for (int i = 0; i < s.users; ++i) {
    if (i == k) continue;
    double b = s.beta(k, i, n);
    if (b == 0.0) continue;
    double others = interference_at(s, p, i, n) - b * pkn;
    double den = s.noise_w[n] + (s.alpha(i, n) + s.xi(i, n)) * p(i, n) + b * pkn + others;
    acc += b / den;
  }
  return kInvLn2 * acc + std::abs(nu);
}

}  // namespace

namespace checks {

CheckResult gradient_consistency(int samples, double tol, std::uint64_t seed) {
  testing::DetRng rng(seed);
  double worst = 0.0;
  int done = 0;
  for (int attempt = 0; done < samples && attempt < 40 * samples; ++attempt) {
    Scenario s = mixed_scenario(rng, 1, 4, 1, 3);
    PowerAllocation p = testing::random_feasible(s, rng, true);
    int k = static_cast<int>(rng.below(s.users));
    int n = static_cast<int>(rng.below(s.subcarriers));
    double x = p(k, n);

    // Step choice: well under the local curvature scale (truncation) but not
    // so small that value roundoff dominates; the surrogate is defined past
    // the budget box, so only the x - h >= 0 side constrains the stencil.
    double tmin = min_curvature_scale(s, k, n, p);
    double h = std::isfinite(tmin) ? 6e-5 * tmin : 1e-6 * s.p_max_w[k];
    h = (x + h) - x;  // snap to a representable offset
    if (!(h > 0.0) || x < h) continue;  // central stencil must fit

    double lambda = draw_price(s, p, rng);
    double nu = lambda * s.mu(k, n) - interference_slope(s, k, n, p, p(k, n));
    double analytic = marginal_utility(s, k, n, p, nu);

    std::vector<double> pbar(p.row(k).begin(), p.row(k).end());
    auto f = [&](double xv) {
      std::vector<double> pk = pbar;
      pk[n] = xv;
      return surrogate_utility(s, k, p, pk, pbar, lambda);
    };
    oracle::FdResult fd =
        oracle::finite_diff(f, x, h, 0.0, std::numeric_limits<double>::infinity());

    double mag = marginal_magnitude(s, k, n, p, nu);
    double denom = std::max({std::abs(analytic), std::abs(fd.derivative), 1e-3 * mag, 1e-300});
    worst = std::max(worst, std::abs(fd.derivative - analytic) / denom);
    ++done;
  }
  CheckResult r;
  r.name = "surrogate-gradient-fd";
  r.passed = done == samples && worst < tol;
  r.detail = fmt("worst rel err %.3g (tol %.1g), ", worst, tol) + std::to_string(done) +
             " central-difference samples";
  return r;
}

CheckResult penalty_slope_consistency(int samples, double tol, std::uint64_t seed) {
  testing::DetRng rng(seed);
  double worst = 0.0;
  static constexpr double kRhos[3] = {0.1, 1.0, 10.0};
  for (int i = 0; i < samples; ++i) {
    int users = 1 + static_cast<int>(rng.below(4));
    int subc = 1 + static_cast<int>(rng.below(3));
    Scenario s = testing::unit_scenario(rng, users, subc);
    PowerAllocation p = testing::random_feasible(s, rng, false);
    for (int k = 0; k < users; ++k)
      s.r_min[k] = rng.uniform(0.2, 0.8) * user_rate(s, p, k);
    double rho = kRhos[rng.below(3)];
    int k = static_cast<int>(rng.below(users));
    int n = static_cast<int>(rng.below(subc));
    double budget = s.p_max_w[k];
    double h = 1e-6 * budget;
    double headroom = std::max(0.0, budget - p.user_total(k));
    double hi = p(k, n) + headroom;
    if (hi < 2.0 * h || p(k, n) < h) {
      --i;
      continue;
    }

    BarrierSlopes slopes = barrier_slopes(s, k, p, p.row(k), rho);
    auto own_part = [&](double x) {
      PowerAllocation q = p;
      q(k, n) = x;
      return rho * std::log2(user_rate(s, q, k) - s.r_min[k]);
    };
    auto cross_part = [&](double x) {
      PowerAllocation q = p;
      q(k, n) = x;
      double acc = 0.0;
      for (int u = 0; u < users; ++u)
        if (u != k) acc += std::log2(user_rate(s, q, u) - s.r_min[u]);
      return rho * acc;
    };
    double fd_own = oracle::finite_diff(own_part, p(k, n), h, 0.0, hi).derivative;
    double fd_cross = oracle::finite_diff(cross_part, p(k, n), h, 0.0, hi).derivative;

    double mag = std::abs(slopes.own[n]) + std::abs(slopes.cross[n]);
    double d_own = std::max({std::abs(slopes.own[n]), std::abs(fd_own), 1e-3 * mag, 1e-300});
    double d_cross = std::max({std::abs(slopes.cross[n]), std::abs(fd_cross), 1e-3 * mag, 1e-300});
    worst = std::max(worst, std::abs(fd_own - slopes.own[n]) / d_own);
    worst = std::max(worst, std::abs(fd_cross - slopes.cross[n]) / d_cross);
  }
  CheckResult r;
  r.name = "penalty-slope-fd";
  r.passed = worst < tol;
  r.detail = fmt("worst rel err %.3g (tol %.1g)", worst, tol);
  return r;
}

CheckResult curvature_negativity(int samples, std::uint64_t seed) {
  testing::DetRng rng(seed);
  double max_h = -std::numeric_limits<double>::infinity();  // most suspicious curvature
  int live_count = 0;
  bool ok = true;
  for (int i = 0; i < samples; ++i) {
    Scenario s = mixed_scenario(rng, 1, 4, 1, 3);
    PowerAllocation p = testing::random_feasible(s, rng, true);
    int k = static_cast<int>(rng.below(s.users));
    int n = static_cast<int>(rng.below(s.subcarriers));

    double hmodel = surrogate_hessian_diag(s, k, n, p);
    bool live = s.alpha(k, n) > 0.0;
    for (int u = 0; u < s.users && !live; ++u)
      if (u != k && s.beta(k, u, n) > 0.0) live = true;
    if (live) {
      ok = ok && hmodel < 0.0;
      max_h = std::max(max_h, hmodel);
      ++live_count;
    } else {
      ok = ok && hmodel == 0.0;
    }
  }
  CheckResult r;
  r.name = "surrogate-curvature";
  r.passed = ok;
  r.detail = fmt("max curvature %.3g over ", max_h) + std::to_string(live_count) +
             " live samples, exact zero where the coordinate is dead";
  return r;
}

CheckResult learning_matches_reference(int subproblems, double tol, std::uint64_t seed) {
  testing::DetRng rng(seed);
  double worst_gap = 0.0;
  long long infeasible_iterates = 0;
  for (int i = 0; i < subproblems; ++i) {
    Scenario s = mixed_scenario(rng, 1, 4, 1, 3);
    PowerAllocation p = testing::random_feasible(s, rng, true);
    int k = static_cast<int>(rng.below(s.users));
    double lambda = draw_price(s, p, rng);
    std::vector<double> nu(s.subcarriers);
    for (int n = 0; n < s.subcarriers; ++n)
      nu[n] = lambda * s.mu(k, n) - interference_slope(s, k, n, p, p(k, n));
    SurrogateSubproblem sub(s, k, p, std::move(nu));
    double budget = s.p_max_w[k];

    auto gradfn = [&sub](std::span<const double> pk, std::span<double> g) { sub.gradient(pk, g); };
    IterObserver obs = [&](int, std::span<const double> q) {
      double total = 0.0;
      for (double v : q) {
        if (v < 0.0) ++infeasible_iterates;
        total += v;
      }
      if (total > budget) ++infeasible_iterates;
    };
    std::vector<double> zeros(s.subcarriers, 0.0);
    // The claim under test is the scheme's limit point, so run it to a much
    // tighter stop than the solver default; near-boundary optima creep
    // through the last stretch, on scales far below the budget, and a loose
    // move threshold would stop while they are still settling.
    LearningParams lp;
    lp.tol = 1e-12;
    lp.max_iterations = 20000;
    LearnResult lr = learn(gradfn, budget, zeros, lp, {}, &obs);

    auto valuefn = [&sub](std::span<const double> pk) { return sub.value(pk); };
    std::vector<double> start(s.subcarriers, budget / (s.subcarriers + 1));
    oracle::PgaResult ref = oracle::projected_gradient(valuefn, gradfn, budget, zeros, start);

    worst_gap = std::max(worst_gap, std::abs(ref.value - sub.value(lr.p)));
  }
  CheckResult r;
  r.name = "learning-vs-reference";
  r.passed = worst_gap < tol && infeasible_iterates == 0;
  r.detail = fmt("worst objective gap %.3g (tol %.1g), ", worst_gap, tol) +
             std::to_string(infeasible_iterates) + " infeasible iterates";
  return r;
}

CheckResult response_potential_monotone(int runs, double slack, std::uint64_t seed) {
  testing::DetRng rng(seed);
  double worst_drop = 0.0;
  long long steps = 0;
  for (int run = 0; run < runs; ++run) {
    bool barrier = (run % 2) == 1;
    Scenario s = mixed_scenario(rng, 2, 5, 2, 3);
    QosMode mode = QosNone{};
    PowerAllocation p = initial_allocation(s, mode);
    if (barrier) {
      static constexpr double kRhos[3] = {0.1, 1.0, 10.0};
      for (int k = 0; k < s.users; ++k)
        s.r_min[k] = rng.uniform(0.2, 0.9) * user_rate(s, p, k);
      mode = QosBarrier{kRhos[rng.below(3)], -1e3};
    }
    double ratio0 = rate_power_ratio(s, p);
    static constexpr double kScales[3] = {0.0, 1.0, 2.0};
    double lambda = kScales[rng.below(3)] * ratio0;
    LearningParams lp;

    double v = mode_potential(s, p, lambda, mode);
    for (int round = 0; round < 4; ++round) {
      for (int k = 0; k < s.users; ++k) {
        BetterResponse br = better_response(s, k, p, lambda, mode, lp);
        std::copy(br.p_k.begin(), br.p_k.end(), p.row(k).begin());
        double vn = mode_potential(s, p, lambda, mode);
        worst_drop = std::max(worst_drop, (v - vn) / std::max(1.0, std::abs(v)));
        v = vn;
        ++steps;
      }
    }
  }
  CheckResult r;
  r.name = "response-monotonicity";
  r.passed = worst_drop <= slack;
  r.detail = fmt("worst relative drop %.3g (slack %.1g), ", worst_drop, slack) +
             std::to_string(steps) + " responses";
  return r;
}

CheckResult price_trace_properties(int scenarios, std::uint64_t seed) {
  testing::DetRng rng(seed);
  bool ok = true;
  int negative_stops = 0, nonconverged = 0, runs = 0;
  std::string why;
  for (int i = 0; i < scenarios && ok; ++i) {
    Scenario s = mixed_scenario(rng, 2, 5, 2, 3);
    for (int k = 0; k < s.users; ++k) s.r_min[k] = rng.uniform(0.2, 1.5);
    const QosMode modes[3] = {QosNone{}, QosBarrier{}, QosGeneralized{}};
    for (const QosMode& mode : modes) {
      SolverOptions opt;
      opt.qos = mode;
      RunReport rep = maximize_gee(s, opt);
      ++runs;
      if (!rep.converged) ++nonconverged;
      if (rep.stopped_gap_negative) ++negative_stops;

      if (rep.lambda_trace.empty() || rep.lambda_trace.front() != 0.0) {
        ok = false;
        why = "price trace does not start at zero";
        break;
      }
      for (size_t j = 1; j < rep.lambda_trace.size(); ++j)
        if (rep.lambda_trace[j] <
            rep.lambda_trace[j - 1] - 1e-12 * std::max(1.0, rep.lambda_trace[j - 1])) {
          ok = false;
          why = "price decreased at step " + std::to_string(j);
        }
      for (size_t j = 0; j + 1 < rep.gap_trace.size(); ++j)
        if (rep.gap_trace[j] < 0.0) {
          ok = false;
          why = "non-final gap negative at step " + std::to_string(j);
        }
      if (rep.stopped_gap_negative) {
        if (rep.gap_trace.back() >= 0.0) {
          ok = false;
          why = "negative-stop flag with non-negative final gap";
        }
        double target = s.bandwidth_hz * rep.lambda_trace.back();
        if (std::abs(rep.gee - target) > 1e-9 * std::max(std::abs(target), 1e-300)) {
          ok = false;
          why = "reported efficiency does not attain the final price after the negative stop";
        }
      } else if (!rep.gap_trace.empty() && rep.gap_trace.back() < 0.0) {
        ok = false;
        why = "final gap negative without the stop flag";
      }
      if (!is_budget_feasible(s, rep.allocation, 1e-9)) {
        ok = false;
        why = "reported allocation violates the power budget";
      }
    }
  }
  CheckResult r;
  r.name = "price-iteration-traces";
  r.passed = ok;
  r.detail = ok ? std::to_string(runs) + " runs (3 modes per network), " +
                      std::to_string(negative_stops) + " negative stops, " +
                      std::to_string(nonconverged) + " nonconverged"
                : why;
  return r;
}

CheckResult small_network_near_optimal(int scenarios, int points_per_dim, double factor,
                                       std::uint64_t seed) {
  testing::DetRng rng(seed);
  double min_ratio = std::numeric_limits<double>::infinity();
  static constexpr double kRatios[3] = {0.0, 0.01, 0.1};
  for (int i = 0; i < scenarios; ++i) {
    GenConfig g;
    g.users = 2;
    g.subcarriers = 2;
    g.pmax_dbw = rng.uniform(-30.0, -10.0);
    g.xi_ratio = kRatios[rng.below(3)];
    g.seed = rng.eng();
    Scenario s = generate_scenario(g);

    RunReport rep = maximize_gee(s, SolverOptions{});
    oracle::GridResult grid = oracle::grid_search_gee(s, points_per_dim);
    min_ratio = std::min(min_ratio, rep.gee / grid.best_gee);
  }
  CheckResult r;
  r.name = "small-network-optimality";
  r.passed = min_ratio >= factor;
  r.detail = fmt("min solver/lattice ratio %.4f (needs >= %.2f), ", min_ratio, factor) +
             std::to_string(scenarios) + " networks";
  return r;
}

CheckResult peak_rate_fixture() {
  GenConfig g;  // stock configuration
  Scenario s = generate_scenario(g);
  double expected = g.subcarriers * std::log2(1.0 + 1.0 / g.xi_ratio);
  double worst = 0.0, total = 0.0;
  for (int k = 0; k < s.users; ++k) {
    double ceiling = rate_ceiling(s, k).total;
    worst = std::max(worst, std::abs(ceiling - expected));
    total += ceiling;
  }
  CheckResult r;
  r.name = "peak-rate-fixture";
  r.passed = worst < 1e-9;
  r.detail = fmt("per-user ceiling %.6f, all-user total %.4f, worst dev %.2g",
                 expected, total, worst);
  return r;
}

CheckResult sweep_determinism() {
  SweepConfig cfg;
  cfg.sweep_param = "pmax_dbw";
  cfg.values = {-25.0, -20.0};
  cfg.seed_count = 2;
  cfg.base_seed = 7;
  cfg.qos_modes = {"none", "barrier"};
  cfg.gen.users = 4;
  cfg.gen.subcarriers = 2;
  cfg.gen.rmin_bit_s_hz = 0.25;

  std::string base = sweep_to_csv(run_sweep(cfg));
  std::string again = sweep_to_csv(run_sweep(cfg));

  const char* saved = std::getenv("GEEOPT_THREADS");
  std::string saved_copy = saved ? saved : "";
  ::setenv("GEEOPT_THREADS", "1", 1);
  std::string serial = sweep_to_csv(run_sweep(cfg));
  ::setenv("GEEOPT_THREADS", "3", 1);
  std::string threaded = sweep_to_csv(run_sweep(cfg));
  if (saved)
    ::setenv("GEEOPT_THREADS", saved_copy.c_str(), 1);
  else
    ::unsetenv("GEEOPT_THREADS");

  CheckResult r;
  r.name = "sweep-determinism";
  r.passed = base == again && base == serial && base == threaded;
  r.detail = r.passed ? "identical bytes across repeats and worker caps (" +
                            std::to_string(base.size()) + " bytes)"
                      : "CSV outputs differ across repeats or worker caps";
  return r;
}

}  // namespace checks

std::vector<CheckResult> run_validation(bool quick) {
  std::vector<CheckResult> out;
  int g = quick ? 150 : 1000;
  int b = quick ? 60 : 300;
  int c = quick ? 150 : 1000;
  int l = quick ? 10 : 60;
  int m = quick ? 6 : 30;
  int t = quick ? 3 : 12;
  int s = quick ? 2 : 8;
  int ppd = quick ? 25 : 40;

  out.push_back(checks::gradient_consistency(g, 1e-5, 0xC0FFEE01));
  out.push_back(checks::penalty_slope_consistency(b, 1e-4, 0xC0FFEE02));
  out.push_back(checks::curvature_negativity(c, 0xC0FFEE03));
  out.push_back(checks::learning_matches_reference(l, 1e-4, 0xC0FFEE04));
  out.push_back(checks::response_potential_monotone(m, 1e-9, 0xC0FFEE05));
  out.push_back(checks::price_trace_properties(t, 0xC0FFEE06));
  out.push_back(checks::small_network_near_optimal(s, ppd, 0.95, 0xC0FFEE07));
  out.push_back(checks::peak_rate_fixture());
  out.push_back(checks::sweep_determinism());
  return out;
}

}  // namespace geeopt
