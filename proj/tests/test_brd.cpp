#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "geeopt/brd.hpp"
#include "geeopt/oracle.hpp"
#include "geeopt/testing.hpp"

using namespace geeopt;

TEST_CASE("uniform start: interior spread, floors honoured in generalized mode") {
  testing::DetRng rng(11);
  Scenario s = testing::unit_scenario(rng, 3, 4);

  PowerAllocation base = initial_allocation(s, QosNone{});
  for (int k = 0; k < s.users; ++k)
    for (int n = 0; n < s.subcarriers; ++n)
      CHECK(base(k, n) == s.p_max_w[k] / (s.subcarriers + 1));

  for (int k = 0; k < s.users; ++k) s.r_min[k] = 0.2;
  PowerAllocation gen = initial_allocation(s, QosGeneralized{});
  auto targets = split_targets_all(s);
  for (int k = 0; k < s.users; ++k) {
    FloorPlan plan = make_floor_plan(s, k, base, targets[k]);
    double total = 0.0;
    for (int n = 0; n < s.subcarriers; ++n) {
      CHECK(gen(k, n) == plan.floors[n] + plan.slack_budget / (s.subcarriers + 1));
      total += gen(k, n);
    }
    CHECK(total <= s.p_max_w[k] * (1.0 + 1e-9));
  }
}

TEST_CASE("a solved game is solved: restarting adds nothing") {
  testing::DetRng rng(21);
  Scenario s = testing::unit_scenario(rng, 4, 3);
  BrdOptions opts;
  LearningParams lp;

  BrdResult first = run_brd(s, initial_allocation(s, QosNone{}), 0.4, QosNone{}, opts, lp);
  REQUIRE(first.converged);
  BrdResult again = run_brd(s, first.p, 0.4, QosNone{}, opts, lp);
  CHECK(again.converged);
  CHECK(again.rounds == 1);
  CHECK(potential(s, again.p, 0.4) >= potential(s, first.p, 0.4) - 1e-9);
}

TEST_CASE("a huge stalling threshold stops after one round") {
  testing::DetRng rng(22);
  Scenario s = testing::unit_scenario(rng, 3, 2);
  BrdOptions opts;
  opts.eps_potential = 1e12;
  BrdResult r = run_brd(s, initial_allocation(s, QosNone{}), 0.0, QosNone{}, opts, LearningParams{});
  CHECK(r.converged);
  CHECK(r.rounds == 1);
  CHECK(r.potential_trace.size() == 2);  // start value plus one round
}

TEST_CASE("single user, no self-interference: dynamics reach the water-filling rate") {
  Scenario s;
  s.users = 1;
  s.subcarriers = 2;
  s.bandwidth_hz = 1.0;
  s.noise_w = {1.0, 2.0};
  s.alpha = Grid2(1, 2);
  s.alpha(0, 0) = 2.0;
  s.alpha(0, 1) = 1.0;
  s.xi = Grid2(1, 2, 0.0);
  s.beta = Grid3(1, 1, 2);
  s.mu = Grid2(1, 2, 1.0);
  s.p_static_w = {1.0};
  s.p_max_w = {3.0};
  s.r_min = {0.0};
  s.validate();

  // maximize log2(1 + 2 p0) + log2(1 + p1 / 2): water filling with c = (0.5, 2).
  std::vector<double> c = {0.5, 2.0};
  auto star = oracle::water_filling(c, 3.0);
  CHECK(star[0] == doctest::Approx(2.25).epsilon(1e-12));
  CHECK(star[1] == doctest::Approx(0.75).epsilon(1e-12));
  double best = std::log2(1.0 + star[0] / c[0]) + std::log2(1.0 + star[1] / c[1]);

  BrdResult r = run_brd(s, initial_allocation(s, QosNone{}), 0.0, QosNone{}, BrdOptions{},
                        LearningParams{});
  REQUIRE(r.converged);
  CHECK(best - sum_rate(s, r.p) <= 1e-3);
  CHECK(best - sum_rate(s, r.p) >= -1e-12);
}

TEST_CASE("the climbed value never goes downhill") {
  testing::DetRng rng(33);
  for (int trial = 0; trial < 12; ++trial) {
    Scenario s = testing::unit_scenario(rng, 2 + (int)rng.below(3), 2 + (int)rng.below(3));
    double lambda = rng.uniform01();

    QosMode mode = QosNone{};
    if (trial % 2 == 1) {
      PowerAllocation probe = initial_allocation(s, QosNone{});
      for (int k = 0; k < s.users; ++k)
        s.r_min[k] = rng.uniform(0.2, 0.9) * user_rate(s, probe, k);
      mode = QosBarrier{};
    }

    BrdResult r = run_brd(s, initial_allocation(s, mode), lambda, mode, BrdOptions{},
                          LearningParams{});
    REQUIRE(r.potential_trace.size() >= 2);
    CHECK(r.potential_trace.front() ==
          doctest::Approx(mode_potential(s, initial_allocation(s, mode), lambda, mode))
              .epsilon(1e-12));
    for (size_t i = 1; i < r.potential_trace.size(); ++i)
      CHECK(r.potential_trace[i] >= r.potential_trace[i - 1] - 1e-9);
    CHECK(r.potential_trace.back() ==
          doctest::Approx(mode_potential(s, r.p, lambda, mode)).epsilon(1e-9));
  }
}

TEST_CASE("two-user equilibrium lands near the lattice optimum of the shared value") {
  testing::DetRng rng(3001);
  Scenario s = testing::unit_scenario(rng, 2, 2);
  BrdResult r = run_brd(s, initial_allocation(s, QosNone{}), 0.0, QosNone{}, BrdOptions{},
                        LearningParams{});
  REQUIRE(r.converged);
  double ne_value = potential(s, r.p, 0.0);

  auto objective = [&](const PowerAllocation& a) { return potential(s, a, 0.0); };
  oracle::GridResult g = oracle::grid_search_objective(s, 41, objective);
  CHECK(ne_value >= 0.995 * g.best_gee);
  CHECK(ne_value <= g.best_gee + 1e-6);  // the lattice bound is genuine
}

TEST_CASE("generalized mode ends with every enforced floor satisfied") {
  testing::DetRng rng(47);
  Scenario s = testing::unit_scenario(rng, 3, 3, 0.01);
  for (int k = 0; k < s.users; ++k) s.r_min[k] = 0.25;

  auto targets = split_targets_all(s);
  BrdResult r = run_brd(s, initial_allocation(s, QosGeneralized{}), 0.1, QosGeneralized{},
                        BrdOptions{}, LearningParams{});
  CHECK(r.converged);
  CHECK(floors_consistent(s, r.p, targets));

  // Feasibility of the final allocation.
  for (int k = 0; k < s.users; ++k) {
    double total = 0.0;
    for (int n = 0; n < s.subcarriers; ++n) {
      CHECK(r.p(k, n) >= 0.0);
      total += r.p(k, n);
    }
    CHECK(total <= s.p_max_w[k] * (1.0 + 1e-9));
  }
}

TEST_CASE("single responses never lower the shared value") {
  testing::DetRng rng(59);
  Scenario s = testing::unit_scenario(rng, 3, 2);
  PowerAllocation p = testing::random_feasible(s, rng, false);
  const double lambda = 0.7;

  for (int k = 0; k < s.users; ++k) {
    double before = potential(s, p, lambda);
    BetterResponse br = better_response(s, k, p, lambda, QosNone{}, LearningParams{});
    REQUIRE((int)br.p_k.size() == s.subcarriers);
    for (int n = 0; n < s.subcarriers; ++n) p(k, n) = br.p_k[n];
    CHECK(potential(s, p, lambda) >= before - 1e-12);
  }
}
