#pragma once

#include <vector>

#include "geeopt/brd.hpp"
#include "geeopt/learning.hpp"
#include "geeopt/model.hpp"
#include "geeopt/qos.hpp"

namespace geeopt {

struct SolverOptions {
  double eps = 1e-4;   // outer stop: fractional gap below eps AND relative
                       // price move below eps
  int max_outer = 100;
  QosMode qos = QosNone{};
  BrdOptions brd;
  LearningParams learning;
  // The inner game can have several equilibria, and which one the play lands
  // in depends on where it starts; on small unconstrained instances the
  // solver therefore tries several deterministic starting allocations
  // (uniform, then each user alone at uniform power with everyone else
  // silent) and keeps the best final result. 0 = automatic: users+1 starts
  // when users <= 4 and subcarriers <= 4 without rate requirements, else a
  // single uniform start. Explicit values force that many starts (capped at
  // users+1); rate-constrained modes always use the single uniform start.
  int restarts = 0;
};

// f(p) - lambda * g(p): sum rate minus the priced consumed power. Zero at the
// optimal price, positive below it.
double fractional_gap(const Scenario& s, const PowerAllocation& p, double lambda);

// Next price: achieved sum rate over achieved consumed power.
double rate_power_ratio(const Scenario& s, const PowerAllocation& p);

struct RunReport {
  PowerAllocation allocation;
  double gee = 0.0;       // bit/J, recomputed from the final allocation
  double sum_rate = 0.0;  // bit/s/Hz
  std::vector<double> user_rates;
  std::vector<char> satisfied;   // rate >= requirement - 1e-9
  double satisfied_ratio = 1.0;
  std::vector<int> relaxed_users;  // floors dropped (generalized) or requirement
                                   // unreachable (barrier)
  std::vector<double> lambda_trace;  // price per outer iteration
  std::vector<double> gap_trace;     // fractional gap per outer iteration
  int outer_iterations = 0;
  double mean_brd_rounds = 0.0;
  double mean_learn_iterations = 0.0;
  bool converged = false;
  bool stopped_gap_negative = false;  // inner play overshot the price; the
                                      // previous allocation is reported
  bool any_brd_nonconverged = false;
  bool any_learn_nonconverged = false;
};

// Fractional-programming outer loop around the better-response dynamics:
// price at zero, play the game, re-price at the achieved rate/power ratio,
// repeat. Stops when the gap and the relative price move are both below eps,
// or immediately when the gap goes negative (the price already matched the
// best ratio the inner game can deliver). Throws when a QoS mode is active
// and some rate requirement is not strictly below the user's rate ceiling.
RunReport maximize_gee(const Scenario& s, const SolverOptions& opt = {});

}  // namespace geeopt
