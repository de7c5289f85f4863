#pragma once

#include <span>
#include <vector>

#include "geeopt/learning.hpp"
#include "geeopt/model.hpp"
#include "geeopt/qos.hpp"

namespace geeopt {

struct BrdOptions {
  double eps_potential = 1e-6;  // stop when a round gains less than this
  int max_rounds = 200;
  bool warm_start_scores = false;  // reuse each user's learning scores across rounds
  // Generalized mode: extra rounds allowed after the potential stalls until
  // every enforced per-subcarrier rate constraint holds against the final
  // interference (floors move with the opponents, so a constraint met at
  // better-response time can be nudged below target by later movers).
  int floor_repair_rounds = 30;
};

// Potential the given mode climbs: the shared utility, plus the relaxed
// barrier in barrier mode.
double mode_potential(const Scenario& s, const PowerAllocation& p, double lambda,
                      const QosMode& mode);

struct BetterResponse {
  std::vector<double> p_k;
  int learn_iterations = 0;
  bool learn_converged = true;
  bool kept_current = false;        // candidate lost to the current strategy
  bool barrier_infeasible = false;  // requirement unreachable; plain surrogate used
  bool floor_relaxed = false;       // generalized: some subcarrier dropped
};

// One concave-surrogate better response for user k against frozen opponents.
// The returned strategy never scores below the current one in the mode
// potential: a candidate that fails that test is discarded and the current
// row kept (still a better response in the weak sense). In generalized mode
// the current row can only be kept while it satisfies the freshly computed
// floors. split_targets is required in generalized mode (see
// split_rate_requirement); warm_scores, when given, is updated in place.
BetterResponse better_response(const Scenario& s, int k, const PowerAllocation& p, double lambda,
                               const QosMode& mode, const LearningParams& lp,
                               std::span<const double> split_targets = {},
                               std::vector<double>* warm_scores = nullptr);

struct BrdResult {
  PowerAllocation p;
  // mode_potential at the start and after each completed round; non-decreasing
  // within 1e-9 except for forced floor moves in generalized mode.
  std::vector<double> potential_trace;
  int rounds = 0;
  bool converged = false;
  long long learn_calls = 0;
  long long learn_iterations_total = 0;
  bool any_learn_nonconverged = false;
  std::vector<char> barrier_infeasible;  // per user, as of each user's last response
  std::vector<char> floor_relaxed;
};

// Round-robin better-response dynamics at a fixed power price lambda, user
// index ascending, until one full round improves the mode potential by at
// most eps_potential (plus floor consistency in generalized mode).
BrdResult run_brd(const Scenario& s, PowerAllocation start, double lambda, const QosMode& mode,
                  const BrdOptions& opts, const LearningParams& lp);

// Uniform interior start: budget/(subcarriers+1) per subcarrier; in
// generalized mode, floors (computed against that uniform start) plus an
// equal share of the remaining budget.
PowerAllocation initial_allocation(const Scenario& s, const QosMode& mode);

// Per-subcarrier rate targets for every user (empty rows when r_min is 0);
// precomputed once per scenario in generalized mode.
std::vector<std::vector<double>> split_targets_all(const Scenario& s);

// True when every user's enforced floor constraint holds at p: for each user,
// rebuild the floor plan against p and check the enforced subcarriers' rates
// against their targets (tolerance 1e-10 in rate units).
bool floors_consistent(const Scenario& s, const PowerAllocation& p,
                       const std::vector<std::vector<double>>& targets);

}  // namespace geeopt
