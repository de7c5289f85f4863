#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "geeopt/learning.hpp"
#include "geeopt/model.hpp"

namespace geeopt {

struct QosNone {
  bool operator==(const QosNone&) const = default;
};

// Log-barrier pressure on every user's total rate, relaxed to a constant where
// the requirement is violated.
struct QosBarrier {
  double rho = 1.0;           // barrier weight
  double relax_value = -1e3;  // per-user contribution when rate < requirement
  bool operator==(const QosBarrier&) const = default;
};

// Hard per-subcarrier power floors derived from split rate requirements.
struct QosGeneralized {
  bool operator==(const QosGeneralized&) const = default;
};

using QosMode = std::variant<QosNone, QosBarrier, QosGeneralized>;

inline bool qos_active(const QosMode& m) { return !std::holds_alternative<QosNone>(m); }

// rho * sum_k branch(k), branch = log2(rate_k - rmin_k) when the slack is
// positive, relax_value otherwise.
double barrier_value(const Scenario& s, const PowerAllocation& p, double rho, double relax_value);

// Potential of the barrier-augmented game.
double potential_with_barrier(const Scenario& s, const PowerAllocation& p, double lambda,
                              const QosBarrier& b);

// Linearization slopes of the barrier in user k's own powers, expanded at
// pstar_k (opponents from p). own[n] covers user k's own slack term, cross[n]
// the neighbors' slack terms; the better-response objective adds
// (own[n] + cross[n]) * p_kn.
struct BarrierSlopes {
  std::vector<double> own;
  std::vector<double> cross;
};

// Strict contract: throws std::domain_error("barrier linearization at
// infeasible point") when any slack entering a denominator is non-positive.
BarrierSlopes barrier_slopes(const Scenario& s, int k, const PowerAllocation& p,
                             std::span<const double> pstar_k, double rho);

// Users sitting in the relaxed constant branch contribute zero slope (the
// exact derivative of the relaxed barrier wherever it is differentiable).
BarrierSlopes barrier_slopes_relaxed(const Scenario& s, int k, const PowerAllocation& p,
                                     std::span<const double> pstar_k, double rho);

struct FeasibilityResult {
  bool feasible = false;
  double max_rate = 0.0;  // meaningful only when the probe actually ran
  int iterations = 0;
};

// Can user k reach rate rmin at all against frozen opponents? Maximizes the
// user's own rate (a concave problem) with the learning solver and compares.
// Short-circuits: rmin <= 0 is always feasible, rmin above the rate ceiling
// never is.
FeasibilityResult rate_feasibility(const Scenario& s, int k, const PowerAllocation& p, double rmin,
                                   const LearningParams& lp);

// Per-subcarrier rate targets for user k, proportional to the per-subcarrier
// rate ceilings. Unbounded ceilings absorb the whole requirement in equal
// shares; all-unbounded degrades to an equal split. Sums to r_min[k].
std::vector<double> split_rate_requirement(const Scenario& s, int k);

// Smallest own power making log2(1 + sinr) >= target on subcarrier n against
// frozen opponents, or nullopt when self-interference caps the rate below the
// target at every power.
std::optional<double> min_power_for_target(const Scenario& s, int k, int n,
                                           const PowerAllocation& p, double target);

struct FloorPlan {
  std::vector<double> floors;    // watts; 0 where unenforced
  std::vector<char> enforced;    // per subcarrier
  std::vector<double> targets;   // the split requirement, kept for verification
  double slack_budget = 0.0;     // pmax - sum(floors)
  bool relaxed = false;          // some subcarrier was dropped
};

// Power floors for user k against frozen opponents. When the full floor set
// overshoots the budget, keeps the cheapest subcarriers (ascending floor,
// index as tie-break) while the running sum fits, and drops the rest.
FloorPlan make_floor_plan(const Scenario& s, int k, const PowerAllocation& p,
                          std::span<const double> targets);

}  // namespace geeopt
