#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace geeopt {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // worst error / counts, for the report line
};

inline bool all_passed(const std::vector<CheckResult>& rs) {
  for (const auto& r : rs)
    if (!r.passed) return false;
  return true;
}

// Parameterized invariant checks over deterministic random fixtures. Each one
// returns a single pass/fail record with a human-readable summary of what was
// measured. The acceptance binary calls these with its own sample counts; the
// CLI `validate` command runs the stock profiles below.
namespace checks {

// Analytic better-response marginals vs finite differences of the concave
// surrogate, at random (scenario, allocation, user, subcarrier, price)
// samples; one-sided stencils at the boundary get twice the tolerance.
CheckResult gradient_consistency(int samples, double tol, std::uint64_t seed);

// Rate-penalty linearization slopes (own and neighbor parts, each separately)
// vs finite differences of the penalty itself, at strictly feasible points.
CheckResult penalty_slope_consistency(int samples, double tol, std::uint64_t seed);

// Surrogate curvature is strictly negative in every coordinate wherever the
// subcarrier is live (direct gain or some outgoing cross gain positive), and
// matches a second finite difference.
CheckResult curvature_negativity(int samples, std::uint64_t seed);

// Learning solutions vs projected-gradient reference on random concave
// subproblems: objective gap below tol, every learning iterate feasible with
// zero tolerance.
CheckResult learning_matches_reference(int subproblems, double tol, std::uint64_t seed);

// The game potential never decreases across individual better responses;
// half the runs use no rate requirement, half the penalized requirement.
CheckResult response_potential_monotone(int runs, double slack, std::uint64_t seed);

// Full solver traces: price starts at zero and never decreases, every gap
// entry except possibly the last is non-negative, a negative final gap is
// flagged and the reported allocation then attains the last price exactly.
CheckResult price_trace_properties(int scenarios, std::uint64_t seed);

// Two-user, two-subcarrier networks: solver efficiency vs exhaustive lattice
// search, requiring solver >= factor * lattice best.
CheckResult small_network_near_optimal(int scenarios, int points_per_dim, double factor,
                                       std::uint64_t seed);

// Peak-rate bookkeeping on the stock network: every user's rate ceiling
// equals subcarriers * log2(1 + alpha/xi) for the stock self-interference.
CheckResult peak_rate_fixture();

// A small Monte Carlo sweep rendered to CSV twice, and again under different
// worker-thread caps, must produce identical bytes.
CheckResult sweep_determinism();

}  // namespace checks

// Stock validation profiles: quick trims sample counts to a few seconds.
std::vector<CheckResult> run_validation(bool quick);

}  // namespace geeopt
