#pragma once

#include <cstdint>
#include <random>

#include "geeopt/model.hpp"

// Deterministic fixture builders shared by the test binaries and the built-in
// validation checks. Variates are hand-rolled so results do not depend on the
// standard library's distribution internals.
namespace geeopt::testing {

struct DetRng {
  std::mt19937_64 eng;
  explicit DetRng(std::uint64_t seed) : eng(seed) {}

  double uniform01() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  std::uint64_t below(std::uint64_t n) { return eng() % n; }  // bias immaterial for fixtures
  bool chance(double p) { return uniform01() < p; }
};

// Order-one synthetic network: gains, noise and budgets all near 1, so closed
// forms and finite differences behave nicely. xi_ratio < 0 draws a mixed bag
// of self-interference levels (including exact zero).
Scenario unit_scenario(DetRng& rng, int users, int subcarriers, double xi_ratio = -1.0);

// Random point of the budget box, occasionally exactly on the budget face or
// with zeroed entries when boundary is allowed.
PowerAllocation random_feasible(const Scenario& s, DetRng& rng, bool allow_boundary = true);

}  // namespace geeopt::testing
