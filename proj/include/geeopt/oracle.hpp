#pragma once

#include <functional>
#include <span>
#include <vector>

#include "geeopt/model.hpp"

// Slow, independent reference implementations used to pin down expected values
// in tests. Nothing here is called by the solver itself.
namespace geeopt::oracle {

struct FdResult {
  double derivative = 0.0;
  bool one_sided = false;  // a bound blocked one side; tolerance should be doubled
};

// Central difference of f at x with step h, falling back to a one-sided
// difference when [lo, hi] truncates the stencil.
FdResult finite_diff(const std::function<double(double)>& f, double x, double h,
                     double lo, double hi);

// Central second difference; the stencil must fit inside the domain.
double finite_diff2(const std::function<double(double)>& f, double x, double h);

// Euclidean projection of q onto {q >= 0, sum(q) <= budget}, in place.
// Sort-based water level when the budget constraint is active.
void project_budget_box(std::span<double> q, double budget);

struct PgaOptions {
  int max_iterations = 20000;
  double initial_step = 0.0;  // 0: budget-scaled default
  double armijo = 1e-4;
  double step_tol = 1e-11;    // relative to budget, infinity norm of the move
};

struct PgaResult {
  std::vector<double> p;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Projected gradient ascent with Armijo backtracking over
// {p >= floors, sum(p - floors) <= budget}. Reference maximizer for the
// per-user concave subproblems.
PgaResult projected_gradient(const std::function<double(std::span<const double>)>& value,
                             const std::function<void(std::span<const double>, std::span<double>)>& grad,
                             double budget, std::span<const double> floors,
                             std::vector<double> start, const PgaOptions& opt = {});

struct GridResult {
  PowerAllocation best;
  double best_gee = 0.0;
  long long evaluated = 0;
};

// Exhaustive search of the global energy efficiency over per-user lattices on
// the scaled simplex (boundary included). Ties keep the first point in
// enumeration order. Throws when the lattice exceeds max_points.
GridResult grid_search_gee(const Scenario& s, int points_per_dim,
                           long long max_points = 10'000'000);

// Same lattice walk, arbitrary objective; used to cross-check potentials.
GridResult grid_search_objective(const Scenario& s, int points_per_dim,
                                 const std::function<double(const PowerAllocation&)>& objective,
                                 long long max_points = 10'000'000);

// Closed-form single-user rate maximizer: maximize sum_n log2(1 + p_n / c_n)
// subject to sum(p) = budget, p >= 0, where c_n = noise / alpha_n.
std::vector<double> water_filling(std::span<const double> c, double budget);

struct ScalarMax {
  double x = 0.0;
  double fx = 0.0;
};

// Golden-section search for a unimodal maximum on [lo, hi].
ScalarMax golden_max(const std::function<double(double)>& f, double lo, double hi,
                     double xtol = 1e-12);

}  // namespace geeopt::oracle
