#pragma once

#include <functional>
#include <span>
#include <vector>

namespace geeopt {

struct LearningParams {
  double delta0 = 1.0;     // step scale
  double exponent = 0.6;   // step decay, must sit in (0.5, 1]
  double tol = 1e-6;       // stop when the move is below tol * budget (inf norm)
  int max_iterations = 5000;

  void validate() const;  // throws std::invalid_argument naming the bad field
};

// Writes the per-subcarrier marginal utility at p into the second argument.
using GradFn = std::function<void(std::span<const double>, std::span<double>)>;
// Optional per-iterate hook, called with (t, p(t)); t = 0 is the start image.
using IterObserver = std::function<void(int, std::span<const double>)>;

// Score-to-power map: p_n = budget * exp(y_n) / (1 + sum_m exp(y_m)).
// Scores are clamped to [-50, 50] before exponentiating, which is the range
// the learner can produce; the image always satisfies p > 0 and
// sum(p) < budget. exp_map(0) spreads budget/(dims+1) on every subcarrier.
std::vector<double> exp_map(std::span<const double> y, double budget);

struct LearnResult {
  std::vector<double> p;       // offsets + mapped scores, feasible by construction
  std::vector<double> scores;  // final y, reusable as a warm start
  int iterations = 0;
  bool converged = false;      // false when max_iterations ran out
};

// Gradient-driven fixed point iteration: p(t) from the current scores, then
// y += step(t) * budget * grad(p(t)). The budget factor makes the update
// invariant to the power unit (scores effectively live on the normalized
// simplex); with budget = 1 the update is the plain scheme. Every iterate
// satisfies the budget and floor constraints exactly. On a strictly concave
// subproblem the iteration converges to its unique maximizer.
// The length of offsets defines the dimension; pass zeros when unconstrained.
LearnResult learn(const GradFn& grad, double budget, std::span<const double> offsets,
                  const LearningParams& params, std::span<const double> warm_scores = {},
                  const IterObserver* observer = nullptr);

}  // namespace geeopt
