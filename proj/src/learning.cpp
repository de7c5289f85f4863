#include "geeopt/learning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace geeopt {

namespace {
// Far beyond this range the mapping is saturated to machine precision anyway,
// while staying inside it keeps every exponential below normal and every
// mapped power strictly positive (score spreads stay under the exp underflow
// threshold). Scores must be able to grow freely well past the point where
// the budget is effectively exhausted, or per-subcarrier ratios freeze before
// they have settled.
constexpr double kScoreClamp = 340.0;
// Log-utility slopes explode near zero power (inversely with the noise
// floor), so a single steep sample could otherwise fling a score arbitrarily
// far in one update. Each coordinate's score move is clipped independently:
// a coordinate already driven deep into saturation can carry an enormous
// slope while its mapped power no longer changes, and letting it shrink the
// whole step would freeze every other coordinate instead. The clip keeps
// each coordinate's sign, and where it is inactive the update is exactly the
// scheduled gradient step.
//
// A coordinate whose optimum sits on a narrow interior peak keeps a clipped
// slope on both sides of the peak, so its clipped move flips sign every
// iteration and the score just oscillates with amplitude equal to the cap
// over the schedule — too wide to settle within any reasonable horizon, and
// invisible to the movement test when the mapped power is far below the
// budget. Two consecutive clipped moves in opposite directions are exactly
// that signature (a smooth crossing produces an unclipped move first), so
// the coordinate's cap is halved whenever it appears and the oscillation
// closes in on the peak geometrically, like bisection. Any other move grows
// the cap back toward its ceiling: a shrunken cap must not linger once the
// coordinate travels in one direction again, or the travel itself would
// creep below the movement test and stop the run short of the peak.
constexpr double kScoreStepCap = 25.0;
constexpr double kScoreStepGrowth = 1.25;
// Above this level the idle share 1/(1 + sum e^{y}) is below 2e-9, so raising
// the top score further cannot change the mapped powers by more than that —
// but it does bury the iterate in a flat region of the mapping where updates
// stop moving p at all and the movement test fires instantly. The score
// vector is therefore re-centered whenever its maximum exceeds this ceiling:
// every score shifts down by the same amount, which preserves all pairwise
// differences and hence the mapped point, while keeping the iterate where
// the mapping still responds. Applies to warm starts on entry and after
// every update during the run.
constexpr double kScoreCeiling = 20.0;
// When the landscape is nearly flat (saturated log terms at a zero price can
// make every slope minuscule), a fixed step scale would need astronomically
// many iterations to move the scores at all. A one-shot boost, chosen from
// the first gradient of a cold start so that the first score move has unit
// size, is a constant factor in the step schedule and so leaves its
// summability properties intact. Warm starts are excluded: near an optimum
// the first gradient is legitimately tiny and must not be amplified.
constexpr double kMinFirstStep = 1.0;
constexpr double kMaxBoost = 1e6;

double clamp_score(double y) { return std::clamp(y, -kScoreClamp, kScoreClamp); }

void recenter(std::vector<double>& y) {
  double top = 0.0;
  for (double v : y) top = std::max(top, v);
  double shift = std::max(0.0, top - kScoreCeiling);
  for (double& v : y) v = clamp_score(v - shift);
}

void map_into(std::span<const double> y, double budget, std::span<const double> offsets,
              std::span<double> out) {
  // Evaluate budget*e^{y_n}/(1 + sum_m e^{y_m}) in the algebraically
  // identical shifted form budget*e^{y_n-M}/(e^{-M} + sum_m e^{y_m-M}) with
  // M = max(0, max_n y_n): every exponent is <= 0, so large scores cannot
  // overflow, and for non-positive scores the arithmetic is bit-identical to
  // the direct formula.
  double shift = 0.0;
  for (size_t n = 0; n < y.size(); ++n) shift = std::max(shift, y[n]);
  double denom = std::exp(-shift);
  for (size_t n = 0; n < y.size(); ++n) {
    out[n] = std::exp(y[n] - shift);
    denom += out[n];
  }
  double scale = budget / denom;
  for (size_t n = 0; n < y.size(); ++n) out[n] *= scale;
  // The exact image sums to budget * S / (1 + S) < budget, but rounding can
  // push the floating-point sum a few ulps over; shrink until the sum, taken
  // in this same left-to-right order, respects the budget exactly.
  for (int guard = 0; guard < 32; ++guard) {
    double sum = 0.0;
    for (size_t n = 0; n < y.size(); ++n) sum += out[n];
    if (sum <= budget) break;
    double corr = budget / sum;
    for (size_t n = 0; n < y.size(); ++n) out[n] *= corr;
  }
  if (!offsets.empty())
    for (size_t n = 0; n < y.size(); ++n) out[n] += offsets[n];
}
}  // namespace

void LearningParams::validate() const {
  if (!(delta0 > 0.0)) throw std::invalid_argument("learning: delta0 must be positive");
  if (!(exponent > 0.5) || exponent > 1.0)
    throw std::invalid_argument("learning: exponent must lie in (0.5, 1]");
  if (!(tol > 0.0)) throw std::invalid_argument("learning: tol must be positive");
  if (max_iterations < 1) throw std::invalid_argument("learning: max_iterations must be >= 1");
}

std::vector<double> exp_map(std::span<const double> y, double budget) {
  std::vector<double> p(y.size());
  map_into(y, budget, {}, p);
  return p;
}

LearnResult learn(const GradFn& grad, double budget, std::span<const double> offsets,
                  const LearningParams& params, std::span<const double> warm_scores,
                  const IterObserver* observer) {
  params.validate();
  if (budget < 0.0 || !std::isfinite(budget))
    throw std::invalid_argument("learning: budget must be finite and non-negative");

  LearnResult res;
  size_t dims = offsets.empty() ? warm_scores.size() : offsets.size();
  if (!warm_scores.empty() && warm_scores.size() != dims)
    throw std::invalid_argument("learning: warm start has the wrong length");

  res.scores.assign(dims, 0.0);
  if (!warm_scores.empty()) {
    res.scores.assign(warm_scores.begin(), warm_scores.end());
    recenter(res.scores);
  }

  if (budget == 0.0) {  // degenerate: the floor vector is the whole feasible set
    res.p.assign(offsets.begin(), offsets.end());
    res.converged = true;
    return res;
  }

  std::vector<double> p(dims), p_prev(dims), g(dims);
  map_into(res.scores, budget, offsets, p_prev);
  if (observer) (*observer)(0, p_prev);

  const double base = params.delta0 * budget;
  double boost = 1.0;
  std::vector<double> cap(dims, kScoreStepCap);
  std::vector<signed char> last_clip(dims, 0);  // sign of the previous move if it was clipped
  for (int t = 1; t <= params.max_iterations; ++t) {
    grad(p_prev, g);
    if (t == 1 && warm_scores.empty()) {
      double first = 0.0;
      for (size_t n = 0; n < dims; ++n) first = std::max(first, std::abs(base * g[n]));
      if (first > 0.0 && first < kMinFirstStep) boost = std::min(kMinFirstStep / first, kMaxBoost);
    }
    double decay = std::pow(static_cast<double>(t), params.exponent);
    for (size_t n = 0; n < dims; ++n) {
      double raw = base * boost * g[n];
      if (raw > cap[n] || raw < -cap[n]) {
        signed char sign = raw > 0.0 ? 1 : -1;
        if (last_clip[n] == -sign)
          cap[n] *= 0.5;
        else
          cap[n] = std::min(cap[n] * kScoreStepGrowth, kScoreStepCap);
        last_clip[n] = sign;
        raw = std::clamp(raw, -cap[n], cap[n]);
      } else {
        last_clip[n] = 0;
        cap[n] = std::min(cap[n] * kScoreStepGrowth, kScoreStepCap);
      }
      res.scores[n] = clamp_score(res.scores[n] + raw / decay);
    }
    recenter(res.scores);
    map_into(res.scores, budget, offsets, p);
    if (observer) (*observer)(t, p);
    res.iterations = t;
    double move = 0.0;
    for (size_t n = 0; n < dims; ++n) move = std::max(move, std::abs(p[n] - p_prev[n]));
    p_prev.swap(p);
    if (move < params.tol * budget) {
      res.converged = true;
      break;
    }
  }
  res.p = std::move(p_prev);
  return res;
}

}  // namespace geeopt
