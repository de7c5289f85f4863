#include "geeopt/qos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace geeopt {

namespace {
constexpr double kInvLn2 = 1.0 / std::numbers::ln2;
constexpr double kInvLn2Sq = kInvLn2 * kInvLn2;
}  // namespace

double barrier_value(const Scenario& s, const PowerAllocation& p, double rho, double relax_value) {
  double acc = 0.0;
  for (int k = 0; k < s.users; ++k) {
    if (s.r_min[k] <= 0.0) continue;  // vacuous requirement, no pressure
    double slack = user_rate(s, p, k) - s.r_min[k];
    acc += slack > 0.0 ? std::log2(slack) : relax_value;
  }
  return rho * acc;
}

double potential_with_barrier(const Scenario& s, const PowerAllocation& p, double lambda,
                              const QosBarrier& b) {
  return potential(s, p, lambda) + barrier_value(s, p, b.rho, b.relax_value);
}

namespace {

BarrierSlopes barrier_slopes_impl(const Scenario& s, int k, const PowerAllocation& p,
                                  std::span<const double> pstar_k, double rho, bool strict) {
  PowerAllocation at = p;
  for (int n = 0; n < s.subcarriers; ++n) at(k, n) = pstar_k[n];

  // Users without a requirement take no part in the barrier at all.
  std::vector<char> active(s.users);
  std::vector<double> slack(s.users, 0.0);
  for (int i = 0; i < s.users; ++i) {
    active[i] = s.r_min[i] > 0.0;
    if (active[i]) slack[i] = user_rate(s, at, i) - s.r_min[i];
  }
  if (strict)
    for (int i = 0; i < s.users; ++i)
      if (active[i] && slack[i] <= 0.0)
        throw std::domain_error("barrier linearization at infeasible point");

  BarrierSlopes out;
  out.own.assign(s.subcarriers, 0.0);
  out.cross.assign(s.subcarriers, 0.0);
  for (int n = 0; n < s.subcarriers; ++n) {
    if (active[k] && slack[k] > 0.0) {
      double eta = s.alpha(k, n) + s.xi(k, n);
      double own_base = s.noise_w[n] + interference_at(s, at, k, n);
      double dr = eta / (own_base + eta * at(k, n)) - s.xi(k, n) / (own_base + s.xi(k, n) * at(k, n));
      out.own[n] = rho * kInvLn2Sq * dr / slack[k];
    }
    double acc = 0.0;
    for (int i = 0; i < s.users; ++i) {
      if (i == k || !active[i] || slack[i] <= 0.0) continue;
      double b = s.beta(k, i, n);
      if (b == 0.0) continue;
      double cross_i = interference_at(s, at, i, n);
      double num = s.noise_w[n] + (s.alpha(i, n) + s.xi(i, n)) * at(i, n) + cross_i;
      double den = s.noise_w[n] + s.xi(i, n) * at(i, n) + cross_i;
      acc += b * (1.0 / num - 1.0 / den) / slack[i];
    }
    out.cross[n] = rho * kInvLn2Sq * acc;
  }
  return out;
}

}  // namespace

BarrierSlopes barrier_slopes(const Scenario& s, int k, const PowerAllocation& p,
                             std::span<const double> pstar_k, double rho) {
  return barrier_slopes_impl(s, k, p, pstar_k, rho, true);
}

BarrierSlopes barrier_slopes_relaxed(const Scenario& s, int k, const PowerAllocation& p,
                                     std::span<const double> pstar_k, double rho) {
  return barrier_slopes_impl(s, k, p, pstar_k, rho, false);
}

FeasibilityResult rate_feasibility(const Scenario& s, int k, const PowerAllocation& p, double rmin,
                                   const LearningParams& lp) {
  if (rmin <= 0.0) return {true, 0.0, 0};
  RateCeiling ceiling = rate_ceiling(s, k);
  if (!(rmin < ceiling.total)) return {false, 0.0, 0};

  SurrogateSubproblem sub(s, k, p, std::vector<double>(s.subcarriers, 0.0));
  std::vector<double> zeros(s.subcarriers, 0.0);
  auto grad = [&sub](std::span<const double> pk, std::span<double> out) {
    sub.rate_gradient(pk, out);
  };
  LearnResult lr = learn(grad, s.p_max_w[k], zeros, lp);
  double rate = sub.rate_value(lr.p);
  return {rate >= rmin, rate, lr.iterations};
}

std::vector<double> split_rate_requirement(const Scenario& s, int k) {
  const int N = s.subcarriers;
  double rmin = s.r_min[k];
  std::vector<double> targets(N, 0.0);
  if (rmin <= 0.0) return targets;

  RateCeiling ceiling = rate_ceiling(s, k);
  int unbounded = 0;
  double finite_total = 0.0;
  for (int n = 0; n < N; ++n) {
    if (std::isinf(ceiling.per_subcarrier[n]))
      ++unbounded;
    else
      finite_total += ceiling.per_subcarrier[n];
  }
  if (unbounded > 0) {
    // Uncapped subcarriers dominate any finite ceiling; they share the whole
    // requirement equally (all-uncapped reduces to a plain equal split).
    for (int n = 0; n < N; ++n)
      if (std::isinf(ceiling.per_subcarrier[n])) targets[n] = rmin / unbounded;
    return targets;
  }
  if (finite_total <= 0.0)
    throw std::invalid_argument("rate requirement cannot be split: user " + std::to_string(k) +
                                " has an all-zero rate ceiling");
  for (int n = 0; n < N; ++n) targets[n] = rmin * (ceiling.per_subcarrier[n] / finite_total);
  return targets;
}

std::optional<double> min_power_for_target(const Scenario& s, int k, int n,
                                           const PowerAllocation& p, double target) {
  double c = std::exp2(target) - 1.0;
  if (c <= 0.0) return 0.0;
  double den = s.alpha(k, n) - s.xi(k, n) * c;
  if (den <= 0.0) return std::nullopt;  // self-interference caps sinr below the target
  double base = s.noise_w[n] + interference_at(s, p, k, n);
  return c * base / den;
}

FloorPlan make_floor_plan(const Scenario& s, int k, const PowerAllocation& p,
                          std::span<const double> targets) {
  const int N = s.subcarriers;
  FloorPlan plan;
  plan.floors.assign(N, 0.0);
  plan.enforced.assign(N, 0);
  plan.targets.assign(targets.begin(), targets.end());

  std::vector<std::pair<double, int>> cand;
  cand.reserve(N);
  for (int n = 0; n < N; ++n) {
    auto need = min_power_for_target(s, k, n, p, targets[n]);
    if (need) cand.emplace_back(*need, n);
  }
  std::sort(cand.begin(), cand.end());

  double pmax = s.p_max_w[k];
  double run = 0.0;
  for (auto [need, n] : cand) {
    if (run + need <= pmax * (1.0 + 1e-12)) {
      run += need;
      plan.floors[n] = need;
      plan.enforced[n] = 1;
    }
  }
  plan.relaxed = std::count(plan.enforced.begin(), plan.enforced.end(), 1) != N;
  plan.slack_budget = std::max(0.0, pmax - run);
  return plan;
}

}  // namespace geeopt
