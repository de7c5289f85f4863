#include "geeopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace geeopt {

double fractional_gap(const Scenario& s, const PowerAllocation& p, double lambda) {
  return potential(s, p, lambda);
}

double rate_power_ratio(const Scenario& s, const PowerAllocation& p) {
  return sum_rate(s, p) / total_weighted_power(s, p);
}

namespace {

RunReport solve_from(const Scenario& s, const SolverOptions& opt, PowerAllocation p) {
  RunReport rep;
  PowerAllocation prev = p;
  double lambda = 0.0, lambda_prev = 0.0;
  long long rounds_total = 0, learn_calls = 0, learn_iters = 0;

  for (int j = 1; j <= opt.max_outer; ++j) {
    prev = p;
    BrdResult brd = run_brd(s, std::move(p), lambda, opt.qos, opt.brd, opt.learning);
    p = std::move(brd.p);
    rounds_total += brd.rounds;
    learn_calls += brd.learn_calls;
    learn_iters += brd.learn_iterations_total;
    rep.any_brd_nonconverged |= !brd.converged;
    rep.any_learn_nonconverged |= brd.any_learn_nonconverged;

    double gap = fractional_gap(s, p, lambda);
    rep.lambda_trace.push_back(lambda);
    rep.gap_trace.push_back(gap);
    rep.outer_iterations = j;

    if (gap < 0.0) {
      // The refreshed price was already the best ratio the inner game reaches;
      // the previous allocation attains it exactly.
      p = prev;
      rep.stopped_gap_negative = true;
      rep.converged = true;
      break;
    }
    double next = rate_power_ratio(s, p);
    if (j >= 2 && gap < opt.eps &&
        std::abs(lambda - lambda_prev) / std::max(lambda, 1e-30) < opt.eps) {
      rep.converged = true;
      break;
    }
    lambda_prev = lambda;
    lambda = next;
  }

  rep.allocation = p;
  rep.gee = gee(s, p);
  rep.sum_rate = sum_rate(s, p);
  rep.user_rates.resize(s.users);
  rep.satisfied.assign(s.users, 1);
  int sat = 0;
  for (int k = 0; k < s.users; ++k) {
    rep.user_rates[k] = user_rate(s, p, k);
    rep.satisfied[k] = rep.user_rates[k] >= s.r_min[k] - 1e-9;
    sat += rep.satisfied[k] ? 1 : 0;
  }
  rep.satisfied_ratio = static_cast<double>(sat) / s.users;

  if (std::holds_alternative<QosGeneralized>(opt.qos)) {
    // Relaxation judged against the final interference: plan says relaxed, or
    // an enforced subcarrier ended below target (repair rounds exhausted).
    std::vector<std::vector<double>> targets = split_targets_all(s);
    for (int k = 0; k < s.users; ++k) {
      FloorPlan plan = make_floor_plan(s, k, p, targets[k]);
      bool relaxed = plan.relaxed;
      for (int n = 0; n < s.subcarriers && !relaxed; ++n) {
        if (!plan.enforced[n] || plan.targets[n] <= 0.0) continue;
        if (std::log2(1.0 + sinr(s, p, k, n)) < plan.targets[n] - 1e-9) relaxed = true;
      }
      if (relaxed) rep.relaxed_users.push_back(k);
    }
  } else if (std::holds_alternative<QosBarrier>(opt.qos)) {
    // Requirement unreachable against the final interference.
    for (int k = 0; k < s.users; ++k) {
      if (s.r_min[k] <= 0.0) continue;
      FeasibilityResult feas = rate_feasibility(s, k, p, s.r_min[k], opt.learning);
      if (!feas.feasible) rep.relaxed_users.push_back(k);
    }
  }

  if (rep.outer_iterations > 0)
    rep.mean_brd_rounds = static_cast<double>(rounds_total) / rep.outer_iterations;
  if (learn_calls > 0) rep.mean_learn_iterations = static_cast<double>(learn_iters) / learn_calls;
  return rep;
}

}  // namespace

RunReport maximize_gee(const Scenario& s, const SolverOptions& opt) {
  s.validate();
  opt.learning.validate();
  if (qos_active(opt.qos)) {
    for (int k = 0; k < s.users; ++k) {
      if (s.r_min[k] <= 0.0) continue;
      if (!(s.r_min[k] < rate_ceiling(s, k).total))
        throw std::invalid_argument("rate requirement of user " + std::to_string(k) +
                                    " is not below its rate ceiling");
    }
  }

  int starts = 1;
  if (!qos_active(opt.qos)) {
    if (opt.restarts > 0)
      starts = std::min(opt.restarts, s.users + 1);
    else if (s.users <= 4 && s.subcarriers <= 4)
      starts = s.users + 1;
  }

  RunReport best = solve_from(s, opt, initial_allocation(s, opt.qos));
  for (int r = 1; r < starts; ++r) {
    // Start r spotlights user r-1: that user alone at the uniform allocation,
    // everyone else silent. Against a silent background the play prices
    // interference at its steepest, which steers it toward equilibria the
    // uniform start cannot reach.
    PowerAllocation p(s.users, s.subcarriers);
    int k = r - 1;
    for (int n = 0; n < s.subcarriers; ++n) p(k, n) = s.p_max_w[k] / (s.subcarriers + 1);
    RunReport rep = solve_from(s, opt, std::move(p));
    if (rep.gee > best.gee) best = std::move(rep);
  }
  return best;
}

}  // namespace geeopt
