#include "geeopt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace geeopt::oracle {

FdResult finite_diff(const std::function<double(double)>& f, double x, double h,
                     double lo, double hi) {
  if (h <= 0.0) throw std::invalid_argument("finite_diff: step must be positive");
  bool can_lo = x - h >= lo, can_hi = x + h <= hi;
  if (can_lo && can_hi) return {(f(x + h) - f(x - h)) / (2.0 * h), false};
  if (can_hi) return {(f(x + h) - f(x)) / h, true};
  if (can_lo) return {(f(x) - f(x - h)) / h, true};
  throw std::invalid_argument("finite_diff: step exceeds the domain on both sides");
}

double finite_diff2(const std::function<double(double)>& f, double x, double h) {
  if (h <= 0.0) throw std::invalid_argument("finite_diff2: step must be positive");
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

void project_budget_box(std::span<double> q, double budget) {
  double clipped_sum = 0.0;
  for (double v : q) clipped_sum += std::max(v, 0.0);
  if (clipped_sum <= budget) {
    for (double& v : q) v = std::max(v, 0.0);
    return;
  }
  // Budget face is active: shift by the water level tau and clip.
  std::vector<double> u(q.begin(), q.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double run = 0.0, tau = 0.0;
  for (size_t m = 0; m < u.size(); ++m) {
    run += u[m];
    double cand = (run - budget) / static_cast<double>(m + 1);
    if (u[m] - cand > 0.0)
      tau = cand;
    else
      break;
  }
  for (double& v : q) v = std::max(v - tau, 0.0);
}

PgaResult projected_gradient(const std::function<double(std::span<const double>)>& value,
                             const std::function<void(std::span<const double>, std::span<double>)>& grad,
                             double budget, std::span<const double> floors,
                             std::vector<double> start, const PgaOptions& opt) {
  const size_t n = start.size();
  PgaResult res;
  res.p = std::move(start);
  std::vector<double> g(n), cand(n);
  double fx = value(res.p);
  double step0 = opt.initial_step > 0.0 ? opt.initial_step : budget;
  double step = step0;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    res.iterations = it;
    grad(res.p, g);
    bool accepted = false;
    double move = 0.0;
    // Restart the backtracking from the full step every iterate. Carrying a
    // shrunken step forward can wedge the search: one coordinate may need a
    // microscopic step while another still needs a large one, and a slowly
    // re-growing step makes consecutive moves so small that the movement test
    // reads them as convergence.
    step = step0;
    for (int half = 0; half < 64; ++half) {
      for (size_t i = 0; i < n; ++i) cand[i] = res.p[i] - floors[i] + step * g[i];
      project_budget_box(cand, budget);
      for (size_t i = 0; i < n; ++i) cand[i] += floors[i];
      double lin = 0.0;
      move = 0.0;
      for (size_t i = 0; i < n; ++i) {
        lin += g[i] * (cand[i] - res.p[i]);
        move = std::max(move, std::abs(cand[i] - res.p[i]));
      }
      double fc = value(cand);
      // Projection can bend a large trial step so far off the gradient that
      // the predicted ascent goes non-positive; that only disqualifies this
      // step length, not the whole iterate, so keep halving — a much smaller
      // step may still climb (e.g. onto a narrow ridge near a zero power).
      if (fc >= fx + opt.armijo * lin && fc >= fx) {
        res.p = cand;
        fx = fc;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || move <= opt.step_tol * budget) {
      res.converged = true;
      break;
    }
  }
  // The gradient direction serves every coordinate with one shared step
  // length, so when optimal powers sit many orders of magnitude apart, any
  // step large enough to move a big coordinate wipes out a tiny one and gets
  // rejected, and the steps that survive cannot finish the big coordinate.
  // Polish with cyclic exact line searches, which treat each direction on its
  // own scale: along single coordinates (these span the feasible directions
  // while the budget is slack) and along pairwise transfers that keep the
  // total fixed (these span the budget face). Each slice of a concave
  // function is unimodal, so golden-section search maximizes it; a move is
  // kept only when it improves the value, so the polish never damages the
  // iterate.
  constexpr double kSliceTol = 1e-14;
  for (int sweep = 0; sweep < 50; ++sweep) {
    double before = fx;
    for (size_t i = 0; i < n; ++i) {
      double slack = budget;
      for (size_t m = 0; m < n; ++m) slack -= res.p[m] - floors[m];
      double lo = floors[i], hi = res.p[i] + std::max(slack, 0.0);
      if (!(hi > lo)) continue;
      cand = res.p;
      ScalarMax best = golden_max(
          [&](double x) {
            cand[i] = x;
            return value(cand);
          },
          lo, hi, kSliceTol);
      if (best.fx > fx) {
        res.p[i] = best.x;
        fx = best.fx;
      }
    }
    for (size_t i = 0; i + 1 < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) {
        double lo = -(res.p[j] - floors[j]), hi = res.p[i] - floors[i];
        if (!(hi > lo)) continue;
        cand = res.p;
        ScalarMax best = golden_max(
            [&](double t) {
              cand[i] = res.p[i] - t;
              cand[j] = res.p[j] + t;
              return value(cand);
            },
            lo, hi, kSliceTol);
        if (best.fx > fx) {
          res.p[i] -= best.x;
          res.p[j] += best.x;
          fx = best.fx;
        }
      }
    }
    if (fx - before <= 1e-10 * std::max(1.0, std::abs(fx))) break;
  }
  res.value = fx;
  return res;
}

namespace {

// All lattice points of one user's scaled simplex, lexicographic order.
void enumerate_simplex(int dims, int points, double h, double pmax,
                       std::vector<std::vector<double>>& out) {
  std::vector<int> c(dims, 0);
  std::vector<double> p(dims, 0.0);
  while (true) {
    int total = std::accumulate(c.begin(), c.end(), 0);
    if (total <= points - 1) {
      for (int i = 0; i < dims; ++i) p[i] = std::min(c[i] * h, pmax);
      out.push_back(p);
    }
    int i = dims - 1;
    while (i >= 0) {
      if (++c[i] <= points - 1) break;
      c[i] = 0;
      --i;
    }
    if (i < 0) break;
  }
}

GridResult grid_walk(const Scenario& s, int points_per_dim,
                     const std::function<double(const PowerAllocation&)>& objective,
                     long long max_points) {
  if (points_per_dim < 2) throw std::invalid_argument("grid search needs at least 2 points per dimension");
  const int K = s.users, N = s.subcarriers;
  std::vector<std::vector<std::vector<double>>> cand(K);
  long long total = 1;
  for (int k = 0; k < K; ++k) {
    double h = s.p_max_w[k] / (points_per_dim - 1);
    enumerate_simplex(N, points_per_dim, h, s.p_max_w[k], cand[k]);
    total *= static_cast<long long>(cand[k].size());
    if (total > max_points || total < 0)
      throw std::invalid_argument("grid search exceeds the point cap");
  }

  GridResult res;
  res.best = PowerAllocation(K, N);
  PowerAllocation p(K, N);
  std::vector<size_t> idx(K, 0);
  for (int k = 0; k < K; ++k)
    for (int n = 0; n < N; ++n) p(k, n) = cand[k][0][n];
  double best = -std::numeric_limits<double>::infinity();
  while (true) {
    double v = objective(p);
    ++res.evaluated;
    if (v > best) {
      best = v;
      res.best = p;
    }
    int k = K - 1;
    while (k >= 0) {
      if (++idx[k] < cand[k].size()) {
        for (int n = 0; n < N; ++n) p(k, n) = cand[k][idx[k]][n];
        break;
      }
      idx[k] = 0;
      for (int n = 0; n < N; ++n) p(k, n) = cand[k][0][n];
      --k;
    }
    if (k < 0) break;
  }
  res.best_gee = best;
  return res;
}

}  // namespace

GridResult grid_search_gee(const Scenario& s, int points_per_dim, long long max_points) {
  return grid_walk(s, points_per_dim, [&s](const PowerAllocation& p) { return gee(s, p); },
                   max_points);
}

GridResult grid_search_objective(const Scenario& s, int points_per_dim,
                                 const std::function<double(const PowerAllocation&)>& objective,
                                 long long max_points) {
  return grid_walk(s, points_per_dim, objective, max_points);
}

std::vector<double> water_filling(std::span<const double> c, double budget) {
  const size_t n = c.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return c[a] < c[b]; });
  double run = 0.0, level = 0.0;
  size_t active = 0;
  for (size_t m = 0; m < n; ++m) {
    run += c[order[m]];
    double w = (budget + run) / static_cast<double>(m + 1);
    if (w > c[order[m]]) {
      level = w;
      active = m + 1;
    } else {
      break;
    }
  }
  std::vector<double> p(n, 0.0);
  for (size_t m = 0; m < active; ++m) p[order[m]] = level - c[order[m]];
  return p;
}

ScalarMax golden_max(const std::function<double(double)>& f, double lo, double hi, double xtol) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  double f1 = f(c1), f2 = f(c2);
  while (b - a > xtol * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (f1 < f2) {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + gr * (b - a);
      f2 = f(c2);
    } else {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - gr * (b - a);
      f1 = f(c1);
    }
  }
  double x = (a + b) / 2.0;
  return {x, f(x)};
}

}  // namespace geeopt::oracle
