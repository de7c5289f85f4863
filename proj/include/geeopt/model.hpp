#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geeopt/gen_config.hpp"

namespace geeopt {

// Dense row-major K x N grid of doubles. Rows index users, columns subcarriers.
struct Grid2 {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Grid2() = default;
  Grid2(int r, int c, double fill = 0.0) : rows(r), cols(c), v(static_cast<size_t>(r) * c, fill) {}

  double& operator()(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
  std::span<double> row(int r) { return {v.data() + static_cast<size_t>(r) * cols, static_cast<size_t>(cols)}; }
  std::span<const double> row(int r) const {
    return {v.data() + static_cast<size_t>(r) * cols, static_cast<size_t>(cols)};
  }
  bool operator==(const Grid2&) const = default;
};

// Dense d0 x d1 x d2 tensor, contiguous, last index fastest.
struct Grid3 {
  int d0 = 0, d1 = 0, d2 = 0;
  std::vector<double> v;

  Grid3() = default;
  Grid3(int a, int b, int c, double fill = 0.0)
      : d0(a), d1(b), d2(c), v(static_cast<size_t>(a) * b * c, fill) {}

  double& operator()(int i, int j, int k) { return v[(static_cast<size_t>(i) * d1 + j) * d2 + k]; }
  double operator()(int i, int j, int k) const { return v[(static_cast<size_t>(i) * d1 + j) * d2 + k]; }
  bool operator==(const Grid3&) const = default;
};

// Static description of one interference network snapshot. All powers in watts,
// all gains dimensionless, bandwidth in Hz. beta(l, k, n) is the cross gain from
// transmitter l into the receiver of user k on subcarrier n; the diagonal l == k
// is identically zero (self-interference is modeled by xi, not beta).
struct Scenario {
  int users = 0;
  int subcarriers = 0;
  double bandwidth_hz = 0.0;
  std::vector<double> noise_w;   // per subcarrier, > 0
  Grid2 alpha;                   // direct-channel gain, >= 0
  Grid2 xi;                      // self-interference gain, >= 0
  Grid3 beta;                    // cross gains, >= 0, zero diagonal
  Grid2 mu;                      // amplifier inefficiency weight, > 0
  std::vector<double> p_static_w;  // per-user static circuit power, > 0
  std::vector<double> p_max_w;     // per-user power budget, > 0
  std::vector<double> r_min;       // per-user rate requirement in bit/s/Hz, >= 0

  // Present when the scenario came out of the generator; round-trips through files.
  std::optional<GenConfig> origin;

  double total_static_power() const;
  // Throws std::invalid_argument naming the offending field on any violated invariant.
  void validate() const;

  bool operator==(const Scenario&) const = default;
};

// K x N transmit-power matrix in watts.
struct PowerAllocation {
  int users = 0;
  int subcarriers = 0;
  std::vector<double> w;

  PowerAllocation() = default;
  PowerAllocation(int k, int n, double fill = 0.0)
      : users(k), subcarriers(n), w(static_cast<size_t>(k) * n, fill) {}

  double& operator()(int k, int n) { return w[static_cast<size_t>(k) * subcarriers + n]; }
  double operator()(int k, int n) const { return w[static_cast<size_t>(k) * subcarriers + n]; }
  std::span<double> row(int k) { return {w.data() + static_cast<size_t>(k) * subcarriers, static_cast<size_t>(subcarriers)}; }
  std::span<const double> row(int k) const {
    return {w.data() + static_cast<size_t>(k) * subcarriers, static_cast<size_t>(subcarriers)};
  }
  double user_total(int k) const;
  bool operator==(const PowerAllocation&) const = default;
};

// Per-user budget feasibility: p >= 0 and sum_n p(k,n) <= p_max_w[k] + tol for every k.
bool is_budget_feasible(const Scenario& s, const PowerAllocation& p, double tol = 1e-12);

// Aggregate cross-channel interference seen by user k on subcarrier n.
double interference_at(const Scenario& s, const PowerAllocation& p, int k, int n);

double sinr(const Scenario& s, const PowerAllocation& p, int k, int n);

// Spectral efficiency of user k, sum over subcarriers of log2(1 + sinr) [bit/s/Hz].
double user_rate(const Scenario& s, const PowerAllocation& p, int k);
double sum_rate(const Scenario& s, const PowerAllocation& p);

// Total consumed power: static circuit power plus mu-weighted transmit power [W].
double total_weighted_power(const Scenario& s, const PowerAllocation& p);

// Global energy efficiency, bandwidth * sum_rate / consumed power [bit/J].
double gee(const Scenario& s, const PowerAllocation& p);

// Shared utility of the identical-interest game at price lambda:
// sum_rate - lambda * total_weighted_power. Bandwidth-free by convention;
// gee() carries the bandwidth factor for reporting.
double potential(const Scenario& s, const PowerAllocation& p, double lambda);

// Largest spectral efficiency user k can ever reach; the self-interference term
// caps log2(1 + sinr) at log2(1 + alpha/xi) per subcarrier. Entries are +inf
// when xi = 0 with alpha > 0 (no cap), and 0 when alpha = 0.
struct RateCeiling {
  std::vector<double> per_subcarrier;
  double total = 0.0;  // +inf if any entry is unbounded
};
RateCeiling rate_ceiling(const Scenario& s, int k);

// Slope of the linearized neighbor-interference term at expansion point pbar_kn:
// the derivative, with respect to user k's power on subcarrier n, of the concave
// part of the neighbors' rate that the surrogate freezes. Always <= 0.
double interference_slope(const Scenario& s, int k, int n, const PowerAllocation& p, double pbar_kn);

// Marginal utility of the concave surrogate for user k on subcarrier n at the
// current allocation; nu folds the power price and the frozen linear slope
// (nu = lambda * mu - slope, plus barrier slopes when active).
double marginal_utility(const Scenario& s, int k, int n, const PowerAllocation& p, double nu);

// Diagonal entry of the surrogate's Hessian in user k's own powers. The
// off-diagonal entries are zero, so this is the whole curvature; strictly
// negative whenever alpha(k,n) + sum_{i != k} beta(k,i,n) > 0.
double surrogate_hessian_diag(const Scenario& s, int k, int n, const PowerAllocation& p);

// Full surrogate utility of user k at candidate own-powers pk, expanded at
// pbar_k, with opponents taken from p (row k of p is ignored). Equals the true
// utility potential(s, [pk := pbar_k], lambda) exactly when pk == pbar_k, and
// lower-bounds it (up to that same constant) elsewhere.
double surrogate_utility(const Scenario& s, int k, const PowerAllocation& p,
                         std::span<const double> pk, std::span<const double> pbar_k, double lambda);

// Better-response subproblem for one user with opponents frozen: the reduced
// surrogate objective, its gradient, and its curvature, with all terms that do
// not depend on the user's own powers dropped. Built once per better response;
// evaluation is O(users) per subcarrier.
class SurrogateSubproblem {
 public:
  // nu(n) = lambda * mu(k,n) - interference_slope(...) - any barrier slopes.
  SurrogateSubproblem(const Scenario& s, int k, const PowerAllocation& p, std::vector<double> nu);

  int dims() const { return n_; }
  double value(std::span<const double> pk) const;
  void gradient(std::span<const double> pk, std::span<double> out) const;
  double hessian_diag(int n, double pkn) const;
  // Gradient of the user's own rate alone (no price, no cross terms); used by
  // the rate-feasibility probe.
  void rate_gradient(std::span<const double> pk, std::span<double> out) const;
  double rate_value(std::span<const double> pk) const;

 private:
  int n_ = 0;
  std::vector<double> eta_, xi_, own_base_;  // own_base = noise + interference at k
  std::vector<double> nu_;
  // Cross terms: for each subcarrier, neighbors i != k with affine denominators
  // A + B * pkn. Stored flat; cross_off_[n]..cross_off_[n+1] spans subcarrier n.
  std::vector<int> cross_off_;
  std::vector<double> cross_a_, cross_b_;
};

}  // namespace geeopt
