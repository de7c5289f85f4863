#include "geeopt/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace geeopt {

namespace {
constexpr double kInvLn2 = 1.0 / std::numbers::ln2;
constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void check_finite_nonneg(double x, const char* name, int i, int j) {
  if (!std::isfinite(x) || x < 0.0)
    fail(std::string(name) + "(" + std::to_string(i) + "," + std::to_string(j) + ") must be finite and non-negative");
}
}  // namespace

double Scenario::total_static_power() const {
  double t = 0.0;
  for (double p : p_static_w) t += p;
  return t;
}

void Scenario::validate() const {
  if (users < 1) fail("users must be >= 1");
  if (subcarriers < 1) fail("subcarriers must be >= 1");
  if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz)) fail("bandwidth_hz must be positive");
  if (static_cast<int>(noise_w.size()) != subcarriers) fail("noise_w has wrong length");
  if (alpha.rows != users || alpha.cols != subcarriers) fail("alpha has wrong shape");
  if (xi.rows != users || xi.cols != subcarriers) fail("xi has wrong shape");
  if (mu.rows != users || mu.cols != subcarriers) fail("mu has wrong shape");
  if (beta.d0 != users || beta.d1 != users || beta.d2 != subcarriers) fail("beta has wrong shape");
  if (static_cast<int>(p_static_w.size()) != users) fail("p_static_w has wrong length");
  if (static_cast<int>(p_max_w.size()) != users) fail("p_max_w has wrong length");
  if (static_cast<int>(r_min.size()) != users) fail("r_min has wrong length");

  for (int n = 0; n < subcarriers; ++n)
    if (!(noise_w[n] > 0.0) || !std::isfinite(noise_w[n]))
      fail("noise_w(" + std::to_string(n) + ") must be positive");
  for (int k = 0; k < users; ++k) {
    if (!(p_static_w[k] > 0.0) || !std::isfinite(p_static_w[k]))
      fail("p_static_w(" + std::to_string(k) + ") must be positive");
    if (!(p_max_w[k] > 0.0) || !std::isfinite(p_max_w[k]))
      fail("p_max_w(" + std::to_string(k) + ") must be positive");
    if (!std::isfinite(r_min[k]) || r_min[k] < 0.0)
      fail("r_min(" + std::to_string(k) + ") must be finite and non-negative");
    for (int n = 0; n < subcarriers; ++n) {
      check_finite_nonneg(alpha(k, n), "alpha", k, n);
      check_finite_nonneg(xi(k, n), "xi", k, n);
      if (!(mu(k, n) > 0.0) || !std::isfinite(mu(k, n)))
        fail("mu(" + std::to_string(k) + "," + std::to_string(n) + ") must be positive");
    }
  }
  for (int l = 0; l < users; ++l)
    for (int k = 0; k < users; ++k)
      for (int n = 0; n < subcarriers; ++n) {
        double b = beta(l, k, n);
        if (!std::isfinite(b) || b < 0.0)
          fail("beta(" + std::to_string(l) + "," + std::to_string(k) + "," + std::to_string(n) +
               ") must be finite and non-negative");
        if (l == k && b != 0.0)
          fail("beta(" + std::to_string(l) + "," + std::to_string(k) + "," + std::to_string(n) +
               ") must be zero on the diagonal");
      }
}

double PowerAllocation::user_total(int k) const {
  double t = 0.0;
  for (double x : row(k)) t += x;
  return t;
}

bool is_budget_feasible(const Scenario& s, const PowerAllocation& p, double tol) {
  if (p.users != s.users || p.subcarriers != s.subcarriers) return false;
  for (int k = 0; k < s.users; ++k) {
    double t = 0.0;
    for (double x : p.row(k)) {
      if (x < -tol) return false;
      t += x;
    }
    if (t > s.p_max_w[k] * (1.0 + tol) + tol) return false;
  }
  return true;
}

double interference_at(const Scenario& s, const PowerAllocation& p, int k, int n) {
  double acc = 0.0;
  for (int l = 0; l < s.users; ++l)
    if (l != k) acc += p(l, n) * s.beta(l, k, n);
  return acc;
}

double sinr(const Scenario& s, const PowerAllocation& p, int k, int n) {
  double num = p(k, n) * s.alpha(k, n);
  double den = s.noise_w[n] + s.xi(k, n) * p(k, n) + interference_at(s, p, k, n);
  return num / den;
}

double user_rate(const Scenario& s, const PowerAllocation& p, int k) {
  double r = 0.0;
  for (int n = 0; n < s.subcarriers; ++n) r += std::log2(1.0 + sinr(s, p, k, n));
  return r;
}

double sum_rate(const Scenario& s, const PowerAllocation& p) {
  double r = 0.0;
  for (int k = 0; k < s.users; ++k) r += user_rate(s, p, k);
  return r;
}

double total_weighted_power(const Scenario& s, const PowerAllocation& p) {
  double t = s.total_static_power();
  for (int k = 0; k < s.users; ++k)
    for (int n = 0; n < s.subcarriers; ++n) t += s.mu(k, n) * p(k, n);
  return t;
}

double gee(const Scenario& s, const PowerAllocation& p) {
  return s.bandwidth_hz * sum_rate(s, p) / total_weighted_power(s, p);
}

double potential(const Scenario& s, const PowerAllocation& p, double lambda) {
  return sum_rate(s, p) - lambda * total_weighted_power(s, p);
}

RateCeiling rate_ceiling(const Scenario& s, int k) {
  RateCeiling c;
  c.per_subcarrier.resize(s.subcarriers);
  for (int n = 0; n < s.subcarriers; ++n) {
    double a = s.alpha(k, n), x = s.xi(k, n);
    double r;
    if (a == 0.0)
      r = 0.0;  // no direct channel, no rate at any power
    else if (x == 0.0)
      r = kInf;
    else
      r = std::log2(1.0 + a / x);
    c.per_subcarrier[n] = r;
    c.total += r;
  }
  return c;
}

double interference_slope(const Scenario& s, int k, int n, const PowerAllocation& p, double pbar_kn) {
  double acc = 0.0;
  for (int i = 0; i < s.users; ++i) {
    if (i == k) continue;
    double b = s.beta(k, i, n);
    if (b == 0.0) continue;
    double others = interference_at(s, p, i, n) - s.beta(k, i, n) * p(k, n);
    double den = s.noise_w[n] + s.xi(i, n) * p(i, n) + b * pbar_kn + others;
    acc += b / den;
  }
  return -kInvLn2 * acc;
}

double marginal_utility(const Scenario& s, int k, int n, const PowerAllocation& p, double nu) {
  double eta = s.alpha(k, n) + s.xi(k, n);
  double own = s.noise_w[n] + interference_at(s, p, k, n);
  double pkn = p(k, n);
  double acc = eta / (own + eta * pkn) - s.xi(k, n) / (own + s.xi(k, n) * pkn);
  for (int i = 0; i < s.users; ++i) {
    if (i == k) continue;
    double b = s.beta(k, i, n);
    if (b == 0.0) continue;
    double others = interference_at(s, p, i, n) - b * pkn;
    double den = s.noise_w[n] + (s.alpha(i, n) + s.xi(i, n)) * p(i, n) + b * pkn + others;
    acc += b / den;
  }
  return kInvLn2 * acc - nu;
}

double surrogate_hessian_diag(const Scenario& s, int k, int n, const PowerAllocation& p) {
  double eta = s.alpha(k, n) + s.xi(k, n);
  double x = s.xi(k, n);
  double own = s.noise_w[n] + interference_at(s, p, k, n);
  double pkn = p(k, n);
  double dx = own + x * pkn;
  double de = own + eta * pkn;
  double acc = (x * x) / (dx * dx) - (eta * eta) / (de * de);
  for (int i = 0; i < s.users; ++i) {
    if (i == k) continue;
    double b = s.beta(k, i, n);
    if (b == 0.0) continue;
    double others = interference_at(s, p, i, n) - b * pkn;
    double den = s.noise_w[n] + (s.alpha(i, n) + s.xi(i, n)) * p(i, n) + b * pkn + others;
    acc -= (b * b) / (den * den);
  }
  return kInvLn2 * acc;
}

double surrogate_utility(const Scenario& s, int k, const PowerAllocation& p,
                         std::span<const double> pk, std::span<const double> pbar_k, double lambda) {
  double u = 0.0;
  for (int n = 0; n < s.subcarriers; ++n) {
    double eta = s.alpha(k, n) + s.xi(k, n);
    double own = s.noise_w[n] + interference_at(s, p, k, n);
    u += std::log2((own + eta * pk[n]) / (own + s.xi(k, n) * pk[n]));
    u += interference_slope(s, k, n, p, pbar_k[n]) * (pk[n] - pbar_k[n]);
    for (int i = 0; i < s.users; ++i) {
      if (i == k) continue;
      double b = s.beta(k, i, n);
      double others = interference_at(s, p, i, n) - b * p(k, n);
      double base = s.noise_w[n] + others;
      u += std::log2(base + (s.alpha(i, n) + s.xi(i, n)) * p(i, n) + b * pk[n]);
      u -= std::log2(base + s.xi(i, n) * p(i, n) + b * pbar_k[n]);
    }
  }
  double wp = s.total_static_power();
  for (int l = 0; l < s.users; ++l)
    for (int n = 0; n < s.subcarriers; ++n) wp += s.mu(l, n) * (l == k ? pk[n] : p(l, n));
  return u - lambda * wp;
}

SurrogateSubproblem::SurrogateSubproblem(const Scenario& s, int k, const PowerAllocation& p,
                                         std::vector<double> nu)
    : n_(s.subcarriers), nu_(std::move(nu)) {
  eta_.resize(n_);
  xi_.resize(n_);
  own_base_.resize(n_);
  cross_off_.assign(n_ + 1, 0);
  for (int n = 0; n < n_; ++n) {
    eta_[n] = s.alpha(k, n) + s.xi(k, n);
    xi_[n] = s.xi(k, n);
    own_base_[n] = s.noise_w[n] + interference_at(s, p, k, n);
    int cnt = 0;
    for (int i = 0; i < s.users; ++i)
      if (i != k && s.beta(k, i, n) != 0.0) ++cnt;
    cross_off_[n + 1] = cross_off_[n] + cnt;
  }
  cross_a_.resize(cross_off_[n_]);
  cross_b_.resize(cross_off_[n_]);
  for (int n = 0; n < n_; ++n) {
    int at = cross_off_[n];
    for (int i = 0; i < s.users; ++i) {
      if (i == k) continue;
      double b = s.beta(k, i, n);
      if (b == 0.0) continue;
      double others = interference_at(s, p, i, n) - b * p(k, n);
      cross_a_[at] = s.noise_w[n] + (s.alpha(i, n) + s.xi(i, n)) * p(i, n) + others;
      cross_b_[at] = b;
      ++at;
    }
  }
}

double SurrogateSubproblem::value(std::span<const double> pk) const {
  double u = 0.0;
  for (int n = 0; n < n_; ++n) {
    double q = pk[n];
    u += std::log2((own_base_[n] + eta_[n] * q) / (own_base_[n] + xi_[n] * q)) - nu_[n] * q;
    for (int c = cross_off_[n]; c < cross_off_[n + 1]; ++c)
      u += std::log2(cross_a_[c] + cross_b_[c] * q);
  }
  return u;
}

void SurrogateSubproblem::gradient(std::span<const double> pk, std::span<double> out) const {
  for (int n = 0; n < n_; ++n) {
    double q = pk[n];
    double acc = eta_[n] / (own_base_[n] + eta_[n] * q) - xi_[n] / (own_base_[n] + xi_[n] * q);
    for (int c = cross_off_[n]; c < cross_off_[n + 1]; ++c)
      acc += cross_b_[c] / (cross_a_[c] + cross_b_[c] * q);
    out[n] = kInvLn2 * acc - nu_[n];
  }
}

double SurrogateSubproblem::hessian_diag(int n, double pkn) const {
  double de = own_base_[n] + eta_[n] * pkn;
  double dx = own_base_[n] + xi_[n] * pkn;
  double acc = (xi_[n] * xi_[n]) / (dx * dx) - (eta_[n] * eta_[n]) / (de * de);
  for (int c = cross_off_[n]; c < cross_off_[n + 1]; ++c) {
    double den = cross_a_[c] + cross_b_[c] * pkn;
    acc -= (cross_b_[c] * cross_b_[c]) / (den * den);
  }
  return kInvLn2 * acc;
}

void SurrogateSubproblem::rate_gradient(std::span<const double> pk, std::span<double> out) const {
  for (int n = 0; n < n_; ++n) {
    double q = pk[n];
    out[n] = kInvLn2 * (eta_[n] / (own_base_[n] + eta_[n] * q) - xi_[n] / (own_base_[n] + xi_[n] * q));
  }
}

double SurrogateSubproblem::rate_value(std::span<const double> pk) const {
  double r = 0.0;
  for (int n = 0; n < n_; ++n)
    r += std::log2((own_base_[n] + eta_[n] * pk[n]) / (own_base_[n] + xi_[n] * pk[n]));
  return r;
}

}  // namespace geeopt
