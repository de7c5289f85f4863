#include "geeopt/testing.hpp"

#include <algorithm>
#include <cmath>

namespace geeopt::testing {

Scenario unit_scenario(DetRng& rng, int users, int subcarriers, double xi_ratio) {
  Scenario s;
  s.users = users;
  s.subcarriers = subcarriers;
  s.bandwidth_hz = 1.0;
  s.noise_w.assign(static_cast<std::size_t>(subcarriers), 0.0);
  for (double& v : s.noise_w) v = rng.uniform(0.5, 2.0);
  s.alpha = Grid2(users, subcarriers);
  s.xi = Grid2(users, subcarriers);
  s.beta = Grid3(users, users, subcarriers);
  s.mu = Grid2(users, subcarriers);
  s.p_max_w.assign(static_cast<std::size_t>(users), 0.0);
  s.r_min.assign(static_cast<std::size_t>(users), 0.0);
  s.p_static_w.assign(static_cast<std::size_t>(users), 0.0);

  static constexpr double kXiChoices[4] = {0.0, 0.01, 0.1, 0.3};
  for (int k = 0; k < users; ++k) {
    const double weight = rng.uniform(0.8, 1.3);  // per-user, flat across subcarriers
    for (int n = 0; n < subcarriers; ++n) s.mu(k, n) = weight;
    s.p_static_w[static_cast<std::size_t>(k)] = rng.uniform(0.1, 1.0);
    s.p_max_w[static_cast<std::size_t>(k)] = rng.uniform(0.5, 4.0);
    const double ratio =
        xi_ratio >= 0.0 ? xi_ratio : kXiChoices[rng.below(4)];
    for (int n = 0; n < subcarriers; ++n) {
      const double a = rng.uniform(0.1, 3.0);
      s.alpha(k, n) = a;
      s.xi(k, n) = ratio * a;
      for (int l = 0; l < users; ++l) {
        if (l == k) continue;
        s.beta(l, k, n) = rng.uniform(0.0, 1.5);
      }
    }
  }
  s.validate();
  return s;
}

PowerAllocation random_feasible(const Scenario& s, DetRng& rng, bool allow_boundary) {
  PowerAllocation p(s.users, s.subcarriers);
  for (int k = 0; k < s.users; ++k) {
    const double budget = s.p_max_w[static_cast<std::size_t>(k)];
    double sum = 0.0;
    for (int n = 0; n < s.subcarriers; ++n) {
      double v = rng.uniform01();
      if (allow_boundary && rng.chance(0.1)) v = 0.0;
      p(k, n) = v;
      sum += v;
    }
    double fill = rng.uniform01();
    if (allow_boundary && rng.chance(0.2)) fill = 1.0;
    if (sum > 0.0) {
      const double scale = fill * budget / sum;
      for (int n = 0; n < s.subcarriers; ++n) p(k, n) *= scale;
    }
  }
  return p;
}

}  // namespace geeopt::testing
