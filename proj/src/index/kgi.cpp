#include "index/kgi.hpp"

#include "core/errors.hpp"
#include "policy/horizon.hpp"

#include <algorithm>
#include <cmath>

namespace kgb {

void validate(const StoppingQuery& q) {
  validate(q.belief, q.family);
  if (!std::isfinite(q.charge)) throw DomainError("retirement charge must be finite");
  // Reuses the horizon checks: gamma in [0,1], gamma < 1 when infinite.
  (void)horizon_multiplier(q.gamma, q.remaining);
}

double kg_stopping_value(const StoppingQuery& q) {
  validate(q);
  const double h = horizon_multiplier(q.gamma, q.remaining);
  const double mu = q.belief.mean();
  const double v = mu - q.charge + h * excess_expectation(q.belief, q.family, q.charge);
  return std::max(v, 0.0);
}

double kgi_index_for_multiplier(const ArmBelief& b, const RewardFamily& fam, double multiplier) {
  validate(b, fam);
  if (!(multiplier >= 0.0) || !std::isfinite(multiplier)) throw DomainError("multiplier must be finite and non-negative");
  const double mu = b.mean();
  if (multiplier == 0.0) return mu;
  // g is strictly decreasing in the charge; the index is its root.
  auto g = [&](double lambda) { return mu - lambda + multiplier * excess_expectation(b, fam, lambda); };

  double lo = mu;
  double hi;
  if (fam.bounded_above()) {
    hi = max_next_mean(b, fam);  // excess is zero there, so g(hi) = mu - hi < 0
  } else {
    double step = fam.kind == Family::Gaussian ? gaussian_step_sd(b, fam.tau) : std::max(mu, 1e-300);
    step = std::max(step, 1e-12 * std::max(1.0, std::abs(mu)));
    hi = mu + step;
    int expansions = 0;
    while (g(hi) > 0.0) {
      lo = hi;
      step *= 2.0;
      hi = mu + step;
      if (++expansions > 200) throw NumericError("kgi bracket expansion exceeded its cap", g(hi));
    }
  }
  // Bisect to the resolution of a double.
  for (int it = 0; it < 400; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

double kgi_index(const ArmBelief& b, const RewardFamily& fam, double gamma, std::optional<std::int64_t> remaining) {
  return kgi_index_for_multiplier(b, fam, horizon_multiplier(gamma, remaining));
}

double kgi_closed_form_bernoulli(double sum, double n, double gamma, std::optional<std::int64_t> remaining) {
  validate(ArmBelief{sum, n}, RewardFamily::bernoulli());
  const double h = horizon_multiplier(gamma, remaining);
  return sum / n + h * sum * (sum + 1.0) / ((n + 1.0) * (n + h * sum));
}

}  // namespace kgb
