#include "policy/horizon.hpp"

#include "core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kgb {

std::optional<std::int64_t> HorizonSpec::remaining() const noexcept {
  if (!horizon) return std::nullopt;
  return *horizon - epoch;
}

void validate(const HorizonSpec& h) {
  if (!(h.gamma >= 0.0 && h.gamma <= 1.0)) throw DomainError("discount factor must lie in [0, 1]");
  if (!h.horizon) {
    if (h.gamma >= 1.0) throw DomainError("an infinite horizon needs gamma < 1");
    if (h.epoch < 0) throw DomainError("epoch must be non-negative");
    return;
  }
  if (*h.horizon < 1) throw DomainError("finite horizon must be at least 1");
  if (h.epoch < 0 || h.epoch >= *h.horizon)
    throw DomainError("epoch " + std::to_string(h.epoch) + " outside horizon " + std::to_string(*h.horizon));
}

double horizon_multiplier(double gamma, std::optional<std::int64_t> remaining) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("discount factor must lie in [0, 1]");
  if (!remaining) {
    if (gamma >= 1.0) throw DomainError("H(gamma, s) is unbounded for gamma = 1 and an infinite horizon");
    return gamma / (1.0 - gamma);
  }
  const std::int64_t s = *remaining;
  if (s < 1) throw DomainError("remaining horizon must be at least 1");
  if (gamma == 1.0) return static_cast<double>(s - 1);
  // gamma (1 - gamma^{s-1}) / (1 - gamma), written with expm1 for gamma near 1.
  if (gamma == 0.0) return 0.0;
  const double lg = std::log(gamma);
  return gamma * -std::expm1(static_cast<double>(s - 1) * lg) / -std::expm1(lg);
}

double horizon_multiplier(const HorizonSpec& h) {
  validate(h);
  return horizon_multiplier(h.gamma, h.remaining());
}

double fh_discount(std::int64_t t, std::int64_t T) {
  if (T < 1 || t < 0 || t >= T)
    throw DomainError("finite-horizon discount needs 0 <= t < T (t=" + std::to_string(t) + ", T=" + std::to_string(T) + ")");
  return static_cast<double>(T - t - 1) / static_cast<double>(T - t);
}


std::int64_t truncation_horizon(double gamma, double eps, double reward_scale) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw DomainError("truncation needs 0 <= gamma < 1");
  if (!(eps > 0.0) || !(reward_scale > 0.0)) throw DomainError("truncation needs positive eps and reward scale");
  if (gamma == 0.0) return 1;
  auto tail = [&](std::int64_t T) { return std::pow(gamma, static_cast<double>(T)) * reward_scale / (1.0 - gamma); };
  const double guess = std::log(eps * (1.0 - gamma) / reward_scale) / std::log(gamma);
  std::int64_t T = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(guess)));
  // Settle rounding in the logarithms by direct evaluation.
  while (T > 1 && tail(T - 1) < eps) --T;
  while (!(tail(T) < eps)) ++T;
  return T;
}

}  // namespace kgb
