#pragma once

#include <cstdint>
#include <optional>

namespace kgb {

// Discounting and time context of a decision. `horizon` is T (nullopt for an
// infinite horizon), `epoch` is the current 0-based decision time t.
struct HorizonSpec {
  double gamma = 0.9;
  std::optional<std::int64_t> horizon;
  std::int64_t epoch = 0;

  static HorizonSpec infinite(double gamma) { return {gamma, std::nullopt, 0}; }
  static HorizonSpec finite(double gamma, std::int64_t T, std::int64_t t = 0) { return {gamma, T, t}; }

  bool is_infinite() const noexcept { return !horizon.has_value(); }
  // s = T - t; nullopt when infinite.
  std::optional<std::int64_t> remaining() const noexcept;
  HorizonSpec advanced() const noexcept { return {gamma, horizon, epoch + 1}; }
};

void validate(const HorizonSpec& h);

// H(gamma, s): multiplier turning a one-step mean improvement into the value
// of the rest of the horizon.
double horizon_multiplier(const HorizonSpec& h);
double horizon_multiplier(double gamma, std::optional<std::int64_t> remaining);

// gamma(t, T) = (T - t - 1) / (T - t), so that gamma / (1 - gamma) = T - 1 - t.
double fh_discount(std::int64_t t, std::int64_t T);

// Smallest T >= 1 with gamma^T * reward_scale / (1 - gamma) < eps; the point
// at which an infinite discounted horizon is cut.
std::int64_t truncation_horizon(double gamma, double eps, double reward_scale = 1.0);

}  // namespace kgb
