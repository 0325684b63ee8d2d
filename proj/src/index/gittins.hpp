#pragma once

#include "belief/belief.hpp"
#include "index/kgi.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

namespace kgb {

struct GittinsConfig {
  // Root accuracy in the retirement charge.
  double lambda_tol = 1e-9;
  // Continuation values below this count as zero.
  double value_tol = 1e-12;
  // Infinite horizons are cut at the smallest depth with
  // gamma^D * scale / (1 - gamma) < truncation_eps.
  double truncation_eps = 1e-7;
  std::int64_t max_depth = 200000;

  // Gaussian: standardized mean grid, +-halfwidth prior standard deviations.
  std::size_t gaussian_grid_points = 801;
  double gaussian_grid_halfwidth_sd = 12.0;
  // GittinsCache interpolates Gaussian bonuses on a geometric grid with this
  // ratio; zero means exact calibration memoised per precision.
  double gaussian_table_ratio = 1.02;

  // Exponential: log-mean grid (charge normalised to one), +-halfwidth / sqrt(n)
  // clipped to the log-mean bounds.
  std::size_t exponential_grid_points = 801;
  double exponential_grid_halfwidth_sd = 12.0;
  double exponential_log_mean_lo = -9.210340371976184;  // ln 1e-4
  double exponential_log_mean_hi = 9.210340371976184;
};

// Depth of the dynamic program for the given horizon (the horizon itself when
// finite, the truncation depth otherwise).
std::int64_t stopping_depth(double gamma, std::optional<std::int64_t> remaining, double reward_scale,
                            const GittinsConfig& cfg);

// Continuation value of the full retirement problem, i.e.
// mu - charge + gamma E[V(next state)], and its derivative in the charge.
// V(charge) = max(continuation, 0).
struct Continuation {
  double value = 0.0;
  double slope = 0.0;
};
Continuation gittins_continuation(const StoppingQuery& q, const GittinsConfig& cfg = {});

// Gittins index (infinite horizon) or Whittle index for horizon `remaining`:
// the smallest charge at which immediate retirement is optimal.
double gittins_index(const ArmBelief& b, const RewardFamily& fam, double gamma, std::optional<std::int64_t> remaining,
                     const GittinsConfig& cfg = {});

// Gaussian index minus mean. Depends on n, tau and gamma only.
double gaussian_gittins_bonus(double n, double tau, double gamma, std::optional<std::int64_t> remaining,
                              const GittinsConfig& cfg = {});

// Exponential index per unit of the sum statistic: index(sum, n) = sum * factor(n).
double exponential_gittins_factor(double n, double gamma, std::optional<std::int64_t> remaining,
                                  const GittinsConfig& cfg = {});

// Gaussian learning bonus for unit observation precision, tabulated lazily on
// the geometric grid m_j = ratio^j and interpolated linearly in 1/m. The bonus
// for precision tau is l1(n / tau) / sqrt(tau).
class GaussianBonusTable {
 public:
  GaussianBonusTable(double gamma, std::optional<std::int64_t> remaining, GittinsConfig cfg = {},
                     double ratio = 1.02);

  double bonus(double n, double tau);
  double unit_bonus(double m);
  std::size_t nodes_computed() const;

 private:
  double node_value(std::int64_t j);

  double gamma_;
  std::optional<std::int64_t> remaining_;
  GittinsConfig cfg_;
  double log_ratio_;
  mutable std::mutex mutex_;
  std::map<std::int64_t, double> nodes_;
};

// Thread-safe memo of Gittins indices for one (family, gamma, horizon). Uses
// the translation (Gaussian) and scale (Exponential) invariances so that only
// n is keyed for those families.
class GittinsCache {
 public:
  GittinsCache(RewardFamily fam, double gamma, std::optional<std::int64_t> remaining, GittinsConfig cfg = {});

  double index(const ArmBelief& b);
  const RewardFamily& family() const noexcept { return fam_; }
  double gamma() const noexcept { return gamma_; }
  std::size_t size() const;

 private:
  RewardFamily fam_;
  double gamma_;
  std::optional<std::int64_t> remaining_;
  GittinsConfig cfg_;
  mutable std::mutex mutex_;
  std::map<std::pair<double, double>, double> values_;
  std::unique_ptr<GaussianBonusTable> gaussian_;
};

// Brackets around the infinite-horizon Bernoulli Gittins index of every state
// (origin.sum + i, origin.n + d) with 0 <= i <= d <= max_depth. One backward
// pass per charge on a logit-uniform grid classifies all those states at
// once, so the cost does not grow with the number of distinct states visited.
// Each bracket contains the value gittins_index returns for that state.
class BernoulliIndexBrackets {
 public:
  BernoulliIndexBrackets(const ArmBelief& origin, double gamma, std::int64_t max_depth, GittinsConfig cfg = {},
                         std::size_t charges = 1024, unsigned threads = 1);

  // Closed bracket [lo, hi]; nullopt for states off the lattice.
  std::optional<std::pair<double, double>> bracket(const ArmBelief& b) const;
  // Gittins index of a lattice state, calibrated from the lower bracket end.
  // Agrees with gittins_index to the calibration tolerance.
  double index(const ArmBelief& b) const;
  std::int64_t max_depth() const noexcept { return max_depth_; }

 private:
  ArmBelief origin_;
  double gamma_;
  GittinsConfig cfg_;
  std::int64_t max_depth_;
  double margin_;
  // Increasing grid charges.
  std::vector<double> grid_;
  // Per state, the number of grid charges with a positive continuation.
  std::vector<std::int32_t> last_positive_;
};

}  // namespace kgb
