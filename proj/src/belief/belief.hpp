#pragma once

#include "core/rng.hpp"

#include <limits>
#include <string>
#include <string_view>

namespace kgb {

enum class Family { Bernoulli, Exponential, Gaussian };

std::string_view family_name(Family f) noexcept;
Family parse_family(std::string_view name);

// Reward model of every arm in a problem. `tau` is the precision of a single
// Gaussian observation and is ignored for the other families.
struct RewardFamily {
  Family kind = Family::Bernoulli;
  double tau = 1.0;

  static RewardFamily bernoulli() { return {Family::Bernoulli, 1.0}; }
  static RewardFamily exponential() { return {Family::Exponential, 1.0}; }
  static RewardFamily gaussian(double tau = 1.0);

  double min_support() const noexcept;
  double max_support() const noexcept;
  bool bounded_below() const noexcept { return kind != Family::Gaussian; }
  bool bounded_above() const noexcept { return kind == Family::Bernoulli; }

  friend bool operator==(const RewardFamily&, const RewardFamily&) = default;
};

// Conjugate-prior hyper-parameters (sum statistic, effective sample size).
// Bernoulli: Beta(sum, n - sum). Exponential: Gamma(shape n + 1, rate sum) on
// the rate. Gaussian: Normal(sum / n, 1 / n) on the mean.
struct ArmBelief {
  double sum = 0.0;
  double n = 1.0;

  double mean() const noexcept { return sum / n; }
  friend bool operator==(const ArmBelief&, const ArmBelief&) = default;
};

// Throws DomainError when the belief violates the family's invariants.
void validate(const ArmBelief& b, const RewardFamily& fam);
ArmBelief make_belief(double sum, double n, const RewardFamily& fam);

ArmBelief posterior_update(const ArmBelief& b, double y, const RewardFamily& fam);
double predictive_mean(const ArmBelief& b) noexcept;

// Extreme posterior means reachable after one observation (may be infinite).
double min_next_mean(const ArmBelief& b, const RewardFamily& fam) noexcept;
double max_next_mean(const ArmBelief& b, const RewardFamily& fam) noexcept;

// E[max(mu+ - lambda, 0)] where mu+ is the posterior mean after one draw from
// the predictive distribution.
double excess_expectation(const ArmBelief& b, const RewardFamily& fam, double lambda);

// E[max(lambda - mu+, 0)]. Equals excess - (mu - lambda) analytically, but is
// computed directly so that it is exactly zero whenever mu+ >= lambda surely.
double shortfall_expectation(const ArmBelief& b, const RewardFamily& fam, double lambda);

// Standard deviation of mu+ under the predictive (Gaussian family only).
double gaussian_step_sd(const ArmBelief& b, double tau) noexcept;

struct TruthParam {
  double theta = 0.0;
  RewardFamily family;
};

TruthParam sample_truth(const ArmBelief& b, const RewardFamily& fam, Rng& rng);
double sample_reward(const TruthParam& truth, Rng& rng);
double true_mean(const TruthParam& truth) noexcept;

}  // namespace kgb
