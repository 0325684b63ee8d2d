#pragma once

#include "correlated/mv_belief.hpp"
#include "index/gittins.hpp"
#include "policy/policy.hpp"
#include "policy/policy_id.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace kgb {

struct RunConfig {
  RewardFamily family = RewardFamily::bernoulli();
  // Independent priors, one per arm. Ignored when `correlated` is set.
  std::vector<ArmBelief> priors;
  // Joint Normal prior for the correlated Gaussian problem.
  std::optional<MvBelief> correlated;
  double gamma = 0.9;
  // Finite horizon T, or nullopt for an infinite horizon cut at the
  // truncation point of `truncation_eps`.
  std::optional<std::int64_t> horizon;
  double truncation_eps = 1e-7;
  std::vector<PolicyId> policies;
  std::size_t n_runs = 1;
  std::uint64_t master_seed = 1;
  unsigned threads = 1;
  GittinsConfig gittins;
};

void validate(const RunConfig& cfg);
std::size_t arm_count(const RunConfig& cfg);
// Number of decisions simulated per run.
std::int64_t simulated_steps(const RunConfig& cfg);

struct RunResult {
  std::vector<PolicyId> policies;
  std::size_t n_runs = 0;
  std::int64_t steps = 0;
  // returns[p][r]: discounted sum of the true means of the arms chosen.
  std::vector<std::vector<double>> returns;
  std::vector<double> mean;
  std::vector<double> stderr_;
  // Every policy sees the same truth in run r; this fingerprint of the drawn
  // parameters is recorded per run for pairing checks.
  std::vector<double> truth_fingerprint;
};

// Truth-from-prior Monte Carlo. Deterministic for a given config and
// independent of `threads`.
RunResult simulate(const RunConfig& cfg);

std::size_t policy_slot(const RunResult& r, PolicyId p);

struct LossEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
};
// 100 (V_ref - V_p) / V_ref with the standard error of the paired
// differences (delta method on the ratio is not applied; V_ref is treated as
// the mean of its own runs).
LossEstimate percentage_lost(const RunResult& r, PolicyId p, PolicyId ref);
// Against an exactly known reference value.
LossEstimate percentage_lost(const RunResult& r, PolicyId p, double v_ref);
// Absolute loss V_ref - V_p per run, paired.
LossEstimate absolute_loss(const RunResult& r, PolicyId p, PolicyId ref);
// Paired difference mean(V_a - V_b) and its standard error.
LossEstimate paired_difference(const RunResult& r, PolicyId a, PolicyId b);

}  // namespace kgb
