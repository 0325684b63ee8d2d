#pragma once

#include "belief/belief.hpp"
#include "policy/policy_id.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace kgb {

struct ExactConfig {
  double gamma = 0.9;
  ArmBelief prior1{1.0, 2.0};
  ArmBelief prior2{1.0, 2.0};
  // Depth of the lattice; nullopt uses the truncation point of `truncation_eps`.
  std::optional<std::int64_t> depth;
  double truncation_eps = 1e-7;
  // Refuse when the two live layers would need more than this many bytes.
  std::size_t memory_budget = std::size_t{1} << 30;
  unsigned threads = 1;
};

struct ExactResult {
  std::int64_t depth = 0;
  // Bayes return of the Bellman-optimal policy (the GI policy's value).
  double optimal = 0.0;
  // Bayes return of each requested policy, in order.
  std::vector<PolicyId> policies;
  std::vector<double> values;
  // Bound on the error from cutting the horizon at `depth`.
  double tail_bound = 0.0;
};

// Bytes needed for the two live layers at the given depth when tracking
// `value_functions` values per state.
std::size_t exact_memory_bytes(std::int64_t depth, std::size_t value_functions);

// Backward induction over every reachable (sum1, n1, sum2, n2) for a
// two-armed Bernoulli problem with an infinite discounted horizon cut at
// `depth` pulls. Beyond the cut the better posterior mean is earned forever.
// Stochastic policies are rejected.
ExactResult exact_value_bernoulli_k2(const ExactConfig& cfg, const std::vector<PolicyId>& policies);

}  // namespace kgb
