#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kgb {

enum class PolicyId {
  Greedy,
  Kg,
  Nkg,
  Pkg,
  Thompson,
  Kgi,
  Gittins,
  Gibl,
  Gicg,
  GiblFh,
  Ckg,
  Ikg,
};

std::string_view policy_name(PolicyId p) noexcept;
// Throws ConfigError for unknown names.
PolicyId parse_policy(std::string_view name);
std::vector<PolicyId> parse_policy_list(std::string_view comma_separated);
std::string join_policy_names(const std::vector<PolicyId>& ps);

// Policies defined for independent arms (everything except CKG).
bool supports_independent(PolicyId p) noexcept;
// Policies defined for a correlated Gaussian belief.
bool supports_correlated(PolicyId p) noexcept;
bool is_stochastic(PolicyId p) noexcept;
// Policies proven never to pick a strictly dominated arm; asserted on every
// simulated decision.
bool never_dominated(PolicyId p) noexcept;

}  // namespace kgb
