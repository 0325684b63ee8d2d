#pragma once

#include "dominance/lab.hpp"

#include <string>
#include <vector>

namespace kgb {

// Human-readable summary, machine-readable curve data, and an optional
// replayable artifact (witness file).
struct Report {
  std::string text;
  std::string csv;
  std::string artifact;
};

Report analyze_witness(const RewardFamily& fam, double gamma);

// R(n1, n2) for each policy over the n2 values, Gittins index included.
Report analyze_rlb(const std::vector<PolicyId>& policies, double gamma, double tau, double n1,
                   const std::vector<double>& n2_values);

Report analyze_consistency(PolicyId p, double gamma, double tau, double resolution = 1e-3);

Report analyze_over_exploration(PolicyId p, double gamma, const std::vector<double>& n_grid, double tau);

// Bernoulli KGI by bisection next to the one-outcome root
// (mu + H mu u) / (1 + H mu), u = (sum + 1) / (n + 1), and the printed closed
// form, over integer 1 <= sum < n <= n_max.
Report analyze_closed_form(const std::vector<double>& gammas, std::int64_t n_max);

}  // namespace kgb
