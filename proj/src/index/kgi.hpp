#pragma once

#include "belief/belief.hpp"

#include <cstdint>
#include <optional>

namespace kgb {

// Single-arm retirement problem: pull at charge `charge` per pull, or retire.
// `remaining` is the horizon t (nullopt for infinite, which needs gamma < 1).
struct StoppingQuery {
  ArmBelief belief;
  RewardFamily family;
  double gamma = 0.9;
  std::optional<std::int64_t> remaining;
  double charge = 0.0;
};

void validate(const StoppingQuery& q);

// Value of the retirement problem when the decision taken at the second
// epoch is final: max{mu - charge + H * E[(mu+ - charge)+], 0}.
double kg_stopping_value(const StoppingQuery& q);

// Smallest charge at which retiring immediately is optimal in the one-step
// constrained problem. Never below the mean.
double kgi_index(const ArmBelief& b, const RewardFamily& fam, double gamma, std::optional<std::int64_t> remaining);

// Same index for an explicit multiplier H.
double kgi_index_for_multiplier(const ArmBelief& b, const RewardFamily& fam, double multiplier);

// The printed Bernoulli closed form
//   sum/n + H sum (sum + 1) / ((n + 1)(n + H sum)).
// Kept for comparison against the bisection value; the two disagree.
double kgi_closed_form_bernoulli(double sum, double n, double gamma, std::optional<std::int64_t> remaining);

}  // namespace kgb
