#pragma once

#include "belief/belief.hpp"

#include <cstddef>
#include <span>

namespace kgb {

// (sum1, n1) dominates (sum2, n2) iff it has a strictly larger mean and a
// strictly smaller effective sample size: better to exploit and to explore.
bool dominates(const ArmBelief& b1, const ArmBelief& b2) noexcept;

// Checked form: both beliefs must be valid members of the same family.
bool dominates(const ArmBelief& b1, const RewardFamily& f1, const ArmBelief& b2, const RewardFamily& f2);

// True if some other arm dominates arm `a`.
bool is_dominated(std::span<const ArmBelief> arms, std::size_t a) noexcept;

// Dominated by an arm with a larger mean and n at least `min_gap` smaller.
// PKG's guarantee for Bernoulli and Exponential arms needs a gap of one.
bool is_dominated_with_gap(std::span<const ArmBelief> arms, std::size_t a, double min_gap) noexcept;

}  // namespace kgb
