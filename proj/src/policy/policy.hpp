#pragma once

#include "belief/belief.hpp"
#include "core/rng.hpp"
#include "policy/horizon.hpp"

#include <cstddef>
#include <vector>

namespace kgb {

// Joint belief over k >= 2 independent arms of one family, plus the time
// context of the current decision.
struct InfoState {
  std::vector<ArmBelief> arms;
  RewardFamily family;
  HorizonSpec horizon;

  std::size_t size() const noexcept { return arms.size(); }
};

void validate(const InfoState& s);

// Per-arm decision values. `combined[a] = mean[a] + H * learning[a]` for the
// KG family of policies; index policies put the index in `combined`.
struct PolicyScore {
  std::vector<double> mean;
  std::vector<double> learning;
  std::vector<double> combined;
  double multiplier = 0.0;
  std::size_t chosen = 0;
};

// Lowest index among the maximisers. Ties are broken towards arm 0 everywhere.
std::size_t argmax_lowest(const std::vector<double>& v) noexcept;

// C_a = max over b != a of mu_b.
double best_other_mean(const InfoState& s, std::size_t a) noexcept;
bool is_greedy_arm(const InfoState& s, std::size_t a) noexcept;

// nu_a^KG = E[max_b mu_b^{+1}] - max_b mu_b when arm a is pulled. Always >= 0,
// exactly zero when no outcome of the pull changes which arm is best.
double kg_score(const InfoState& s, std::size_t a);

// nu_a^PKG: greedy arms are scored against the reflected threshold
// C*_a = 2 mu_a - C_a, non-greedy arms keep their KG value.
double pkg_score(const InfoState& s, std::size_t a);

PolicyScore kg_action(const InfoState& s);
PolicyScore nkg_action(const InfoState& s);
PolicyScore pkg_action(const InfoState& s);
PolicyScore greedy_action(const InfoState& s);
PolicyScore thompson_action(const InfoState& s, Rng& rng);

}  // namespace kgb
