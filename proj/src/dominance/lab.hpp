#pragma once

#include "policy/engine.hpp"
#include "policy/policy.hpp"
#include "policy/policy_id.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace kgb {

// Boundary test for a zero KG score. For a greedy arm the score vanishes iff
// its lowest reachable posterior mean stays at or above the best other mean;
// otherwise iff its highest reachable mean stays at or below it. When the
// relevant side of the support is unbounded the score is always positive.
enum class ZeroCondition { Zero, Positive, AlwaysPositive };
ZeroCondition kg_zero_condition(const InfoState& s, std::size_t a);
std::string_view zero_condition_name(ZeroCondition z) noexcept;

enum class WitnessKind { DominatedAction, ConsistencyViolation, None };
std::string_view witness_kind_name(WitnessKind k) noexcept;

// One recorded policy decision, re-evaluated on replay.
struct WitnessDecision {
  std::string label;
  InfoState state;
  std::size_t chosen = 0;
};

struct Witness {
  WitnessKind kind = WitnessKind::None;
  PolicyId policy = PolicyId::Kg;
  RewardFamily family;
  double gamma = 0.0;
  // Discount threshold above which the policy takes the recorded action, or
  // NaN when not applicable.
  double threshold = 0.0;
  std::vector<WitnessDecision> decisions;
  std::string note;
};

// Deterministic policies only: true iff every stored decision is reproduced.
bool replay(const Witness& w, PolicyEngine& engine);
bool replay(const Witness& w);

std::string format_witness(const Witness& w);
Witness parse_witness(const std::string& text);

// Constructive state where KG prefers a dominated arm once gamma exceeds the
// returned threshold (bisection to 1e-12 on gamma). Gaussian arms yield a
// witness of kind None.
Witness dominated_witness(const RewardFamily& fam, double gamma);

// Relative learning bonus: the mean difference mu2 - mu1 at which the policy
// switches from arm 1 (sum 0, precision n1) to arm 2 (precision n2).
struct RlbQuery {
  PolicyId policy = PolicyId::Kg;
  double n1 = 1.0;
  double n2 = 2.0;
  double gamma = 0.9;
  double tau = 1.0;
  // Default bracket: +-5 prior standard deviations of arm 2.
  std::optional<double> lo;
  std::optional<double> hi;
  double tol = 1e-8;
};
// Throws MonotonicityError when the bracket endpoints do not pick arm 1 and
// arm 2 respectively.
double rlb(const RlbQuery& q, PolicyEngine& engine);
double rlb(const RlbQuery& q);

struct OverExplorationRow {
  double n1 = 0.0;
  double n2 = 0.0;
  double rlb_policy = 0.0;
  double rlb_gi = 0.0;
  bool ok = true;
};
struct OverExplorationReport {
  PolicyId policy = PolicyId::Kgi;
  double gamma = 0.0;
  std::vector<OverExplorationRow> rows;
  std::size_t violations = 0;
};
// Checks 0 <= R_policy(n1, n2) <= R_GI(n1, n2) for all n1 < n2 on the grid.
OverExplorationReport over_exploration_check(PolicyId p, double gamma, const std::vector<double>& n_grid,
                                             double tau = 1.0);

// Searches mu2 in (R_GI(1,2), R_policy(1,2)) and rewards y with
// R_GI(1,2) < y/2 < mu2 (both on a 1e-3 grid) for a state in which the
// policy pulls arm 1, arm 1's Gittins index rises, and the policy then
// switches to arm 2. Returns kind None when nothing is found. `mu2_hi`
// replaces R_policy(1,2) as the upper end of the mu2 range, so that several
// policies can be probed over one family of states.
Witness index_consistency_probe(PolicyId p, double gamma, double tau = 1.0, double resolution = 1e-3,
                                std::optional<double> mu2_hi = std::nullopt);

}  // namespace kgb
