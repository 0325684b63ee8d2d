#include "policy/policy.hpp"

#include "core/errors.hpp"
#include "dominance/relation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kgb {

void validate(const InfoState& s) {
  if (s.arms.size() < 2) throw DomainError("an information state needs at least two arms");
  for (const auto& b : s.arms) validate(b, s.family);
  validate(s.horizon);
}

std::size_t argmax_lowest(const std::vector<double>& v) noexcept {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

double best_other_mean(const InfoState& s, std::size_t a) noexcept {
  double c = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < s.arms.size(); ++b)
    if (b != a) c = std::max(c, s.arms[b].mean());
  return c;
}

bool is_greedy_arm(const InfoState& s, std::size_t a) noexcept {
  return s.arms[a].mean() >= best_other_mean(s, a);
}

namespace {

double kg_score_unchecked(const InfoState& s, std::size_t a) {
  const double c = best_other_mean(s, a);
  const ArmBelief& b = s.arms[a];
  // Greedy arm: E[max(mu+, C)] - mu = E[(C - mu+)+] by the martingale property.
  // Otherwise: E[max(mu+, C)] - C = E[(mu+ - C)+].
  if (b.mean() >= c) return shortfall_expectation(b, s.family, c);
  return excess_expectation(b, s.family, c);
}

double pkg_score_unchecked(const InfoState& s, std::size_t a) {
  const double c = best_other_mean(s, a);
  const ArmBelief& b = s.arms[a];
  if (b.mean() >= c) return excess_expectation(b, s.family, 2.0 * b.mean() - c);
  return excess_expectation(b, s.family, c);
}

template <class Score>
PolicyScore score_all(const InfoState& s, Score score) {
  validate(s);
  PolicyScore out;
  out.multiplier = horizon_multiplier(s.horizon);
  const std::size_t k = s.size();
  out.mean.resize(k);
  out.learning.resize(k);
  out.combined.resize(k);
  for (std::size_t a = 0; a < k; ++a) {
    out.mean[a] = s.arms[a].mean();
    out.learning[a] = score(s, a);
    out.combined[a] = out.mean[a] + out.multiplier * out.learning[a];
  }
  out.chosen = argmax_lowest(out.combined);
  return out;
}

}  // namespace

double kg_score(const InfoState& s, std::size_t a) {
  validate(s);
  if (a >= s.size()) throw DomainError("arm index out of range");
  return kg_score_unchecked(s, a);
}

double pkg_score(const InfoState& s, std::size_t a) {
  validate(s);
  if (a >= s.size()) throw DomainError("arm index out of range");
  return pkg_score_unchecked(s, a);
}

PolicyScore kg_action(const InfoState& s) { return score_all(s, kg_score_unchecked); }

PolicyScore pkg_action(const InfoState& s) { return score_all(s, pkg_score_unchecked); }

PolicyScore nkg_action(const InfoState& s) {
  PolicyScore out = score_all(s, kg_score_unchecked);
  std::size_t best = s.size();
  for (std::size_t a = 0; a < s.size(); ++a) {
    if (is_dominated(s.arms, a)) continue;
    if (best == s.size() || out.combined[a] > out.combined[best]) best = a;
  }
  // A greedy arm is never dominated, so the candidate set is non-empty.
  if (best == s.size()) throw InternalError("no non-dominated arm found");
  out.chosen = best;
  return out;
}

PolicyScore greedy_action(const InfoState& s) {
  validate(s);
  PolicyScore out;
  for (const auto& b : s.arms) out.mean.push_back(b.mean());
  out.learning.assign(s.size(), 0.0);
  out.combined = out.mean;
  out.chosen = argmax_lowest(out.combined);
  return out;
}

PolicyScore thompson_action(const InfoState& s, Rng& rng) {
  validate(s);
  PolicyScore out;
  out.learning.assign(s.size(), 0.0);
  for (const auto& b : s.arms) {
    out.mean.push_back(b.mean());
    out.combined.push_back(true_mean(sample_truth(b, s.family, rng)));
  }
  out.chosen = argmax_lowest(out.combined);
  return out;
}

}  // namespace kgb
