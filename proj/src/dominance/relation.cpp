#include "dominance/relation.hpp"

#include "core/errors.hpp"

namespace kgb {

bool dominates(const ArmBelief& b1, const ArmBelief& b2) noexcept {
  return b1.mean() > b2.mean() && b1.n < b2.n;
}

bool dominates(const ArmBelief& b1, const RewardFamily& f1, const ArmBelief& b2, const RewardFamily& f2) {
  if (!(f1 == f2)) throw DomainError("dominance is only defined between arms of one family");
  validate(b1, f1);
  validate(b2, f2);
  return dominates(b1, b2);
}

bool is_dominated(std::span<const ArmBelief> arms, std::size_t a) noexcept {
  for (std::size_t b = 0; b < arms.size(); ++b)
    if (b != a && dominates(arms[b], arms[a])) return true;
  return false;
}

bool is_dominated_with_gap(std::span<const ArmBelief> arms, std::size_t a, double min_gap) noexcept {
  for (std::size_t b = 0; b < arms.size(); ++b)
    if (b != a && arms[b].mean() > arms[a].mean() && arms[b].n < arms[a].n && arms[a].n - arms[b].n >= min_gap)
      return true;
  return false;
}

}  // namespace kgb
