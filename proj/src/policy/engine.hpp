#pragma once

#include "core/rng.hpp"
#include "index/gittins.hpp"
#include "policy/policy.hpp"
#include "policy/policy_id.hpp"

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>

namespace kgb {

// Gittins/Whittle index caches shared by every worker of one problem. Each
// remaining horizon gets its own cache; infinite horizons use one.
class SharedIndexCaches {
 public:
  SharedIndexCaches(RewardFamily fam, double gamma, GittinsConfig cfg = {});

  double gittins(const ArmBelief& b, std::optional<std::int64_t> remaining);

  // Enables bracket decisions for infinite-horizon Bernoulli states reachable
  // from `origin` within `max_depth` pulls.
  void prepare_brackets(const ArmBelief& origin, std::int64_t max_depth, unsigned threads = 1,
                        std::size_t charges = 1024);
  // Arm with the largest Gittins index, lowest position among ties. Equals
  // the argmax of gittins(); brackets settle most decisions without solving.
  std::size_t gittins_choice(std::span<const ArmBelief> arms, std::optional<std::int64_t> remaining);
  // Decisions that needed exact indices after consulting the brackets.
  std::uint64_t bracket_fallbacks() const noexcept { return fallbacks_.load(); }
  const RewardFamily& family() const noexcept { return fam_; }
  double gamma() const noexcept { return gamma_; }

 private:
  RewardFamily fam_;
  double gamma_;
  GittinsConfig cfg_;
  std::mutex mutex_;
  std::map<std::int64_t, std::unique_ptr<GittinsCache>> caches_;
  double bracketed_index(const ArmBelief& b);

  std::unique_ptr<BernoulliIndexBrackets> brackets_;
  // Indices calibrated from bracket ends. Kept apart from caches_, whose
  // values start from the mean and may differ in the last digits.
  std::map<std::pair<double, double>, double> bracketed_;
  std::atomic<std::uint64_t> fallbacks_{0};
};

// Decision maker for independent-arm states. Holds a private KGI memo, so one
// instance per worker thread; the Gittins caches may be shared.
class PolicyEngine {
 public:
  explicit PolicyEngine(std::shared_ptr<SharedIndexCaches> shared = nullptr);

  // Scores every arm and picks one. `rng` is used only by Thompson sampling.
  PolicyScore decide(PolicyId p, const InfoState& s, Rng& rng);

  // Per-arm index of an index policy (KGI, GI, GIBL, GICG, fh-adjusted GIBL).
  double index(PolicyId p, const ArmBelief& b, const RewardFamily& fam, const HorizonSpec& h);

 private:
  double kgi(const ArmBelief& b, const RewardFamily& fam, double multiplier);

  struct Key {
    double a, b, c;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };

  std::shared_ptr<SharedIndexCaches> shared_;
  std::unordered_map<Key, double, KeyHash> kgi_memo_;
};

}  // namespace kgb
