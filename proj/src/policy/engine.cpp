#include "policy/engine.hpp"

#include "core/errors.hpp"
#include "index/gi_approx.hpp"
#include "index/kgi.hpp"
#include "policy/horizon.hpp"

#include <bit>
#include <cmath>

namespace kgb {

SharedIndexCaches::SharedIndexCaches(RewardFamily fam, double gamma, GittinsConfig cfg)
    : fam_(fam), gamma_(gamma), cfg_(cfg) {}

double SharedIndexCaches::gittins(const ArmBelief& b, std::optional<std::int64_t> remaining) {
  if (remaining && *remaining < 1) throw DomainError("remaining horizon must be at least 1");
  const std::int64_t key = remaining ? *remaining : -1;
  GittinsCache* cache;
  {
    std::lock_guard lock(mutex_);
    auto& slot = caches_[key];
    if (!slot) slot = std::make_unique<GittinsCache>(fam_, gamma_, remaining, cfg_);
    cache = slot.get();
  }
  return cache->index(b);
}

void SharedIndexCaches::prepare_brackets(const ArmBelief& origin, std::int64_t max_depth, unsigned threads,
                                         std::size_t charges) {
  if (fam_.kind != Family::Bernoulli) throw ConfigError("index brackets exist for Bernoulli arms only");
  auto table = std::make_unique<BernoulliIndexBrackets>(origin, gamma_, max_depth, cfg_, charges, threads);
  std::lock_guard lock(mutex_);
  brackets_ = std::move(table);
}

double SharedIndexCaches::bracketed_index(const ArmBelief& b) {
  const std::pair<double, double> key{b.sum, b.n};
  {
    std::lock_guard lock(mutex_);
    if (auto it = bracketed_.find(key); it != bracketed_.end()) return it->second;
  }
  const double v = brackets_->index(b);
  std::lock_guard lock(mutex_);
  bracketed_.emplace(key, v);
  return v;
}

std::size_t SharedIndexCaches::gittins_choice(std::span<const ArmBelief> arms, std::optional<std::int64_t> remaining) {
  const std::size_t k = arms.size();
  if (k == 0) throw DomainError("no arms to choose from");
  std::vector<bool> contender(k, true);
  if (brackets_ && !remaining) {
    std::vector<std::pair<double, double>> br(k);
    bool all = true;
    for (std::size_t a = 0; a < k && all; ++a) {
      const auto b = brackets_->bracket(arms[a]);
      if (b) br[a] = *b;
      all = b.has_value();
    }
    if (all) {
      double best_lo = br[0].first;
      for (const auto& b : br) best_lo = std::max(best_lo, b.first);
      // An arm whose upper end lies below another arm's lower end cannot win.
      std::size_t left = 0, only = 0;
      for (std::size_t a = 0; a < k; ++a) {
        contender[a] = br[a].second >= best_lo;
        if (contender[a]) ++left, only = a;
      }
      if (left == 1) return only;
      // Contenders sharing one belief tie exactly; the first one wins.
      std::size_t first = k;
      bool same = true;
      for (std::size_t a = 0; a < k; ++a) {
        if (!contender[a]) continue;
        if (first == k) first = a;
        same = same && arms[a].sum == arms[first].sum && arms[a].n == arms[first].n;
      }
      if (same) return first;
      fallbacks_.fetch_add(1, std::memory_order_relaxed);
      std::size_t best = k;
      double best_v = 0.0;
      for (std::size_t a = 0; a < k; ++a) {
        if (!contender[a]) continue;
        const double v = bracketed_index(arms[a]);
        if (best == k || v > best_v) best = a, best_v = v;
      }
      return best;
    }
  }
  std::size_t best = k;
  double best_v = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    if (!contender[a]) continue;
    const double v = gittins(arms[a], remaining);
    if (best == k || v > best_v) best = a, best_v = v;
  }
  return best;
}

std::size_t PolicyEngine::KeyHash::operator()(const Key& k) const noexcept {
  std::uint64_t h = 0;
  for (double x : {k.a, k.b, k.c}) h = mix64(h ^ std::bit_cast<std::uint64_t>(x));
  return static_cast<std::size_t>(h);
}

PolicyEngine::PolicyEngine(std::shared_ptr<SharedIndexCaches> shared) : shared_(std::move(shared)) {}

double PolicyEngine::kgi(const ArmBelief& b, const RewardFamily& fam, double multiplier) {
  // KGI is translation invariant for Gaussian arms and scale invariant for
  // Exponential arms, so those memos key on n only.
  switch (fam.kind) {
    case Family::Bernoulli: {
      const Key k{b.sum, b.n, multiplier};
      if (auto it = kgi_memo_.find(k); it != kgi_memo_.end()) return it->second;
      const double v = kgi_index_for_multiplier(b, fam, multiplier);
      kgi_memo_.emplace(k, v);
      return v;
    }
    case Family::Gaussian: {
      const Key k{0.0, b.n, multiplier};
      auto it = kgi_memo_.find(k);
      if (it == kgi_memo_.end())
        it = kgi_memo_.emplace(k, kgi_index_for_multiplier({0.0, b.n}, fam, multiplier)).first;
      return b.mean() + it->second;
    }
    case Family::Exponential: {
      const Key k{1.0, b.n, multiplier};
      auto it = kgi_memo_.find(k);
      if (it == kgi_memo_.end())
        it = kgi_memo_.emplace(k, kgi_index_for_multiplier({1.0, b.n}, fam, multiplier)).first;
      return b.sum * it->second;
    }
  }
  throw InternalError("unknown reward family");
}

double PolicyEngine::index(PolicyId p, const ArmBelief& b, const RewardFamily& fam, const HorizonSpec& h) {
  switch (p) {
    case PolicyId::Kgi:
      return kgi(b, fam, horizon_multiplier(h));
    case PolicyId::Gittins:
      if (!shared_) throw ConfigError("the GI policy needs shared index caches");
      if (shared_->family() != fam || shared_->gamma() != h.gamma)
        throw ConfigError("GI caches were built for a different problem");
      return shared_->gittins(b, h.remaining());
    case PolicyId::Gibl:
      return gibl_index(b, fam, h.gamma);
    case PolicyId::Gicg:
      return gicg_index(b, fam, h.gamma);
    case PolicyId::GiblFh: {
      if (h.is_infinite()) return gibl_index(b, fam, h.gamma);
      const double g = fh_discount(h.epoch, *h.horizon);
      return g == 0.0 ? b.mean() : gibl_index(b, fam, g);
    }
    default:
      throw ConfigError("'" + std::string(policy_name(p)) + "' is not an index policy");
  }
}

PolicyScore PolicyEngine::decide(PolicyId p, const InfoState& s, Rng& rng) {
  switch (p) {
    case PolicyId::Greedy: return greedy_action(s);
    case PolicyId::Kg: return kg_action(s);
    case PolicyId::Nkg: return nkg_action(s);
    case PolicyId::Pkg: return pkg_action(s);
    case PolicyId::Thompson: return thompson_action(s, rng);
    case PolicyId::Ikg: return kg_action(s);
    case PolicyId::Ckg: throw ConfigError("CKG needs a correlated belief");
    default: break;
  }
  validate(s);
  PolicyScore sc;
  const std::size_t k = s.size();
  sc.mean.resize(k);
  sc.learning.resize(k);
  sc.combined.resize(k);
  sc.multiplier = 1.0;
  for (std::size_t a = 0; a < k; ++a) {
    sc.mean[a] = s.arms[a].mean();
    sc.combined[a] = index(p, s.arms[a], s.family, s.horizon);
    sc.learning[a] = sc.combined[a] - sc.mean[a];
  }
  sc.chosen = argmax_lowest(sc.combined);
  return sc;
}

}  // namespace kgb
