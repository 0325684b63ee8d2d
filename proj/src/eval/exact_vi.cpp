#include "eval/exact_vi.hpp"

#include "core/errors.hpp"
#include "policy/engine.hpp"
#include "policy/horizon.hpp"

#include <algorithm>
#include <exception>
#include <memory>
#include <thread>

namespace kgb {

namespace {

std::size_t layer_size(std::int64_t t) {
  const auto u = static_cast<std::size_t>(t);
  return (u + 1) * (u + 2) * (u + 3) / 6;
}

// Offsets of each n1 block within layer t; block n1 holds (n1+1)(t-n1+1) states
// ordered by (s1, s2).
std::vector<std::size_t> layer_offsets(std::int64_t t) {
  std::vector<std::size_t> off(static_cast<std::size_t>(t) + 2, 0);
  for (std::int64_t n1 = 0; n1 <= t; ++n1) {
    const auto i = static_cast<std::size_t>(n1);
    off[i + 1] = off[i] + static_cast<std::size_t>((n1 + 1) * (t - n1 + 1));
  }
  return off;
}

}  // namespace

std::size_t exact_memory_bytes(std::int64_t depth, std::size_t value_functions) {
  return 2 * layer_size(depth) * sizeof(double) * value_functions;
}

ExactResult exact_value_bernoulli_k2(const ExactConfig& cfg, const std::vector<PolicyId>& policies) {
  const auto fam = RewardFamily::bernoulli();
  validate(cfg.prior1, fam);
  validate(cfg.prior2, fam);
  if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0)) throw DomainError("exact evaluation needs 0 <= gamma < 1");
  for (auto p : policies)
    if (is_stochastic(p) || !supports_independent(p))
      throw ConfigError("policy '" + std::string(policy_name(p)) + "' has no deterministic lattice form");
  const std::int64_t depth = cfg.depth ? *cfg.depth : truncation_horizon(cfg.gamma, cfg.truncation_eps, 1.0);
  if (depth < 1) throw ConfigError("lattice depth must be at least 1");
  const std::size_t nv = policies.size() + 1;
  const std::size_t need = exact_memory_bytes(depth, nv);
  if (need > cfg.memory_budget) {
    std::int64_t fit = depth;
    while (fit > 1 && exact_memory_bytes(fit, nv) > cfg.memory_budget) fit = fit * 9 / 10;
    throw ConfigError("exact evaluation at depth " + std::to_string(depth) + " needs " + std::to_string(need >> 20) +
                      " MiB, over the budget; depth " + std::to_string(fit) + " would fit");
  }

  auto shared = std::make_shared<SharedIndexCaches>(fam, cfg.gamma);
  const unsigned threads = std::max(1u, cfg.threads);
  std::vector<std::unique_ptr<PolicyEngine>> engines;
  for (unsigned w = 0; w < threads; ++w) engines.push_back(std::make_unique<PolicyEngine>(shared));

  const double g = cfg.gamma;
  const HorizonSpec hz = HorizonSpec::infinite(g);
  // Values per layer: nv interleaved entries per state.
  std::vector<double> next(layer_size(depth) * nv), cur;
  {
    const auto off = layer_offsets(depth);
    for (std::int64_t n1 = 0; n1 <= depth; ++n1) {
      const std::int64_t n2 = depth - n1;
      for (std::int64_t s1 = 0; s1 <= n1; ++s1)
        for (std::int64_t s2 = 0; s2 <= n2; ++s2) {
          const double m1 = (cfg.prior1.sum + double(s1)) / (cfg.prior1.n + double(n1));
          const double m2 = (cfg.prior2.sum + double(s2)) / (cfg.prior2.n + double(n2));
          const double v = std::max(m1, m2) / (1.0 - g);
          const std::size_t idx = off[n1] + static_cast<std::size_t>(s1 * (n2 + 1) + s2);
          for (std::size_t k = 0; k < nv; ++k) next[idx * nv + k] = v;
        }
    }
  }
  for (std::int64_t t = depth - 1; t >= 0; --t) {
    cur.assign(layer_size(t) * nv, 0.0);
    const auto off = layer_offsets(t);
    const auto off_next = layer_offsets(t + 1);
    std::vector<std::exception_ptr> errors(threads);
    auto work = [&](unsigned w) {
      try {
        PolicyEngine& engine = *engines[w];
        Rng unused(0);
        InfoState s{{cfg.prior1, cfg.prior2}, fam, hz};
        for (std::int64_t n1 = w; n1 <= t; n1 += threads) {
          const std::int64_t n2 = t - n1;
          for (std::int64_t s1 = 0; s1 <= n1; ++s1)
            for (std::int64_t s2 = 0; s2 <= n2; ++s2) {
              s.arms[0] = {cfg.prior1.sum + double(s1), cfg.prior1.n + double(n1)};
              s.arms[1] = {cfg.prior2.sum + double(s2), cfg.prior2.n + double(n2)};
              const double p1 = s.arms[0].mean(), p2 = s.arms[1].mean();
              // Successor indices after pulling arm 1 / arm 2.
              const std::size_t a1_win = off_next[n1 + 1] + static_cast<std::size_t>((s1 + 1) * (n2 + 1) + s2);
              const std::size_t a1_loss = off_next[n1 + 1] + static_cast<std::size_t>(s1 * (n2 + 1) + s2);
              const std::size_t a2_win = off_next[n1] + static_cast<std::size_t>(s1 * (n2 + 2) + s2 + 1);
              const std::size_t a2_loss = off_next[n1] + static_cast<std::size_t>(s1 * (n2 + 2) + s2);
              const std::size_t idx = off[n1] + static_cast<std::size_t>(s1 * (n2 + 1) + s2);
              auto q = [&](int arm, std::size_t k) {
                return arm == 0 ? p1 + g * (p1 * next[a1_win * nv + k] + (1.0 - p1) * next[a1_loss * nv + k])
                                : p2 + g * (p2 * next[a2_win * nv + k] + (1.0 - p2) * next[a2_loss * nv + k]);
              };
              cur[idx * nv] = std::max(q(0, 0), q(1, 0));
              for (std::size_t k = 1; k < nv; ++k) {
                const auto a = engine.decide(policies[k - 1], s, unused).chosen;
                cur[idx * nv + k] = q(static_cast<int>(a), k);
              }
            }
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    };
    if (threads == 1 || t < 8) {
      for (unsigned w = 0; w < threads; ++w) work(w);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
      for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    next.swap(cur);
  }
  ExactResult res;
  res.depth = depth;
  res.optimal = next[0];
  res.policies = policies;
  for (std::size_t k = 1; k < nv; ++k) res.values.push_back(next[k]);
  res.tail_bound = std::pow(g, double(depth)) / (1.0 - g);
  return res;
}

}  // namespace kgb
