#include "eval/simulate.hpp"

#include "core/errors.hpp"
#include "core/numerics.hpp"
#include "dominance/relation.hpp"
#include "policy/engine.hpp"
#include "policy/horizon.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>
#include <sstream>
#include <thread>

namespace kgb {

namespace {

constexpr std::uint64_t kTruthLane = 0x7472757468ULL;  // "truth"
constexpr std::uint64_t kRewardLane = 1;
constexpr std::uint64_t kPolicyLane = 2;

double reward_scale(const RunConfig& cfg) {
  if (cfg.correlated) {
    const auto& b = *cfg.correlated;
    double s = 1.0;
    for (Eigen::Index i = 0; i < b.mean.size(); ++i)
      s = std::max(s, std::abs(b.mean(i)) + 3.0 * std::sqrt(b.cov(i, i)));
    return s;
  }
  if (cfg.family.kind == Family::Bernoulli) return 1.0;
  double s = 1.0;
  for (const auto& p : cfg.priors) s = std::max(s, std::abs(p.mean()) + 3.0 / std::sqrt(p.n));
  return s;
}

std::string describe(const InfoState& s) {
  std::ostringstream os;
  os << family_name(s.family.kind) << " epoch " << s.horizon.epoch << " arms";
  for (const auto& b : s.arms) os << " (" << b.sum << ", " << b.n << ")";
  return os.str();
}

double draw_reward(const TruthParam& t, Rng& rng) { return sample_reward(t, rng); }

// Short runs visit few states; solving those exactly is cheaper than a table.
constexpr std::int64_t kBracketMinSteps = 100;

// Table cost grows with the number of charges; exact solves for near-ties
// grow with the runs and shrink with the charges. Balance the two.
std::size_t bracket_charges(std::size_t n_runs) {
  const double c = 8192.0 * std::sqrt(static_cast<double>(n_runs) / 2000.0);
  return static_cast<std::size_t>(std::clamp(c, 2048.0, 65536.0));
}

struct Worker {
  const RunConfig& cfg;
  std::shared_ptr<SharedIndexCaches> shared;
  PolicyEngine engine;
  std::int64_t steps;
  bool check_dominance_gi;

  Worker(const RunConfig& c, std::shared_ptr<SharedIndexCaches> sh, std::int64_t st)
      : cfg(c), shared(sh), engine(sh), steps(st),
        check_dominance_gi(c.family.kind != Family::Exponential) {}

  HorizonSpec horizon_at(std::int64_t t) const {
    return cfg.horizon ? HorizonSpec::finite(cfg.gamma, *cfg.horizon, t) : HorizonSpec::infinite(cfg.gamma);
  }

  double run_independent(PolicyId p, std::size_t run, const std::vector<TruthParam>& truth) {
    InfoState s{cfg.priors, cfg.family, horizon_at(0)};
    const std::uint64_t pid = fnv1a64(policy_name(p));
    KahanSum total;
    double disc = 1.0;
    const bool assert_nd = never_dominated(p) && (p != PolicyId::Gittins || check_dominance_gi);
    const double gap = p == PolicyId::Pkg && cfg.family.kind != Family::Gaussian ? 1.0 : 0.0;
    for (std::int64_t t = 0; t < steps; ++t) {
      s.horizon = horizon_at(t);
      const auto st = static_cast<std::uint64_t>(t);
      Rng prng(stream_key({cfg.master_seed, run, pid, st, kPolicyLane}));
      const std::size_t a = p == PolicyId::Gittins ? shared->gittins_choice(s.arms, s.horizon.remaining())
                                                    : engine.decide(p, s, prng).chosen;
      if (assert_nd && is_dominated_with_gap(s.arms, a, gap))
        throw InternalError(std::string(policy_name(p)) + " chose dominated arm " + std::to_string(a) + " in run " +
                            std::to_string(run) + ": " + describe(s));
      total.add(disc * true_mean(truth[a]));
      Rng rrng(stream_key({cfg.master_seed, run, pid, st, kRewardLane}));
      s.arms[a] = posterior_update(s.arms[a], draw_reward(truth[a], rrng), cfg.family);
      disc *= cfg.gamma;
    }
    return total.value();
  }

  std::size_t decide_correlated(PolicyId p, const MvBelief& b, const HorizonSpec& h, Rng& rng) {
    switch (p) {
      case PolicyId::Ckg: return ckg_action(b, horizon_multiplier(h)).chosen;
      case PolicyId::Ikg: return ikg_action(b, h).chosen;
      case PolicyId::Thompson: {
        const Eigen::VectorXd th = sample_truth_mv(b, rng);
        std::vector<double> v(th.data(), th.data() + th.size());
        return argmax_lowest(v);
      }
      default: return engine.decide(p, marginal_state(b, h), rng).chosen;
    }
  }

  double run_correlated(PolicyId p, std::size_t run, const Eigen::VectorXd& theta) {
    MvBelief b = *cfg.correlated;
    const std::uint64_t pid = fnv1a64(policy_name(p));
    KahanSum total;
    double disc = 1.0;
    const double noise_sd = 1.0 / std::sqrt(b.tau);
    for (std::int64_t t = 0; t < steps; ++t) {
      const auto st = static_cast<std::uint64_t>(t);
      Rng prng(stream_key({cfg.master_seed, run, pid, st, kPolicyLane}));
      const std::size_t a = decide_correlated(p, b, horizon_at(t), prng);
      const auto ia = static_cast<Eigen::Index>(a);
      total.add(disc * theta(ia));
      Rng rrng(stream_key({cfg.master_seed, run, pid, st, kRewardLane}));
      b = mv_update(b, a, theta(ia) + noise_sd * standard_normal(rrng));
      disc *= cfg.gamma;
    }
    return total.value();
  }

  void run(std::size_t r, RunResult& out) {
    Rng trng(stream_key({cfg.master_seed, r, kTruthLane}));
    if (cfg.correlated) {
      const Eigen::VectorXd theta = sample_truth_mv(*cfg.correlated, trng);
      out.truth_fingerprint[r] = theta.sum();
      for (std::size_t p = 0; p < cfg.policies.size(); ++p) out.returns[p][r] = run_correlated(cfg.policies[p], r, theta);
      return;
    }
    std::vector<TruthParam> truth;
    double fp = 0.0;
    for (const auto& prior : cfg.priors) {
      truth.push_back(sample_truth(prior, cfg.family, trng));
      fp += truth.back().theta;
    }
    out.truth_fingerprint[r] = fp;
    for (std::size_t p = 0; p < cfg.policies.size(); ++p) out.returns[p][r] = run_independent(cfg.policies[p], r, truth);
  }
};

}  // namespace

void validate(const RunConfig& cfg) {
  if (cfg.n_runs < 1) throw ConfigError("n_runs must be at least 1");
  if (cfg.policies.empty()) throw ConfigError("policy list is empty");
  if (!(cfg.truncation_eps > 0.0 && cfg.truncation_eps < 1.0)) throw ConfigError("truncation epsilon must lie in (0, 1)");
  try {
    validate(cfg.horizon ? HorizonSpec::finite(cfg.gamma, *cfg.horizon) : HorizonSpec::infinite(cfg.gamma));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid horizon: ") + e.what());
  }
  if (cfg.correlated) {
    try {
      validate(*cfg.correlated);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("invalid correlated prior: ") + e.what());
    }
    if (cfg.correlated->size() < 2) throw ConfigError("need at least two arms");
    for (auto p : cfg.policies)
      if (!supports_correlated(p))
        throw ConfigError("policy '" + std::string(policy_name(p)) + "' is not defined for correlated beliefs");
    return;
  }
  if (cfg.priors.size() < 2) throw ConfigError("need at least two arms");
  for (const auto& b : cfg.priors) {
    try {
      validate(b, cfg.family);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("invalid prior: ") + e.what());
    }
  }
  for (auto p : cfg.policies)
    if (!supports_independent(p))
      throw ConfigError("policy '" + std::string(policy_name(p)) + "' needs a correlated prior");
}

std::size_t arm_count(const RunConfig& cfg) { return cfg.correlated ? cfg.correlated->size() : cfg.priors.size(); }

std::int64_t simulated_steps(const RunConfig& cfg) {
  if (cfg.horizon) return *cfg.horizon;
  return truncation_horizon(cfg.gamma, cfg.truncation_eps, reward_scale(cfg));
}

RunResult simulate(const RunConfig& cfg) {
  validate(cfg);
  RunResult out;
  out.policies = cfg.policies;
  out.n_runs = cfg.n_runs;
  out.steps = simulated_steps(cfg);
  out.returns.assign(cfg.policies.size(), std::vector<double>(cfg.n_runs, 0.0));
  out.truth_fingerprint.assign(cfg.n_runs, 0.0);

  const RewardFamily cache_family = cfg.correlated ? RewardFamily::gaussian(cfg.correlated->tau) : cfg.family;
  auto shared = std::make_shared<SharedIndexCaches>(cache_family, cfg.gamma, cfg.gittins);
  const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cfg.n_runs)));
  const bool uses_gi = std::find(cfg.policies.begin(), cfg.policies.end(), PolicyId::Gittins) != cfg.policies.end();
  const bool common_prior = std::all_of(cfg.priors.begin(), cfg.priors.end(), [&](const ArmBelief& b) {
    return b.sum == cfg.priors[0].sum && b.n == cfg.priors[0].n;
  });
  if (uses_gi && !cfg.correlated && !cfg.horizon && cfg.family.kind == Family::Bernoulli && common_prior &&
      out.steps >= kBracketMinSteps)
    shared->prepare_brackets(cfg.priors[0], out.steps, std::max(1u, cfg.threads), bracket_charges(cfg.n_runs));
  // Contiguous run blocks per worker; each run writes only its own slots.
  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](unsigned w) {
    try {
      Worker worker(cfg, shared, out.steps);
      const std::size_t lo = cfg.n_runs * w / threads, hi = cfg.n_runs * (w + 1) / threads;
      for (std::size_t r = lo; r < hi; ++r) worker.run(r, out);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (const auto& rs : out.returns) {
    const auto st = sample_stats(rs);
    out.mean.push_back(st.mean);
    out.stderr_.push_back(st.stderr_);
  }
  return out;
}

std::size_t policy_slot(const RunResult& r, PolicyId p) {
  for (std::size_t i = 0; i < r.policies.size(); ++i)
    if (r.policies[i] == p) return i;
  throw ConfigError("policy '" + std::string(policy_name(p)) + "' is not in the result set");
}

LossEstimate paired_difference(const RunResult& r, PolicyId a, PolicyId b) {
  const auto& ra = r.returns[policy_slot(r, a)];
  const auto& rb = r.returns[policy_slot(r, b)];
  std::vector<double> d(ra.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = ra[i] - rb[i];
  const auto st = sample_stats(d);
  return {st.mean, st.stderr_};
}

LossEstimate absolute_loss(const RunResult& r, PolicyId p, PolicyId ref) { return paired_difference(r, ref, p); }

LossEstimate percentage_lost(const RunResult& r, PolicyId p, PolicyId ref) {
  const double v_ref = r.mean[policy_slot(r, ref)];
  if (!(v_ref > 0.0)) throw DomainError("percentage loss is undefined for a non-positive reference return");
  const auto d = paired_difference(r, ref, p);
  return {100.0 * d.value / v_ref, 100.0 * d.stderr_ / v_ref};
}

LossEstimate percentage_lost(const RunResult& r, PolicyId p, double v_ref) {
  if (!(v_ref > 0.0)) throw DomainError("percentage loss is undefined for a non-positive reference return");
  const std::size_t i = policy_slot(r, p);
  return {100.0 * (v_ref - r.mean[i]) / v_ref, 100.0 * r.stderr_[i] / v_ref};
}

}  // namespace kgb
