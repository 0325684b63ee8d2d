#include "kgbandit/kgbandit.h"

#include "core/errors.hpp"
#include "dominance/lab.hpp"
#include "eval/exact_vi.hpp"
#include "experiment/analysis.hpp"
#include "experiment/experiment.hpp"
#include "experiment/precompute.hpp"
#include "index/gittins.hpp"
#include "index/kgi.hpp"
#include "policy/engine.hpp"
#include "policy/horizon.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

struct kgb_experiment {
  kgb::ExperimentSpec spec;
  bool desk_scale = false;
};

struct kgb_report {
  kgb::Report report;
};

namespace {

thread_local std::string g_last_error;

kgb_status status_of(kgb::ErrorKind k) {
  switch (k) {
    case kgb::ErrorKind::Config: return KGB_ERR_CONFIG;
    case kgb::ErrorKind::Numeric: return KGB_ERR_NUMERIC;
    case kgb::ErrorKind::Io: return KGB_ERR_IO;
    case kgb::ErrorKind::Domain: return KGB_ERR_DOMAIN;
    case kgb::ErrorKind::Monotonicity: return KGB_ERR_MONOTONICITY;
    case kgb::ErrorKind::Internal: return KGB_ERR_INTERNAL;
  }
  return KGB_ERR_INTERNAL;
}

kgb_status fail(kgb_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs `f`, translating exceptions into status codes.
template <class F>
kgb_status guarded(F&& f) {
  try {
    f();
    return KGB_OK;
  } catch (const kgb::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(KGB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(KGB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(KGB_ERR_INTERNAL, "unknown failure");
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

kgb::RewardFamily family_of(kgb_family f, double tau) {
  switch (f) {
    case KGB_BERNOULLI: return kgb::RewardFamily::bernoulli();
    case KGB_EXPONENTIAL: return kgb::RewardFamily::exponential();
    case KGB_GAUSSIAN: return kgb::RewardFamily::gaussian(tau);
  }
  throw kgb::ConfigError("unknown family code " + std::to_string(static_cast<int>(f)));
}

std::optional<std::int64_t> horizon_of(int64_t h) {
  if (h == KGB_HORIZON_INFINITE) return std::nullopt;
  if (h < 1) throw kgb::ConfigError("horizon must be at least 1 or KGB_HORIZON_INFINITE");
  return h;
}

kgb::HorizonSpec horizon_spec(double gamma, int64_t horizon, int64_t epoch) {
  const auto T = horizon_of(horizon);
  kgb::HorizonSpec h = T ? kgb::HorizonSpec::finite(gamma, *T, epoch) : kgb::HorizonSpec::infinite(gamma);
  if (!T && epoch != 0) h.epoch = epoch;
  kgb::validate(h);
  return h;
}

kgb::InfoState info_state(kgb_family family, double tau, const double* sums, const double* ns, size_t k,
                          double gamma, int64_t horizon, int64_t epoch) {
  if (!sums || !ns) throw kgb::ConfigError("null arm arrays");
  kgb::InfoState s{{}, family_of(family, tau), horizon_spec(gamma, horizon, epoch)};
  for (size_t i = 0; i < k; ++i) s.arms.push_back(kgb::make_belief(sums[i], ns[i], s.family));
  kgb::validate(s);
  return s;
}

#define KGB_REQUIRE(ptr)                                                                 \
  do {                                                                                   \
    if (!(ptr)) return fail(KGB_ERR_NULL_ARGUMENT, "null argument '" #ptr "'");          \
  } while (0)

}  // namespace

extern "C" {

const char* kgb_version(void) { return "1.0.0"; }

const char* kgb_last_error(void) { return g_last_error.c_str(); }

const char* kgb_status_name(kgb_status s) {
  switch (s) {
    case KGB_OK: return "ok";
    case KGB_ERR_CONFIG: return "config error";
    case KGB_ERR_NUMERIC: return "numeric failure";
    case KGB_ERR_IO: return "i/o failure";
    case KGB_ERR_DOMAIN: return "domain error";
    case KGB_ERR_MONOTONICITY: return "monotonicity violation";
    case KGB_ERR_INTERNAL: return "internal error";
    case KGB_ERR_NULL_ARGUMENT: return "null argument";
  }
  return "unknown status";
}

int kgb_exit_code(kgb_status s) {
  switch (s) {
    case KGB_OK: return 0;
    case KGB_ERR_CONFIG:
    case KGB_ERR_DOMAIN:
    case KGB_ERR_NULL_ARGUMENT: return 1;
    case KGB_ERR_IO: return 3;
    case KGB_ERR_NUMERIC:
    case KGB_ERR_MONOTONICITY:
    case KGB_ERR_INTERNAL: return 2;
  }
  return 2;
}

void kgb_string_free(char* s) { std::free(s); }

kgb_status kgb_gittins_index(kgb_family family, double tau, double sum, double n, double gamma, int64_t remaining,
                             double* out) {
  KGB_REQUIRE(out);
  return guarded([&] {
    const auto fam = family_of(family, tau);
    *out = kgb::gittins_index(kgb::make_belief(sum, n, fam), fam, gamma, horizon_of(remaining));
  });
}

kgb_status kgb_kgi_index(kgb_family family, double tau, double sum, double n, double gamma, int64_t remaining,
                         double* out) {
  KGB_REQUIRE(out);
  return guarded([&] {
    const auto fam = family_of(family, tau);
    *out = kgb::kgi_index(kgb::make_belief(sum, n, fam), fam, gamma, horizon_of(remaining));
  });
}

kgb_status kgb_kg_scores(kgb_family family, double tau, const double* sums, const double* ns, size_t k, double gamma,
                         int64_t horizon, int64_t epoch, double* scores) {
  KGB_REQUIRE(scores);
  return guarded([&] {
    const auto s = info_state(family, tau, sums, ns, k, gamma, horizon, epoch);
    for (size_t a = 0; a < k; ++a) scores[a] = kgb::kg_score(s, a);
  });
}

kgb_status kgb_decide(const char* policy, kgb_family family, double tau, const double* sums, const double* ns,
                      size_t k, double gamma, int64_t horizon, int64_t epoch, uint64_t seed, size_t* chosen) {
  KGB_REQUIRE(policy);
  KGB_REQUIRE(chosen);
  return guarded([&] {
    const auto p = kgb::parse_policy(policy);
    if (!kgb::supports_independent(p)) throw kgb::ConfigError("policy needs a correlated belief");
    const auto s = info_state(family, tau, sums, ns, k, gamma, horizon, epoch);
    std::shared_ptr<kgb::SharedIndexCaches> caches;
    if (p == kgb::PolicyId::Gittins) caches = std::make_shared<kgb::SharedIndexCaches>(s.family, gamma);
    kgb::PolicyEngine engine(caches);
    kgb::Rng rng(seed);
    *chosen = engine.decide(p, s, rng).chosen;
  });
}

size_t kgb_registry_size(void) { return kgb::registry_names().size(); }

const char* kgb_registry_name(size_t i) {
  static const std::vector<std::string> names = kgb::registry_names();
  return i < names.size() ? names[i].c_str() : nullptr;
}

kgb_status kgb_experiment_from_registry(const char* name, int desk_scale, kgb_experiment** out) {
  KGB_REQUIRE(name);
  KGB_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto e = std::make_unique<kgb_experiment>();
    e->spec = kgb::registry_spec(name, desk_scale != 0);
    e->desk_scale = desk_scale != 0;
    *out = e.release();
  });
}

kgb_status kgb_experiment_from_config(const char* path, kgb_experiment** out) {
  KGB_REQUIRE(path);
  KGB_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto e = std::make_unique<kgb_experiment>();
    e->spec = kgb::load_experiment_config(path);
    *out = e.release();
  });
}

kgb_status kgb_experiment_from_config_text(const char* text, kgb_experiment** out) {
  KGB_REQUIRE(text);
  KGB_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto e = std::make_unique<kgb_experiment>();
    e->spec = kgb::parse_experiment_config(text);
    *out = e.release();
  });
}

void kgb_experiment_free(kgb_experiment* e) { delete e; }

kgb_status kgb_experiment_set_seed(kgb_experiment* e, uint64_t seed) {
  KGB_REQUIRE(e);
  e->spec.master_seed = seed;
  return KGB_OK;
}

kgb_status kgb_experiment_set_runs(kgb_experiment* e, size_t n_runs) {
  KGB_REQUIRE(e);
  if (n_runs < 1) return fail(KGB_ERR_CONFIG, "runs must be at least 1");
  e->spec.n_runs = n_runs;
  return KGB_OK;
}

kgb_status kgb_experiment_describe(const kgb_experiment* e, char** text) {
  KGB_REQUIRE(e);
  KGB_REQUIRE(text);
  *text = nullptr;
  return guarded([&] {
    const auto& s = e->spec;
    std::ostringstream out;
    out << s.name << (e->desk_scale ? " (desk scale)" : "") << '\n';
    if (!s.description.empty()) out << "  " << s.description << '\n';
    out << "  family " << kgb::family_name(s.family.kind) << ", arms";
    for (auto k : s.arms) out << ' ' << k;
    out << ", gamma";
    if (s.param == kgb::SweepParam::Gamma) out << " swept";
    else
      for (auto g : s.gammas) out << ' ' << g;
    out << ", horizon "
        << (s.param == kgb::SweepParam::Horizon ? std::string("swept")
            : s.horizon                        ? std::to_string(*s.horizon)
                                               : std::string("inf"))
        << '\n';
    out << "  policies " << kgb::join_policy_names(s.policies) << ", reference "
        << (s.reference == kgb::ReferenceKind::Exact ? std::string("exact")
                                                     : std::string(kgb::policy_name(s.reference_policy)))
        << '\n';
    out << "  sweep " << kgb::sweep_param_name(s.param);
    for (auto v : s.param_values) out << ' ' << v;
    out << "\n  runs " << (s.reference == kgb::ReferenceKind::Exact ? std::string("exact") : std::to_string(s.n_runs))
        << ", seed " << s.master_seed;
    if (s.budget_minutes > 0) out << ", desk-scale budget " << s.budget_minutes << " min";
    out << '\n';
    *text = dup_string(out.str());
  });
}

kgb_status kgb_experiment_run(const kgb_experiment* e, unsigned threads, int record_wall_time,
                              kgb_progress_fn progress, void* user, char** csv) {
  KGB_REQUIRE(e);
  KGB_REQUIRE(csv);
  *csv = nullptr;
  return guarded([&] {
    kgb::RunOptions opts;
    opts.threads = threads == 0 ? 1 : threads;
    opts.record_wall_time = record_wall_time != 0;
    if (progress) opts.progress = [&](std::size_t done, std::size_t total) { progress(done, total, user); };
    *csv = dup_string(kgb::format_csv(kgb::run_experiment(e->spec, opts)));
  });
}

kgb_status kgb_write_file(const char* path, const char* text, int force) {
  KGB_REQUIRE(path);
  KGB_REQUIRE(text);
  return guarded([&] { kgb::write_text_file(path, text, force != 0); });
}

kgb_status kgb_exact_bernoulli_k2(double gamma, double sum1, double n1, double sum2, double n2, int64_t depth,
                                  const char* policies, unsigned threads, double* optimal, double* values,
                                  size_t n_values) {
  KGB_REQUIRE(optimal);
  return guarded([&] {
    kgb::ExactConfig c;
    c.gamma = gamma;
    c.prior1 = {sum1, n1};
    c.prior2 = {sum2, n2};
    if (depth > 0) c.depth = depth;
    c.threads = threads == 0 ? 1 : threads;
    std::vector<kgb::PolicyId> ps;
    if (policies && *policies) ps = kgb::parse_policy_list(policies);
    if (ps.size() > n_values) throw kgb::ConfigError("value buffer shorter than the policy list");
    if (!ps.empty() && !values) throw kgb::ConfigError("null value buffer");
    const auto r = kgb::exact_value_bernoulli_k2(c, ps);
    *optimal = r.optimal;
    for (size_t i = 0; i < r.values.size(); ++i) values[i] = r.values[i];
  });
}

kgb_status kgb_precompute(kgb_index_kind kind, kgb_family family, double tau, double gamma, int64_t horizon,
                          int64_t n_max, const double* n_values, size_t n_count, const char* path, int force,
                          kgb_precompute_outcome* outcome, size_t* rows) {
  KGB_REQUIRE(path);
  return guarded([&] {
    kgb::PrecomputeRequest req;
    switch (kind) {
      case KGB_INDEX_GITTINS: req.kind = kgb::IndexKind::Gittins; break;
      case KGB_INDEX_KGI: req.kind = kgb::IndexKind::Kgi; break;
      case KGB_INDEX_GAUSSIAN_BONUS: req.kind = kgb::IndexKind::GaussianBonus; break;
      case KGB_INDEX_EXPONENTIAL_FACTOR: req.kind = kgb::IndexKind::ExponentialFactor; break;
      default: throw kgb::ConfigError("unknown index kind code");
    }
    req.family = family_of(family, tau);
    req.gamma = gamma;
    req.horizon = horizon_of(horizon);
    req.n_max = n_max;
    if (n_count > 0 && !n_values) throw kgb::ConfigError("null n-value array");
    req.n_values.assign(n_values, n_values + n_count);
    req.out = path;
    req.force = force != 0;
    const auto res = kgb::precompute_indices(req);
    if (outcome) *outcome = static_cast<kgb_precompute_outcome>(static_cast<int>(res.outcome));
    if (rows) *rows = res.rows;
  });
}

kgb_status kgb_analyze_witness(kgb_family family, double tau, double gamma, kgb_report** out) {
  KGB_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new kgb_report{kgb::analyze_witness(family_of(family, tau), gamma)}; });
}

kgb_status kgb_analyze_rlb(const char* policies, double gamma, double tau, double n1, const double* n2_values,
                           size_t count, kgb_report** out) {
  KGB_REQUIRE(policies);
  KGB_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    if (count > 0 && !n2_values) throw kgb::ConfigError("null n2 array");
    const std::vector<double> n2(n2_values, n2_values + count);
    *out = new kgb_report{kgb::analyze_rlb(kgb::parse_policy_list(policies), gamma, tau, n1, n2)};
  });
}

kgb_status kgb_analyze_consistency(const char* policy, double gamma, double tau, double resolution,
                                   kgb_report** out) {
  KGB_REQUIRE(policy);
  KGB_REQUIRE(out);
  *out = nullptr;
  return guarded(
      [&] { *out = new kgb_report{kgb::analyze_consistency(kgb::parse_policy(policy), gamma, tau, resolution)}; });
}

kgb_status kgb_analyze_over_exploration(const char* policy, double gamma, double tau, const double* n_grid,
                                        size_t count, kgb_report** out) {
  KGB_REQUIRE(policy);
  KGB_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    if (count > 0 && !n_grid) throw kgb::ConfigError("null grid array");
    const std::vector<double> grid(n_grid, n_grid + count);
    *out = new kgb_report{kgb::analyze_over_exploration(kgb::parse_policy(policy), gamma, grid, tau)};
  });
}

kgb_status kgb_analyze_closed_form(const double* gammas, size_t count, int64_t n_max, kgb_report** out) {
  KGB_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    if (count > 0 && !gammas) throw kgb::ConfigError("null discount array");
    *out = new kgb_report{kgb::analyze_closed_form(std::vector<double>(gammas, gammas + count), n_max)};
  });
}

kgb_status kgb_replay_witness(const char* text, int* reproduced) {
  KGB_REQUIRE(text);
  KGB_REQUIRE(reproduced);
  return guarded([&] { *reproduced = kgb::replay(kgb::parse_witness(text)) ? 1 : 0; });
}

const char* kgb_report_text(const kgb_report* r) { return r ? r->report.text.c_str() : ""; }
const char* kgb_report_csv(const kgb_report* r) { return r ? r->report.csv.c_str() : ""; }
const char* kgb_report_artifact(const kgb_report* r) { return r ? r->report.artifact.c_str() : ""; }
void kgb_report_free(kgb_report* r) { delete r; }

}  // extern "C"
