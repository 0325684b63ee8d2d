#include "experiment/experiment.hpp"

#include "core/errors.hpp"
#include "eval/exact_vi.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace kgb {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string_view::npos ? s.size() : comma;
    out.push_back(trim(s.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(const std::string& s, const std::string& key) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ConfigError("key '" + key + "': '" + s + "' is not a finite number");
  return v;
}

std::int64_t parse_integer(const std::string& s, const std::string& key) {
  std::int64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': '" + s + "' is not an integer");
  return v;
}

std::vector<double> parse_numbers(const std::string& s, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(parse_number(item, key));
  return out;
}

// n points from lo to hi inclusive, evenly spaced or log-spaced.
std::vector<double> span(double lo, double hi, std::size_t n, bool log_scale = false) {
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    out.push_back(log_scale ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))) : lo + f * (hi - lo));
  }
  // Exact endpoints and clean decimals for linear grids.
  if (!log_scale)
    for (auto& x : out) x = std::round(x * 1e9) / 1e9;
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<PolicyId> run_policies(const ExperimentSpec& spec) {
  std::vector<PolicyId> ps;
  if (spec.reference == ReferenceKind::Policy) ps.push_back(spec.reference_policy);
  for (auto p : spec.policies)
    if (std::find(ps.begin(), ps.end(), p) == ps.end()) ps.push_back(p);
  return ps;
}

}  // namespace

std::string_view sweep_param_name(SweepParam p) noexcept {
  switch (p) {
    case SweepParam::None: return "none";
    case SweepParam::Gamma: return "gamma";
    case SweepParam::Alpha: return "alpha";
    case SweepParam::Beta: return "beta";
    case SweepParam::Tau: return "tau";
    case SweepParam::Horizon: return "horizon";
    case SweepParam::Decay: return "decay";
  }
  return "none";
}

SweepParam parse_sweep_param(std::string_view name) {
  for (auto p : {SweepParam::None, SweepParam::Gamma, SweepParam::Alpha, SweepParam::Beta, SweepParam::Tau,
                 SweepParam::Horizon, SweepParam::Decay})
    if (sweep_param_name(p) == name) return p;
  throw ConfigError("unknown sweep parameter '" + std::string(name) + "'");
}

void validate(const ExperimentSpec& spec) {
  if (spec.name.empty()) throw ConfigError("experiment name is empty");
  if (spec.name.find_first_of(",\"\n\r") != std::string::npos)
    throw ConfigError("experiment name may not contain commas, quotes or newlines");
  if (spec.policies.empty()) throw ConfigError("policy list is empty");
  if (spec.arms.empty()) throw ConfigError("arm-count list is empty");
  if (spec.gammas.empty()) throw ConfigError("discount list is empty");
  if (spec.param != SweepParam::None && spec.param_values.empty()) throw ConfigError("sweep has no values");
  if (spec.param == SweepParam::None && !spec.param_values.empty())
    throw ConfigError("sweep values given without a sweep parameter");
  if (spec.n_runs < 1) throw ConfigError("runs must be at least 1");
  if (spec.correlated && spec.family.kind != Family::Gaussian)
    throw ConfigError("correlated beliefs need the gaussian family");
  if (spec.param == SweepParam::Decay && !spec.correlated) throw ConfigError("decay sweep needs correlated beliefs");
  if ((spec.param == SweepParam::Alpha || spec.param == SweepParam::Beta) && spec.family.kind != Family::Bernoulli)
    throw ConfigError("alpha/beta sweeps apply to the bernoulli family");
  if (spec.param == SweepParam::Tau && spec.family.kind != Family::Gaussian)
    throw ConfigError("tau sweep applies to the gaussian family");
  if (spec.reference == ReferenceKind::Exact) {
    if (spec.family.kind != Family::Bernoulli || spec.correlated || spec.horizon ||
        spec.param == SweepParam::Horizon)
      throw ConfigError("exact reference needs bernoulli arms and an infinite horizon");
    for (auto k : spec.arms)
      if (k != 2) throw ConfigError("exact reference needs exactly two arms");
    for (auto p : spec.policies)
      if (is_stochastic(p) || !supports_independent(p))
        throw ConfigError("policy '" + std::string(policy_name(p)) + "' cannot be evaluated exactly");
  }
  // Building every grid point validates priors, discounts and policy support.
  const auto pts = expand(spec);
  for (const auto& pt : pts) {
    if (spec.reference == ReferenceKind::Exact) continue;
    try {
      validate(pt.run);
    } catch (const Error& e) {
      throw ConfigError(std::string("grid point invalid: ") + e.what());
    }
  }
}

std::vector<GridPoint> expand(const ExperimentSpec& spec) {
  std::vector<double> values = spec.param_values;
  if (spec.param == SweepParam::None) values = {0.0};
  std::vector<double> gammas = spec.gammas;
  if (spec.param == SweepParam::Gamma) gammas = {0.0};
  std::vector<GridPoint> out;
  for (std::size_t k : spec.arms)
    for (double g : gammas)
      for (double v : values) {
        GridPoint pt;
        pt.arms = k;
        pt.gamma = spec.param == SweepParam::Gamma ? v : g;
        pt.param_value = spec.param == SweepParam::None ? 0.0 : v;
        RunConfig& c = pt.run;
        c.family = spec.family;
        c.gamma = pt.gamma;
        c.horizon = spec.horizon;
        c.truncation_eps = spec.truncation_eps;
        c.policies = run_policies(spec);
        c.n_runs = spec.n_runs;
        c.master_seed = spec.master_seed;
        ArmBelief prior = spec.prior;
        double decay = spec.decay;
        switch (spec.param) {
          case SweepParam::Alpha: prior = {v, v + (spec.prior.n - spec.prior.sum)}; break;
          case SweepParam::Beta: prior = {spec.prior.sum, spec.prior.sum + v}; break;
          case SweepParam::Tau: c.family.tau = v; break;
          case SweepParam::Horizon:
            if (v < 1 || v != std::floor(v)) throw ConfigError("horizon sweep values must be positive integers");
            c.horizon = static_cast<std::int64_t>(v);
            break;
          case SweepParam::Decay: decay = v; break;
          default: break;
        }
        if (spec.correlated) {
          MvBelief b;
          b.mean = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(k), prior.mean());
          b.cov = power_exp_covariance(k, decay) / prior.n;
          b.tau = c.family.tau;
          c.correlated = b;
        } else {
          c.priors.assign(k, prior);
        }
        pt.gamma = c.gamma;
        out.push_back(std::move(pt));
      }
  return out;
}

// ------------------------------------------------------------------ registry

namespace {

using P = PolicyId;

ExperimentSpec base(std::string name, std::string description, bool desk) {
  ExperimentSpec s;
  s.name = std::move(name);
  s.description = std::move(description);
  s.n_runs = desk ? 20000 : 160000;
  return s;
}

ExperimentSpec make(const std::string& name, bool desk) {
  if (name == "fig1-bernoulli-exact-k2") {
    auto s = base(name, "Bernoulli, k=2, uniform priors, exact value iteration against the Bellman optimum", desk);
    s.policies = {P::Kg, P::Nkg, P::Pkg, P::Kgi, P::Gibl, P::Greedy};
    s.reference = ReferenceKind::Exact;
    s.param = SweepParam::Gamma;
    s.param_values = desk ? std::vector<double>{0.9, 0.92} : span(0.9, 0.99, 10);
    s.n_runs = 1;
    s.budget_minutes = 3;
    return s;
  }
  if (name == "fig1-bernoulli-gamma-sweep") {
    auto s = base(name, "Bernoulli, k=10, uniform priors, loss against the Gittins index policy over gamma", desk);
    s.arms = {10};
    s.policies = {P::Kg, P::Nkg, P::Pkg, P::Kgi, P::Gibl, P::Greedy};
    s.param = SweepParam::Gamma;
    s.param_values = desk ? std::vector<double>{0.9, 0.95} : span(0.9, 0.99, 10);
    s.budget_minutes = 10;
    return s;
  }
  if (name == "fig2-bernoulli-beta-sweep") {
    auto s = base(name, "Bernoulli, Beta(1, beta) priors, gamma=0.98, loss against the Gittins index policy", desk);
    s.arms = desk ? std::vector<std::size_t>{2} : std::vector<std::size_t>{2, 10};
    s.gammas = {0.98};
    s.prior = {1.0, 2.0};
    s.policies = {P::Kg, P::Nkg, P::Pkg, P::Kgi, P::Gibl, P::Greedy};
    s.param = SweepParam::Beta;
    s.param_values = desk ? std::vector<double>{1, 4, 7, 10} : span(1, 10, 10);
    s.budget_minutes = 10;
    return s;
  }
  if (name == "bernoulli-alpha-sweep") {
    auto s = base(name, "Bernoulli, Beta(alpha, 1) priors, gamma=0.98, loss against the Gittins index policy", desk);
    s.arms = desk ? std::vector<std::size_t>{2} : std::vector<std::size_t>{2, 10};
    s.gammas = {0.98};
    s.prior = {1.0, 2.0};
    s.policies = {P::Kg, P::Nkg, P::Pkg, P::Kgi, P::Gibl, P::Greedy};
    s.param = SweepParam::Alpha;
    s.param_values = desk ? std::vector<double>{0.02, 0.1, 0.5} : span(0.02, 0.5, 9);
    s.budget_minutes = 10;
    return s;
  }
  if (name == "exponential-gamma-sweep") {
    auto s = base(name, "Exponential, Gamma(2,3) priors, loss against KG over gamma", desk);
    s.family = RewardFamily::exponential();
    s.arms = {2, 10};
    s.prior = {3.0, 1.0};
    s.policies = {P::Nkg, P::Pkg, P::Kgi};
    s.reference_policy = P::Kg;
    s.param = SweepParam::Gamma;
    s.param_values = desk ? std::vector<double>{0.9, 0.95} : span(0.9, 0.99, 10);
    s.budget_minutes = 10;
    return s;
  }
  if (name == "nmab-tau-sweep") {
    auto s = base(name, "Gaussian, k=10, N(0,1) priors, loss against the Gittins index policy over tau", desk);
    s.family = RewardFamily::gaussian(1.0);
    s.arms = {10};
    s.gammas = desk ? std::vector<double>{0.9} : std::vector<double>{0.9, 0.99};
    s.prior = {0.0, 1.0};
    s.policies = {P::Kg, P::Kgi, P::Gibl, P::Gicg, P::Greedy};
    s.param = SweepParam::Tau;
    s.param_values = desk ? std::vector<double>{0.01, 0.1, 1, 10, 100} : span(0.01, 100, 9, true);
    s.budget_minutes = 10;
    return s;
  }
  if (name == "fhnmab-tau-sweep") {
    auto s = base(name, "Gaussian, k=10, N(0,1) priors, undiscounted horizon 50, loss against KG over tau", desk);
    s.family = RewardFamily::gaussian(1.0);
    s.arms = {10};
    s.gammas = {1.0};
    s.horizon = 50;
    s.prior = {0.0, 1.0};
    s.policies = {P::Kgi, P::GiblFh};
    s.reference_policy = P::Kg;
    s.param = SweepParam::Tau;
    s.param_values = desk ? std::vector<double>{0.01, 0.1, 1, 10, 100} : span(0.01, 100, 9, true);
    s.budget_minutes = 5;
    return s;
  }
  if (name == "fhnmab-horizon-sweep") {
    auto s = base(name, "Gaussian, k=10, N(0,1) priors, tau=1, undiscounted, loss against KG over the horizon", desk);
    s.family = RewardFamily::gaussian(1.0);
    s.arms = {10};
    s.gammas = {1.0};
    s.prior = {0.0, 1.0};
    s.policies = {P::Kgi, P::GiblFh};
    s.reference_policy = P::Kg;
    s.param = SweepParam::Horizon;
    s.param_values = desk ? std::vector<double>{10, 50, 100, 200}
                          : std::vector<double>{10, 20, 50, 100, 150, 200, 250, 300, 350, 400};
    s.budget_minutes = 10;
    return s;
  }
  if (name == "fig7-correlated") {
    auto s = base(name, "Correlated Gaussian, k=10, tau=1, power-exponential prior, loss against the Gittins index policy",
                  desk);
    s.family = RewardFamily::gaussian(1.0);
    s.arms = {10};
    s.gammas = desk ? std::vector<double>{0.9} : std::vector<double>{0.9, 0.99};
    s.prior = {0.0, 1.0};
    s.correlated = true;
    s.policies = {P::Ckg, P::Ikg, P::Kgi, P::Gibl};
    s.param = SweepParam::Decay;
    s.param_values = desk ? std::vector<double>{0.05, 0.5, 1.0} : span(0.05, 1.0, 20);
    s.n_runs = desk ? 5000 : 40000;
    s.budget_minutes = 10;
    return s;
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

}  // namespace

std::vector<std::string> registry_names() {
  return {"fig1-bernoulli-gamma-sweep", "fig1-bernoulli-exact-k2", "fig2-bernoulli-beta-sweep",
          "bernoulli-alpha-sweep",      "exponential-gamma-sweep", "nmab-tau-sweep",
          "fhnmab-tau-sweep",           "fhnmab-horizon-sweep",    "fig7-correlated"};
}

ExperimentSpec registry_spec(const std::string& name, bool desk_scale) { return make(name, desk_scale); }

// -------------------------------------------------------------------- config

ExperimentSpec parse_experiment_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  static const std::map<std::string, std::set<std::string>> allowed{
      {"experiment",
       {"name", "description", "family", "tau", "arms", "gamma", "horizon", "prior_sum", "prior_n", "policies",
        "reference", "metric", "runs", "seed", "truncation_eps", "memory_budget_mb"}},
      {"sweep", {"param", "values", "from", "to", "count", "scale"}},
      {"correlated", {"enabled", "decay"}},
  };
  for (const auto& [section, body] : tree) {
    const auto it = allowed.find(section);
    if (it == allowed.end()) throw ConfigError("config: unknown section [" + section + "]");
    if (body.empty() && !body.data().empty()) throw ConfigError("config: key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
      (void)value;
    }
  }
  auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return trim(*v);
    return std::nullopt;
  };
  ExperimentSpec s;
  s.n_runs = 20000;
  if (auto v = get("experiment.name")) s.name = *v;
  else throw ConfigError("config: [experiment] name is required");
  if (auto v = get("experiment.description")) s.description = *v;
  if (auto v = get("experiment.family")) s.family.kind = parse_family(*v);
  if (auto v = get("experiment.tau")) s.family.tau = parse_number(*v, "tau");
  if (!(s.family.tau > 0.0)) throw ConfigError("config: tau must be positive");
  if (auto v = get("experiment.arms")) {
    s.arms.clear();
    for (const auto& item : split_list(*v)) {
      const auto k = parse_integer(item, "arms");
      if (k < 2) throw ConfigError("config: arms must be at least 2");
      s.arms.push_back(static_cast<std::size_t>(k));
    }
  }
  if (auto v = get("experiment.gamma")) s.gammas = parse_numbers(*v, "gamma");
  if (auto v = get("experiment.horizon"); v && *v != "inf") {
    const auto T = parse_integer(*v, "horizon");
    if (T < 1) throw ConfigError("config: horizon must be at least 1");
    s.horizon = T;
  }
  switch (s.family.kind) {
    case Family::Bernoulli: s.prior = {1.0, 2.0}; break;
    case Family::Exponential: s.prior = {3.0, 1.0}; break;
    case Family::Gaussian: s.prior = {0.0, 1.0}; break;
  }
  if (auto v = get("experiment.prior_sum")) s.prior.sum = parse_number(*v, "prior_sum");
  if (auto v = get("experiment.prior_n")) s.prior.n = parse_number(*v, "prior_n");
  if (auto v = get("experiment.policies")) s.policies = parse_policy_list(*v);
  else throw ConfigError("config: [experiment] policies is required");
  if (auto v = get("experiment.reference")) {
    if (*v == "exact") s.reference = ReferenceKind::Exact;
    else s.reference_policy = parse_policy(*v);
  }
  if (auto v = get("experiment.metric")) {
    if (*v == "percent") s.metric = LossMetric::Percent;
    else if (*v == "absolute") s.metric = LossMetric::Absolute;
    else throw ConfigError("config: metric must be percent or absolute");
  }
  if (auto v = get("experiment.runs")) {
    const auto n = parse_integer(*v, "runs");
    if (n < 1) throw ConfigError("config: runs must be at least 1");
    s.n_runs = static_cast<std::size_t>(n);
  }
  if (auto v = get("experiment.seed")) {
    const auto n = parse_integer(*v, "seed");
    if (n < 0) throw ConfigError("config: seed must be non-negative");
    s.master_seed = static_cast<std::uint64_t>(n);
  }
  if (auto v = get("experiment.truncation_eps")) s.truncation_eps = parse_number(*v, "truncation_eps");
  if (auto v = get("experiment.memory_budget_mb")) {
    const auto mb = parse_integer(*v, "memory_budget_mb");
    if (mb < 1) throw ConfigError("config: memory_budget_mb must be positive");
    s.exact_memory_budget = static_cast<std::size_t>(mb) << 20;
  }
  if (auto v = get("correlated.enabled")) {
    if (*v == "true") s.correlated = true;
    else if (*v != "false") throw ConfigError("config: correlated.enabled must be true or false");
  }
  if (auto v = get("correlated.decay")) s.decay = parse_number(*v, "decay");
  if (auto v = get("sweep.param")) s.param = parse_sweep_param(*v);
  const auto values = get("sweep.values");
  const auto from = get("sweep.from"), to = get("sweep.to"), count = get("sweep.count");
  if (values && (from || to || count)) throw ConfigError("config: give either sweep values or from/to/count");
  if (values) {
    s.param_values = parse_numbers(*values, "values");
  } else if (from || to || count) {
    if (!(from && to && count)) throw ConfigError("config: from, to and count go together");
    const auto n = parse_integer(*count, "count");
    if (n < 1) throw ConfigError("config: count must be at least 1");
    const std::string scale = get("sweep.scale").value_or("linear");
    if (scale != "linear" && scale != "log") throw ConfigError("config: scale must be linear or log");
    const double lo = parse_number(*from, "from"), hi = parse_number(*to, "to");
    if (scale == "log" && !(lo > 0.0 && hi > 0.0)) throw ConfigError("config: log sweeps need positive bounds");
    s.param_values = span(lo, hi, static_cast<std::size_t>(n), scale == "log");
  }
  validate(s);
  return s;
}

ExperimentSpec load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

// ----------------------------------------------------------------------- run

std::vector<CsvRow> run_experiment(const ExperimentSpec& spec, const RunOptions& opts) {
  validate(spec);
  const auto points = expand(spec);
  std::vector<CsvRow> rows;
  std::size_t done = 0;
  for (const auto& pt : points) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<CsvRow> point_rows;
    auto row = [&](PolicyId p, double loss, double se, std::size_t n) {
      CsvRow r;
      r.experiment = spec.name;
      r.family = spec.family.kind;
      r.k = pt.arms;
      r.gamma = pt.gamma;
      r.horizon = pt.run.horizon;
      r.param = spec.param;
      r.param_value = pt.param_value;
      r.policy = p;
      r.mean_pct_lost = loss;
      r.stderr_ = se;
      r.n_runs = n;
      r.master_seed = spec.master_seed;
      point_rows.push_back(r);
    };
    if (spec.reference == ReferenceKind::Exact) {
      ExactConfig ec;
      ec.gamma = pt.gamma;
      ec.prior1 = pt.run.priors[0];
      ec.prior2 = pt.run.priors[1];
      ec.truncation_eps = spec.truncation_eps;
      ec.memory_budget = spec.exact_memory_budget;
      ec.threads = opts.threads;
      const auto res = exact_value_bernoulli_k2(ec, spec.policies);
      for (std::size_t i = 0; i < res.policies.size(); ++i) {
        const double loss = spec.metric == LossMetric::Percent ? 100.0 * (res.optimal - res.values[i]) / res.optimal
                                                               : res.optimal - res.values[i];
        row(res.policies[i], loss, 0.0, 0);
      }
    } else {
      RunConfig c = pt.run;
      c.threads = opts.threads;
      const auto res = simulate(c);
      for (auto p : res.policies) {
        const auto l = spec.metric == LossMetric::Percent ? percentage_lost(res, p, spec.reference_policy)
                                                          : absolute_loss(res, p, spec.reference_policy);
        row(p, l.value, l.stderr_, res.n_runs);
      }
    }
    if (opts.record_wall_time) {
      const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      for (auto& r : point_rows) r.wall_ms = std::round(ms);
    }
    rows.insert(rows.end(), point_rows.begin(), point_rows.end());
    if (opts.progress) opts.progress(++done, points.size());
  }
  return rows;
}

std::string csv_header() {
  return "experiment,family,k,gamma,horizon,param_name,param_value,policy,mean_pct_lost,stderr,n_runs,master_seed,"
         "wall_ms\n";
}

std::string format_csv(const std::vector<CsvRow>& rows) {
  std::string out = csv_header();
  for (const auto& r : rows) {
    out += r.experiment;
    out += ',';
    out += family_name(r.family);
    out += ',' + std::to_string(r.k);
    out += ',' + fmt17(r.gamma);
    out += ',' + (r.horizon ? std::to_string(*r.horizon) : std::string("inf"));
    out += ',';
    out += sweep_param_name(r.param);
    out += ',' + (r.param == SweepParam::None ? std::string() : fmt17(r.param_value));
    out += ',';
    out += policy_name(r.policy);
    out += ',' + fmt17(r.mean_pct_lost);
    out += ',' + fmt17(r.stderr_);
    out += ',' + std::to_string(r.n_runs);
    out += ',' + std::to_string(r.master_seed);
    out += ',' + fmt17(r.wall_ms);
    out += '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text, bool force) {
  std::error_code ec;
  if (!force && std::filesystem::exists(path, ec))
    throw IoError(path.string() + " exists; pass --force to overwrite");
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write to " + tmp + " failed");
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp + " to " + path.string() + ": " + ec.message());
}

}  // namespace kgb
