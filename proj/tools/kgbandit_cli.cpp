// Command-line front end. Talks to the library through the C API only.

#include "kgbandit/kgbandit.h"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

// Thrown to leave main with a given exit code after reporting.
struct Exit {
  int code;
};

void check(kgb_status s, const std::string& context) {
  if (s == KGB_OK) return;
  std::cerr << "kgbandit: " << context << ": " << kgb_status_name(s) << ": " << kgb_last_error() << '\n';
  throw Exit{kgb_exit_code(s)};
}

[[noreturn]] void config_error(const std::string& msg) {
  std::cerr << "kgbandit: " << msg << '\n';
  throw Exit{1};
}

struct ReportDeleter {
  void operator()(kgb_report* r) const { kgb_report_free(r); }
};
using ReportPtr = std::unique_ptr<kgb_report, ReportDeleter>;

struct ExperimentDeleter {
  void operator()(kgb_experiment* e) const { kgb_experiment_free(e); }
};

struct CString {
  char* p = nullptr;
  ~CString() { kgb_string_free(p); }
};

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0' || !std::isfinite(v)) config_error(what + ": '" + item + "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) config_error(what + " is empty");
  return out;
}

// lo:hi:count or lo:hi:count:log
std::vector<double> parse_range(const std::string& s, const std::string& what) {
  std::stringstream ss(s);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  const bool log_scale = parts.size() == 4 && parts[3] == "log";
  if (parts.size() != 3 && !log_scale) config_error(what + " must be lo:hi:count or lo:hi:count:log");
  const double lo = parse_list(parts[0], what)[0], hi = parse_list(parts[1], what)[0];
  const double n = parse_list(parts[2], what)[0];
  if (n < 1 || n != std::floor(n)) config_error(what + ": count must be a positive integer");
  if (log_scale && !(lo > 0 && hi > 0)) config_error(what + ": log ranges need positive bounds");
  std::vector<double> out;
  for (int i = 0; i < int(n); ++i) {
    const double f = n == 1 ? 0.0 : i / (n - 1);
    out.push_back(log_scale ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))) : lo + f * (hi - lo));
  }
  return out;
}

kgb_family parse_family(const std::string& s) {
  if (s == "bernoulli") return KGB_BERNOULLI;
  if (s == "exponential") return KGB_EXPONENTIAL;
  if (s == "gaussian") return KGB_GAUSSIAN;
  config_error("unknown family '" + s + "'");
}

void emit(const std::string& text, const std::string& path, bool force) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  check(kgb_write_file(path.c_str(), text.c_str(), force ? 1 : 0), "writing " + path);
}

// Prints the report and, with a prefix, writes prefix.txt/.csv/.witness.
void emit_report(const ReportPtr& r, const std::string& prefix, bool force) {
  std::cout << kgb_report_text(r.get());
  if (prefix.empty()) return;
  emit(kgb_report_text(r.get()), prefix + ".txt", force);
  emit(kgb_report_csv(r.get()), prefix + ".csv", force);
  const std::string artifact = kgb_report_artifact(r.get());
  if (!artifact.empty()) emit(artifact, prefix + ".witness", force);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-gradient and Gittins-index bandit experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kgb_version()));

  // list
  auto* list = app.add_subcommand("list", "List the registered experiments");
  bool list_desk = false;
  list->add_flag("--desk-scale", list_desk, "Describe the desk-scale variants");

  // run
  auto* run = app.add_subcommand("run", "Run an experiment and write its CSV");
  std::string experiment, config, out;
  bool desk = false, force = false, wall = false, quiet = false;
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  auto* exp_opt = run->add_option("--experiment", experiment, "Registry entry (see 'list')");
  auto* cfg_opt = run->add_option("--config", config, "Experiment config file")->check(CLI::ExistingFile);
  exp_opt->excludes(cfg_opt);
  run->add_flag("--desk-scale", desk, "Eighth of the runs and coarser grids");
  run->add_option("--threads", threads, "Worker threads (output does not depend on it)")->check(CLI::Range(1u, 1024u));
  run->add_option("--seed", seed, "Master seed");
  run->add_option("--runs", runs, "Override the number of runs")->check(CLI::PositiveNumber);
  run->add_option("--out", out, "Output CSV path (default stdout)");
  run->add_flag("--force", force, "Overwrite an existing output file");
  run->add_flag("--wall-time", wall, "Record wall times (output no longer byte-stable)");
  run->add_flag("--quiet", quiet, "No progress on stderr");

  // exact
  auto* exact = app.add_subcommand("exact", "Exact Bayes returns for two Bernoulli arms");
  double ex_gamma = 0.9;
  std::string ex_p1 = "1:2", ex_p2 = "1:2", ex_policies = "greedy";
  std::int64_t ex_depth = 0;
  exact->add_option("--gamma", ex_gamma, "Discount factor")->required();
  exact->add_option("--prior1", ex_p1, "Arm 1 prior as sum:n");
  exact->add_option("--prior2", ex_p2, "Arm 2 prior as sum:n");
  exact->add_option("--policies", ex_policies, "Comma-separated deterministic policies");
  exact->add_option("--depth", ex_depth, "Lattice depth (default: truncation at 1e-7)");
  exact->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u));

  // precompute
  auto* pre = app.add_subcommand("precompute", "Build or verify a persisted index table");
  std::string kind = "gittins", n_values, n_range;
  double pre_gamma = 0.9, pre_tau = 1.0;
  std::optional<std::int64_t> pre_horizon;
  std::int64_t n_max = 0;
  pre->add_option("--kind", kind, "gittins | kgi | gaussian-bonus | exponential-factor")
      ->check(CLI::IsMember({"gittins", "kgi", "gaussian-bonus", "exponential-factor"}));
  pre->add_option("--gamma", pre_gamma, "Discount factor")->required();
  pre->add_option("--horizon", pre_horizon, "Remaining pulls (default infinite)");
  pre->add_option("--n-max", n_max, "Bernoulli lattice bound");
  pre->add_option("--n-values", n_values, "Comma-separated n grid");
  pre->add_option("--n-range", n_range, "n grid as lo:hi:count[:log]");
  pre->add_option("--tau", pre_tau, "Observation precision (gaussian-bonus)");
  pre->add_option("--out", out, "Table path")->required();
  pre->add_flag("--force", force, "Replace a damaged or different table");

  // analyze
  auto* an = app.add_subcommand("analyze", "Dominance and index-consistency analyses");
  an->require_subcommand(1);
  std::string prefix, policy = "kg", family = "bernoulli", grid, gammas = "0.5,0.9,0.99", n2_list, file;
  double gamma = 0.9, tau = 1.0, n1 = 1.0, resolution = 1e-3;
  std::int64_t cf_n_max = 50;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", prefix, "Write PREFIX.txt, PREFIX.csv (and PREFIX.witness)");
    sub->add_flag("--force", force, "Overwrite existing outputs");
  };
  auto* an_w = an->add_subcommand("witness", "Dominated-action witness for KG");
  an_w->add_option("--family", family, "bernoulli | exponential | gaussian");
  an_w->add_option("--gamma", gamma, "Discount factor")->required();
  an_w->add_option("--tau", tau, "Observation precision");
  common(an_w);
  auto* an_r = an->add_subcommand("rlb", "Relative learning bonus curves");
  an_r->add_option("--policy", policy, "Comma-separated policies (gi is always added)");
  an_r->add_option("--gamma", gamma, "Discount factor")->required();
  an_r->add_option("--n1", n1, "Precision of arm 1");
  an_r->add_option("--n2", n2_list, "Comma-separated arm-2 precisions (default 1..30)");
  an_r->add_option("--tau", tau, "Observation precision");
  common(an_r);
  auto* an_c = an->add_subcommand("consistency", "Index-consistency probe");
  an_c->add_option("--policy", policy, "Policy")->required();
  an_c->add_option("--gamma", gamma, "Discount factor")->required();
  an_c->add_option("--tau", tau, "Observation precision");
  an_c->add_option("--resolution", resolution, "Probe grid step");
  common(an_c);
  auto* an_o = an->add_subcommand("over-exploration", "Check 0 <= R_policy <= R_gi on an n grid");
  an_o->add_option("--policy", policy, "Policy")->required();
  an_o->add_option("--gamma", gamma, "Discount factor")->required();
  an_o->add_option("--grid", grid, "Comma-separated precisions (default 1,2,3,5,10)");
  an_o->add_option("--tau", tau, "Observation precision");
  common(an_o);
  auto* an_f = an->add_subcommand("closed-form", "Bernoulli KGI against the printed closed form");
  an_f->add_option("--gamma", gammas, "Comma-separated discount factors");
  an_f->add_option("--n-max", cf_n_max, "Largest n");
  common(an_f);
  auto* an_p = an->add_subcommand("replay", "Replay a witness file");
  an_p->add_option("--file", file, "Witness file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*list) {
      for (std::size_t i = 0; const char* name = kgb_registry_name(i); ++i) {
        kgb_experiment* raw = nullptr;
        check(kgb_experiment_from_registry(name, list_desk ? 1 : 0, &raw), name);
        std::unique_ptr<kgb_experiment, ExperimentDeleter> e(raw);
        CString text;
        check(kgb_experiment_describe(e.get(), &text.p), name);
        std::cout << text.p;
      }
      return 0;
    }
    if (*run) {
      if (experiment.empty() && config.empty()) config_error("run needs --experiment or --config");
      kgb_experiment* raw = nullptr;
      if (!experiment.empty()) check(kgb_experiment_from_registry(experiment.c_str(), desk ? 1 : 0, &raw), experiment);
      else check(kgb_experiment_from_config(config.c_str(), &raw), config);
      std::unique_ptr<kgb_experiment, ExperimentDeleter> e(raw);
      if (seed) check(kgb_experiment_set_seed(e.get(), *seed), "seed");
      if (runs) check(kgb_experiment_set_runs(e.get(), *runs), "runs");
      if (!out.empty() && out != "-" && !force) {
        if (std::FILE* f = std::fopen(out.c_str(), "r")) {
          std::fclose(f);
          std::cerr << "kgbandit: " << out << " exists; pass --force to overwrite\n";
          return 3;
        }
      }
      auto progress = [](std::size_t done, std::size_t total, void*) {
        std::fprintf(stderr, "  grid point %zu/%zu done\n", done, total);
      };
      CString csv;
      check(kgb_experiment_run(e.get(), threads, wall ? 1 : 0, quiet ? nullptr : +progress, nullptr, &csv.p), "run");
      emit(csv.p, out, force);
      return 0;
    }
    if (*exact) {
      auto prior = [](const std::string& s) {
        const auto c = s.find(':');
        if (c == std::string::npos) config_error("prior must be sum:n");
        return std::pair{parse_list(s.substr(0, c), "prior")[0], parse_list(s.substr(c + 1), "prior")[0]};
      };
      const auto [s1, m1] = prior(ex_p1);
      const auto [s2, m2] = prior(ex_p2);
      std::vector<std::string> names;
      std::stringstream ss(ex_policies);
      for (std::string item; std::getline(ss, item, ',');) names.push_back(item);
      std::vector<double> values(names.size());
      double optimal = 0.0;
      check(kgb_exact_bernoulli_k2(ex_gamma, s1, m1, s2, m2, ex_depth, ex_policies.c_str(), threads, &optimal,
                                   values.data(), values.size()),
            "exact");
      std::printf("policy,value,pct_lost\noptimal,%.17g,0\n", optimal);
      for (std::size_t i = 0; i < names.size(); ++i)
        std::printf("%s,%.17g,%.17g\n", names[i].c_str(), values[i], 100.0 * (optimal - values[i]) / optimal);
      return 0;
    }
    if (*pre) {
      kgb_index_kind k = KGB_INDEX_GITTINS;
      kgb_family fam = KGB_BERNOULLI;
      if (kind == "kgi") k = KGB_INDEX_KGI;
      if (kind == "gaussian-bonus") k = KGB_INDEX_GAUSSIAN_BONUS, fam = KGB_GAUSSIAN;
      if (kind == "exponential-factor") k = KGB_INDEX_EXPONENTIAL_FACTOR, fam = KGB_EXPONENTIAL;
      std::vector<double> ns;
      if (!n_values.empty() && !n_range.empty()) config_error("give --n-values or --n-range, not both");
      if (!n_values.empty()) ns = parse_list(n_values, "--n-values");
      if (!n_range.empty()) ns = parse_range(n_range, "--n-range");
      kgb_precompute_outcome outcome{};
      std::size_t rows = 0;
      check(kgb_precompute(k, fam, pre_tau, pre_gamma, pre_horizon ? *pre_horizon : KGB_HORIZON_INFINITE, n_max,
                           ns.data(), ns.size(), out.c_str(), force ? 1 : 0, &outcome, &rows),
            "precompute");
      const char* what = outcome == KGB_TABLE_VERIFIED ? "verified" : outcome == KGB_TABLE_REPLACED ? "replaced" : "written";
      std::cout << out << ": " << rows << " rows " << what << '\n';
      return 0;
    }
    kgb_report* raw = nullptr;
    if (*an_w) {
      check(kgb_analyze_witness(parse_family(family), tau, gamma, &raw), "witness");
    } else if (*an_r) {
      std::vector<double> n2;
      if (n2_list.empty())
        for (int i = 1; i <= 30; ++i) n2.push_back(i);
      else
        n2 = parse_list(n2_list, "--n2");
      check(kgb_analyze_rlb(policy.c_str(), gamma, tau, n1, n2.data(), n2.size(), &raw), "rlb");
    } else if (*an_c) {
      check(kgb_analyze_consistency(policy.c_str(), gamma, tau, resolution, &raw), "consistency");
    } else if (*an_o) {
      const auto g = grid.empty() ? std::vector<double>{1, 2, 3, 5, 10} : parse_list(grid, "--grid");
      check(kgb_analyze_over_exploration(policy.c_str(), gamma, tau, g.data(), g.size(), &raw), "over-exploration");
    } else if (*an_f) {
      const auto g = parse_list(gammas, "--gamma");
      check(kgb_analyze_closed_form(g.data(), g.size(), cf_n_max, &raw), "closed-form");
    } else if (*an_p) {
      std::FILE* f = std::fopen(file.c_str(), "rb");
      if (!f) {
        std::cerr << "kgbandit: cannot open " << file << '\n';
        return 3;
      }
      std::string text;
      char buf[4096];
      for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, f)) > 0;) text.append(buf, n);
      std::fclose(f);
      int ok = 0;
      check(kgb_replay_witness(text.c_str(), &ok), "replay");
      std::cout << (ok ? "reproduced\n" : "NOT reproduced\n");
      return ok ? 0 : 2;
    }
    ReportPtr report(raw);
    emit_report(report, prefix, force);
    return 0;
  } catch (const Exit& e) {
    return e.code;
  }
}
