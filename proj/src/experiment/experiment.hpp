#pragma once

#include "eval/simulate.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace kgb {

enum class ReferenceKind {
  Policy,  // a simulated policy, included in the run
  Exact,   // Bellman optimum by value iteration (Bernoulli, k = 2)
};

enum class LossMetric { Percent, Absolute };

// Parameter swept along one axis of the experiment grid.
enum class SweepParam { None, Gamma, Alpha, Beta, Tau, Horizon, Decay };
std::string_view sweep_param_name(SweepParam p) noexcept;
SweepParam parse_sweep_param(std::string_view name);

// Description of a grid of runs: every combination of arm count, discount and
// swept value becomes one RunConfig.
struct ExperimentSpec {
  std::string name;
  std::string description;
  RewardFamily family = RewardFamily::bernoulli();
  std::vector<std::size_t> arms{2};
  std::vector<double> gammas{0.9};
  std::optional<std::int64_t> horizon;
  ArmBelief prior{1.0, 2.0};
  bool correlated = false;
  double decay = 0.5;
  SweepParam param = SweepParam::None;
  std::vector<double> param_values;
  std::vector<PolicyId> policies;
  ReferenceKind reference = ReferenceKind::Policy;
  PolicyId reference_policy = PolicyId::Gittins;
  LossMetric metric = LossMetric::Percent;
  std::size_t n_runs = 160000;
  std::uint64_t master_seed = 1;
  double truncation_eps = 1e-7;
  std::size_t exact_memory_budget = std::size_t{1} << 30;
  // Expected desk-scale wall time on one core, for documentation.
  double budget_minutes = 0.0;
};

// Throws ConfigError when the spec is inconsistent.
void validate(const ExperimentSpec& spec);

struct GridPoint {
  std::size_t arms = 2;
  double gamma = 0.9;
  double param_value = 0.0;
  RunConfig run;
};
std::vector<GridPoint> expand(const ExperimentSpec& spec);

// Registry of the built-in experiments.
std::vector<std::string> registry_names();
// Full-scale spec, or the reduced desk-scale variant (an eighth of the runs,
// coarser grids). Throws ConfigError for unknown names.
ExperimentSpec registry_spec(const std::string& name, bool desk_scale);

// Plain key-value config with sections; see docs/file_formats.md.
ExperimentSpec parse_experiment_config(const std::string& text);
ExperimentSpec load_experiment_config(const std::filesystem::path& path);

struct CsvRow {
  std::string experiment;
  Family family = Family::Bernoulli;
  std::size_t k = 2;
  double gamma = 0.9;
  std::optional<std::int64_t> horizon;
  SweepParam param = SweepParam::None;
  double param_value = 0.0;
  PolicyId policy = PolicyId::Kg;
  double mean_pct_lost = 0.0;
  double stderr_ = 0.0;
  std::size_t n_runs = 0;
  std::uint64_t master_seed = 0;
  double wall_ms = 0.0;
};

struct RunOptions {
  unsigned threads = 1;
  // Wall time is recorded only on request so that outputs stay byte-identical.
  bool record_wall_time = false;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

std::vector<CsvRow> run_experiment(const ExperimentSpec& spec, const RunOptions& opts = {});

std::string csv_header();
std::string format_csv(const std::vector<CsvRow>& rows);
// Writes through a temporary file. Refuses to replace an existing file unless
// `force` (IoError).
void write_text_file(const std::filesystem::path& path, const std::string& text, bool force);

}  // namespace kgb
