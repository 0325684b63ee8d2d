#pragma once

#include "index/index_table.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace kgb {

struct PrecomputeRequest {
  IndexKind kind = IndexKind::Gittins;
  RewardFamily family = RewardFamily::bernoulli();
  double gamma = 0.9;
  std::optional<std::int64_t> horizon;
  // Bernoulli lattice bound; the other kinds use `n_values`.
  std::int64_t n_max = 0;
  std::vector<double> n_values;
  GittinsConfig cfg;
  std::filesystem::path out;
  bool force = false;
};

enum class PrecomputeOutcome {
  Written,   // new file
  Verified,  // existing file holds this table and its checksum is intact
  Replaced,  // existing file overwritten under `force`
};

struct PrecomputeResult {
  PrecomputeOutcome outcome = PrecomputeOutcome::Written;
  std::size_t rows = 0;
};

// Builds the table and persists it. An existing file is verified instead of
// rebuilt; a damaged or different one is replaced only under `force`
// (IoError otherwise).
PrecomputeResult precompute_indices(const PrecomputeRequest& req);

}  // namespace kgb
