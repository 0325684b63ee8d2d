#pragma once

#include "belief/belief.hpp"
#include "index/gittins.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kgb {

enum class IndexKind {
  Gittins,        // value = index at (sum, n)
  Kgi,            // value = index at (sum, n)
  GaussianBonus,  // value = index - mean at n (sum column is 0)
  ExponentialFactor,  // value = index / sum at n (sum column is 1)
};

std::string_view index_kind_name(IndexKind k) noexcept;
IndexKind parse_index_kind(std::string_view name);

struct IndexRow {
  double sum;
  double n;
  double value;
};

// Precomputed index values on a grid, immutable once built. Rows are stored in
// the order they were generated (n ascending, then sum ascending).
struct IndexTable {
  IndexKind kind = IndexKind::Gittins;
  RewardFamily family;
  double gamma = 0.9;
  std::optional<std::int64_t> horizon;
  std::string grid;  // human-readable grid description
  double lambda_tol = 0.0;
  double value_tol = 0.0;
  double truncation_eps = 0.0;
  std::vector<IndexRow> rows;

  // Exact (sum, n) lookup.
  std::optional<double> find(double sum, double n) const;
};

// Throws DomainError when a value is non-finite or an index lies below the mean.
void validate(const IndexTable& t);

std::string serialize(const IndexTable& t);
// Throws IoError on a checksum mismatch or a malformed body.
IndexTable parse_index_table(const std::string& text);

void write_index_table(const IndexTable& t, const std::filesystem::path& path);
IndexTable read_index_table(const std::filesystem::path& path);

std::uint64_t fnv1a64_bytes(std::string_view bytes) noexcept;

// Builders. Bernoulli grids cover integer sum in [1, n-1] for n in [2, n_max].
IndexTable build_bernoulli_table(IndexKind kind, double gamma, std::optional<std::int64_t> horizon,
                                 std::int64_t n_max, const GittinsConfig& cfg = {});
// Gaussian learning bonus on the given precisions.
IndexTable build_gaussian_bonus_table(double gamma, std::optional<std::int64_t> horizon, double tau,
                                      const std::vector<double>& n_values, const GittinsConfig& cfg = {});
// Exponential Gittins factor on the given n.
IndexTable build_exponential_table(double gamma, std::optional<std::int64_t> horizon,
                                   const std::vector<double>& n_values, const GittinsConfig& cfg = {});

}  // namespace kgb
