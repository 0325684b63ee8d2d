#include "experiment/precompute.hpp"

#include "core/errors.hpp"

#include <filesystem>

namespace kgb {

namespace {

void check_request(const PrecomputeRequest& req) {
  switch (req.kind) {
    case IndexKind::Gittins:
    case IndexKind::Kgi:
      if (req.family.kind != Family::Bernoulli) throw ConfigError("lattice tables are built for bernoulli arms");
      if (req.n_max < 2) throw ConfigError("bernoulli table grid is empty (n-max < 2)");
      break;
    case IndexKind::GaussianBonus:
      if (req.family.kind != Family::Gaussian) throw ConfigError("bonus tables are built for gaussian arms");
      if (req.n_values.empty()) throw ConfigError("precision grid is empty");
      break;
    case IndexKind::ExponentialFactor:
      if (req.family.kind != Family::Exponential) throw ConfigError("factor tables are built for exponential arms");
      if (req.n_values.empty()) throw ConfigError("n grid is empty");
      break;
  }
  if (req.horizon && *req.horizon < 1) throw ConfigError("horizon must be at least 1");
  if (!req.horizon && !(req.gamma > 0.0 && req.gamma < 1.0)) throw ConfigError("infinite horizons need 0 < gamma < 1");
  if (req.horizon && !(req.gamma > 0.0 && req.gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
}

// True when the stored table was built from this request.
bool matches(const IndexTable& t, const PrecomputeRequest& req) {
  if (t.kind != req.kind || t.family != req.family || t.gamma != req.gamma || t.horizon != req.horizon) return false;
  if (t.lambda_tol != req.cfg.lambda_tol || t.value_tol != req.cfg.value_tol ||
      t.truncation_eps != req.cfg.truncation_eps)
    return false;
  std::size_t i = 0;
  if (req.kind == IndexKind::Gittins || req.kind == IndexKind::Kgi) {
    for (std::int64_t n = 2; n <= req.n_max; ++n)
      for (std::int64_t s = 1; s < n; ++s, ++i)
        if (i >= t.rows.size() || t.rows[i].sum != double(s) || t.rows[i].n != double(n)) return false;
  } else {
    for (double n : req.n_values)
      if (i >= t.rows.size() || t.rows[i++].n != n) return false;
  }
  return i == t.rows.size();
}

}  // namespace

PrecomputeResult precompute_indices(const PrecomputeRequest& req) {
  check_request(req);
  bool existed = false;
  std::error_code ec;
  if (std::filesystem::exists(req.out, ec)) {
    existed = true;
    std::string problem;
    try {
      const auto stored = read_index_table(req.out);
      if (matches(stored, req)) return {PrecomputeOutcome::Verified, stored.rows.size()};
      problem = req.out.string() + " holds a different table";
    } catch (const IoError& e) {
      problem = e.what();
    }
    if (!req.force) throw IoError(problem + "; pass --force to replace it");
  }
  IndexTable t;
  switch (req.kind) {
    case IndexKind::Gittins:
    case IndexKind::Kgi: t = build_bernoulli_table(req.kind, req.gamma, req.horizon, req.n_max, req.cfg); break;
    case IndexKind::GaussianBonus:
      t = build_gaussian_bonus_table(req.gamma, req.horizon, req.family.tau, req.n_values, req.cfg);
      break;
    case IndexKind::ExponentialFactor: t = build_exponential_table(req.gamma, req.horizon, req.n_values, req.cfg); break;
  }
  write_index_table(t, req.out);
  return {existed ? PrecomputeOutcome::Replaced : PrecomputeOutcome::Written, t.rows.size()};
}

}  // namespace kgb
