#include "index/index_table.hpp"

#include "core/errors.hpp"
#include "index/kgi.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace kgb {

namespace {

constexpr const char* kMagic = "kgbandit-index-table";
constexpr int kFormatVersion = 1;

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& s, const std::string& field) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw IoError("index table: field '" + field + "' is not a number");
  }
  if (used != s.size()) throw IoError("index table: field '" + field + "' has trailing characters");
  return v;
}

}  // namespace

std::string_view index_kind_name(IndexKind k) noexcept {
  switch (k) {
    case IndexKind::Gittins: return "gittins";
    case IndexKind::Kgi: return "kgi";
    case IndexKind::GaussianBonus: return "gaussian-bonus";
    case IndexKind::ExponentialFactor: return "exponential-factor";
  }
  return "unknown";
}

IndexKind parse_index_kind(std::string_view name) {
  for (auto k : {IndexKind::Gittins, IndexKind::Kgi, IndexKind::GaussianBonus, IndexKind::ExponentialFactor})
    if (index_kind_name(k) == name) return k;
  throw ConfigError("unknown index kind '" + std::string(name) + "'");
}

std::uint64_t fnv1a64_bytes(std::string_view bytes) noexcept { return fnv1a64(bytes); }

std::optional<double> IndexTable::find(double sum, double n) const {
  for (const auto& r : rows)
    if (r.sum == sum && r.n == n) return r.value;
  return std::nullopt;
}

void validate(const IndexTable& t) {
  for (const auto& r : t.rows) {
    if (!std::isfinite(r.value) || !std::isfinite(r.sum) || !std::isfinite(r.n))
      throw DomainError("index table holds a non-finite entry");
    switch (t.kind) {
      case IndexKind::Gittins:
      case IndexKind::Kgi:
        if (r.value < r.sum / r.n) throw DomainError("index below the posterior mean at n=" + fmt_double(r.n));
        break;
      case IndexKind::GaussianBonus:
        if (r.value < 0.0) throw DomainError("negative learning bonus at n=" + fmt_double(r.n));
        break;
      case IndexKind::ExponentialFactor:
        if (r.value < 1.0 / r.n) throw DomainError("index below the posterior mean at n=" + fmt_double(r.n));
        break;
    }
  }
}

std::string serialize(const IndexTable& t) {
  std::ostringstream out;
  out << kMagic << '\n';
  out << "format " << kFormatVersion << '\n';
  out << "kind " << index_kind_name(t.kind) << '\n';
  out << "family " << family_name(t.family.kind) << '\n';
  out << "tau " << fmt_double(t.family.tau) << '\n';
  out << "gamma " << fmt_double(t.gamma) << '\n';
  out << "horizon " << (t.horizon ? std::to_string(*t.horizon) : std::string("inf")) << '\n';
  out << "grid " << t.grid << '\n';
  out << "lambda_tol " << fmt_double(t.lambda_tol) << '\n';
  out << "value_tol " << fmt_double(t.value_tol) << '\n';
  out << "truncation_eps " << fmt_double(t.truncation_eps) << '\n';
  out << "rows " << t.rows.size() << '\n';
  for (const auto& r : t.rows) out << fmt_double(r.sum) << ' ' << fmt_double(r.n) << ' ' << fmt_double(r.value) << '\n';
  std::string body = out.str();
  char sum[40];
  std::snprintf(sum, sizeof sum, "checksum %016" PRIx64 "\n", fnv1a64_bytes(body));
  return body + sum;
}

IndexTable parse_index_table(const std::string& text) {
  const auto pos = text.rfind("checksum ");
  if (pos == std::string::npos || (pos > 0 && text[pos - 1] != '\n')) throw IoError("index table: missing checksum line");
  const std::string body = text.substr(0, pos);
  std::string stored = text.substr(pos + 9);
  while (!stored.empty() && (stored.back() == '\n' || stored.back() == '\r')) stored.pop_back();
  char expect[20];
  std::snprintf(expect, sizeof expect, "%016" PRIx64, fnv1a64_bytes(body));
  if (stored != expect) throw IoError("index table: checksum mismatch (stored " + stored + ", computed " + expect + ")");

  std::istringstream in(body);
  std::string line;
  auto next = [&](const std::string& key) {
    if (!std::getline(in, line)) throw IoError("index table: truncated header before '" + key + "'");
    if (line.rfind(key + " ", 0) != 0) throw IoError("index table: expected '" + key + "', got '" + line + "'");
    return line.substr(key.size() + 1);
  };
  if (!std::getline(in, line) || line != kMagic) throw IoError("index table: bad magic line");
  if (next("format") != std::to_string(kFormatVersion)) throw IoError("index table: unsupported format version");
  IndexTable t;
  try {
    t.kind = parse_index_kind(next("kind"));
    t.family.kind = parse_family(next("family"));
  } catch (const ConfigError& e) {
    throw IoError(std::string("index table: ") + e.what());
  }
  t.family.tau = parse_double(next("tau"), "tau");
  t.gamma = parse_double(next("gamma"), "gamma");
  const std::string h = next("horizon");
  if (h != "inf") t.horizon = static_cast<std::int64_t>(parse_double(h, "horizon"));
  t.grid = next("grid");
  t.lambda_tol = parse_double(next("lambda_tol"), "lambda_tol");
  t.value_tol = parse_double(next("value_tol"), "value_tol");
  t.truncation_eps = parse_double(next("truncation_eps"), "truncation_eps");
  const auto count = static_cast<std::size_t>(parse_double(next("rows"), "rows"));
  t.rows.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw IoError("index table: fewer rows than declared");
    std::istringstream ls(line);
    std::string a, b, c, extra;
    if (!(ls >> a >> b >> c) || (ls >> extra)) throw IoError("index table: malformed row " + std::to_string(i));
    t.rows.push_back({parse_double(a, "sum"), parse_double(b, "n"), parse_double(c, "value")});
  }
  if (std::getline(in, line)) throw IoError("index table: more rows than declared");
  return t;
}

void write_index_table(const IndexTable& t, const std::filesystem::path& path) {
  const std::string text = serialize(t);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out << text;
    if (!out) throw IoError("write to " + tmp + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp + " to " + path.string() + ": " + ec.message());
}

IndexTable read_index_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_index_table(ss.str());
}

namespace {

IndexTable skeleton(IndexKind kind, RewardFamily fam, double gamma, std::optional<std::int64_t> horizon,
                    const GittinsConfig& cfg) {
  IndexTable t;
  t.kind = kind;
  t.family = fam;
  t.gamma = gamma;
  t.horizon = horizon;
  t.lambda_tol = cfg.lambda_tol;
  t.value_tol = cfg.value_tol;
  t.truncation_eps = cfg.truncation_eps;
  return t;
}

std::string list_grid(const char* label, const std::vector<double>& xs) {
  std::string g = std::string(label) + " count=" + std::to_string(xs.size());
  if (!xs.empty()) g += " first=" + fmt_double(xs.front()) + " last=" + fmt_double(xs.back());
  return g;
}

}  // namespace

IndexTable build_bernoulli_table(IndexKind kind, double gamma, std::optional<std::int64_t> horizon, std::int64_t n_max,
                                 const GittinsConfig& cfg) {
  if (kind != IndexKind::Gittins && kind != IndexKind::Kgi)
    throw ConfigError("Bernoulli tables hold Gittins or KGI indices");
  if (n_max < 2) throw ConfigError("Bernoulli table grid is empty (n_max < 2)");
  auto t = skeleton(kind, RewardFamily::bernoulli(), gamma, horizon, cfg);
  t.grid = "bernoulli-lattice sum=1..n-1 n=2.." + std::to_string(n_max);
  for (std::int64_t n = 2; n <= n_max; ++n) {
    for (std::int64_t s = 1; s < n; ++s) {
      const ArmBelief b{static_cast<double>(s), static_cast<double>(n)};
      const double v = kind == IndexKind::Gittins ? gittins_index(b, t.family, gamma, horizon, cfg)
                                                  : kgi_index(b, t.family, gamma, horizon);
      t.rows.push_back({b.sum, b.n, v});
    }
  }
  validate(t);
  return t;
}

IndexTable build_gaussian_bonus_table(double gamma, std::optional<std::int64_t> horizon, double tau,
                                      const std::vector<double>& n_values, const GittinsConfig& cfg) {
  if (n_values.empty()) throw ConfigError("Gaussian bonus grid is empty");
  auto t = skeleton(IndexKind::GaussianBonus, RewardFamily::gaussian(tau), gamma, horizon, cfg);
  t.grid = list_grid("n-values", n_values);
  for (double n : n_values) t.rows.push_back({0.0, n, gaussian_gittins_bonus(n, tau, gamma, horizon, cfg)});
  validate(t);
  return t;
}

IndexTable build_exponential_table(double gamma, std::optional<std::int64_t> horizon,
                                   const std::vector<double>& n_values, const GittinsConfig& cfg) {
  if (n_values.empty()) throw ConfigError("Exponential factor grid is empty");
  auto t = skeleton(IndexKind::ExponentialFactor, RewardFamily::exponential(), gamma, horizon, cfg);
  t.grid = list_grid("n-values", n_values);
  for (double n : n_values) t.rows.push_back({1.0, n, exponential_gittins_factor(n, gamma, horizon, cfg)});
  validate(t);
  return t;
}

}  // namespace kgb
