#include "index/gittins.hpp"

#include "core/errors.hpp"
#include "core/numerics.hpp"
#include "policy/horizon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

namespace kgb {

std::int64_t stopping_depth(double gamma, std::optional<std::int64_t> remaining, double reward_scale,
                            const GittinsConfig& cfg) {
  std::int64_t depth;
  if (remaining) {
    if (*remaining < 1) throw DomainError("remaining horizon must be at least 1");
    depth = *remaining;
  } else {
    depth = truncation_horizon(gamma, cfg.truncation_eps, reward_scale);
  }
  if (depth > cfg.max_depth)
    throw DomainError("stopping problem depth " + std::to_string(depth) + " exceeds the configured maximum");
  return depth;
}

namespace {

// Sum of gamma^j for j < r pulls still to come at `level`; the value of
// keeping the arm forever per unit of (mean - charge).
struct KeepFactor {
  double gamma;
  std::optional<std::int64_t> remaining;

  double operator()(std::int64_t level) const {
    if (!remaining) return 1.0 / (1.0 - gamma);
    const double r = static_cast<double>(*remaining - level);
    if (r <= 0.0) return 0.0;
    if (gamma == 1.0) return r;
    if (gamma == 0.0) return 1.0;
    const double lg = std::log(gamma);
    return std::expm1(r * lg) / std::expm1(lg);
  }
};

// ---------------------------------------------------------------- Bernoulli

Continuation bernoulli_continuation(const ArmBelief& b, double gamma, std::optional<std::int64_t> remaining,
                                    double charge, const GittinsConfig& cfg) {
  const std::int64_t depth = stopping_depth(gamma, remaining, 1.0, cfg);
  const auto D = static_cast<std::size_t>(depth);
  // v[i]: value at the node with i successes among the d pulls so far.
  // w[i]: derivative of -v in the charge (discounted expected pulls).
  std::vector<double> v(D + 1, 0.0), w(D + 1, 0.0);
  if (!remaining) {
    const double denom = b.n + static_cast<double>(D);
    for (std::size_t i = 0; i <= D; ++i) {
      const double mu = (b.sum + static_cast<double>(i)) / denom;
      if (mu > charge) {
        v[i] = (mu - charge) / (1.0 - gamma);
        w[i] = 1.0 / (1.0 - gamma);
      }
    }
  }
  // A zero value below the terminal layer means retirement, so the mean there
  // is at most the charge; the nodes beneath two such successors retire too.
  // Each layer therefore starts one node below the previous retirement edge.
  std::size_t live = 0;
  if (!remaining)
    while (live <= D && v[live] == 0.0) ++live;
  for (std::size_t d = D - 1; d >= 1; --d) {
    const double denom = b.n + static_cast<double>(d);
    std::size_t next_live = d + 1;
    for (std::size_t i = live > 0 ? live - 1 : 0; i <= d; ++i) {
      const double p = (b.sum + static_cast<double>(i)) / denom;
      const double cont = p - charge + gamma * (p * v[i + 1] + (1.0 - p) * v[i]);
      if (cont > 0.0) {
        w[i] = 1.0 + gamma * (p * w[i + 1] + (1.0 - p) * w[i]);
        v[i] = cont;
        next_live = std::min(next_live, i);
      } else {
        v[i] = 0.0;
        w[i] = 0.0;
      }
    }
    live = next_live;
  }
  const double p = b.mean();
  Continuation c;
  if (D == 1 && remaining) {
    c.value = p - charge;
    c.slope = -1.0;
    return c;
  }
  c.value = p - charge + gamma * (p * v[1] + (1.0 - p) * v[0]);
  c.slope = -(1.0 + gamma * (p * w[1] + (1.0 - p) * w[0]));
  return c;
}

// `start` must not exceed the root.
double bernoulli_gittins(const ArmBelief& b, double gamma, std::optional<std::int64_t> remaining,
                         const GittinsConfig& cfg, double start) {
  // The continuation value is convex, decreasing and piecewise linear in the
  // charge, so Newton steps from the left increase monotonically to the root.
  double lambda = start;
  Continuation c = bernoulli_continuation(b, gamma, remaining, lambda, cfg);
  for (int it = 0; it < 500; ++it) {
    if (c.value <= cfg.value_tol) return lambda;
    const double next = lambda - c.value / c.slope;
    if (!(next > lambda)) return lambda;
    lambda = next;
    c = bernoulli_continuation(b, gamma, remaining, lambda, cfg);
  }
  throw NumericError("Gittins calibration did not converge", c.value);
}

// ------------------------------------------------------ Gaussian, Exponential

// Both retirement problems reduce to one scalar coordinate x with reward(x)
// and a transition x' = x + shift_d + scale_d * Z, where Z is standard normal
// (Gaussian mean, x = standardized mean - charge) or Exp(1) (Exponential,
// x = log(mean / charge)).
//
// g_d(x) = reward(x) + gamma E[V_{d+1}(x')] is smooth and is stored at the grid
// nodes; V_d = max(g_d, 0) is represented by the Catmull-Rom interpolant of g_d
// clipped at its root. Expectations integrate that interpolant exactly against
// the transition density, cell by cell, so the kink of V costs no accuracy.
// Above the grid the arm is never retired and V_d = reward * keep(d).
enum class Noise { Normal, Exponential };

// Catmull-Rom basis on a cell, as polynomial coefficients in w for the nodes
// c-1, c, c+1, c+2.
constexpr double kBasis[4][4] = {{0.0, -0.5, 1.0, -0.5},
                                 {1.0, 0.0, -2.5, 1.5},
                                 {0.0, 0.5, 2.0, -1.5},
                                 {0.0, 0.0, -0.5, 0.5}};

struct CellWeights {
  double w[4] = {0.0, 0.0, 0.0, 0.0};
};

class LatticeDp {
 public:
  LatticeDp(Noise noise, double base, double gamma, std::optional<std::int64_t> remaining, double lo, double hi,
            std::size_t points, const GittinsConfig& cfg)
      : noise_(noise), base_(base), gamma_(gamma), remaining_(remaining), keep_{gamma, remaining}, lo_(lo),
        g_count_(std::max<std::size_t>(points, 5)) {
    h_ = (hi - lo) / static_cast<double>(g_count_ - 1);
    hi_ = lo + h_ * static_cast<double>(g_count_ - 1);
    depth_ = stopping_depth(gamma, remaining, 1.0, cfg);
    g_.assign(g_count_ + 2, 0.0);
    // The last stored level keeps the arm for all remaining pulls.
    std::int64_t level = remaining_ ? depth_ - 1 : depth_;
    std::vector<double> next(g_count_);
    for (std::size_t j = 0; j < g_count_; ++j) next[j] = reward(node(static_cast<std::int64_t>(j))) * keep_(level);
    store(level, next);
    for (std::int64_t d = level - 1; d >= 1; --d) {
      const auto kernel = node_kernel(d);
      for (std::size_t j = 0; j < g_count_; ++j) {
        const auto jj = static_cast<std::int64_t>(j);
        next[j] = reward(node(jj)) + gamma_ * expect_at_node(d, jj, kernel);
      }
      store(d, next);
    }
  }

  // Continuation value at level 0.
  double continuation(double x) const {
    if (level_ < 1) return reward(x);
    return reward(x) + gamma_ * expect(0, x);
  }

  double grid_lo() const noexcept { return lo_; }

 private:
  struct Kernel {
    std::int64_t r_lo = 0;
    std::int64_t r_hi = -1;
    double delta = 0.0;
    double sigma = 0.0;
    std::vector<CellWeights> full;
  };

  double node(std::int64_t j) const { return lo_ + h_ * static_cast<double>(j); }

  double reward(double x) const { return noise_ == Noise::Normal ? x : std::expm1(x); }

  // Transition from level d to d + 1.
  std::pair<double, double> step(std::int64_t d) const {
    const double m = base_ + static_cast<double>(d);
    if (noise_ == Noise::Normal) return {0.0, 1.0 / std::sqrt(m * (m + 1.0))};
    return {std::log(m / (m + 1.0)), 1.0 / (m + 1.0)};
  }

  double gval(std::int64_t j) const { return g_[static_cast<std::size_t>(j + 1)]; }

  void store(std::int64_t level, const std::vector<double>& vals) {
    const auto G = static_cast<std::int64_t>(g_count_);
    for (std::size_t j = 0; j < g_count_; ++j) g_[j + 1] = vals[j];
    g_[0] = 2.0 * vals[0] - vals[1];
    g_[g_count_ + 1] = reward(node(G)) * keep_(level);
    std::int64_t c = G - 1;
    while (c >= 0 && gval(c) > 0.0) --c;
    if (c < 0) throw NumericError("retirement boundary lies below the grid", node(0));
    if (c >= G - 1) throw NumericError("retirement boundary lies above the grid", node(G - 1));
    root_cell_ = c;
    double a = 0.0, b = 1.0;
    for (int it = 0; it < 64; ++it) {
      const double mid = 0.5 * (a + b);
      if (cubic(c, mid) > 0.0)
        b = mid;
      else
        a = mid;
    }
    root_frac_ = b;
    level_ = level;
  }

  double cubic(std::int64_t c, double w) const {
    double v = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double* p = kBasis[k];
      v += gval(c - 1 + k) * (p[0] + w * (p[1] + w * (p[2] + w * p[3])));
    }
    return v;
  }

  // E[Z^0..3 restricted to w in [wa, wb]] with w = e + sigma * Z, in cell units.
  void moments(double e, double sigma, double wa, double wb, double m[4]) const {
    m[0] = m[1] = m[2] = m[3] = 0.0;
    double za = (wa - e) / sigma, zb = (wb - e) / sigma;
    if (noise_ == Noise::Normal) {
      za = std::max(za, -kNormalCut);
      zb = std::min(zb, kNormalCut);
    } else {
      za = std::max(za, 0.0);
      zb = std::min(zb, kExpCut);
    }
    if (!(zb > za)) return;
    const auto& rule = gauss_legendre_unit(16);
    const auto pieces = static_cast<int>(std::ceil(zb - za));
    const double width = (zb - za) / pieces;
    for (int p = 0; p < pieces; ++p) {
      const double z0 = za + width * p;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double z = z0 + width * rule.nodes[q];
        const double dens = noise_ == Noise::Normal ? normal_pdf(z) : std::exp(-z);
        const double wt = rule.weights[q] * width * dens;
        const double w = e + sigma * z;
        m[0] += wt;
        m[1] += wt * w;
        m[2] += wt * w * w;
        m[3] += wt * w * w * w;
      }
    }
  }

  CellWeights weights(double e, double sigma, double wa) const {
    double m[4];
    moments(e, sigma, wa, 1.0, m);
    CellWeights cw;
    for (int k = 0; k < 4; ++k)
      cw.w[k] = kBasis[k][0] * m[0] + kBasis[k][1] * m[1] + kBasis[k][2] * m[2] + kBasis[k][3] * m[3];
    return cw;
  }

  double apply(std::int64_t c, const CellWeights& cw) const {
    return cw.w[0] * gval(c - 1) + cw.w[1] * gval(c) + cw.w[2] * gval(c + 1) + cw.w[3] * gval(c + 2);
  }

  // Relative cell offsets reached from a node, in cell units.
  std::pair<std::int64_t, std::int64_t> reach(double delta, double sigma) const {
    const double lo = noise_ == Noise::Normal ? delta - kNormalCut * sigma : delta;
    const double hi = noise_ == Noise::Normal ? delta + kNormalCut * sigma : delta + kExpCut * sigma;
    const auto G = static_cast<double>(g_count_);
    return {static_cast<std::int64_t>(std::floor(std::max(lo, -G))) - 1,
            static_cast<std::int64_t>(std::ceil(std::min(hi, G)))};
  }

  Kernel node_kernel(std::int64_t d) const {
    const auto [shift, scale] = step(d);
    Kernel k;
    k.delta = shift / h_;
    k.sigma = scale / h_;
    std::tie(k.r_lo, k.r_hi) = reach(k.delta, k.sigma);
    k.full.reserve(static_cast<std::size_t>(k.r_hi - k.r_lo + 1));
    for (std::int64_t r = k.r_lo; r <= k.r_hi; ++r)
      k.full.push_back(weights(k.delta - static_cast<double>(r), k.sigma, 0.0));
    return k;
  }

  // E[reward(x') 1{x' > grid top}] given the current position x.
  double upper_tail(double x, double shift, double scale) const {
    if (noise_ == Noise::Normal) {
      const double mean = x + shift;
      const double a = (hi_ - mean) / scale;
      return mean * normal_cdf(-a) + scale * normal_pdf(a);
    }
    const double x0 = std::max(0.0, (hi_ - x - shift) / scale);
    return std::exp(x + shift - x0 * (1.0 - scale)) / (1.0 - scale) - std::exp(-x0);
  }

  double expect_at_node(std::int64_t d, std::int64_t j, const Kernel& k) const {
    const auto G = static_cast<std::int64_t>(g_count_);
    const std::int64_t c_lo = std::max(root_cell_ + 1, j + k.r_lo);
    const std::int64_t c_hi = std::min(G - 2, j + k.r_hi);
    double e = 0.0;
    for (std::int64_t c = c_lo; c <= c_hi; ++c) e += apply(c, k.full[static_cast<std::size_t>(c - j - k.r_lo)]);
    if (root_cell_ >= j + k.r_lo && root_cell_ <= j + k.r_hi)
      e += apply(root_cell_, weights(k.delta + static_cast<double>(j - root_cell_), k.sigma, root_frac_));
    const auto [shift, scale] = step(d);
    return e + keep_(d + 1) * upper_tail(node(j), shift, scale);
  }

  double expect(std::int64_t d, double x) const {
    const auto G = static_cast<std::int64_t>(g_count_);
    const auto [shift, scale] = step(d);
    const double p = (x - lo_ + shift) / h_;
    const double sigma = scale / h_;
    const auto [r_lo, r_hi] = reach(0.0, sigma);
    const auto base = static_cast<std::int64_t>(std::floor(std::clamp(p, -2.0 * static_cast<double>(G), 2.0 * static_cast<double>(G))));
    const std::int64_t c_lo = std::max(root_cell_, base + r_lo);
    const std::int64_t c_hi = std::min(G - 2, base + r_hi + 1);
    double e = 0.0;
    for (std::int64_t c = c_lo; c <= c_hi; ++c)
      e += apply(c, weights(p - static_cast<double>(c), sigma, c == root_cell_ ? root_frac_ : 0.0));
    return e + keep_(d + 1) * upper_tail(x, shift, scale);
  }

  static constexpr double kNormalCut = 12.0;
  static constexpr double kExpCut = 50.0;

  Noise noise_;
  double base_;
  double gamma_;
  std::optional<std::int64_t> remaining_;
  KeepFactor keep_;
  double lo_;
  double hi_ = 0.0;
  double h_ = 0.0;
  std::size_t g_count_;
  std::int64_t depth_ = 1;
  // Node values of the stored level with one virtual node on each side.
  std::vector<double> g_;
  std::int64_t level_ = 0;
  std::int64_t root_cell_ = 0;
  double root_frac_ = 0.0;
};

// Root of a continuation that is negative at lo and non-negative at 0.
template <class F>
double bisect_root(F&& f, double lo, double tol, const char* what) {
  const double c_lo = f(lo);
  if (!(c_lo < 0.0)) throw NumericError(std::string(what) + " calibration bracket does not contain the root", c_lo);
  double hi = 0.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) >= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return lo;
}

LatticeDp gaussian_dp(double m0, double gamma, std::optional<std::int64_t> remaining, const GittinsConfig& cfg) {
  const double half = cfg.gaussian_grid_halfwidth_sd / std::sqrt(m0);
  return LatticeDp(Noise::Normal, m0, gamma, remaining, -half, half, cfg.gaussian_grid_points, cfg);
}

LatticeDp exponential_dp(double n0, double gamma, std::optional<std::int64_t> remaining, const GittinsConfig& cfg) {
  const double half = cfg.exponential_grid_halfwidth_sd / std::sqrt(n0);
  return LatticeDp(Noise::Exponential, n0, gamma, remaining, std::max(cfg.exponential_log_mean_lo, -half),
                   std::min(cfg.exponential_log_mean_hi, half), cfg.exponential_grid_points, cfg);
}

// Bonus (index minus mean) of a unit-precision Gaussian arm of precision m0.
double gaussian_unit_bonus(double m0, double gamma, std::optional<std::int64_t> remaining, const GittinsConfig& cfg) {
  if (!(m0 > 0.0) || !std::isfinite(m0)) throw DomainError("Gaussian precision ratio must be positive");
  if (gamma == 0.0 || (remaining && *remaining == 1)) return 0.0;
  const auto dp = gaussian_dp(m0, gamma, remaining, cfg);
  const double tol = 1e-3 * cfg.lambda_tol * std::min(1.0, 1.0 / std::sqrt(m0));
  return -bisect_root([&](double x) { return dp.continuation(x); }, dp.grid_lo(), tol, "Gaussian");
}

// log(mean / index) at unit charge, i.e. the root u* of the continuation.
double exponential_root(double n0, double gamma, std::optional<std::int64_t> remaining, const GittinsConfig& cfg) {
  if (gamma == 0.0 || (remaining && *remaining == 1)) return 0.0;
  const auto dp = exponential_dp(n0, gamma, remaining, cfg);
  return bisect_root([&](double u) { return dp.continuation(u); }, dp.grid_lo(), 1e-3 * cfg.lambda_tol,
                     "Exponential");
}

void check_gamma(double gamma, std::optional<std::int64_t> remaining) {
  // Reuses the horizon validation (gamma in [0,1], gamma < 1 when infinite).
  (void)horizon_multiplier(gamma, remaining);
}

}  // namespace

Continuation gittins_continuation(const StoppingQuery& q, const GittinsConfig& cfg) {
  validate(q);
  const ArmBelief& b = q.belief;
  const double mu = b.mean();
  const KeepFactor keep{q.gamma, q.remaining};
  switch (q.family.kind) {
    case Family::Bernoulli:
      return bernoulli_continuation(b, q.gamma, q.remaining, q.charge, cfg);
    case Family::Gaussian: {
      const double rt = std::sqrt(q.family.tau);
      const double m = b.n / q.family.tau;
      if (q.gamma == 0.0 || (q.remaining && *q.remaining == 1)) return {mu - q.charge, -1.0};
      const auto dp = gaussian_dp(m, q.gamma, q.remaining, cfg);
      return {dp.continuation((mu - q.charge) * rt) / rt, std::numeric_limits<double>::quiet_NaN()};
    }
    case Family::Exponential: {
      if (q.charge <= 0.0) return {(mu - q.charge) * keep(0), -keep(0)};
      if (q.gamma == 0.0 || (q.remaining && *q.remaining == 1)) return {mu - q.charge, -1.0};
      const auto dp = exponential_dp(b.n, q.gamma, q.remaining, cfg);
      return {q.charge * dp.continuation(std::log(mu / q.charge)), std::numeric_limits<double>::quiet_NaN()};
    }
  }
  throw InternalError("unknown reward family");
}

double gittins_index(const ArmBelief& b, const RewardFamily& fam, double gamma, std::optional<std::int64_t> remaining,
                     const GittinsConfig& cfg) {
  validate(b, fam);
  check_gamma(gamma, remaining);
  switch (fam.kind) {
    case Family::Bernoulli:
      return bernoulli_gittins(b, gamma, remaining, cfg, b.mean());
    case Family::Gaussian:
      return b.mean() + gaussian_gittins_bonus(b.n, fam.tau, gamma, remaining, cfg);
    case Family::Exponential:
      return b.sum * exponential_gittins_factor(b.n, gamma, remaining, cfg);
  }
  throw InternalError("unknown reward family");
}

double gaussian_gittins_bonus(double n, double tau, double gamma, std::optional<std::int64_t> remaining,
                              const GittinsConfig& cfg) {
  if (!(n > 0.0) || !(tau > 0.0)) throw DomainError("Gaussian bonus needs n > 0 and tau > 0");
  check_gamma(gamma, remaining);
  return gaussian_unit_bonus(n / tau, gamma, remaining, cfg) / std::sqrt(tau);
}

double exponential_gittins_factor(double n, double gamma, std::optional<std::int64_t> remaining,
                                  const GittinsConfig& cfg) {
  if (!(n > 0.0)) throw DomainError("Exponential index needs n > 0");
  check_gamma(gamma, remaining);
  return std::exp(-exponential_root(n, gamma, remaining, cfg)) / n;
}

// ------------------------------------------------------------------ tables

GaussianBonusTable::GaussianBonusTable(double gamma, std::optional<std::int64_t> remaining, GittinsConfig cfg,
                                       double ratio)
    : gamma_(gamma), remaining_(remaining), cfg_(cfg), log_ratio_(std::log(ratio)) {
  check_gamma(gamma, remaining);
  if (!(ratio > 1.0)) throw DomainError("table ratio must exceed one");
}

double GaussianBonusTable::node_value(std::int64_t j) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = nodes_.find(j); it != nodes_.end()) return it->second;
  }
  const double v = gaussian_unit_bonus(std::exp(static_cast<double>(j) * log_ratio_), gamma_, remaining_, cfg_);
  std::lock_guard lock(mutex_);
  return nodes_.emplace(j, v).first->second;
}

double GaussianBonusTable::unit_bonus(double m) {
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("Gaussian precision ratio must be positive");
  const double pos = std::log(m) / log_ratio_;
  const auto j = static_cast<std::int64_t>(std::floor(pos));
  const double m_lo = std::exp(static_cast<double>(j) * log_ratio_);
  const double m_hi = std::exp(static_cast<double>(j + 1) * log_ratio_);
  const double lo = node_value(j);
  if (m == m_lo) return lo;
  const double hi = node_value(j + 1);
  const double w = (1.0 / m - 1.0 / m_hi) / (1.0 / m_lo - 1.0 / m_hi);
  return w * lo + (1.0 - w) * hi;
}

double GaussianBonusTable::bonus(double n, double tau) {
  if (!(tau > 0.0)) throw DomainError("observation precision must be positive");
  return unit_bonus(n / tau) / std::sqrt(tau);
}

std::size_t GaussianBonusTable::nodes_computed() const {
  std::lock_guard lock(mutex_);
  return nodes_.size();
}

GittinsCache::GittinsCache(RewardFamily fam, double gamma, std::optional<std::int64_t> remaining, GittinsConfig cfg)
    : fam_(fam), gamma_(gamma), remaining_(remaining), cfg_(cfg) {
  check_gamma(gamma, remaining);
  if (fam.kind == Family::Gaussian && cfg.gaussian_table_ratio > 0.0)
    gaussian_ = std::make_unique<GaussianBonusTable>(gamma, remaining, cfg, cfg.gaussian_table_ratio);
}

double GittinsCache::index(const ArmBelief& b) {
  validate(b, fam_);
  if (gaussian_) return b.mean() + gaussian_->bonus(b.n, fam_.tau);
  if (fam_.kind == Family::Gaussian) {
    const std::pair<double, double> key{0.0, b.n};
    {
      std::lock_guard lock(mutex_);
      if (auto it = values_.find(key); it != values_.end()) return b.mean() + it->second;
    }
    const double v = gaussian_gittins_bonus(b.n, fam_.tau, gamma_, remaining_, cfg_);
    std::lock_guard lock(mutex_);
    values_.emplace(key, v);
    return b.mean() + v;
  }
  const bool scale_free = fam_.kind == Family::Exponential;
  const std::pair<double, double> key{scale_free ? 0.0 : b.sum, b.n};
  {
    std::lock_guard lock(mutex_);
    if (auto it = values_.find(key); it != values_.end()) return scale_free ? b.sum * it->second : it->second;
  }
  const double v = scale_free ? exponential_gittins_factor(b.n, gamma_, remaining_, cfg_)
                              : bernoulli_gittins(b, gamma_, remaining_, cfg_, b.mean());
  {
    std::lock_guard lock(mutex_);
    values_.emplace(key, v);
  }
  return scale_free ? b.sum * v : v;
}

std::size_t GittinsCache::size() const {
  std::lock_guard lock(mutex_);
  return values_.size() + (gaussian_ ? gaussian_->nodes_computed() : 0);
}

namespace {

std::size_t lattice_slot(std::int64_t d, std::int64_t i) {
  return static_cast<std::size_t>(d) * static_cast<std::size_t>(d + 1) / 2 + static_cast<std::size_t>(i);
}

}  // namespace

BernoulliIndexBrackets::BernoulliIndexBrackets(const ArmBelief& origin, double gamma, std::int64_t max_depth,
                                               GittinsConfig cfg, std::size_t charges, unsigned threads)
    : origin_(origin), gamma_(gamma), cfg_(cfg), max_depth_(max_depth) {
  validate(origin, RewardFamily::bernoulli());
  check_gamma(gamma, std::nullopt);
  if (max_depth < 0) throw DomainError("bracket depth must be non-negative");
  if (charges < 1 || charges > (1u << 30)) throw DomainError("bracket grid needs between 1 and 2^30 charges");
  const std::int64_t tail = stopping_depth(gamma, std::nullopt, 1.0, cfg);
  const std::int64_t last = max_depth + tail;
  if (last > cfg.max_depth)
    throw DomainError("bracket lattice depth " + std::to_string(last) + " exceeds the configured maximum");
  // Every recorded state sees at least `tail` further layers, so its
  // continuation differs from the one gittins_index solves by less than
  // truncation_eps; the slope is at most -1 in the charge.
  margin_ = 2.0 * cfg.truncation_eps + 10.0 * cfg.lambda_tol;
  last_positive_.assign(lattice_slot(max_depth + 1, 0), 0);
  // Uniform in logit(charge) between half the smallest and beyond the largest
  // recorded mean, so near-ties are resolved relative to the mean and to one
  // minus the mean alike.
  const double far = origin.n + static_cast<double>(max_depth);
  const double lo_mean = 0.5 * origin.sum / far, hi_gap = 0.5 * (origin.n - origin.sum) / far;
  const double x_lo = std::log(lo_mean / (1.0 - lo_mean)), x_hi = std::log((1.0 - hi_gap) / hi_gap);
  grid_.resize(charges);
  for (std::size_t m = 0; m < charges; ++m) {
    const double x = x_lo + (x_hi - x_lo) * static_cast<double>(m) / static_cast<double>(charges - 1 + (charges == 1));
    grid_[m] = 1.0 / (1.0 + std::exp(-x));
  }

  // Records, per state, how many grid charges leave a positive continuation.
  auto pass = [&](std::size_t j, std::vector<double>& v, std::vector<std::int32_t>& best) {
    const double charge = grid_[j - 1];
    const auto L = static_cast<std::size_t>(last);
    const double terminal_n = origin.n + static_cast<double>(L);
    std::size_t live = L + 1;
    for (std::size_t i = 0; i <= L; ++i) {
      const double mu = (origin.sum + static_cast<double>(i)) / terminal_n;
      v[i] = mu > charge ? (mu - charge) / (1.0 - gamma) : 0.0;
      if (v[i] > 0.0) live = std::min(live, i);
    }
    for (std::size_t d = L; d-- > 0;) {
      const double denom = origin.n + static_cast<double>(d);
      const bool record = d <= static_cast<std::size_t>(max_depth);
      std::size_t next_live = d + 1;
      for (std::size_t i = live > 0 ? live - 1 : 0; i <= d; ++i) {
        const double p = (origin.sum + static_cast<double>(i)) / denom;
        const double cont = p - charge + gamma * (p * v[i + 1] + (1.0 - p) * v[i]);
        if (cont > 0.0) {
          v[i] = cont;
          next_live = std::min(next_live, i);
          if (record) {
            auto& slot = best[lattice_slot(static_cast<std::int64_t>(d), static_cast<std::int64_t>(i))];
            slot = std::max(slot, static_cast<std::int32_t>(j));
          }
        } else {
          v[i] = 0.0;
        }
      }
      live = next_live;
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(charges)));
  std::vector<std::vector<std::int32_t>> partial(workers);
  auto work = [&](unsigned w) {
    std::vector<double> v(static_cast<std::size_t>(last) + 2, 0.0);
    auto& best = w == 0 ? last_positive_ : partial[w];
    if (w > 0) best.assign(last_positive_.size(), 0);
    for (std::size_t j = 1 + w; j <= charges; j += workers) pass(j, v, best);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
    for (unsigned w = 1; w < workers; ++w)
      for (std::size_t s = 0; s < last_positive_.size(); ++s)
        last_positive_[s] = std::max(last_positive_[s], partial[w][s]);
  }
}

double BernoulliIndexBrackets::index(const ArmBelief& b) const {
  const auto br = bracket(b);
  if (!br) throw DomainError("state is off the bracket lattice");
  return bernoulli_gittins(b, gamma_, std::nullopt, cfg_, br->first);
}

std::optional<std::pair<double, double>> BernoulliIndexBrackets::bracket(const ArmBelief& b) const {
  const double dd = std::round(b.n - origin_.n), di = std::round(b.sum - origin_.sum);
  if (std::abs(b.n - origin_.n - dd) > 1e-9 || std::abs(b.sum - origin_.sum - di) > 1e-9) return std::nullopt;
  if (dd < 0.0 || di < 0.0 || di > dd || dd > static_cast<double>(max_depth_)) return std::nullopt;
  const auto m = static_cast<std::size_t>(
      last_positive_[lattice_slot(static_cast<std::int64_t>(dd), static_cast<std::int64_t>(di))]);
  const double lo = std::max(b.mean(), (m > 0 ? grid_[m - 1] : 0.0) - margin_);
  const double hi = std::min(1.0, (m < grid_.size() ? grid_[m] : 1.0) + margin_);
  return std::pair{lo, hi};
}

}  // namespace kgb
