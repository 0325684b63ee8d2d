#include "correlated/mv_belief.hpp"

#include "core/errors.hpp"
#include "core/numerics.hpp"
#include "policy/horizon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace kgb {

namespace {

constexpr double kMinInnovationVariance = 1e-14;

}  // namespace

void validate(const MvBelief& b) {
  const auto k = b.mean.size();
  if (k < 1) throw DomainError("correlated belief has no arms");
  if (b.cov.rows() != k || b.cov.cols() != k) throw DomainError("covariance shape does not match the mean");
  if (!(b.tau > 0.0) || !std::isfinite(b.tau)) throw DomainError("observation precision must be positive");
  if (!b.mean.allFinite() || !b.cov.allFinite()) throw DomainError("correlated belief holds non-finite values");
  for (Eigen::Index i = 0; i < k; ++i) {
    if (b.cov(i, i) < 0.0) throw DomainError("covariance diagonal is negative");
    for (Eigen::Index j = 0; j < i; ++j) {
      const double scale = std::max({1.0, std::abs(b.cov(i, j)), std::abs(b.cov(j, i))});
      if (std::abs(b.cov(i, j) - b.cov(j, i)) > 1e-12 * scale) throw DomainError("covariance is not symmetric");
    }
  }
}

Eigen::MatrixXd power_exp_covariance(std::size_t k, double decay) {
  if (k < 2) throw DomainError("power-exponential covariance needs k >= 2");
  if (!(decay > 0.0)) throw DomainError("correlation decay must be positive");
  Eigen::MatrixXd c(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const double d = static_cast<double>(i) - static_cast<double>(j);
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::exp(-decay * d * d);
    }
  return c;
}

MvBelief mv_update(const MvBelief& b, std::size_t a, double y) {
  validate(b);
  if (a >= b.size()) throw DomainError("arm index out of range");
  if (!std::isfinite(y)) throw DomainError("observation must be finite");
  const auto ia = static_cast<Eigen::Index>(a);
  const Eigen::VectorXd v = b.cov.col(ia);
  const double d = 1.0 / b.tau + b.cov(ia, ia);
  if (!(d >= kMinInnovationVariance)) throw NumericError("innovation variance below floor", d);
  MvBelief out = b;
  out.mean += ((y - b.mean(ia)) / d) * v;
  out.cov -= (v * v.transpose()) / d;
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

double expected_max_gain(std::span<const double> intercept, std::span<const double> slope) {
  if (intercept.size() != slope.size()) throw DomainError("line arrays differ in length");
  const std::size_t m = intercept.size();
  if (m == 0) throw DomainError("no lines");
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (slope[i] != slope[j]) return slope[i] < slope[j];
    return intercept[i] < intercept[j];
  });
  // Equal slopes: only the larger intercept can reach the envelope.
  std::vector<std::size_t> lines;
  for (std::size_t t = 0; t < m; ++t) {
    const std::size_t i = order[t];
    if (t + 1 < m && slope[order[t + 1]] == slope[i]) continue;
    lines.push_back(i);
  }
  std::vector<std::size_t> env;
  std::vector<double> cross;
  for (std::size_t i : lines) {
    double c = -std::numeric_limits<double>::infinity();
    while (!env.empty()) {
      const std::size_t j = env.back();
      c = (intercept[j] - intercept[i]) / (slope[i] - slope[j]);
      if (env.size() > 1 && c <= cross.back()) {
        env.pop_back();
        cross.pop_back();
        continue;
      }
      break;
    }
    if (env.empty()) c = -std::numeric_limits<double>::infinity();
    env.push_back(i);
    cross.push_back(c);
  }
  double gain = 0.0;
  for (std::size_t t = 1; t < env.size(); ++t)
    gain += (slope[env[t]] - slope[env[t - 1]]) * normal_loss(-std::abs(cross[t]));
  return gain;
}

double ckg_score(const MvBelief& b, std::size_t a) {
  validate(b);
  if (a >= b.size()) throw DomainError("arm index out of range");
  const auto ia = static_cast<Eigen::Index>(a);
  const double d = 1.0 / b.tau + b.cov(ia, ia);
  if (!(d >= kMinInnovationVariance)) throw NumericError("innovation variance below floor", d);
  const Eigen::VectorXd s = b.cov.col(ia) / std::sqrt(d);
  return expected_max_gain(std::span<const double>(b.mean.data(), b.size()),
                           std::span<const double>(s.data(), b.size()));
}

PolicyScore ckg_action(const MvBelief& b, double multiplier) {
  validate(b);
  PolicyScore out;
  out.multiplier = multiplier;
  const std::size_t k = b.size();
  out.mean.resize(k);
  out.learning.resize(k);
  out.combined.resize(k);
  for (std::size_t a = 0; a < k; ++a) {
    out.mean[a] = b.mean(static_cast<Eigen::Index>(a));
    out.learning[a] = ckg_score(b, a);
    out.combined[a] = out.mean[a] + multiplier * out.learning[a];
  }
  out.chosen = argmax_lowest(out.combined);
  return out;
}

InfoState marginal_state(const MvBelief& b, const HorizonSpec& h) {
  validate(b);
  InfoState s{{}, RewardFamily::gaussian(b.tau), h};
  for (std::size_t a = 0; a < b.size(); ++a) {
    const auto ia = static_cast<Eigen::Index>(a);
    const double var = b.cov(ia, ia);
    if (!(var > 0.0)) throw NumericError("marginal variance is not positive", var);
    const double n = 1.0 / var;
    s.arms.push_back({b.mean(ia) * n, n});
  }
  return s;
}

PolicyScore ikg_action(const MvBelief& b, const HorizonSpec& h) { return kg_action(marginal_state(b, h)); }

double standard_normal(Rng& rng) {
  // Box-Muller on two fresh uniforms; no cached second value.
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::VectorXd sample_truth_mv(const MvBelief& b, Rng& rng) {
  validate(b);
  const auto k = static_cast<Eigen::Index>(b.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.cov);
  if (es.info() != Eigen::Success) throw NumericError("covariance factorization failed", 0.0);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  Eigen::VectorXd root(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double ev = es.eigenvalues()(i);
    if (ev < -1e-10 * scale) throw NumericError("covariance is not positive semi-definite", ev);
    root(i) = std::sqrt(std::max(ev, 0.0));
  }
  Eigen::VectorXd z(k);
  for (Eigen::Index i = 0; i < k; ++i) z(i) = standard_normal(rng);
  if (root.isZero(0.0)) return b.mean;
  return b.mean + es.eigenvectors() * root.cwiseProduct(z);
}

}  // namespace kgb
