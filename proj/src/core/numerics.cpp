#include "core/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <map>
#include <mutex>

namespace kgb {

double normal_loss(double z) noexcept {
  if (z >= 0.0) return z * normal_cdf(z) + normal_pdf(z);
  if (z > -10.0) {
    // phi(z) - |z| Phi(z); cancellation costs O(z^2) ulps here, which is fine.
    return normal_pdf(z) + z * normal_cdf(z);
  }
  // Asymptotic expansion: phi(z)/z^2 * (1 - 3/z^2 + 15/z^4 - 105/z^6 + 945/z^8).
  const double r = 1.0 / (z * z);
  const double series = 1.0 - r * (3.0 - r * (15.0 - r * (105.0 - r * 945.0)));
  return normal_pdf(z) * r * series;
}

namespace {

// Golub-Welsch on a symmetric tridiagonal Jacobi matrix.
QuadratureRule golub_welsch(const std::vector<double>& diag, const std::vector<double>& off) {
  const auto n = static_cast<Eigen::Index>(diag.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) J(i, i) = diag[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 1; i < n; ++i) {
    J(i, i - 1) = off[static_cast<std::size_t>(i - 1)];
    J(i - 1, i) = off[static_cast<std::size_t>(i - 1)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadratureRule rule;
  rule.nodes.resize(diag.size());
  rule.weights.resize(diag.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    rule.nodes[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[static_cast<std::size_t>(i)] = v0 * v0;
    total += v0 * v0;
  }
  for (auto& w : rule.weights) w /= total;
  return rule;
}

template <class Builder>
const QuadratureRule& cached_rule(std::map<std::size_t, QuadratureRule>& cache, std::mutex& m,
                                  std::size_t n, Builder build) {
  std::lock_guard lock(m);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build(n)).first;
  return it->second;
}

}  // namespace

const QuadratureRule& gauss_legendre_unit(std::size_t n) {
  static std::map<std::size_t, QuadratureRule> cache;
  static std::mutex m;
  return cached_rule(cache, m, n, [](std::size_t k) {
    std::vector<double> diag(k, 0.0), off(k > 0 ? k - 1 : 0);
    for (std::size_t i = 1; i < k; ++i) {
      const double j = static_cast<double>(i);
      off[i - 1] = j / std::sqrt(4.0 * j * j - 1.0);
    }
    auto rule = golub_welsch(diag, off);
    // Map [-1, 1] onto [0, 1]; weights already sum to one.
    for (auto& x : rule.nodes) x = 0.5 * (x + 1.0);
    return rule;
  });
}

SampleStats sample_stats(std::span<const double> xs) {
  SampleStats s;
  if (xs.empty()) return s;
  KahanSum sum;
  for (double x : xs) sum.add(x);
  s.mean = sum.value() / static_cast<double>(xs.size());
  if (xs.size() < 2) return s;
  KahanSum ss;
  for (double x : xs) ss.add((x - s.mean) * (x - s.mean));
  const double var = ss.value() / static_cast<double>(xs.size() - 1);
  s.stderr_ = std::sqrt(var / static_cast<double>(xs.size()));
  return s;
}

}  // namespace kgb
