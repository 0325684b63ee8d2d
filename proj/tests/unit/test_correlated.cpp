#include "core/errors.hpp"
#include "correlated/mv_belief.hpp"
#include "policy/horizon.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

using namespace kgb;

namespace {

MvBelief random_belief(std::mt19937_64& gen, std::size_t k) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd a(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) a(Eigen::Index(i), Eigen::Index(j)) = z(gen);
  MvBelief b;
  b.cov = a * a.transpose() / double(k) + 0.05 * Eigen::MatrixXd::Identity(Eigen::Index(k), Eigen::Index(k));
  b.mean = Eigen::VectorXd(Eigen::Index(k));
  for (std::size_t i = 0; i < k; ++i) b.mean(Eigen::Index(i)) = 0.5 * z(gen);
  b.tau = 0.5 + std::uniform_real_distribution<double>(0, 2)(gen);
  return b;
}

double simpson_max_gain(const std::vector<double>& a, const std::vector<double>& s) {
  const int M = 200000;
  const double L = 12.0, h = 2 * L / M;
  double base = a[0];
  for (double x : a) base = std::max(base, x);
  double acc = 0.0;
  for (int i = 0; i <= M; ++i) {
    const double z = -L + i * h;
    double m = a[0] + s[0] * z;
    for (std::size_t j = 1; j < a.size(); ++j) m = std::max(m, a[j] + s[j] * z);
    const double w = (i == 0 || i == M) ? 1 : (i % 2 ? 4 : 2);
    acc += w * m * std::exp(-0.5 * z * z) / std::sqrt(2 * std::numbers::pi);
  }
  return acc * h / 3 - base;
}

}  // namespace

TEST_CASE("power-exponential covariance") {
  const auto c = power_exp_covariance(6, 0.5);
  CHECK(c.isApprox(c.transpose(), 0.0));
  for (int i = 0; i < 6; ++i) CHECK(c(i, i) == 1.0);
  CHECK(c(0, 2) == doctest::Approx(std::exp(-2.0)));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  CHECK(es.eigenvalues().minCoeff() > -1e-12);
  CHECK_THROWS_AS(power_exp_covariance(1, 0.5), DomainError);
  CHECK_THROWS_AS(power_exp_covariance(3, 0.0), DomainError);
}

TEST_CASE("conditioning matches the information-form update") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto b = random_belief(gen, 4);
    const std::size_t a = std::size_t(trial % 4);
    const double y = 1.3 - 0.1 * trial;
    const auto u = mv_update(b, a, y);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(4);
    e(Eigen::Index(a)) = 1.0;
    const Eigen::MatrixXd P = b.cov.inverse();
    const Eigen::MatrixXd cov = (P + b.tau * e * e.transpose()).inverse();
    const Eigen::VectorXd mean = cov * (P * b.mean + b.tau * y * e);
    CHECK((u.cov - cov).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((u.mean - mean).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(u.cov.isApprox(u.cov.transpose(), 0.0));
    for (int i = 0; i < 4; ++i) CHECK(u.cov(i, i) <= b.cov(i, i) + 1e-15);
  }
}

TEST_CASE("belief validation") {
  MvBelief b{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2), 1.0};
  CHECK_NOTHROW(validate(b));
  b.cov(0, 1) = 0.3;
  CHECK_THROWS_AS(validate(b), DomainError);
  b.cov(1, 0) = 0.3;
  b.tau = 0.0;
  CHECK_THROWS_AS(validate(b), DomainError);
  b.tau = 1.0;
  CHECK_THROWS_AS(mv_update(b, 2, 0.0), DomainError);
}

TEST_CASE("expected max gain against quadrature") {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> a(1 + trial % 6), s(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = z(gen);
      s[i] = trial % 5 == 0 ? double(i % 2) : z(gen);
    }
    CHECK(expected_max_gain(a, s) == doctest::Approx(simpson_max_gain(a, s)).epsilon(1e-7).scale(1.0));
    CHECK(expected_max_gain(a, s) >= 0.0);
  }
}

TEST_CASE("diagonal CKG equals independent KG") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    MvBelief b{Eigen::VectorXd(5), Eigen::MatrixXd::Zero(5, 5), u(gen)};
    for (int i = 0; i < 5; ++i) {
      b.mean(i) = u(gen) - 1.0;
      b.cov(i, i) = u(gen);
    }
    const auto s = marginal_state(b, HorizonSpec::infinite(0.9));
    for (std::size_t a = 0; a < 5; ++a) CHECK(std::abs(ckg_score(b, a) - kg_score(s, a)) < 1e-10);
    CHECK(ikg_action(b, HorizonSpec::infinite(0.9)).chosen ==
          ckg_action(b, horizon_multiplier(0.9, std::nullopt)).chosen);
  }
}

TEST_CASE("CKG against Monte Carlo") {
  std::mt19937_64 gen(4);
  Rng rng(77);
  for (int trial = 0; trial < 3; ++trial) {
    const auto b = random_belief(gen, 3);
    const double best = b.mean.maxCoeff();
    for (std::size_t a = 0; a < 3; ++a) {
      const auto ia = Eigen::Index(a);
      const double sd = std::sqrt(b.cov(ia, ia) + 1.0 / b.tau);
      const int N = 200000;
      double s = 0, s2 = 0;
      for (int i = 0; i < N; ++i) {
        const double y = b.mean(ia) + sd * standard_normal(rng);
        const double g = mv_update(b, a, y).mean.maxCoeff() - best;
        s += g;
        s2 += g * g;
      }
      const double m = s / N, se = std::sqrt((s2 / N - m * m) / N);
      CHECK(std::abs(ckg_score(b, a) - m) < 3.5 * se + 1e-12);
    }
  }
}

TEST_CASE("joint truth sampling") {
  MvBelief b{Eigen::VectorXd(3), power_exp_covariance(3, 0.3), 1.0};
  b.mean << 1.0, -0.5, 0.2;
  Rng rng(3);
  const int N = 40000;
  Eigen::VectorXd m = Eigen::VectorXd::Zero(3);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(3, 3);
  for (int i = 0; i < N; ++i) {
    const Eigen::VectorXd x = sample_truth_mv(b, rng) - b.mean;
    m += x;
    c += x * x.transpose();
  }
  m /= N;
  c /= N;
  CHECK(m.cwiseAbs().maxCoeff() < 0.03);
  CHECK((c - b.cov).cwiseAbs().maxCoeff() < 0.04);

  MvBelief point{b.mean, Eigen::MatrixXd::Zero(3, 3), 1.0};
  CHECK(sample_truth_mv(point, rng) == b.mean);
}
