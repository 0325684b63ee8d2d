#include "belief/belief.hpp"
#include "core/errors.hpp"
#include "core/numerics.hpp"

#include "doctest.h"

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <random>
#include <vector>

using namespace kgb;

namespace {

// Mean and standard error of a sample, computed independently of the library.
struct Moments {
  double mean;
  double se;
  double var;
};

Moments moments(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  v /= static_cast<double>(xs.size() - 1);
  return {m, std::sqrt(v / static_cast<double>(xs.size())), v};
}

// Monte-Carlo oracle for E[(mu+ - lambda)+]: draw theta from the prior, y from
// theta, and apply the conjugate update by hand.
Moments mc_excess(const ArmBelief& b, const RewardFamily& fam, double lambda, int draws, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(draws));
  for (int i = 0; i < draws; ++i) {
    double y = 0.0, mu_next = 0.0;
    if (fam.kind == Family::Exponential) {
      std::gamma_distribution<double> g(b.n + 1.0, 1.0 / b.sum);
      std::exponential_distribution<double> e(g(gen));
      y = e(gen);
      mu_next = (b.sum + y) / (b.n + 1.0);
    } else {
      std::normal_distribution<double> th(b.sum / b.n, 1.0 / std::sqrt(b.n));
      std::normal_distribution<double> obs(th(gen), 1.0 / std::sqrt(fam.tau));
      y = obs(gen);
      mu_next = (b.sum + fam.tau * y) / (b.n + fam.tau);
    }
    xs.push_back(std::max(mu_next - lambda, 0.0));
  }
  return moments(xs);
}

}  // namespace

TEST_CASE("posterior update follows the conjugate rules") {
  CHECK(posterior_update({1, 2}, 1.0, RewardFamily::bernoulli()) == ArmBelief{2, 3});
  CHECK(posterior_update({0, 1}, 0.0, RewardFamily::gaussian(1.0)) == ArmBelief{0, 2});
  CHECK(posterior_update({2, 3}, 0.5, RewardFamily::exponential()) == ArmBelief{2.5, 4});
  CHECK(posterior_update({1, 2}, 0.5, RewardFamily::gaussian(4.0)) == ArmBelief{3, 6});
  CHECK(predictive_mean(posterior_update({0, 1}, 0.0, RewardFamily::gaussian(1.0))) == 0.0);
}

TEST_CASE("posterior update rejects observations outside the support") {
  CHECK_THROWS_AS(posterior_update({1, 2}, 0.5, RewardFamily::bernoulli()), DomainError);
  CHECK_THROWS_AS(posterior_update({1, 2}, -1.0, RewardFamily::exponential()), DomainError);
  CHECK_THROWS_AS(posterior_update({1, 2}, NAN, RewardFamily::gaussian(1.0)), DomainError);
}

TEST_CASE("belief validation") {
  CHECK_THROWS_AS(make_belief(0.0, 2.0, RewardFamily::bernoulli()), DomainError);
  CHECK_THROWS_AS(make_belief(2.0, 2.0, RewardFamily::bernoulli()), DomainError);
  CHECK_THROWS_AS(make_belief(0.0, 2.0, RewardFamily::exponential()), DomainError);
  CHECK_THROWS_AS(make_belief(1.0, 0.0, RewardFamily::gaussian(1.0)), DomainError);
  CHECK_THROWS_AS(RewardFamily::gaussian(0.0), DomainError);
  CHECK_NOTHROW(make_belief(-3.0, 0.5, RewardFamily::gaussian(2.0)));
}

TEST_CASE("posterior update preserves invariants on fuzzed inputs") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20000; ++i) {
    const double n = 0.01 + 50.0 * u(gen);
    const ArmBelief bb{n * (0.001 + 0.998 * u(gen)), n};
    CHECK_NOTHROW(validate(posterior_update(bb, u(gen) < 0.5 ? 0.0 : 1.0, RewardFamily::bernoulli()),
                           RewardFamily::bernoulli()));
    const ArmBelief be{1e-3 + 20.0 * u(gen), n};
    CHECK_NOTHROW(validate(posterior_update(be, 10.0 * u(gen), RewardFamily::exponential()),
                           RewardFamily::exponential()));
  }
}

TEST_CASE("predictive mean") {
  CHECK(predictive_mean({1, 2}) == 0.5);
  CHECK(predictive_mean({1, 3}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(predictive_mean({0, 4}) == 0.0);
}

TEST_CASE("martingale property of the predictive mean") {
  // Bernoulli, exactly by enumeration.
  for (ArmBelief b : {ArmBelief{1, 2}, ArmBelief{3, 7}, ArmBelief{0.4, 9.5}}) {
    const double p = b.mean();
    const double after = p * posterior_update(b, 1.0, RewardFamily::bernoulli()).mean() +
                         (1 - p) * posterior_update(b, 0.0, RewardFamily::bernoulli()).mean();
    CHECK(after == doctest::Approx(p).epsilon(1e-14));
  }
  // Exponential, by quadrature over the Gamma-Exponential predictive.
  const ArmBelief b{2.0, 3.0};
  auto density = [&](double y) {
    return (b.n + 1.0) * std::pow(b.sum, b.n + 1.0) * std::pow(b.sum + y, -(b.n + 2.0));
  };
  const double e = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double y) { return density(y) * (b.sum + y) / (b.n + 1.0); }, 0.0,
      std::numeric_limits<double>::infinity(), 15, 1e-12);
  CHECK(e == doctest::Approx(b.mean()).epsilon(1e-9));
}

TEST_CASE("truth sampling matches the prior moments") {
  Rng rng(11);
  const int N = 400000;
  std::vector<double> xs(N);
  for (auto& x : xs) x = sample_truth({1, 2}, RewardFamily::bernoulli(), rng).theta;
  auto m = moments(xs);
  CHECK(std::abs(m.mean - 0.5) < 3.0 * m.se);

  for (auto& x : xs) x = true_mean(sample_truth({2, 3}, RewardFamily::exponential(), rng));
  m = moments(xs);
  CHECK(std::abs(m.mean - 2.0 / 3.0) < 3.0 * m.se);

  for (auto& x : xs) x = sample_truth({0, 4}, RewardFamily::gaussian(1.0), rng).theta;
  m = moments(xs);
  // Var of the sample variance for a normal sample is 2 sigma^4 / (N - 1).
  CHECK(std::abs(m.var - 0.25) < 3.0 * std::sqrt(2.0 * 0.0625 / (N - 1)));
}

TEST_CASE("reward sampling") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) CHECK(sample_reward({1.0, RewardFamily::bernoulli()}, rng) == 1.0);
  const int N = 400000;
  std::vector<double> xs(N);
  for (auto& x : xs) x = sample_reward({2.0, RewardFamily::exponential()}, rng);
  auto m = moments(xs);
  CHECK(std::abs(m.mean - 0.5) < 3.0 * m.se);
  for (auto& x : xs) x = sample_reward({0.0, RewardFamily::gaussian(4.0)}, rng);
  m = moments(xs);
  CHECK(std::abs(m.var - 0.25) < 3.0 * std::sqrt(2.0 * 0.0625 / (N - 1)));
}

TEST_CASE("true mean") {
  CHECK(true_mean({0.3, RewardFamily::bernoulli()}) == 0.3);
  CHECK(true_mean({4.0, RewardFamily::exponential()}) == 0.25);
  CHECK(true_mean({-1.2, RewardFamily::gaussian(1.0)}) == -1.2);
}

TEST_CASE("excess expectation, worked values") {
  const auto bern = RewardFamily::bernoulli();
  CHECK(excess_expectation({1, 3}, bern, 0.25) == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  CHECK(excess_expectation({1, 3}, bern, 0.5) == 0.0);
  CHECK(excess_expectation({1, 3}, bern, 7.0) == 0.0);
  CHECK(excess_expectation({0, 1}, RewardFamily::gaussian(1.0), 0.0) ==
        doctest::Approx(std::sqrt(0.5) * 0.3989422804014327).epsilon(1e-13));
  CHECK_THROWS_AS(excess_expectation({1, 3}, bern, INFINITY), DomainError);
}

TEST_CASE("Gaussian excess matches a Monte-Carlo oracle") {
  const auto m = mc_excess({0, 1}, RewardFamily::gaussian(1.0), 0.0, 1000000, 99);
  CHECK(std::abs(m.mean - excess_expectation({0, 1}, RewardFamily::gaussian(1.0), 0.0)) < 3.0 * m.se);
  const auto m2 = mc_excess({1.5, 2.5}, RewardFamily::gaussian(3.0), 0.9, 1000000, 98);
  CHECK(std::abs(m2.mean - excess_expectation({1.5, 2.5}, RewardFamily::gaussian(3.0), 0.9)) < 3.0 * m2.se);
}

TEST_CASE("Exponential excess matches Monte-Carlo and quadrature oracles") {
  const auto fam = RewardFamily::exponential();
  for (auto [b, lambda] : {std::pair{ArmBelief{2, 3}, 0.7}, std::pair{ArmBelief{3, 1}, 2.0},
                           std::pair{ArmBelief{1, 2}, 0.2}, std::pair{ArmBelief{5, 10}, 0.9}}) {
    const double got = excess_expectation(b, fam, lambda);
    const auto m = mc_excess(b, fam, lambda, 1000000, 1234);
    CHECK(std::abs(m.mean - got) < 3.0 * m.se);
    // Predictive by integrating the Gamma prior against the exponential likelihood.
    const boost::math::gamma_distribution<double> prior(b.n + 1.0, 1.0 / b.sum);
    auto predictive = [&](double y) {
      return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          [&](double th) { return boost::math::pdf(prior, th) * th * std::exp(-th * y); }, 0.0,
          std::numeric_limits<double>::infinity(), 12, 1e-13);
    };
    const double quad = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double y) { return predictive(y) * std::max((b.sum + y) / (b.n + 1.0) - lambda, 0.0); },
        0.0, std::numeric_limits<double>::infinity(), 10, 1e-11);
    CHECK(got == doctest::Approx(quad).epsilon(1e-8));
  }
}

TEST_CASE("excess expectation is non-increasing and convex in the threshold") {
  for (auto fam : {RewardFamily::bernoulli(), RewardFamily::exponential(), RewardFamily::gaussian(0.5)}) {
    const ArmBelief b{1.3, 4.0};
    double prev = INFINITY, prev_slope = -INFINITY;
    const double h = 0.01;
    for (double l = -1.0; l <= 2.0; l += h) {
      const double v = excess_expectation(b, fam, l);
      CHECK(v <= prev + 1e-15);
      const double slope = (excess_expectation(b, fam, l + h) - v) / h;
      CHECK(slope >= prev_slope - 1e-9);
      prev = v;
      prev_slope = slope;
    }
    CHECK(excess_expectation(b, fam, 1e6) == doctest::Approx(0.0));
  }
  const ArmBelief b{1, 3};
  CHECK(excess_expectation(b, RewardFamily::bernoulli(), 2.0 / 4.0) == 0.0);
}

TEST_CASE("Gaussian excess symmetry") {
  const auto fam = RewardFamily::gaussian(2.0);
  const ArmBelief b{0.7, 1.9};
  for (double d = 0.0; d < 4.0; d += 0.125) {
    const double diff = excess_expectation(b, fam, b.mean() - d) - excess_expectation(b, fam, b.mean() + d);
    CHECK(diff == doctest::Approx(d).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("shortfall equals excess minus mean gap") {
  for (auto fam : {RewardFamily::bernoulli(), RewardFamily::exponential(), RewardFamily::gaussian(0.5)}) {
    const ArmBelief b{1.3, 4.0};
    for (double l = -0.5; l < 1.5; l += 0.05) {
      const double lhs = shortfall_expectation(b, fam, l);
      const double rhs = excess_expectation(b, fam, l) - (b.mean() - l);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("family names round-trip") {
  for (auto f : {Family::Bernoulli, Family::Exponential, Family::Gaussian}) CHECK(parse_family(family_name(f)) == f);
  CHECK_THROWS_AS(parse_family("poisson"), ConfigError);
}
