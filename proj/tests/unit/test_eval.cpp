#include "core/errors.hpp"
#include "eval/exact_vi.hpp"
#include "eval/simulate.hpp"

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <tuple>

using namespace kgb;

namespace {

RunConfig bern_cfg(std::vector<PolicyId> ps, std::size_t runs = 400) {
  RunConfig c;
  c.priors = {{1, 2}, {1, 2}, {2, 5}};
  c.gamma = 0.8;
  c.policies = std::move(ps);
  c.n_runs = runs;
  c.master_seed = 11;
  return c;
}

// Plain recursive Bellman oracle over the k=2 Bernoulli lattice, cut at
// `depth` pulls with the terminal value max mean / (1 - gamma).
struct BruteVi {
  double gamma;
  int depth;
  std::function<std::size_t(double, double, double, double)> policy;  // empty: optimal
  std::map<std::tuple<int, int, int, int>, double> memo;

  double value(ArmBelief a, ArmBelief b, int s1, int n1, int s2, int n2) {
    const auto key = std::make_tuple(s1, n1, s2, n2);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const double m1 = (a.sum + s1) / (a.n + n1), m2 = (b.sum + s2) / (b.n + n2);
    double v;
    if (n1 + n2 == depth) {
      v = std::max(m1, m2) / (1 - gamma);
    } else {
      const double q1 = m1 + gamma * (m1 * value(a, b, s1 + 1, n1 + 1, s2, n2) + (1 - m1) * value(a, b, s1, n1 + 1, s2, n2));
      const double q2 = m2 + gamma * (m2 * value(a, b, s1, n1, s2 + 1, n2 + 1) + (1 - m2) * value(a, b, s1, n1, s2, n2 + 1));
      if (!policy) v = std::max(q1, q2);
      else v = policy(a.sum + s1, a.n + n1, b.sum + s2, b.n + n2) == 0 ? q1 : q2;
    }
    memo[key] = v;
    return v;
  }
};

}  // namespace

TEST_CASE("simulation is independent of the thread count") {
  auto c = bern_cfg({PolicyId::Greedy, PolicyId::Kg, PolicyId::Thompson, PolicyId::Kgi});
  const auto one = simulate(c);
  c.threads = 3;
  const auto three = simulate(c);
  CHECK(one.returns == three.returns);
  CHECK(one.truth_fingerprint == three.truth_fingerprint);
  CHECK(one.mean == three.mean);
}

TEST_CASE("adding a policy leaves the others untouched") {
  const auto a = simulate(bern_cfg({PolicyId::Thompson}));
  const auto b = simulate(bern_cfg({PolicyId::Kg, PolicyId::Thompson}));
  CHECK(a.truth_fingerprint == b.truth_fingerprint);
  CHECK(a.returns[0] == b.returns[policy_slot(b, PolicyId::Thompson)]);
}

TEST_CASE("point-mass priors make every policy equal") {
  RunConfig c;
  c.family = RewardFamily::gaussian(1.0);
  c.priors = {{0.5e40, 1e40}, {0.5e40, 1e40}};
  c.gamma = 0.9;
  c.policies = {PolicyId::Greedy, PolicyId::Kg, PolicyId::Thompson, PolicyId::Kgi, PolicyId::Gibl};
  c.n_runs = 20;
  const auto r = simulate(c);
  for (std::size_t p = 1; p < r.policies.size(); ++p) CHECK(r.returns[p] == r.returns[0]);
  CHECK(percentage_lost(r, PolicyId::Kg, PolicyId::Greedy).value == 0.0);
}

TEST_CASE("one-step horizon") {
  RunConfig c;
  c.priors = {{1, 2}, {2, 3}};
  c.gamma = 0.0;
  c.horizon = 1;
  c.policies = {PolicyId::Greedy, PolicyId::Kg, PolicyId::Nkg, PolicyId::Pkg, PolicyId::Kgi};
  c.n_runs = 20000;
  const auto r = simulate(c);
  CHECK(r.steps == 1);
  for (std::size_t p = 1; p < r.policies.size(); ++p) CHECK(r.returns[p] == r.returns[0]);
  CHECK(std::abs(r.mean[0] - 2.0 / 3.0) < 4 * r.stderr_[0]);
}

TEST_CASE("loss metrics") {
  auto r = simulate(bern_cfg({PolicyId::Greedy, PolicyId::Kg}, 50));
  CHECK(percentage_lost(r, PolicyId::Kg, PolicyId::Kg).value == 0.0);
  CHECK(percentage_lost(r, PolicyId::Kg, PolicyId::Kg).stderr_ == 0.0);
  const double v = r.mean[policy_slot(r, PolicyId::Kg)];
  CHECK(percentage_lost(r, PolicyId::Kg, 2 * v).value == doctest::Approx(50.0).epsilon(1e-12));
  CHECK_THROWS_AS(percentage_lost(r, PolicyId::Kg, 0.0), DomainError);
  CHECK_THROWS_AS(policy_slot(r, PolicyId::Pkg), ConfigError);
}

TEST_CASE("run config validation") {
  auto c = bern_cfg({});
  CHECK_THROWS_AS(simulate(c), ConfigError);
  c = bern_cfg({PolicyId::Ckg});
  CHECK_THROWS_AS(simulate(c), ConfigError);
  c = bern_cfg({PolicyId::Kg});
  c.n_runs = 0;
  CHECK_THROWS_AS(simulate(c), ConfigError);
  c = bern_cfg({PolicyId::Kg});
  c.truncation_eps = 1.0;
  CHECK_THROWS_AS(simulate(c), ConfigError);
  c = bern_cfg({PolicyId::Kg});
  c.priors = {{1, 2}};
  CHECK_THROWS_AS(simulate(c), ConfigError);
}

TEST_CASE("exact evaluation matches a recursive oracle") {
  ExactConfig c;
  c.gamma = 0.85;
  c.prior1 = {1, 3};
  c.prior2 = {2, 3};
  c.depth = 9;
  const auto r = exact_value_bernoulli_k2(c, {PolicyId::Greedy, PolicyId::Kg});
  BruteVi opt{0.85, 9, {}, {}};
  CHECK(r.optimal == doctest::Approx(opt.value(c.prior1, c.prior2, 0, 0, 0, 0)).epsilon(1e-13));
  BruteVi greedy{0.85, 9, [](double s1, double n1, double s2, double n2) { return s1 / n1 >= s2 / n2 ? 0u : 1u; }, {}};
  CHECK(r.values[0] == doctest::Approx(greedy.value(c.prior1, c.prior2, 0, 0, 0, 0)).epsilon(1e-13));
  CHECK(r.values[1] <= r.optimal + 1e-12);
  CHECK(r.tail_bound == doctest::Approx(std::pow(0.85, 9) / 0.15));
}

TEST_CASE("exact evaluation edge cases") {
  ExactConfig c;
  c.gamma = 0.0;
  c.prior1 = {1, 2};
  c.prior2 = {2, 3};
  const auto r = exact_value_bernoulli_k2(c, {PolicyId::Greedy});
  CHECK(r.optimal == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r.values[0] == r.optimal);

  c.gamma = 0.9;
  c.memory_budget = 1 << 20;
  try {
    exact_value_bernoulli_k2(c, {PolicyId::Greedy});
    FAIL("expected a budget refusal");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("would fit") != std::string::npos);
  }
  c.memory_budget = 1ull << 30;
  CHECK_THROWS_AS(exact_value_bernoulli_k2(c, {PolicyId::Thompson}), ConfigError);
}

TEST_CASE("Bellman optimum dominates and threads agree") {
  ExactConfig c;
  c.gamma = 0.7;
  c.prior1 = {1, 2};
  c.prior2 = {1, 2};
  const std::vector<PolicyId> ps{PolicyId::Greedy, PolicyId::Kg, PolicyId::Nkg, PolicyId::Pkg, PolicyId::Kgi};
  const auto r = exact_value_bernoulli_k2(c, ps);
  for (double v : r.values) CHECK(v <= r.optimal + 1e-12);
  c.threads = 3;
  const auto r3 = exact_value_bernoulli_k2(c, ps);
  CHECK(r3.values == r.values);
  CHECK(r3.optimal == r.optimal);
}

TEST_CASE("simulated and exact greedy values agree") {
  ExactConfig e;
  e.gamma = 0.8;
  const auto ex = exact_value_bernoulli_k2(e, {PolicyId::Greedy, PolicyId::Kg});
  RunConfig c;
  c.priors = {{1, 2}, {1, 2}};
  c.gamma = 0.8;
  c.policies = {PolicyId::Greedy, PolicyId::Kg};
  c.n_runs = 20000;
  const auto r = simulate(c);
  for (std::size_t p = 0; p < 2; ++p) CHECK(std::abs(r.mean[p] - ex.values[p]) < 3 * r.stderr_[p]);
}
