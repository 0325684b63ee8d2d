#include "core/errors.hpp"
#include "core/numerics.hpp"
#include "dominance/lab.hpp"
#include "dominance/relation.hpp"
#include "index/gittins.hpp"
#include "policy/horizon.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace kgb;

TEST_CASE("policy names round-trip") {
  for (auto p : {PolicyId::Greedy, PolicyId::Kg, PolicyId::Nkg, PolicyId::Pkg, PolicyId::Thompson, PolicyId::Kgi,
                 PolicyId::Gittins, PolicyId::Gibl, PolicyId::Gicg, PolicyId::GiblFh, PolicyId::Ckg, PolicyId::Ikg})
    CHECK(parse_policy(policy_name(p)) == p);
  CHECK_THROWS_AS(parse_policy("kg2"), ConfigError);
  CHECK_THROWS_AS(parse_policy_list(""), ConfigError);
  const auto ps = parse_policy_list("kg,nkg,gi");
  CHECK(join_policy_names(ps) == "kg,nkg,gi");
}

TEST_CASE("engine index policies") {
  PolicyEngine e(std::make_shared<SharedIndexCaches>(RewardFamily::bernoulli(), 0.9));
  Rng rng(1);
  InfoState s{{{1, 2}, {3, 7}, {2, 4}}, RewardFamily::bernoulli(), HorizonSpec::infinite(0.9)};
  const auto gi = e.decide(PolicyId::Gittins, s, rng);
  for (std::size_t a = 0; a < 3; ++a)
    CHECK(gi.combined[a] == doctest::Approx(gittins_index(s.arms[a], s.family, 0.9, std::nullopt)).epsilon(1e-8));
  CHECK(gi.chosen == argmax_lowest(gi.combined));
  const auto last = HorizonSpec::finite(1.0, 10, 9);
  CHECK(e.index(PolicyId::GiblFh, {1, 4}, s.family, last) == 0.25);
  InfoState wrong = s;
  wrong.horizon = HorizonSpec::infinite(0.95);
  CHECK_THROWS(e.decide(PolicyId::Gittins, wrong, rng));
}

TEST_CASE("Bernoulli dominated-action witness") {
  const auto w = dominated_witness(RewardFamily::bernoulli(), 0.9);
  REQUIRE(w.kind == WitnessKind::DominatedAction);
  CHECK(std::abs(w.threshold - 5.0 / 6.0) < 1e-9);
  CHECK(w.decisions.front().state.arms == std::vector<ArmBelief>{{1, 3}, {1, 4}});
  CHECK(w.decisions.front().chosen == 1);
  CHECK(is_dominated(w.decisions.front().state.arms, 1));
  CHECK(replay(w));
  const auto text = format_witness(w);
  const auto back = parse_witness(text);
  CHECK(format_witness(back) == text);
  CHECK(replay(back));
  auto bad = back;
  bad.decisions.front().chosen = 0;
  CHECK_FALSE(replay(bad));
  CHECK_THROWS_AS(parse_witness("not a witness"), IoError);
}

TEST_CASE("other families") {
  const auto e = dominated_witness(RewardFamily::exponential(), 0.95);
  REQUIRE(e.kind == WitnessKind::DominatedAction);
  CHECK(e.threshold < 0.95);
  CHECK(replay(e));
  CHECK(dominated_witness(RewardFamily::gaussian(1.0), 0.9).kind == WitnessKind::None);
}

TEST_CASE("zero condition agrees with the KG score") {
  std::mt19937_64 gen(8);
  std::uniform_int_distribution<int> ui(1, 12);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  for (int i = 0; i < 3000; ++i) {
    const bool bern = i % 2 == 0;
    InfoState s{{}, bern ? RewardFamily::bernoulli() : RewardFamily::exponential(), HorizonSpec::infinite(0.9)};
    for (int a = 0; a < 3; ++a) {
      const double n = ui(gen) + 1;
      s.arms.push_back({bern ? double(ui(gen) % int(n - 1) + 1) : u(gen) * n, n});
    }
    for (std::size_t a = 0; a < 3; ++a)
      CHECK((kg_zero_condition(s, a) == ZeroCondition::Zero) == (kg_score(s, a) == 0.0));
  }
}

TEST_CASE("relative learning bonus for KG") {
  // Two-arm Gaussian KG in closed form; switch point by bisection.
  const double g = 0.95, H = g / (1 - g);
  const double sd1 = std::sqrt(1.0 - 1.0 / 2.0), sd2 = std::sqrt(0.5 - 1.0 / 3.0);
  auto f = [&](double d) {
    const double k1 = sd1 * normal_loss(-std::abs(d) / sd1), k2 = sd2 * normal_loss(-std::abs(d) / sd2);
    return d + H * k2 - H * k1;
  };
  double lo = -3, hi = 3;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? hi : lo) = mid;
  }
  RlbQuery q;
  q.policy = PolicyId::Kg;
  q.gamma = g;
  CHECK(rlb(q) == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-7));
}

TEST_CASE("KGI never over-explores relative to GI") {
  const auto rep = over_exploration_check(PolicyId::Kgi, 0.9, {1, 2, 5});
  CHECK(rep.rows.size() == 3);
  CHECK(rep.violations == 0);
}
