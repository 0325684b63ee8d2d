#include "dominance/lab.hpp"

#include "core/errors.hpp"
#include "dominance/relation.hpp"
#include "policy/horizon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <sstream>

namespace kgb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_num(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw IoError("witness: '" + s + "' is not a number");
  }
  if (used != s.size()) throw IoError("witness: '" + s + "' is not a number");
  return v;
}

std::shared_ptr<SharedIndexCaches> exact_caches(const RewardFamily& fam, double gamma) {
  GittinsConfig cfg;
  cfg.gaussian_table_ratio = 0.0;
  return std::make_shared<SharedIndexCaches>(fam, gamma, cfg);
}

// Smallest gamma (to 1e-12) at which kg_action picks `target` on the beliefs.
double kg_gamma_threshold(const std::vector<ArmBelief>& arms, const RewardFamily& fam, std::size_t target) {
  auto picks = [&](double g) {
    return kg_action(InfoState{arms, fam, HorizonSpec::infinite(g)}).chosen == target;
  };
  double lo = 0.0, hi = 1.0 - 1e-12;
  if (picks(lo) || !picks(hi)) return kNaN;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (picks(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

RlbQuery query(PolicyId p, double n1, double n2, double gamma, double tau) {
  RlbQuery q;
  q.policy = p;
  q.n1 = n1;
  q.n2 = n2;
  q.gamma = gamma;
  q.tau = tau;
  return q;
}

}  // namespace

ZeroCondition kg_zero_condition(const InfoState& s, std::size_t a) {
  validate(s);
  if (a >= s.size()) throw DomainError("arm index out of range");
  const double c = best_other_mean(s, a);
  const ArmBelief& b = s.arms[a];
  if (b.mean() >= c) {
    if (!s.family.bounded_below()) return ZeroCondition::AlwaysPositive;
    return min_next_mean(b, s.family) >= c ? ZeroCondition::Zero : ZeroCondition::Positive;
  }
  if (!s.family.bounded_above()) return ZeroCondition::AlwaysPositive;
  return max_next_mean(b, s.family) <= c ? ZeroCondition::Zero : ZeroCondition::Positive;
}

std::string_view zero_condition_name(ZeroCondition z) noexcept {
  switch (z) {
    case ZeroCondition::Zero: return "zero";
    case ZeroCondition::Positive: return "positive";
    case ZeroCondition::AlwaysPositive: return "always-positive";
  }
  return "unknown";
}

std::string_view witness_kind_name(WitnessKind k) noexcept {
  switch (k) {
    case WitnessKind::DominatedAction: return "dominated-action";
    case WitnessKind::ConsistencyViolation: return "consistency-violation";
    case WitnessKind::None: return "none";
  }
  return "unknown";
}

bool replay(const Witness& w, PolicyEngine& engine) {
  if (is_stochastic(w.policy)) throw DomainError("stochastic policies cannot be replayed");
  Rng unused(0);
  for (const auto& d : w.decisions)
    if (engine.decide(w.policy, d.state, unused).chosen != d.chosen) return false;
  return true;
}

bool replay(const Witness& w) {
  PolicyEngine engine(w.policy == PolicyId::Gittins ? exact_caches(w.family, w.gamma) : nullptr);
  return replay(w, engine);
}

std::string format_witness(const Witness& w) {
  std::ostringstream out;
  out << "kgbandit-witness\n";
  out << "kind " << witness_kind_name(w.kind) << '\n';
  out << "policy " << policy_name(w.policy) << '\n';
  out << "family " << family_name(w.family.kind) << '\n';
  out << "tau " << fmt(w.family.tau) << '\n';
  out << "gamma " << fmt(w.gamma) << '\n';
  out << "threshold " << (std::isnan(w.threshold) ? std::string("none") : fmt(w.threshold)) << '\n';
  out << "note " << w.note << '\n';
  out << "decisions " << w.decisions.size() << '\n';
  for (const auto& d : w.decisions) {
    const auto& h = d.state.horizon;
    out << "decision " << d.label << " gamma " << fmt(h.gamma) << " horizon "
        << (h.horizon ? std::to_string(*h.horizon) : std::string("inf")) << " epoch " << h.epoch << " chosen "
        << d.chosen << " arms";
    for (const auto& b : d.state.arms) out << ' ' << fmt(b.sum) << ':' << fmt(b.n);
    out << '\n';
  }
  return out.str();
}

Witness parse_witness(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto field = [&](const std::string& key) {
    if (!std::getline(in, line) || line.rfind(key + " ", 0) != 0)
      throw IoError("witness: expected '" + key + "' line");
    return line.substr(key.size() + 1);
  };
  if (!std::getline(in, line) || line != "kgbandit-witness") throw IoError("witness: bad magic line");
  Witness w;
  const std::string kind = field("kind");
  if (kind == "dominated-action")
    w.kind = WitnessKind::DominatedAction;
  else if (kind == "consistency-violation")
    w.kind = WitnessKind::ConsistencyViolation;
  else if (kind == "none")
    w.kind = WitnessKind::None;
  else
    throw IoError("witness: unknown kind '" + kind + "'");
  try {
    w.policy = parse_policy(field("policy"));
    w.family.kind = parse_family(field("family"));
  } catch (const ConfigError& e) {
    throw IoError(std::string("witness: ") + e.what());
  }
  w.family.tau = parse_num(field("tau"));
  w.gamma = parse_num(field("gamma"));
  const std::string th = field("threshold");
  w.threshold = th == "none" ? kNaN : parse_num(th);
  w.note = field("note");
  const auto count = static_cast<std::size_t>(parse_num(field("decisions")));
  for (std::size_t i = 0; i < count; ++i) {
    std::istringstream ls(field("decision"));
    WitnessDecision d;
    std::string k_gamma, g, k_hor, hor, k_epoch, k_chosen, k_arms;
    std::int64_t epoch = 0;
    if (!(ls >> d.label >> k_gamma >> g >> k_hor >> hor >> k_epoch >> epoch >> k_chosen >> d.chosen >> k_arms) ||
        k_gamma != "gamma" || k_hor != "horizon" || k_epoch != "epoch" || k_chosen != "chosen" || k_arms != "arms")
      throw IoError("witness: malformed decision line");
    d.state.family = w.family;
    d.state.horizon.gamma = parse_num(g);
    if (hor != "inf") d.state.horizon.horizon = static_cast<std::int64_t>(parse_num(hor));
    d.state.horizon.epoch = epoch;
    std::string arm;
    while (ls >> arm) {
      const auto colon = arm.find(':');
      if (colon == std::string::npos) throw IoError("witness: malformed arm '" + arm + "'");
      d.state.arms.push_back({parse_num(arm.substr(0, colon)), parse_num(arm.substr(colon + 1))});
    }
    validate(d.state);
    w.decisions.push_back(std::move(d));
  }
  return w;
}

Witness dominated_witness(const RewardFamily& fam, double gamma) {
  (void)horizon_multiplier(gamma, std::nullopt);
  Witness w;
  w.policy = PolicyId::Kg;
  w.family = fam;
  w.gamma = gamma;
  w.threshold = kNaN;
  if (!fam.bounded_below()) {
    w.kind = WitnessKind::None;
    w.note = "no witness exists: the KG score of a Gaussian arm grows with its variance";
    return w;
  }
  std::vector<ArmBelief> arms;
  if (fam.bounded_above()) {
    const double lo = fam.min_support(), hi = fam.max_support();
    arms = {{hi + 2.0 * lo, 3.0}, {hi + 3.0 * lo, 4.0}};
  } else {
    // Arm 1 dominates arm 2 and no single reward moves its mean below arm 2's.
    // Among such states on a small grid keep the one with the lowest threshold.
    double best = 1.0;
    for (int n1 = 1; n1 <= 4; ++n1)
      for (int n2 = n1 + 1; n2 <= n1 + 4; ++n2)
        for (int s1 = 1; s1 <= 4; ++s1)
          for (int s2 = 1; s2 <= 10 * n2; ++s2) {
            const ArmBelief a{double(s1), double(n1)}, b{double(s2) / 10.0, double(n2)};
            if (!dominates(a, b) || min_next_mean(a, fam) < b.mean()) continue;
            const double t = kg_gamma_threshold({a, b}, fam, 1);
            if (t < best) {
              best = t;
              arms = {a, b};
            }
          }
    if (arms.empty()) throw InternalError("dominated witness search found no state");
  }
  const InfoState at{arms, fam, HorizonSpec::infinite(gamma)};
  if (!is_dominated(at.arms, 1) || kg_score(at, 0) != 0.0)
    throw InternalError("dominated witness construction is inconsistent");
  w.threshold = kg_gamma_threshold(arms, fam, 1);
  w.kind = WitnessKind::DominatedAction;
  w.decisions.push_back({"requested", at, kg_action(at).chosen});
  if (!std::isnan(w.threshold)) {
    const double above = w.threshold + 0.5 * (1.0 - w.threshold);
    const InfoState hi_state{arms, fam, HorizonSpec::infinite(above)};
    w.decisions.push_back({"above-threshold", hi_state, kg_action(hi_state).chosen});
    const InfoState lo_state{arms, fam, HorizonSpec::infinite(0.5 * w.threshold)};
    w.decisions.push_back({"below-threshold", lo_state, kg_action(lo_state).chosen});
  }
  w.note = gamma > w.threshold ? "KG selects the dominated arm 2 at the requested discount"
                               : "KG selects arm 1 at the requested discount; arm 2 beyond the threshold";
  if (!replay(w)) throw InternalError("dominated witness failed to replay");
  return w;
}

double rlb(const RlbQuery& q, PolicyEngine& engine) {
  if (is_stochastic(q.policy)) throw ConfigError("RLB is undefined for stochastic policies");
  if (!(q.n1 > 0.0) || !(q.n2 > 0.0)) throw DomainError("RLB precisions must be positive");
  const RewardFamily fam = RewardFamily::gaussian(q.tau);
  const double sd2 = 1.0 / std::sqrt(q.n2);
  double lo = q.lo.value_or(-5.0 * sd2);
  double hi = q.hi.value_or(5.0 * sd2);
  Rng unused(0);
  auto choice = [&](double dmu) {
    const InfoState s{{{0.0, q.n1}, {dmu * q.n2, q.n2}}, fam, HorizonSpec::infinite(q.gamma)};
    return engine.decide(q.policy, s, unused).chosen;
  };
  if (choice(lo) != 0 || choice(hi) != 1)
    throw MonotonicityError("RLB bracket endpoints do not pick arm 1 and arm 2 respectively");
  while (hi - lo > q.tol) {
    const double mid = 0.5 * (lo + hi);
    if (choice(mid) == 0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double rlb(const RlbQuery& q) {
  PolicyEngine engine(exact_caches(RewardFamily::gaussian(q.tau), q.gamma));
  return rlb(q, engine);
}

OverExplorationReport over_exploration_check(PolicyId p, double gamma, const std::vector<double>& n_grid, double tau) {
  PolicyEngine engine(exact_caches(RewardFamily::gaussian(tau), gamma));
  OverExplorationReport rep;
  rep.policy = p;
  rep.gamma = gamma;
  for (std::size_t i = 0; i < n_grid.size(); ++i)
    for (std::size_t j = 0; j < n_grid.size(); ++j) {
      if (!(n_grid[i] < n_grid[j])) continue;
      OverExplorationRow row;
      row.n1 = n_grid[i];
      row.n2 = n_grid[j];
      RlbQuery q = query(p, row.n1, row.n2, gamma, tau);
      // Bracket on the less informed arm so that over-exploring policies fit.
      const double sd = 1.0 / std::sqrt(std::min(row.n1, row.n2));
      q.lo = -5.0 * sd;
      q.hi = 5.0 * sd;
      row.rlb_policy = rlb(q, engine);
      q.policy = PolicyId::Gittins;
      row.rlb_gi = rlb(q, engine);
      const double slack = 2.0 * q.tol;
      row.ok = row.rlb_policy >= -slack && row.rlb_policy <= row.rlb_gi + slack;
      if (!row.ok) ++rep.violations;
      rep.rows.push_back(row);
    }
  return rep;
}

Witness index_consistency_probe(PolicyId p, double gamma, double tau, double resolution,
                                std::optional<double> mu2_hi) {
  if (!(resolution > 0.0)) throw DomainError("probe resolution must be positive");
  const RewardFamily fam = RewardFamily::gaussian(tau);
  PolicyEngine engine(exact_caches(fam, gamma));
  Witness w;
  w.policy = p;
  w.family = fam;
  w.gamma = gamma;
  const double r_pi = rlb(query(p, 1.0, 2.0, gamma, tau), engine);
  const double r_gi = rlb(query(PolicyId::Gittins, 1.0, 2.0, gamma, tau), engine);
  w.threshold = kNaN;
  w.note = "R_policy(1,2) = " + fmt(r_pi) + ", R_GI(1,2) = " + fmt(r_gi);
  const double hi = mu2_hi.value_or(r_pi);
  if (mu2_hi) w.note += ", mu2 < " + fmt(hi);
  Rng unused(0);
  auto gi = [&](const ArmBelief& b) { return engine.index(PolicyId::Gittins, b, fam, HorizonSpec::infinite(gamma)); };
  // A reward y adds tau * y to the sum statistic and tau to the precision.
  for (double mu2 = r_gi + resolution; mu2 < hi; mu2 += resolution) {
    const InfoState s0{{{0.0, 1.0}, {2.0 * mu2, 2.0}}, fam, HorizonSpec::infinite(gamma)};
    const auto first = engine.decide(p, s0, unused).chosen;
    if (first != 0) continue;
    for (double half_y = r_gi + resolution; half_y < mu2; half_y += resolution) {
      const double y = 2.0 * half_y;
      const ArmBelief after = posterior_update(s0.arms[0], y, fam);
      if (!(gi(after) > gi(s0.arms[0]))) continue;
      const InfoState s1{{after, s0.arms[1]}, fam, HorizonSpec::infinite(gamma)};
      if (engine.decide(p, s1, unused).chosen != 1) continue;
      w.kind = WitnessKind::ConsistencyViolation;
      w.decisions.push_back({"start", s0, 0});
      w.decisions.push_back({"after-y=" + fmt(y), s1, 1});
      w.note += "; arm 1 index rises from " + fmt(gi(s0.arms[0])) + " to " + fmt(gi(after)) +
                " yet the policy switches to arm 2";
      if (!replay(w, engine)) throw InternalError("consistency witness failed to replay");
      return w;
    }
  }
  w.kind = WitnessKind::None;
  w.note += "; no violation found";
  return w;
}

}  // namespace kgb
