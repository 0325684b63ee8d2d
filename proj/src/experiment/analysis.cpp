#include "experiment/analysis.hpp"

#include "core/errors.hpp"
#include "index/kgi.hpp"
#include "policy/horizon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace kgb {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string decisions_csv(const Witness& w) {
  std::string csv = "kind,policy,family,gamma,threshold,decision,label,chosen,arm,sum,n\n";
  for (std::size_t d = 0; d < w.decisions.size(); ++d) {
    const auto& dec = w.decisions[d];
    for (std::size_t a = 0; a < dec.state.arms.size(); ++a) {
      csv += std::string(witness_kind_name(w.kind)) + ',' + std::string(policy_name(w.policy)) + ',' +
             std::string(family_name(w.family.kind)) + ',' + fmt17(dec.state.horizon.gamma) + ',' +
             (std::isnan(w.threshold) ? std::string() : fmt17(w.threshold)) + ',' + std::to_string(d) + ',' +
             dec.label + ',' + std::to_string(dec.chosen) + ',' + std::to_string(a) + ',' +
             fmt17(dec.state.arms[a].sum) + ',' + fmt17(dec.state.arms[a].n) + '\n';
    }
  }
  return csv;
}

std::string describe_decisions(const Witness& w) {
  std::ostringstream out;
  for (const auto& d : w.decisions) {
    out << "  " << d.label << ": gamma " << fmt6(d.state.horizon.gamma) << ", arms";
    for (const auto& b : d.state.arms) out << " (" << fmt6(b.sum) << ", " << fmt6(b.n) << ")";
    out << " -> arm " << d.chosen + 1 << '\n';
  }
  return out.str();
}

}  // namespace

Report analyze_witness(const RewardFamily& fam, double gamma) {
  const Witness w = dominated_witness(fam, gamma);
  Report r;
  std::ostringstream out;
  out << "dominated-action witness for KG, family " << family_name(fam.kind) << ", gamma " << fmt6(gamma) << '\n';
  if (w.kind == WitnessKind::None) {
    out << "no witness: " << w.note << '\n';
  } else {
    out << "threshold gamma* = " << fmt17(w.threshold) << " (gamma*/(1-gamma*) = "
        << fmt17(w.threshold / (1.0 - w.threshold)) << ")\n";
    out << describe_decisions(w);
    out << "replay: " << (replay(w) ? "reproduced" : "NOT reproduced") << '\n';
    if (!w.note.empty()) out << w.note << '\n';
  }
  r.text = out.str();
  r.csv = decisions_csv(w);
  if (w.kind != WitnessKind::None) r.artifact = format_witness(w);
  return r;
}

Report analyze_rlb(const std::vector<PolicyId>& policies, double gamma, double tau, double n1,
                   const std::vector<double>& n2_values) {
  if (n2_values.empty()) throw ConfigError("n2 grid is empty");
  std::vector<PolicyId> ps = policies;
  if (std::find(ps.begin(), ps.end(), PolicyId::Gittins) == ps.end()) ps.push_back(PolicyId::Gittins);
  const RewardFamily fam = RewardFamily::gaussian(tau);
  PolicyEngine engine(std::make_shared<SharedIndexCaches>(fam, gamma, [] {
    GittinsConfig c;
    c.gaussian_table_ratio = 0.0;
    return c;
  }()));
  Report r;
  r.csv = "policy,gamma,tau,n1,n2,rlb\n";
  std::ostringstream out;
  out << "relative learning bonus R(n1, n2), gamma " << fmt6(gamma) << ", tau " << fmt6(tau) << ", n1 " << fmt6(n1)
      << ", mu1 = 0\n";
  out << "    n2";
  for (auto p : ps) {
    char col[32];
    std::snprintf(col, sizeof col, " %12s", std::string(policy_name(p)).c_str());
    out << col;
  }
  out << '\n';
  for (double n2 : n2_values) {
    char head[32];
    std::snprintf(head, sizeof head, "%6s", fmt6(n2).c_str());
    out << head;
    for (auto p : ps) {
      RlbQuery q;
      q.policy = p;
      q.n1 = n1;
      q.n2 = n2;
      q.gamma = gamma;
      q.tau = tau;
      const double sd = 1.0 / std::sqrt(std::min(n1, n2));
      q.lo = -5.0 * sd;
      q.hi = 5.0 * sd;
      const double v = rlb(q, engine);
      r.csv += std::string(policy_name(p)) + ',' + fmt17(gamma) + ',' + fmt17(tau) + ',' + fmt17(n1) + ',' +
               fmt17(n2) + ',' + fmt17(v) + '\n';
      char cell[32];
      std::snprintf(cell, sizeof cell, " %12.6f", v);
      out << cell;
    }
    out << '\n';
  }
  r.text = out.str();
  return r;
}

Report analyze_consistency(PolicyId p, double gamma, double tau, double resolution) {
  const Witness w = index_consistency_probe(p, gamma, tau, resolution);
  Report r;
  std::ostringstream out;
  out << "index-consistency probe for " << policy_name(p) << ", gamma " << fmt6(gamma) << ", tau " << fmt6(tau)
      << '\n';
  if (w.kind == WitnessKind::None) {
    out << "no violation found\n";
  } else {
    out << "violation found\n" << describe_decisions(w);
    out << "replay: " << (replay(w) ? "reproduced" : "NOT reproduced") << '\n';
  }
  if (!w.note.empty()) out << w.note << '\n';
  r.text = out.str();
  r.csv = decisions_csv(w);
  if (w.kind != WitnessKind::None) r.artifact = format_witness(w);
  return r;
}

Report analyze_over_exploration(PolicyId p, double gamma, const std::vector<double>& n_grid, double tau) {
  const auto rep = over_exploration_check(p, gamma, n_grid, tau);
  Report r;
  r.csv = "policy,gamma,tau,n1,n2,rlb_policy,rlb_gi,ok\n";
  std::ostringstream out;
  out << "over-exploration check 0 <= R_" << policy_name(p) << " <= R_gi, gamma " << fmt6(gamma) << ", tau "
      << fmt6(tau) << '\n';
  for (const auto& row : rep.rows) {
    r.csv += std::string(policy_name(p)) + ',' + fmt17(gamma) + ',' + fmt17(tau) + ',' + fmt17(row.n1) + ',' +
             fmt17(row.n2) + ',' + fmt17(row.rlb_policy) + ',' + fmt17(row.rlb_gi) + ',' +
             (row.ok ? "true" : "false") + '\n';
    char line[128];
    std::snprintf(line, sizeof line, "  n1 %-8s n2 %-8s R %10.6f  R_gi %10.6f  %s\n", fmt6(row.n1).c_str(),
                  fmt6(row.n2).c_str(), row.rlb_policy, row.rlb_gi, row.ok ? "ok" : "VIOLATION");
    out << line;
  }
  out << rep.violations << " violation(s) in " << rep.rows.size() << " pairs\n";
  r.text = out.str();
  return r;
}

Report analyze_closed_form(const std::vector<double>& gammas, std::int64_t n_max) {
  if (gammas.empty()) throw ConfigError("discount list is empty");
  if (n_max < 2) throw ConfigError("n-max must be at least 2");
  const RewardFamily fam = RewardFamily::bernoulli();
  Report r;
  r.csv = "gamma,sum,n,kgi_bisection,one_outcome_root,printed_closed_form,printed_minus_bisection\n";
  std::ostringstream out;
  out << "Bernoulli KGI: bisection against the one-outcome root and the printed closed form\n";
  for (double g : gammas) {
    const double H = horizon_multiplier(g, std::nullopt);
    double worst_root = 0.0, worst_printed = 0.0;
    std::size_t printed_off = 0, count = 0;
    for (std::int64_t n = 2; n <= n_max; ++n)
      for (std::int64_t s = 1; s < n; ++s) {
        const double sum = double(s), nn = double(n);
        const double bis = kgi_index({sum, nn}, fam, g, std::nullopt);
        const double mu = sum / nn, up = (sum + 1.0) / (nn + 1.0);
        const double root = (mu + H * mu * up) / (1.0 + H * mu);
        const double printed = kgi_closed_form_bernoulli(sum, nn, g, std::nullopt);
        worst_root = std::max(worst_root, std::abs(root - bis));
        worst_printed = std::max(worst_printed, std::abs(printed - bis));
        printed_off += std::abs(printed - bis) > 1e-8;
        ++count;
        r.csv += fmt17(g) + ',' + fmt17(sum) + ',' + fmt17(nn) + ',' + fmt17(bis) + ',' + fmt17(root) + ',' +
                 fmt17(printed) + ',' + fmt17(printed - bis) + '\n';
      }
    out << "gamma " << fmt6(g) << " (H " << fmt6(H) << "), " << count << " states: max |root - bisection| "
        << fmt6(worst_root) << ", max |printed - bisection| " << fmt6(worst_printed) << ", printed off by > 1e-8 in "
        << printed_off << " states\n";
  }
  const double g = 0.5;
  out << "example (sum 1, n 2, gamma 0.5, H 1): bisection " << fmt17(kgi_index({1, 2}, fam, g, std::nullopt))
      << ", one-outcome root 5/9 = " << fmt17(5.0 / 9.0) << ", printed "
      << fmt17(kgi_closed_form_bernoulli(1, 2, g, std::nullopt)) << '\n';
  r.text = out.str();
  return r;
}

}  // namespace kgb
