#include "index/gi_approx.hpp"

#include "core/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace kgb {

// Defined in the generated translation unit holding the data file.
extern const char* const kGiApproxCoefficientsText;

namespace {

double tail(double s, double log_const) {
  const double ls = std::log(s);
  return std::sqrt(std::max(2.0 * ls - std::log(ls) - std::log(log_const * std::numbers::pi), 0.0));
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("GI approximations need 0 < gamma < 1");
}

}  // namespace

GiApproxCoefficients parse_gi_approx_coefficients(std::string_view text) {
  GiApproxCoefficients c;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  bool have_format = false;
  auto fail = [&](const std::string& why) {
    throw ConfigError("coefficient file line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    auto read = [&](int count) {
      std::vector<double> v(static_cast<std::size_t>(count));
      for (auto& x : v)
        if (!(ls >> x)) fail("expected " + std::to_string(count) + " numbers after " + key);
      std::string extra;
      if (ls >> extra) fail("trailing token '" + extra + "'");
      return v;
    };
    if (key == "format") {
      if (read(1)[0] != 1.0) fail("unsupported format version");
      have_format = true;
    } else if (key == "brezzi_lai.small_upper") {
      c.bl_small_upper = read(1)[0];
    } else if (key == "brezzi_lai.piece") {
      auto v = read(3);
      const double prev = c.bl_pieces.empty() ? c.bl_small_upper : c.bl_pieces.back().upper;
      if (!(v[0] > prev)) fail("pieces must have increasing upper bounds");
      c.bl_pieces.push_back({v[0], v[1], v[2]});
    } else if (key == "brezzi_lai.tail_log_const") {
      c.bl_tail_log_const = read(1)[0];
    } else if (key == "chick_gans.small_upper") {
      c.cg_small_upper = read(1)[0];
    } else if (key == "chick_gans.mid_upper") {
      c.cg_mid_upper = read(1)[0];
    } else if (key == "chick_gans.mid_poly") {
      auto v = read(3);
      c.cg_c2 = v[0];
      c.cg_c1 = v[1];
      c.cg_c0 = v[2];
    } else if (key == "chick_gans.tail_log_const") {
      c.cg_tail_log_const = read(1)[0];
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (!have_format) throw ConfigError("coefficient file has no format line");
  if (!(c.bl_small_upper > 0.0) || c.bl_pieces.empty() || !(c.bl_tail_log_const > 0.0))
    throw ConfigError("incomplete Brezzi-Lai coefficients");
  if (!(c.cg_small_upper > 0.0) || !(c.cg_mid_upper > c.cg_small_upper) || !(c.cg_tail_log_const > 0.0))
    throw ConfigError("incomplete Chick-Gans coefficients");
  return c;
}

std::string_view gi_approx_coefficients_text() noexcept { return kGiApproxCoefficientsText; }

const GiApproxCoefficients& gi_approx_coefficients() {
  static const GiApproxCoefficients c = parse_gi_approx_coefficients(kGiApproxCoefficientsText);
  return c;
}

double brezzi_lai_psi(double s) {
  if (!(s >= 0.0)) throw DomainError("scaled variance must be non-negative");
  const auto& c = gi_approx_coefficients();
  if (s <= c.bl_small_upper) return std::sqrt(s / 2.0);
  for (const auto& p : c.bl_pieces)
    if (s <= p.upper) return p.a + p.b / std::sqrt(s);
  return tail(s, c.bl_tail_log_const);
}

double chick_gans_b(double s) {
  if (!(s >= 0.0)) throw DomainError("scaled variance must be non-negative");
  const auto& c = gi_approx_coefficients();
  if (s <= c.cg_small_upper) return s / std::numbers::sqrt2;
  if (s <= c.cg_mid_upper) {
    const double ls = std::log(s);
    return std::exp(c.cg_c2 * ls * ls + c.cg_c1 * ls + c.cg_c0);
  }
  return std::sqrt(s) * tail(s, c.cg_tail_log_const);
}

double gi_scaled_variance(double posterior_variance, double observation_variance, double gamma) {
  check_gamma(gamma);
  if (!(posterior_variance >= 0.0) || !(observation_variance > 0.0))
    throw DomainError("variances must be non-negative and the observation variance positive");
  return posterior_variance / (observation_variance * -std::log(gamma));
}

double gibl_index(double mu, double n, double tau, double gamma) {
  if (!(n > 0.0) || !(tau > 0.0)) throw DomainError("GIBL needs n > 0 and tau > 0");
  const double v = 1.0 / n;
  return mu + std::sqrt(v) * brezzi_lai_psi(gi_scaled_variance(v, 1.0 / tau, gamma));
}

double gicg_index(double mu, double n, double tau, double gamma) {
  if (!(n > 0.0) || !(tau > 0.0)) throw DomainError("GICG needs n > 0 and tau > 0");
  const double s = gi_scaled_variance(1.0 / n, 1.0 / tau, gamma);
  return mu + std::sqrt(-std::log(gamma) / tau) * chick_gans_b(s);
}

namespace {

struct Variances {
  double posterior;
  double observation;
};

Variances family_variances(const ArmBelief& b, const RewardFamily& fam) {
  validate(b, fam);
  const double mu = b.mean();
  switch (fam.kind) {
    case Family::Bernoulli:
      return {mu * (1.0 - mu) / (b.n + 1.0), mu * (1.0 - mu)};
    case Family::Gaussian:
      return {1.0 / b.n, 1.0 / fam.tau};
    case Family::Exponential:
      break;
  }
  throw DomainError("GI approximations are defined for Bernoulli and Gaussian arms only");
}

}  // namespace

double gibl_index(const ArmBelief& b, const RewardFamily& fam, double gamma) {
  const Variances v = family_variances(b, fam);
  return b.mean() + std::sqrt(v.posterior) * brezzi_lai_psi(gi_scaled_variance(v.posterior, v.observation, gamma));
}

double gicg_index(const ArmBelief& b, const RewardFamily& fam, double gamma) {
  const Variances v = family_variances(b, fam);
  const double s = gi_scaled_variance(v.posterior, v.observation, gamma);
  return b.mean() + std::sqrt(v.observation * -std::log(gamma)) * chick_gans_b(s);
}

}  // namespace kgb
