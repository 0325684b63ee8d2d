#include "belief/belief.hpp"

#include "core/errors.hpp"
#include "core/numerics.hpp"

#include <boost/math/special_functions/log1p.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace kgb {

namespace {

// e^-t - 1 + t for t >= 0, without cancellation near zero.
double exp_minus_linear(double t) {
  if (t > 0.1) return std::expm1(-t) + t;
  double term = t * t / 2.0, sum = 0.0;
  for (int k = 3; k < 40 && std::abs(term) > 1e-18 * sum; ++k) {
    sum += term;
    term *= -t / k;
  }
  return sum;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void bad_belief(const ArmBelief& b, const RewardFamily& fam, const char* why) {
  std::ostringstream os;
  os << "invalid " << family_name(fam.kind) << " belief (sum=" << b.sum << ", n=" << b.n
     << "): " << why;
  throw DomainError(os.str());
}

void require_finite_lambda(double lambda) {
  if (!std::isfinite(lambda)) throw DomainError("charge/threshold must be finite");
}

double gamma_draw(double shape, Rng& rng) {
  std::gamma_distribution<double> g(shape, 1.0);
  return g(rng);
}

}  // namespace

std::string_view family_name(Family f) noexcept {
  switch (f) {
    case Family::Bernoulli: return "bernoulli";
    case Family::Exponential: return "exponential";
    case Family::Gaussian: return "gaussian";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "bernoulli") return Family::Bernoulli;
  if (name == "exponential") return Family::Exponential;
  if (name == "gaussian" || name == "normal") return Family::Gaussian;
  throw ConfigError("unknown reward family '" + std::string(name) + "'");
}

RewardFamily RewardFamily::gaussian(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("gaussian observation precision must be positive");
  return {Family::Gaussian, tau};
}

double RewardFamily::min_support() const noexcept {
  return kind == Family::Gaussian ? -kInf : 0.0;
}

double RewardFamily::max_support() const noexcept {
  return kind == Family::Bernoulli ? 1.0 : kInf;
}

void validate(const ArmBelief& b, const RewardFamily& fam) {
  if (!std::isfinite(b.sum) || !std::isfinite(b.n)) bad_belief(b, fam, "non-finite hyper-parameter");
  if (!(b.n > 0.0)) bad_belief(b, fam, "n must be positive");
  switch (fam.kind) {
    case Family::Bernoulli:
      if (!(b.sum > 0.0 && b.sum < b.n)) bad_belief(b, fam, "need 0 < sum < n");
      break;
    case Family::Exponential:
      if (!(b.sum > 0.0)) bad_belief(b, fam, "need sum > 0");
      break;
    case Family::Gaussian:
      if (!(fam.tau > 0.0)) bad_belief(b, fam, "observation precision must be positive");
      break;
  }
}

ArmBelief make_belief(double sum, double n, const RewardFamily& fam) {
  ArmBelief b{sum, n};
  validate(b, fam);
  return b;
}

ArmBelief posterior_update(const ArmBelief& b, double y, const RewardFamily& fam) {
  validate(b, fam);
  if (!std::isfinite(y)) throw DomainError("observation must be finite");
  ArmBelief out;
  switch (fam.kind) {
    case Family::Bernoulli:
      if (y != 0.0 && y != 1.0) throw DomainError("bernoulli observation must be 0 or 1");
      out = {b.sum + y, b.n + 1.0};
      break;
    case Family::Exponential:
      if (y < 0.0) throw DomainError("exponential observation must be non-negative");
      out = {b.sum + y, b.n + 1.0};
      break;
    case Family::Gaussian:
      out = {b.sum + fam.tau * y, b.n + fam.tau};
      break;
  }
  try {
    validate(out, fam);
  } catch (const DomainError& e) {
    throw InternalError(std::string("posterior update broke belief invariant: ") + e.what());
  }
  return out;
}

double predictive_mean(const ArmBelief& b) noexcept { return b.mean(); }

double min_next_mean(const ArmBelief& b, const RewardFamily& fam) noexcept {
  if (!fam.bounded_below()) return -kInf;
  return (b.sum + fam.min_support()) / (b.n + 1.0);
}

double max_next_mean(const ArmBelief& b, const RewardFamily& fam) noexcept {
  if (!fam.bounded_above()) return kInf;
  return (b.sum + fam.max_support()) / (b.n + 1.0);
}

double gaussian_step_sd(const ArmBelief& b, double tau) noexcept {
  // Var(mu+) = 1/n - 1/(n + tau) = tau / (n (n + tau)).
  return std::sqrt(tau / (b.n * (b.n + tau)));
}

double excess_expectation(const ArmBelief& b, const RewardFamily& fam, double lambda) {
  validate(b, fam);
  require_finite_lambda(lambda);
  switch (fam.kind) {
    case Family::Bernoulli: {
      const double up = (b.sum + 1.0) / (b.n + 1.0);
      const double down = b.sum / (b.n + 1.0);
      if (up <= lambda) return 0.0;
      const double p = b.sum / b.n;
      const double q = (b.n - b.sum) / b.n;
      return p * (up - lambda) + q * std::max(down - lambda, 0.0);
    }
    case Family::Exponential: {
      // Predictive of Y is Lomax(shape n+1, scale sum); mu+ = (sum + Y)/(n + 1).
      // E[(Y - c)+] = sum^{n+1} / (n (sum + c)^n) for c > 0.
      const double c = (b.n + 1.0) * lambda - b.sum;
      if (c <= 0.0) return b.mean() - lambda;
      const double tail = std::exp(-b.n * std::log1p(c / b.sum));
      return b.mean() * tail / (b.n + 1.0);
    }
    case Family::Gaussian: {
      const double s = gaussian_step_sd(b, fam.tau);
      return s * normal_loss((b.mean() - lambda) / s);
    }
  }
  return 0.0;
}

double shortfall_expectation(const ArmBelief& b, const RewardFamily& fam, double lambda) {
  validate(b, fam);
  require_finite_lambda(lambda);
  switch (fam.kind) {
    case Family::Bernoulli: {
      const double up = (b.sum + 1.0) / (b.n + 1.0);
      const double down = b.sum / (b.n + 1.0);
      if (down >= lambda) return 0.0;
      const double p = b.sum / b.n;
      const double q = (b.n - b.sum) / b.n;
      return q * (lambda - down) + p * std::max(lambda - up, 0.0);
    }
    case Family::Exponential: {
      if (b.sum / (b.n + 1.0) >= lambda) return 0.0;
      // E[(c - Y)+] = c - (sum/n) (1 - (1 + x)^-n) with x = c / sum, split into
      // two non-negative terms so that it stays positive for tiny c.
      const double c = (b.n + 1.0) * lambda - b.sum;
      const double x = c / b.sum;
      const double t = b.n * std::log1p(x);
      const double part = -boost::math::log1pmx(x) + exp_minus_linear(t) / b.n;
      return b.sum * part / (b.n + 1.0);
    }
    case Family::Gaussian: {
      const double s = gaussian_step_sd(b, fam.tau);
      return s * normal_loss((lambda - b.mean()) / s);
    }
  }
  return 0.0;
}

TruthParam sample_truth(const ArmBelief& b, const RewardFamily& fam, Rng& rng) {
  validate(b, fam);
  TruthParam t{0.0, fam};
  switch (fam.kind) {
    case Family::Bernoulli: {
      double x = 0.0, y = 0.0;
      do {
        x = gamma_draw(b.sum, rng);
        y = gamma_draw(b.n - b.sum, rng);
      } while (x + y <= 0.0);
      t.theta = x / (x + y);
      break;
    }
    case Family::Exponential: {
      double g = 0.0;
      do {
        g = gamma_draw(b.n + 1.0, rng);
      } while (g <= 0.0);
      t.theta = g / b.sum;
      break;
    }
    case Family::Gaussian: {
      std::normal_distribution<double> nd(b.mean(), 1.0 / std::sqrt(b.n));
      t.theta = nd(rng);
      break;
    }
  }
  return t;
}

double sample_reward(const TruthParam& truth, Rng& rng) {
  switch (truth.family.kind) {
    case Family::Bernoulli: return rng.uniform() < truth.theta ? 1.0 : 0.0;
    case Family::Exponential: return -std::log(rng.uniform()) / truth.theta;
    case Family::Gaussian: {
      std::normal_distribution<double> nd(truth.theta, 1.0 / std::sqrt(truth.family.tau));
      return nd(rng);
    }
  }
  return 0.0;
}

double true_mean(const TruthParam& truth) noexcept {
  return truth.family.kind == Family::Exponential ? 1.0 / truth.theta : truth.theta;
}

}  // namespace kgb
