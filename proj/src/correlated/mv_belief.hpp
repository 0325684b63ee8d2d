#pragma once

#include "core/rng.hpp"
#include "policy/policy.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace kgb {

// Joint Normal belief over the arm means with a common observation precision.
struct MvBelief {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  double tau = 1.0;
  std::size_t size() const noexcept { return static_cast<std::size_t>(mean.size()); }
};

void validate(const MvBelief& b);

// C_ij = exp(-decay (i - j)^2).
Eigen::MatrixXd power_exp_covariance(std::size_t k, double decay);

// Conditioning on one observation y of arm a.
MvBelief mv_update(const MvBelief& b, std::size_t a, double y);

// E[max_i (intercept_i + slope_i Z)] - max_i intercept_i for standard normal
// Z, by the sorted upper-envelope sweep.
double expected_max_gain(std::span<const double> intercept, std::span<const double> slope);

// Correlated KG score of arm a: value of one observation of a to the best
// posterior mean over all arms.
double ckg_score(const MvBelief& b, std::size_t a);
// argmax of mean_a + H * ckg_score(a), lowest index on ties.
PolicyScore ckg_action(const MvBelief& b, double multiplier);

// Independent-arm view of the marginals: n_a = 1 / cov_aa, sum_a = mean_a n_a.
InfoState marginal_state(const MvBelief& b, const HorizonSpec& h);

// KG computed on the marginals only.
PolicyScore ikg_action(const MvBelief& b, const HorizonSpec& h);

// One draw from Normal(mean, cov) through a symmetric eigen-factorization.
Eigen::VectorXd sample_truth_mv(const MvBelief& b, Rng& rng);

// Independent standard normal draw.
double standard_normal(Rng& rng);

}  // namespace kgb
