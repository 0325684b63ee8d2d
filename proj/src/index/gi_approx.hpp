#pragma once

#include "belief/belief.hpp"

#include <string_view>
#include <vector>

namespace kgb {

// Coefficients of the Brezzi-Lai and Chick-Gans approximations, read from
// data/gi_approx_coefficients.txt (embedded at build time).
struct GiApproxCoefficients {
  struct Piece {
    double upper;
    double a;
    double b;
  };
  double bl_small_upper = 0.0;
  std::vector<Piece> bl_pieces;
  double bl_tail_log_const = 0.0;

  double cg_small_upper = 0.0;
  double cg_mid_upper = 0.0;
  double cg_c2 = 0.0, cg_c1 = 0.0, cg_c0 = 0.0;
  double cg_tail_log_const = 0.0;
};

// Throws ConfigError on malformed text.
GiApproxCoefficients parse_gi_approx_coefficients(std::string_view text);
const GiApproxCoefficients& gi_approx_coefficients();
std::string_view gi_approx_coefficients_text() noexcept;

double brezzi_lai_psi(double s);
double chick_gans_b(double s);

// s = posterior_variance / (observation_variance * -ln gamma).
double gi_scaled_variance(double posterior_variance, double observation_variance, double gamma);

// Gaussian arm with precision n and observation precision tau.
double gibl_index(double mu, double n, double tau, double gamma);
double gicg_index(double mu, double n, double tau, double gamma);

// Family-aware forms. Bernoulli arms use the Beta posterior variance
// mu (1 - mu) / (n + 1) against the observation variance mu (1 - mu).
// Exponential arms are not supported (DomainError).
double gibl_index(const ArmBelief& b, const RewardFamily& fam, double gamma);
double gicg_index(const ArmBelief& b, const RewardFamily& fam, double gamma);

}  // namespace kgb
