#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace kgb {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
inline constexpr double kInvSqrt2 = 0.707106781186547524400844362105;

inline double normal_pdf(double z) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }
inline double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z * kInvSqrt2); }

// f(z) = z Phi(z) + phi(z) = E[max(z + Z, 0)] for standard normal Z.
// Strictly positive for every finite z (until it underflows far in the left tail).
double normal_loss(double z) noexcept;

// Quadrature rule on the real line; nodes are ordered ascending.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule on [0, 1] with weights summing to one.
const QuadratureRule& gauss_legendre_unit(std::size_t n);

// Compensated accumulator.
class KahanSum {
 public:
  void add(double x) noexcept {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const noexcept { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

// Pairwise-free mean/standard-error of a sample using compensated sums in
// index order.
struct SampleStats {
  double mean = 0.0;
  double stderr_ = 0.0;
};
SampleStats sample_stats(std::span<const double> xs);

}  // namespace kgb
