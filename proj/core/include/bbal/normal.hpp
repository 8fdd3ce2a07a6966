#ifndef BBAL_NORMAL_HPP
#define BBAL_NORMAL_HPP

#include <Eigen/Core>

namespace bbal {

// Bivariate normal specified by mean and a symmetric positive-definite
// covariance. Orthant evaluation standardizes internally; correlations with
// |rho| > 1 - 1e-12 are clamped to that bound (duplicated query points drive
// rho -> 1).
struct Bvn2 {
  Eigen::Vector2d mean;
  Eigen::Matrix2d cov;
};

double std_normal_pdf(double x);

// Phi(x) via the complementary error function. Throws DomainError on
// non-finite input.
double std_normal_cdf(double x);

// phi(x) / Phi(x), stable for large negative x (asymptotic Mills-ratio
// expansion below the erfc underflow threshold).
double std_normal_pdf_over_cdf(double x);

// P(z1 >= 0, z2 >= 0) under N(mean, cov). Fixed-order Gauss-Legendre scheme
// after Genz (2004); absolute error well below 1e-7 over the full correlation
// range. Throws MatrixError if cov is not positive definite.
double bvn_orthant(const Bvn2& b);

// P(X <= h, Y <= k) for standard bivariate normal with correlation rho.
double bvn_cdf(double h, double k, double rho);

}  // namespace bbal

#endif  // BBAL_NORMAL_HPP
