#pragma once

#include "condcop/copula_ranks.hpp"

#include <cstdint>
#include <random>

namespace condcop {

double std_normal_cdf(double z) noexcept;
//! Throws std::domain_error unless p lies in (0, 1).
double std_normal_quantile(double p);
double std_normal_pdf(double z) noexcept;

//! P(Z1 <= z1, Z2 <= z2) for a standard bivariate normal with correlation
//! rho in [-1, 1]. Infinite arguments are allowed.
double bivariate_normal_cdf(double z1, double z2, double rho);

//! (rho12 - rho1X rho2X) / sqrt((1 - rho1X^2)(1 - rho2X^2)). Throws
//! std::domain_error for inputs outside (-1, 1) or a correlation triple that
//! is not positive definite.
double partial_correlation(double rho12, double rho1X, double rho2X);

//! Trivariate Gaussian copula of (Y1, Y2, X).
struct GaussianCopulaSpec
{
  double rho1X;
  double rho2X;
  double rho12;

  //! Throws std::domain_error unless the correlation matrix is positive
  //! definite.
  void validate() const;
  double rho12_given_X() const { return partial_correlation(rho12, rho1X, rho2X); }
};

//! Gaussian copula C(u1, u2) = Phi2(Phi^-1(u1), Phi^-1(u2); rho). Throws
//! std::domain_error unless u lies in the open unit square.
double gaussian_copula(double u1, double u2, double rho);
//! Same copula on the closed square using C(a, 1) = a, C(1, b) = b,
//! C(0, .) = C(., 0) = 0.
double gaussian_copula_closed(double u1, double u2, double rho);
//! dC/du_j, j in {1, 2}, on the open unit square.
double gaussian_copula_du(double u1, double u2, double rho, int j);

//! F_j(v|x) on copula scale: Phi((Phi^-1(v) - rho Phi^-1(x)) / sqrt(1 - rho^2)).
double conditional_margin(double v, double x, double rho_jx);
//! Inverse of conditional_margin in v.
double conditional_quantile(double u, double x, double rho_jx);

//! Covariance of the C-Brownian bridge, C(u ^ v) - C(u) C(v), on (0, 1]^2.
double bridge_cov(double u1, double u2, double v1, double v2, double rho);

//! Limit law of sqrt(n)(C-hat(u) - C(u)) at a fixed point.
struct LimitLawSpec
{
  double rho;
  double u1;
  double u2;
  double copula;   //!< C(u)
  double dc1;      //!< dC/du1
  double dc2;      //!< dC/du2
  double variance; //!< sigma^2(u)

  double sigma() const;
};

//! Variance of B(u) - dC1 B(u1, 1) - dC2 B(1, u2) for the Gaussian copula.
//! Tiny negative round-off is clamped to 0; anything below -1e-12 throws
//! std::runtime_error.
LimitLawSpec limit_law(double u1, double u2, double rho);
double limit_sigma(double u1, double u2, double rho);

//! Draws (X, Y1, Y2) on copula scale via the Cholesky factor of the
//! trivariate correlation matrix. Owns its RNG; one per thread.
class GaussianSampler
{
public:
  GaussianSampler(const GaussianCopulaSpec& spec, std::uint64_t seed);

  TrivariateSample draw(std::size_t n);

private:
  // lower-triangular factor of the correlation matrix in order (Y1, Y2, X)
  double l_[3][3] = {};
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
};

TrivariateSample sample(const GaussianCopulaSpec& spec,
                        std::size_t n,
                        std::uint64_t seed);

} // namespace condcop
