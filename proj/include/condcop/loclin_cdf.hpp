#pragma once

#include "condcop/kernels.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace condcop {

//! Raised when the local-linear normal equations are (numerically) singular
//! at the requested x, i.e. p0 p2 - p1^2 is below the fit's floor.
class DegenerateDesign : public std::runtime_error
{
public:
  explicit DegenerateDesign(double x, std::optional<std::size_t> index = {});

  double x() const noexcept { return x_; }
  //! Observation index, when raised while building pseudo-observations.
  std::optional<std::size_t> index() const noexcept { return index_; }

private:
  double x_;
  std::optional<std::size_t> index_;
};

//! Raised when the fitted F(.|x) never reaches the requested level on the
//! inversion grid.
class NoCrossing : public std::runtime_error
{
public:
  NoCrossing(double u, double x);
};

//! Pairs (x, y) sorted ascending in x.
class Sample1D
{
public:
  //! Sorts by x (stable). Throws std::invalid_argument if fewer than two
  //! points, sizes differ, or any value is non-finite.
  Sample1D(std::vector<double> x, std::vector<double> y);

  std::size_t size() const noexcept { return x_.size(); }
  std::span<const double> x() const noexcept { return x_; }
  std::span<const double> y() const noexcept { return y_; }

private:
  std::vector<double> x_;
  std::vector<double> y_;
};

struct Bandwidths
{
  double h1; //!< x-direction (localisation)
  double h2; //!< y-direction (smoothing of the indicator)

  //! Throws std::invalid_argument unless both are finite and positive.
  void validate() const;
};

struct MonotonicityReport
{
  double x;
  double min_density;          //!< NaN when the design is degenerate
  std::size_t negative_points; //!< grid points in the band with f < 0
  bool degenerate;
  bool violation() const noexcept { return degenerate || negative_points > 0; }
};

//! Smoothed local-linear estimator of F(y|x): the intercept of the
//! kernel-weighted least-squares fit of a + b (X_i - x) to phi_h2(y, Y_i),
//! with triweight weights K((x - X_i) / h1) and biweight smoothing L.
//!
//! Evaluations only visit observations with |X_i - x| < h1, found by binary
//! search on the sorted x values.
class ConditionalCdfFit
{
public:
  static constexpr std::size_t grid_size = 512;
  static constexpr std::size_t pilot_size = 64;
  static constexpr double det_rel_floor = 1e-12;

  ConditionalCdfFit(Sample1D sample, Bandwidths bw);

  const Sample1D& sample() const noexcept { return sample_; }
  const Bandwidths& bandwidths() const noexcept { return bw_; }

  //! n^-1 sum d^deriv/dx^deriv w_{k,h1}(x - X_i), k in 0..3, deriv in 0..2.
  double p_hat(int k, double x, int deriv = 0) const;
  //! n^-1 sum phi_h2(y, Y_i) w_{k,h1}(x - X_i), k in {0, 1}.
  double Q_hat(int k, double y, double x) const;
  //! n^-1 sum L_h2(y - Y_i) w_{k,h1}(x - X_i), k in {0, 1}.
  double q_hat(int k, double y, double x) const;

  //! p0 p2 - p1^2 at x.
  double determinant(double x) const;
  //! Relative floor below which the design at x is treated as degenerate.
  double determinant_floor() const noexcept { return det_floor_; }

  //! F-hat(y|x); not clamped to [0, 1]. Throws DegenerateDesign.
  double cdf(double y, double x) const;
  //! Same as cdf() but reports degeneracy by an empty optional.
  std::optional<double> try_cdf(double y, double x) const noexcept;
  //! d/dy F-hat(y|x).
  double density(double y, double x) const;
  //! d^order/dx^order F-hat(y|x), order in {1, 2}.
  double cdf_dx(double y, double x, int order) const;

  //! Generalized inverse inf{y : F-hat(y|x) >= u}, located as the first
  //! upcrossing on the inversion grid and refined by bisection.
  double quantile(double u, double x) const;
  //! Several levels at one x, sharing the grid scan.
  std::vector<double> quantiles(std::span<const double> us, double x) const;

  //! 512 equally spaced points over [min Y - h2, max Y + h2].
  std::span<const double> inversion_grid() const noexcept { return grid_; }

  //! Scans f-hat(.|x) on the grid between the estimated gamma_band.first
  //! and gamma_band.second quantiles.
  MonotonicityReport monotonicity_check(
    double x,
    std::pair<double, double> gamma_band) const;

private:
  struct Sums
  {
    double p[3]; // p0, p1, p2
    double t[2]; // Q0, Q1 (or q0, q1)
  };

  std::pair<std::size_t, std::size_t> window(double x) const noexcept;
  double denominator_or_throw(const Sums& s, double x) const;
  Sums sums(double y, double x, bool density) const noexcept;
  double quantile_from_grid(double u,
                            double x,
                            std::span<const double> values) const;
  std::vector<double> grid_values(double x) const;

  Sample1D sample_;
  Bandwidths bw_;
  Kernel k_;
  SmoothedIndicator phi_;
  std::vector<double> grid_;
  double det_floor_ = 0.0;
};

} // namespace condcop
