#pragma once

#include "condcop/loclin_cdf.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace condcop {

//! Right-continuous empirical distribution function G(v) = #{values <= v}/n.
class StepEcdf
{
public:
  //! Throws std::invalid_argument on empty input.
  explicit StepEcdf(std::vector<double> values);

  double operator()(double v) const noexcept;

  //! inf{v : G(v) >= u} for u in (0, 1], i.e. the k-th order statistic with
  //! k the smallest integer such that k/n >= u. Throws std::domain_error
  //! outside (0, 1].
  double inverse(double u) const;

  std::size_t size() const noexcept { return sorted_.size(); }
  std::span<const double> sorted() const noexcept { return sorted_; }

private:
  std::vector<double> sorted_;
};

StepEcdf ecdf(std::vector<double> values);
double ecdf_inverse(const StepEcdf& g, double u);

//! Smallest k in 1..n with k/n >= u, for u in (0, 1].
std::size_t order_statistic_rank(std::size_t n, double u);

//! Generalized inverse of the step function equal to values[j] on
//! [support[j], support[j+1]) and 0 below support[0]: the smallest
//! support point where the function reaches u. Returns -inf for u <= 0 and
//! +inf when u is never reached.
double generalized_inverse(std::span<const double> support,
                           std::span<const double> values,
                           double u);

enum class Provenance
{
  estimated,
  oracle
};

std::string_view to_string(Provenance p) noexcept;

//! n pairs (v1_i, v2_i) kept in observation order.
class PseudoObservations
{
public:
  //! Throws std::invalid_argument if empty, of unequal lengths, or
  //! non-finite.
  PseudoObservations(std::vector<double> v1,
                     std::vector<double> v2,
                     Provenance provenance);

  std::size_t size() const noexcept { return v1_.size(); }
  std::span<const double> v1() const noexcept { return v1_; }
  std::span<const double> v2() const noexcept { return v2_; }
  Provenance provenance() const noexcept { return provenance_; }

private:
  std::vector<double> v1_;
  std::vector<double> v2_;
  Provenance provenance_;
};

//! Observations (X_i, Y1_i, Y2_i).
struct TrivariateSample
{
  std::vector<double> x;
  std::vector<double> y1;
  std::vector<double> y2;

  std::size_t size() const noexcept { return x.size(); }
};

//! A conditional distribution function (y, x) -> F(y|x).
using ConditionalMargin = std::function<double(double y, double x)>;

//! (F1-hat(Y1_i|X_i), F2-hat(Y2_i|X_i)) from fitted margins. Throws
//! DegenerateDesign carrying the offending observation index.
PseudoObservations pseudo_obs(const TrivariateSample& sample,
                              const ConditionalCdfFit& margin1,
                              const ConditionalCdfFit& margin2);

//! Pseudo-observations from known conditional margins.
PseudoObservations pseudo_obs(const TrivariateSample& sample,
                              const ConditionalMargin& margin1,
                              const ConditionalMargin& margin2);

//! Empirical copula of a set of pseudo-observations, evaluable at many
//! points after one sort per coordinate.
class EmpiricalCopula
{
public:
  explicit EmpiricalCopula(const PseudoObservations& p);

  //! n^-1 sum 1{v1_i <= G1^-(u1)} 1{v2_i <= G2^-(u2)}, u in (0, 1]^2.
  double operator()(double u1, double u2) const;

  std::size_t size() const noexcept { return v1_.size(); }

private:
  std::vector<double> v1_;
  std::vector<double> v2_;
  StepEcdf g1_;
  StepEcdf g2_;
};

double empirical_copula(const PseudoObservations& p, double u1, double u2);

//! C-hat(u1, 1); equals ceil(n u1)/n.
double copula_margin_identity(const PseudoObservations& p, double u1);

} // namespace condcop
