#include "condcop/copula_ranks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace condcop {

StepEcdf::StepEcdf(std::vector<double> values)
  : sorted_(std::move(values))
{
  if (sorted_.empty())
    throw std::invalid_argument("ecdf: empty input");
  std::sort(sorted_.begin(), sorted_.end());
}

double
StepEcdf::operator()(double v) const noexcept
{
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), v);
  return static_cast<double>(it - sorted_.begin()) /
         static_cast<double>(sorted_.size());
}

double
StepEcdf::inverse(double u) const
{
  return sorted_[order_statistic_rank(sorted_.size(), u) - 1];
}

StepEcdf
ecdf(std::vector<double> values)
{
  return StepEcdf(std::move(values));
}

double
ecdf_inverse(const StepEcdf& g, double u)
{
  return g.inverse(u);
}

std::size_t
order_statistic_rank(std::size_t n, double u)
{
  if (!(u > 0.0 && u <= 1.0))
    throw std::domain_error("generalized inverse: u must lie in (0, 1]");
  const double nd = static_cast<double>(n);
  auto k = static_cast<std::size_t>(std::ceil(nd * u));
  k = std::clamp<std::size_t>(k, 1, n);
  // n*u may round across an integer; settle on the definition k/n >= u.
  while (k > 1 && static_cast<double>(k - 1) / nd >= u)
    --k;
  while (k < n && static_cast<double>(k) / nd < u)
    ++k;
  return k;
}

double
generalized_inverse(std::span<const double> support,
                    std::span<const double> values,
                    double u)
{
  if (support.size() != values.size())
    throw std::invalid_argument("generalized_inverse: size mismatch");
  if (u <= 0.0)
    return -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < values.size(); ++j)
    if (values[j] >= u)
      return support[j];
  return std::numeric_limits<double>::infinity();
}

std::string_view
to_string(Provenance p) noexcept
{
  return p == Provenance::oracle ? "oracle" : "estimated";
}

PseudoObservations::PseudoObservations(std::vector<double> v1,
                                       std::vector<double> v2,
                                       Provenance provenance)
  : v1_(std::move(v1))
  , v2_(std::move(v2))
  , provenance_(provenance)
{
  if (v1_.empty())
    throw std::invalid_argument("pseudo-observations: empty");
  if (v1_.size() != v2_.size())
    throw std::invalid_argument("pseudo-observations: length mismatch");
  for (std::size_t i = 0; i < v1_.size(); ++i)
    if (!std::isfinite(v1_[i]) || !std::isfinite(v2_[i]))
      throw std::invalid_argument("pseudo-observations: non-finite value");
}

namespace {

void
check_sample(const TrivariateSample& s)
{
  if (s.x.size() != s.y1.size() || s.x.size() != s.y2.size())
    throw std::invalid_argument("sample: columns have different lengths");
  if (s.x.empty())
    throw std::invalid_argument("sample: empty");
}

} // namespace

PseudoObservations
pseudo_obs(const TrivariateSample& sample,
           const ConditionalCdfFit& margin1,
           const ConditionalCdfFit& margin2)
{
  check_sample(sample);
  const auto n = sample.size();
  std::vector<double> v1(n), v2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = margin1.try_cdf(sample.y1[i], sample.x[i]);
    const auto b = margin2.try_cdf(sample.y2[i], sample.x[i]);
    if (!a || !b)
      throw DegenerateDesign(sample.x[i], i);
    v1[i] = *a;
    v2[i] = *b;
  }
  return { std::move(v1), std::move(v2), Provenance::estimated };
}

PseudoObservations
pseudo_obs(const TrivariateSample& sample,
           const ConditionalMargin& margin1,
           const ConditionalMargin& margin2)
{
  check_sample(sample);
  const auto n = sample.size();
  std::vector<double> v1(n), v2(n);
  for (std::size_t i = 0; i < n; ++i) {
    v1[i] = margin1(sample.y1[i], sample.x[i]);
    v2[i] = margin2(sample.y2[i], sample.x[i]);
  }
  return { std::move(v1), std::move(v2), Provenance::oracle };
}

EmpiricalCopula::EmpiricalCopula(const PseudoObservations& p)
  : v1_(p.v1().begin(), p.v1().end())
  , v2_(p.v2().begin(), p.v2().end())
  , g1_(v1_)
  , g2_(v2_)
{}

double
EmpiricalCopula::operator()(double u1, double u2) const
{
  const double t1 = g1_.inverse(u1);
  const double t2 = g2_.inverse(u2);
  std::size_t count = 0;
  for (std::size_t i = 0; i < v1_.size(); ++i)
    if (v1_[i] <= t1 && v2_[i] <= t2)
      ++count;
  return static_cast<double>(count) / static_cast<double>(v1_.size());
}

double
empirical_copula(const PseudoObservations& p, double u1, double u2)
{
  return EmpiricalCopula(p)(u1, u2);
}

double
copula_margin_identity(const PseudoObservations& p, double u1)
{
  return empirical_copula(p, u1, 1.0);
}

} // namespace condcop
