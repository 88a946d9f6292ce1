#include "condcop/loclin_cdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace condcop {

DegenerateDesign::DegenerateDesign(double x, std::optional<std::size_t> index)
  : std::runtime_error(
      "degenerate local-linear design at x = " + std::to_string(x) +
      (index ? " (observation " + std::to_string(*index) + ")" : std::string{}))
  , x_(x)
  , index_(index)
{}

NoCrossing::NoCrossing(double u, double x)
  : std::runtime_error("estimated conditional cdf never reaches u = " +
                       std::to_string(u) + " at x = " + std::to_string(x))
{}

Sample1D::Sample1D(std::vector<double> x, std::vector<double> y)
{
  if (x.size() != y.size())
    throw std::invalid_argument("sample: x and y have different lengths");
  if (x.size() < 2)
    throw std::invalid_argument("sample: at least two observations required");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw std::invalid_argument("sample: non-finite value at row " +
                                  std::to_string(i));

  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{ 0 });
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return x[a] < x[b];
  });
  x_.reserve(x.size());
  y_.reserve(y.size());
  for (auto i : order) {
    x_.push_back(x[i]);
    y_.push_back(y[i]);
  }
}

void
Bandwidths::validate() const
{
  if (!(h1 > 0.0) || !std::isfinite(h1))
    throw std::invalid_argument("bandwidth h1 must be positive");
  if (!(h2 > 0.0) || !std::isfinite(h2))
    throw std::invalid_argument("bandwidth h2 must be positive");
}

namespace {

Bandwidths
checked(Bandwidths bw)
{
  bw.validate();
  return bw;
}

} // namespace

ConditionalCdfFit::ConditionalCdfFit(Sample1D sample, Bandwidths bw)
  : sample_(std::move(sample))
  , bw_(checked(bw))
  , k_(KernelFamily::triweight)
  , phi_(Kernel(KernelFamily::biweight), bw_.h2)
{
  const auto ys = sample_.y();
  const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
  const double lo = *ymin - bw_.h2;
  const double hi = *ymax + bw_.h2;
  grid_.resize(grid_size);
  for (std::size_t j = 0; j < grid_size; ++j)
    grid_[j] = lo + (hi - lo) * static_cast<double>(j) /
                      static_cast<double>(grid_size - 1);
  grid_.back() = hi;

  const auto xs = sample_.x();
  const double xlo = xs.front();
  const double xhi = xs.back();
  double pmax = 0.0;
  for (std::size_t j = 0; j < pilot_size; ++j) {
    const double x = xlo + (xhi - xlo) * static_cast<double>(j) /
                             static_cast<double>(pilot_size - 1);
    pmax = std::max(pmax, p_hat(0, x));
  }
  det_floor_ = det_rel_floor * pmax * pmax;
}

std::pair<std::size_t, std::size_t>
ConditionalCdfFit::window(double x) const noexcept
{
  const auto xs = sample_.x();
  const auto lo = std::upper_bound(xs.begin(), xs.end(), x - bw_.h1);
  const auto hi = std::lower_bound(lo, xs.end(), x + bw_.h1);
  return { static_cast<std::size_t>(lo - xs.begin()),
           static_cast<std::size_t>(hi - xs.begin()) };
}

double
ConditionalCdfFit::p_hat(int k, double x, int deriv) const
{
  if (k < 0 || k > 3 || deriv < 0 || deriv > 2)
    throw std::invalid_argument("p_hat: k must be in 0..3, deriv in 0..2");
  const auto [lo, hi] = window(x);
  const auto xs = sample_.x();
  const double h = bw_.h1;
  double s = 0.0;
  for (std::size_t i = lo; i < hi; ++i)
    s += k_.weight(k, (x - xs[i]) / h, deriv);
  return s / (static_cast<double>(sample_.size()) * std::pow(h, 1 + deriv));
}

double
ConditionalCdfFit::Q_hat(int k, double y, double x) const
{
  if (k < 0 || k > 1)
    throw std::invalid_argument("Q_hat: k must be 0 or 1");
  return sums(y, x, false).t[k];
}

double
ConditionalCdfFit::q_hat(int k, double y, double x) const
{
  if (k < 0 || k > 1)
    throw std::invalid_argument("q_hat: k must be 0 or 1");
  return sums(y, x, true).t[k];
}

ConditionalCdfFit::Sums
ConditionalCdfFit::sums(double y, double x, bool density) const noexcept
{
  const auto [lo, hi] = window(x);
  const auto xs = sample_.x();
  const auto ys = sample_.y();
  const double h = bw_.h1;
  Sums s{ { 0.0, 0.0, 0.0 }, { 0.0, 0.0 } };
  for (std::size_t i = lo; i < hi; ++i) {
    const double t = (x - xs[i]) / h;
    const double w0 = k_(t);
    const double w1 = t * w0;
    const double w2 = t * w1;
    const double v = density ? phi_.derivative(y, ys[i]) : phi_(y, ys[i]);
    s.p[0] += w0;
    s.p[1] += w1;
    s.p[2] += w2;
    s.t[0] += v * w0;
    s.t[1] += v * w1;
  }
  const double scale = 1.0 / (static_cast<double>(sample_.size()) * h);
  for (auto& v : s.p)
    v *= scale;
  for (auto& v : s.t)
    v *= scale;
  return s;
}

double
ConditionalCdfFit::denominator_or_throw(const Sums& s, double x) const
{
  const double det = s.p[0] * s.p[2] - s.p[1] * s.p[1];
  if (!(det > det_floor_))
    throw DegenerateDesign(x);
  return det;
}

double
ConditionalCdfFit::determinant(double x) const
{
  const auto s = sums(0.0, x, false);
  return s.p[0] * s.p[2] - s.p[1] * s.p[1];
}

double
ConditionalCdfFit::cdf(double y, double x) const
{
  const auto s = sums(y, x, false);
  const double det = denominator_or_throw(s, x);
  return (s.t[0] * s.p[2] - s.t[1] * s.p[1]) / det;
}

std::optional<double>
ConditionalCdfFit::try_cdf(double y, double x) const noexcept
{
  const auto s = sums(y, x, false);
  const double det = s.p[0] * s.p[2] - s.p[1] * s.p[1];
  if (!(det > det_floor_))
    return std::nullopt;
  return (s.t[0] * s.p[2] - s.t[1] * s.p[1]) / det;
}

double
ConditionalCdfFit::density(double y, double x) const
{
  const auto s = sums(y, x, true);
  const double det = denominator_or_throw(s, x);
  return (s.t[0] * s.p[2] - s.t[1] * s.p[1]) / det;
}

double
ConditionalCdfFit::cdf_dx(double y, double x, int order) const
{
  if (order != 1 && order != 2)
    throw std::invalid_argument("cdf_dx: order must be 1 or 2");

  // p[k][d] = d-th x-derivative of p_k, q[k][d] likewise for Q_k.
  double p[3][3] = {};
  double q[2][3] = {};
  const auto [lo, hi] = window(x);
  const auto xs = sample_.x();
  const auto ys = sample_.y();
  const double h = bw_.h1;
  for (std::size_t i = lo; i < hi; ++i) {
    const double t = (x - xs[i]) / h;
    const double v = phi_(y, ys[i]);
    for (int d = 0; d <= order; ++d) {
      for (int k = 0; k < 3; ++k) {
        const double w = k_.weight(k, t, d);
        p[k][d] += w;
        if (k < 2)
          q[k][d] += v * w;
      }
    }
  }
  const double n = static_cast<double>(sample_.size());
  for (int d = 0; d <= order; ++d) {
    const double scale = 1.0 / (n * std::pow(h, 1 + d));
    for (int k = 0; k < 3; ++k) {
      p[k][d] *= scale;
      if (k < 2)
        q[k][d] *= scale;
    }
  }

  const double den = p[0][0] * p[2][0] - p[1][0] * p[1][0];
  if (!(den > det_floor_))
    throw DegenerateDesign(x);
  const double num = q[0][0] * p[2][0] - q[1][0] * p[1][0];
  const double num1 =
    q[0][1] * p[2][0] + q[0][0] * p[2][1] - q[1][1] * p[1][0] - q[1][0] * p[1][1];
  const double den1 =
    p[0][1] * p[2][0] + p[0][0] * p[2][1] - 2.0 * p[1][0] * p[1][1];
  const double f = num / den;
  const double f1 = (num1 - f * den1) / den;
  if (order == 1)
    return f1;

  const double num2 = q[0][2] * p[2][0] + 2.0 * q[0][1] * p[2][1] +
                      q[0][0] * p[2][2] - q[1][2] * p[1][0] -
                      2.0 * q[1][1] * p[1][1] - q[1][0] * p[1][2];
  const double den2 = p[0][2] * p[2][0] + 2.0 * p[0][1] * p[2][1] +
                      p[0][0] * p[2][2] - 2.0 * p[1][1] * p[1][1] -
                      2.0 * p[1][0] * p[1][2];
  return (num2 - 2.0 * f1 * den1 - f * den2) / den;
}

std::vector<double>
ConditionalCdfFit::grid_values(double x) const
{
  const auto [lo, hi] = window(x);
  const auto xs = sample_.x();
  const auto ys = sample_.y();
  const double h = bw_.h1;

  std::vector<double> w0(hi - lo), w1(hi - lo);
  double p0 = 0.0, p1 = 0.0, p2 = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double t = (x - xs[i]) / h;
    w0[i - lo] = k_(t);
    w1[i - lo] = t * w0[i - lo];
    p0 += w0[i - lo];
    p1 += w1[i - lo];
    p2 += t * w1[i - lo];
  }
  // Same accumulation order and scaling as sums(), so grid values agree
  // bit-for-bit with cdf().
  const double scale = 1.0 / (static_cast<double>(sample_.size()) * h);
  p0 *= scale;
  p1 *= scale;
  p2 *= scale;
  const double det = p0 * p2 - p1 * p1;
  if (!(det > det_floor_))
    throw DegenerateDesign(x);

  std::vector<double> values(grid_.size());
  for (std::size_t j = 0; j < grid_.size(); ++j) {
    double t0 = 0.0, t1 = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double v = phi_(grid_[j], ys[i]);
      t0 += v * w0[i - lo];
      t1 += v * w1[i - lo];
    }
    t0 *= scale;
    t1 *= scale;
    values[j] = (t0 * p2 - t1 * p1) / det;
  }
  return values;
}

double
ConditionalCdfFit::quantile_from_grid(double u,
                                      double x,
                                      std::span<const double> values) const
{
  const auto it = std::find_if(
    values.begin(), values.end(), [u](double v) { return v >= u; });
  if (it == values.end())
    throw NoCrossing(u, x);
  const auto j = static_cast<std::size_t>(it - values.begin());
  if (j == 0)
    return grid_.front();

  double lo = grid_[j - 1];
  double hi = grid_[j];
  const double tol = 1e-10 * (grid_.back() - grid_.front());
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
      break;
    if (cdf(mid, x) >= u)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double
ConditionalCdfFit::quantile(double u, double x) const
{
  if (!(u > 0.0 && u < 1.0))
    throw std::invalid_argument("quantile: u must lie in (0, 1)");
  const auto values = grid_values(x);
  return quantile_from_grid(u, x, values);
}

std::vector<double>
ConditionalCdfFit::quantiles(std::span<const double> us, double x) const
{
  for (double u : us)
    if (!(u > 0.0 && u < 1.0))
      throw std::invalid_argument("quantile: u must lie in (0, 1)");
  const auto values = grid_values(x);
  std::vector<double> out;
  out.reserve(us.size());
  for (double u : us)
    out.push_back(quantile_from_grid(u, x, values));
  return out;
}

MonotonicityReport
ConditionalCdfFit::monotonicity_check(double x,
                                      std::pair<double, double> gamma_band) const
{
  MonotonicityReport report{
    x, std::numeric_limits<double>::quiet_NaN(), 0, false
  };
  try {
    const auto values = grid_values(x);
    const double ylo = quantile_from_grid(gamma_band.first, x, values);
    const double yhi = quantile_from_grid(gamma_band.second, x, values);
    double min_density = std::numeric_limits<double>::infinity();
    for (double y : grid_) {
      if (y < ylo || y > yhi)
        continue;
      const double f = density(y, x);
      min_density = std::min(min_density, f);
      if (f < 0.0)
        ++report.negative_points;
    }
    if (std::isfinite(min_density))
      report.min_density = min_density;
  } catch (const DegenerateDesign&) {
    report.degenerate = true;
  } catch (const NoCrossing&) {
    report.degenerate = true;
  }
  return report;
}

} // namespace condcop
