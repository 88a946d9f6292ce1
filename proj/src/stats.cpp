#include "condcop/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace condcop::stats {

double
mean(std::span<const double> v)
{
  if (v.empty())
    throw std::invalid_argument("mean of empty range");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double
sd(std::span<const double> v)
{
  if (v.size() < 2)
    throw std::invalid_argument("sd needs at least two values");
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v)
    ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double
median(std::vector<double> v)
{
  if (v.empty())
    throw std::invalid_argument("median of empty range");
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double
pearson(std::span<const double> a, std::span<const double> b)
{
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("pearson: need two equal-length ranges, n >= 2");
  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

double
ks_statistic(std::vector<double> values, const std::function<double(double)>& cdf)
{
  if (values.empty())
    throw std::invalid_argument("ks_statistic of empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = cdf(values[i]);
    d = std::max({ d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n });
  }
  return d;
}

double
kolmogorov_sf(double t)
{
  if (t <= 0.0)
    return 1.0;
  if (t < 0.2) {
    // alternating series converges slowly here; use the theta-function form
    const double pi2 = M_PI * M_PI;
    double s = 0.0;
    for (int k = 1; k < 50; ++k) {
      const double odd = 2.0 * k - 1.0;
      s += std::exp(-odd * odd * pi2 / (8.0 * t * t));
    }
    return 1.0 - std::sqrt(2.0 * M_PI) / t * s;
  }
  double s = 0.0;
  for (int k = 1; k < 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    s += (k % 2 == 1 ? 1.0 : -1.0) * term;
    if (term < 1e-18)
      break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

double
ks_critical_value(std::size_t n, double alpha)
{
  if (!(alpha > 0.0 && alpha < 1.0) || n == 0)
    throw std::invalid_argument("ks_critical_value: bad arguments");
  double lo = 0.0, hi = 5.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (kolmogorov_sf(mid) > alpha)
      lo = mid;
    else
      hi = mid;
  }
  const double sn = std::sqrt(static_cast<double>(n));
  return 0.5 * (lo + hi) / (sn + 0.12 + 0.11 / sn);
}

} // namespace condcop::stats
