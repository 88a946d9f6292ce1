#include "condcop/kernels.hpp"

#include "condcop/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace condcop {

int
Kernel::max_order() const noexcept
{
  return family_ == KernelFamily::triweight ? 2 : 1;
}

double
Kernel::value(double u) const noexcept
{
  if (!(std::abs(u) < 1.0))
    return 0.0;
  const double s = 1.0 - u * u;
  switch (family_) {
    case KernelFamily::triweight:
      return 35.0 / 32.0 * s * s * s;
    case KernelFamily::biweight:
      return 15.0 / 16.0 * s * s;
  }
  return 0.0;
}

double
Kernel::eval(double u, int order) const
{
  if (order < 0 || order > max_order())
    throw std::invalid_argument("kernel derivative order " +
                                std::to_string(order) + " not supported");
  if (order == 0)
    return value(u);
  if (!(std::abs(u) < 1.0))
    return 0.0;
  const double s = 1.0 - u * u;
  if (family_ == KernelFamily::triweight) {
    if (order == 1)
      return -105.0 / 16.0 * u * s * s;
    return -105.0 / 16.0 * s * (1.0 - 5.0 * u * u);
  }
  return -15.0 / 4.0 * u * s;
}

double
Kernel::integral_to(double u) const noexcept
{
  if (u <= -1.0)
    return 0.0;
  if (u >= 1.0)
    return 1.0;
  const double u2 = u * u;
  const double u3 = u2 * u;
  const double u5 = u3 * u2;
  double v = 0.0;
  switch (family_) {
    case KernelFamily::triweight:
      v = 35.0 / 32.0 * (u - u3 + 0.6 * u5 - u5 * u2 / 7.0) + 0.5;
      break;
    case KernelFamily::biweight:
      v = 15.0 / 16.0 * (u - 2.0 * u3 / 3.0 + u5 / 5.0) + 0.5;
      break;
  }
  // cancellation near u = +-1 can leave the polynomial a few ulps outside
  return std::clamp(v, 0.0, 1.0);
}

double
Kernel::weight(int k, double u, int order) const
{
  if (k < 0 || k > 3)
    throw std::invalid_argument("weight index must be in {0,1,2,3}");
  if (order < 0 || order > max_order())
    throw std::invalid_argument("kernel derivative order " +
                                std::to_string(order) + " not supported");
  if (!(std::abs(u) < 1.0))
    return 0.0;

  // (u^k)^(j) for j = 0, 1, 2
  auto mono = [k, u](int j) {
    if (j > k)
      return 0.0;
    double coef = 1.0;
    for (int i = 0; i < j; ++i)
      coef *= static_cast<double>(k - i);
    return coef * std::pow(u, k - j);
  };

  switch (order) {
    case 0:
      return mono(0) * value(u);
    case 1:
      return mono(1) * value(u) + mono(0) * eval(u, 1);
    default:
      return mono(2) * value(u) + 2.0 * mono(1) * eval(u, 1) +
             mono(0) * eval(u, 2);
  }
}

double
eval_kernel(const Kernel& k, double u, int order)
{
  return k.eval(u, order);
}

double
weight_kernel(const Kernel& k, int k_index, double u, int order)
{
  return k.weight(k_index, u, order);
}

KernelMoments
kernel_moments(const Kernel& k)
{
  const auto rule = gauss_legendre(64);
  const double a =
    2.0 * integrate(rule, [&](double u) { return u * k(u); }, 0.0, 1.0);
  const double c = 2.0 * integrate(
                           rule,
                           [&](double u) { return (u - a) * (u - a) * k(u); },
                           0.0,
                           1.0);
  return { a, c };
}

SmoothedIndicator::SmoothedIndicator(Kernel kernel, double h)
  : kernel_(kernel)
  , h_(h)
{
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument("smoothed indicator bandwidth must be > 0");
}

double
phi(const SmoothedIndicator& si, double y, double obs)
{
  return si(y, obs);
}

} // namespace condcop
