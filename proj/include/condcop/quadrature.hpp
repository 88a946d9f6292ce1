#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace condcop {

//! Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule
{
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(std::size_t n);

//! Integrates f over [a, b] with the given rule.
double integrate(const GaussLegendreRule& rule,
                 const std::function<double(double)>& f,
                 double a,
                 double b);

} // namespace condcop
