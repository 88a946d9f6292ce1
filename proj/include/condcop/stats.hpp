#pragma once

#include <functional>
#include <span>
#include <vector>

namespace condcop::stats {

double mean(std::span<const double> v);
//! Sample standard deviation (denominator n - 1).
double sd(std::span<const double> v);
double median(std::vector<double> v);
double pearson(std::span<const double> a, std::span<const double> b);

//! sup_t |F_n(t) - F(t)| for the empirical cdf of values.
double ks_statistic(std::vector<double> values,
                    const std::function<double(double)>& cdf);

//! P(K > t) for the Kolmogorov limit distribution.
double kolmogorov_sf(double t);

//! Critical value of the one-sample KS statistic at level alpha, using the
//! Kolmogorov limit with Stephens' finite-n correction.
double ks_critical_value(std::size_t n, double alpha);

} // namespace condcop::stats
