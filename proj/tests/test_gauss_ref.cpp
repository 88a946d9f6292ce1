#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "condcop/gauss_ref.hpp"
#include "condcop/stats.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace condcop;

namespace {

// Variance of I{U <= u} - a I{U1 <= u1} - b I{U2 <= u2} from the four cell
// probabilities of the 2x2 table at (u1, u2).
double
cell_variance(double u1, double u2, double c, double a, double b)
{
  const double p[4] = { c, u1 - c, u2 - c, 1.0 - u1 - u2 + c };
  const double v[4] = { 1.0 - a - b, -a, -b, 0.0 };
  double m1 = 0.0, m2 = 0.0;
  for (int k = 0; k < 4; ++k) {
    m1 += p[k] * v[k];
    m2 += p[k] * v[k] * v[k];
  }
  return m2 - m1 * m1;
}

double
oracle_copula(double u1, double u2, double rho)
{
  return oracle::bivariate_normal_cdf(oracle::normal_quantile(u1),
                                      oracle::normal_quantile(u2), rho);
}

} // namespace

TEST_CASE("partial correlation")
{
  CHECK(partial_correlation(0.3689989, 0.4, -0.2) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(partial_correlation(0.3, 0.0, 0.0) == doctest::Approx(0.3));
  CHECK(partial_correlation(0.0, 0.5, 0.5) == doctest::Approx(-0.25 / 0.75));
  CHECK_THROWS_AS(partial_correlation(0.9, 0.9, -0.9), std::domain_error);
  CHECK_THROWS_AS(partial_correlation(0.1, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(partial_correlation(1.2, 0.1, 0.1), std::domain_error);

  const GaussianCopulaSpec spec{ 0.4, -0.2, 0.3689989 };
  CHECK_NOTHROW(spec.validate());
  CHECK(std::abs(spec.rho12_given_X() - 0.5) < 1e-6);
  CHECK_THROWS_AS((GaussianCopulaSpec{ 0.95, 0.95, -0.9 }.validate()), std::domain_error);
}

TEST_CASE("univariate normal functions")
{
  CHECK(std_normal_cdf(0.0) == 0.5);
  CHECK(std::abs(std_normal_quantile(0.975) - oracle::normal_quantile(0.975)) < 1e-6);
  CHECK(std::abs(std_normal_quantile(0.975) - 1.959963984540054) < 1e-13);
  CHECK_THROWS_AS(std_normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(std_normal_quantile(1.0), std::domain_error);
  CHECK_THROWS_AS(std_normal_quantile(NAN), std::domain_error);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = 0; t < 5000; ++t) {
    const double p = std::clamp(unif(rng), 1e-10, 1.0 - 1e-10);
    const double z = std_normal_quantile(p);
    CHECK(std::abs(std_normal_cdf(z) - p) <= 1e-12);
    CHECK(std_normal_quantile(1.0 - p) == doctest::Approx(-z).epsilon(1e-9));
  }
  for (double e : { 1e-300, 1e-100, 1e-20 }) {
    const double z = std_normal_quantile(e);
    CHECK(std::abs(std_normal_cdf(z) / e - 1.0) < 1e-10);
  }
  CHECK(std_normal_pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)));
}

TEST_CASE("bivariate normal cdf against quadrature")
{
  CHECK(bivariate_normal_cdf(0.0, 0.0, 0.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(bivariate_normal_cdf(0.0, 0.0, -0.5) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

  const double zs[] = { -3.1, -1.2, -0.3, 0.0, 0.4, 1.7, 2.9 };
  const double rhos[] = { -0.99, -0.8, -0.5, -0.1, 0.0, 0.3, 0.6, 0.925, 0.999 };
  for (double rho : rhos)
    for (double z1 : zs)
      for (double z2 : zs) {
        const double ref = oracle::bivariate_normal_cdf(z1, z2, rho);
        CHECK(std::abs(bivariate_normal_cdf(z1, z2, rho) - ref) < 1e-12);
      }
  for (double z1 : zs)
    for (double z2 : zs) {
      CHECK(bivariate_normal_cdf(z1, z2, 0.0) ==
            doctest::Approx(std_normal_cdf(z1) * std_normal_cdf(z2)).epsilon(1e-14));
      CHECK(bivariate_normal_cdf(z1, z2, 1.0) ==
            doctest::Approx(std_normal_cdf(std::min(z1, z2))));
      CHECK(bivariate_normal_cdf(z1, z2, -1.0) ==
            doctest::Approx(std::max(0.0, std_normal_cdf(z1) - std_normal_cdf(-z2)))
              .epsilon(1e-12));
    }
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(bivariate_normal_cdf(inf, 0.7, 0.4) == doctest::Approx(std_normal_cdf(0.7)));
  CHECK(bivariate_normal_cdf(40.0, 0.7, 0.4) == doctest::Approx(std_normal_cdf(0.7)));
  CHECK(bivariate_normal_cdf(-inf, 0.7, 0.4) == 0.0);
}

TEST_CASE("gaussian copula values and derivatives")
{
  CHECK(gaussian_copula(0.3, 0.8, 0.0) == doctest::Approx(0.24).epsilon(1e-14));
  const double c = gaussian_copula(0.5, 0.7, 0.5);
  CHECK(std::abs(c - oracle_copula(0.5, 0.7, 0.5)) < 1e-10);
  CHECK(c == doctest::Approx(0.4216163).epsilon(1e-6));

  CHECK_THROWS_AS(gaussian_copula(0.0, 0.5, 0.5), std::domain_error);
  CHECK_THROWS_AS(gaussian_copula(0.5, 1.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(gaussian_copula_du(0.5, 0.5, 0.5, 3), std::invalid_argument);

  const double h = 1e-6;
  for (double rho : { -0.7, 0.0, 0.5, 0.9 })
    for (double u1 : { 0.1, 0.5, 0.85 })
      for (double u2 : { 0.2, 0.7 }) {
        const double d1 = (gaussian_copula(u1 + h, u2, rho) - gaussian_copula(u1 - h, u2, rho)) /
                          (2.0 * h);
        const double d2 = (gaussian_copula(u1, u2 + h, rho) - gaussian_copula(u1, u2 - h, rho)) /
                          (2.0 * h);
        CHECK(gaussian_copula_du(u1, u2, rho, 1) == doctest::Approx(d1).epsilon(1e-6));
        CHECK(gaussian_copula_du(u1, u2, rho, 2) == doctest::Approx(d2).epsilon(1e-6));
        CHECK(gaussian_copula_du(u1, u2, rho, 1) >= 0.0);
        CHECK(gaussian_copula_du(u1, u2, rho, 1) <= 1.0);
      }
}

TEST_CASE("gaussian copula axioms on the closed square")
{
  for (double rho : { -0.9, 0.0, 0.5 }) {
    for (double a : { 0.0, 0.2, 0.65, 1.0 }) {
      CHECK(gaussian_copula_closed(a, 1.0, rho) == a);
      CHECK(gaussian_copula_closed(1.0, a, rho) == a);
      CHECK(gaussian_copula_closed(a, 0.0, rho) == 0.0);
      CHECK(gaussian_copula_closed(0.0, a, rho) == 0.0);
    }
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) {
        const double a = i / 20.0, a2 = (i + 1) / 20.0;
        const double b = j / 20.0, b2 = (j + 1) / 20.0;
        const double vol = gaussian_copula_closed(a2, b2, rho) - gaussian_copula_closed(a, b2, rho) -
                           gaussian_copula_closed(a2, b, rho) + gaussian_copula_closed(a, b, rho);
        CHECK(vol >= -1e-14);
      }
  }
  CHECK_THROWS_AS(gaussian_copula_closed(-0.1, 0.5, 0.2), std::domain_error);
}

TEST_CASE("conditional margins of the Gaussian model")
{
  for (double v : { 0.1, 0.45, 0.9 })
    CHECK(conditional_margin(v, 0.3, 0.0) == doctest::Approx(v).epsilon(1e-14));

  const double jump = conditional_margin(0.5 - 1e-2, 0.5, 1.0 - 1e-6);
  CHECK(jump < 0.01);
  CHECK(conditional_margin(0.5 + 1e-2, 0.5, 1.0 - 1e-6) > 0.99);
  for (double u : { 0.05, 0.5, 0.93 })
    CHECK(conditional_margin(conditional_quantile(u, 0.3, 0.4), 0.3, 0.4) ==
          doctest::Approx(u).epsilon(1e-12));

  // Monte Carlo in a thin window around x
  const GaussianCopulaSpec spec{ 0.4, -0.2, 0.3689989 };
  const auto s = sample(spec, 1'000'000, 99);
  const double x0 = 0.6, delta = 0.01;
  std::size_t in = 0, hits1 = 0, hits2 = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::abs(s.x[i] - x0) > delta)
      continue;
    ++in;
    hits1 += s.y1[i] <= 0.4 ? 1 : 0;
    hits2 += s.y2[i] <= 0.7 ? 1 : 0;
  }
  REQUIRE(in > 10000);
  const double se = 0.5 / std::sqrt(static_cast<double>(in));
  CHECK(std::abs(static_cast<double>(hits1) / in - conditional_margin(0.4, x0, 0.4)) < 4.0 * se + 2e-3);
  CHECK(std::abs(static_cast<double>(hits2) / in - conditional_margin(0.7, x0, -0.2)) < 4.0 * se + 2e-3);
}

TEST_CASE("bridge covariance")
{
  const double rho = 0.5;
  CHECK(bridge_cov(1.0, 1.0, 0.4, 0.6, rho) == doctest::Approx(0.0));
  CHECK(bridge_cov(0.3, 1.0, 0.3, 1.0, rho) == doctest::Approx(0.3 * 0.7));
  const double c = gaussian_copula(0.5, 0.7, rho);
  CHECK(bridge_cov(0.5, 0.7, 0.5, 0.7, rho) == doctest::Approx(c * (1.0 - c)));
  CHECK(bridge_cov(0.2, 0.8, 0.6, 0.3, rho) == doctest::Approx(bridge_cov(0.6, 0.3, 0.2, 0.8, rho)));

  // Gram matrix on a small grid is positive semi-definite (checked via Cholesky with slack)
  std::vector<std::pair<double, double>> pts;
  for (double a : { 0.2, 0.5, 0.8 })
    for (double b : { 0.3, 0.7 })
      pts.emplace_back(a, b);
  const std::size_t m = pts.size();
  std::vector<double> g(m * m), l(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      g[i * m + j] = bridge_cov(pts[i].first, pts[i].second, pts[j].first, pts[j].second, rho);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = g[i * m + j];
      for (std::size_t k = 0; k < j; ++k)
        s -= l[i * m + k] * l[j * m + k];
      if (i == j) {
        CHECK(s > -1e-12);
        l[i * m + i] = std::sqrt(std::max(s, 1e-300));
      } else {
        l[i * m + j] = s / l[j * m + j];
      }
    }
}

TEST_CASE("limit standard deviation")
{
  CHECK(std::abs(limit_sigma(0.5, 0.7, 0.5) - 0.2080) <= 0.0005);
  CHECK(limit_sigma(0.5, 0.5, 0.0) == doctest::Approx(0.25).epsilon(1e-12));

  for (double rho : { -0.6, 0.0, 0.5, 0.85 })
    for (double u1 : { 0.15, 0.5, 0.8 })
      for (double u2 : { 0.3, 0.7, 0.95 }) {
        const auto law = limit_law(u1, u2, rho);
        const double c = oracle_copula(u1, u2, rho);
        const double h = 1e-5;
        const double a = (oracle_copula(u1 + h, u2, rho) - oracle_copula(u1 - h, u2, rho)) / (2 * h);
        const double b = (oracle_copula(u1, u2 + h, rho) - oracle_copula(u1, u2 - h, rho)) / (2 * h);
        CHECK(law.variance == doctest::Approx(cell_variance(u1, u2, c, a, b)).epsilon(1e-6));
        CHECK(law.sigma() == doctest::Approx(std::sqrt(law.variance)));
      }

  // simulated variance of the influence function
  const double rho = 0.5, u1 = 0.5, u2 = 0.7;
  const auto law = limit_law(u1, u2, rho);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  const double z1 = std_normal_quantile(u1), z2 = std_normal_quantile(u2);
  const int m = 1'000'000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < m; ++i) {
    const double a = nd(rng);
    const double b = rho * a + std::sqrt(1 - rho * rho) * nd(rng);
    const double v = (a <= z1 && b <= z2 ? 1.0 : 0.0) - law.dc1 * (a <= z1 ? 1.0 : 0.0) -
                     law.dc2 * (b <= z2 ? 1.0 : 0.0);
    s1 += v;
    s2 += v * v;
  }
  const double var = s2 / m - (s1 / m) * (s1 / m);
  CHECK(std::abs(var - law.variance) < 5e-4);

  // Lipschitz in u and vanishing at the corner
  for (double d : { 1e-3, 1e-2, 5e-2 }) {
    CHECK(std::abs(limit_sigma(0.5 + d, 0.7, rho) - limit_sigma(0.5, 0.7, rho)) <= 5.0 * d);
    CHECK(std::abs(limit_sigma(0.5, 0.7 - d, rho) - limit_sigma(0.5, 0.7, rho)) <= 5.0 * d);
  }
  CHECK(limit_sigma(1.0 - 1e-6, 1.0 - 1e-6, rho) < 1e-2);
}

TEST_CASE("copula is smooth enough for a second-order Taylor expansion")
{
  // remainder C(u + d) - C(u) - grad C . d scales like |d|^2: halving d
  // divides the remainder by about four
  const double rho = 0.5, u1 = 0.5, u2 = 0.7;
  const double g1 = gaussian_copula_du(u1, u2, rho, 1);
  const double g2 = gaussian_copula_du(u1, u2, rho, 2);
  auto rem = [&](double d) {
    return gaussian_copula(u1 + d, u2 - 0.5 * d, rho) - gaussian_copula(u1, u2, rho) -
           g1 * d + g2 * 0.5 * d;
  };
  for (double d : { 0.04, 0.02, 0.01 }) {
    const double ratio = rem(d) / rem(0.5 * d);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
  }
}

TEST_CASE("sampler")
{
  const GaussianCopulaSpec spec{ 0.4, -0.2, 0.3689989 };
  const auto a = sample(spec, 500, 42);
  const auto b = sample(spec, 500, 42);
  const auto c = sample(spec, 500, 43);
  CHECK(a.x == b.x);
  CHECK(a.y1 == b.y1);
  CHECK(a.y2 == b.y2);
  CHECK(a.x != c.x);

  const std::size_t n = 100'000;
  const auto s = sample(spec, n, 5);
  std::vector<double> zx(n), z1(n), z2(n);
  for (std::size_t i = 0; i < n; ++i) {
    REQUIRE(s.x[i] > 0.0);
    REQUIRE(s.x[i] < 1.0);
    REQUIRE(s.y1[i] > 0.0);
    REQUIRE(s.y2[i] < 1.0);
    zx[i] = std_normal_quantile(s.x[i]);
    z1[i] = std_normal_quantile(s.y1[i]);
    z2[i] = std_normal_quantile(s.y2[i]);
  }
  CHECK(std::abs(stats::pearson(z1, zx) - 0.4) < 0.01);
  CHECK(std::abs(stats::pearson(z2, zx) + 0.2) < 0.01);
  CHECK(std::abs(stats::pearson(z1, z2) - 0.3689989) < 0.01);

  const auto u = sample(spec, 10'000, 8);
  const auto uniform = [](double t) { return std::clamp(t, 0.0, 1.0); };
  // three simultaneous tests at overall level 1%
  const double crit = stats::ks_critical_value(u.size(), 0.01 / 3.0);
  CHECK(stats::ks_statistic(u.x, uniform) < crit);
  CHECK(stats::ks_statistic(u.y1, uniform) < crit);
  CHECK(stats::ks_statistic(u.y2, uniform) < crit);

  CHECK_THROWS_AS(GaussianSampler(GaussianCopulaSpec{ 0.95, 0.95, -0.9 }, 1), std::domain_error);
}

TEST_CASE("simplifying assumption holds in the Gaussian model")
{
  // Spearman correlation of the conditional pseudo-observations does not
  // depend on x and equals (6/pi) asin(rho12|X / 2)
  const GaussianCopulaSpec spec{ 0.4, -0.2, 0.3689989 };
  const auto s = sample(spec, 400'000, 3);
  const double target = 6.0 / std::numbers::pi * std::asin(0.25);
  for (double lo : { 0.0, 0.5 }) {
    std::vector<double> v1, v2;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s.x[i] >= lo && s.x[i] < lo + 0.5) {
        v1.push_back(conditional_margin(s.y1[i], s.x[i], spec.rho1X));
        v2.push_back(conditional_margin(s.y2[i], s.x[i], spec.rho2X));
      }
    // the conditional pseudo-observations are uniform, so Pearson on them is Spearman
    CHECK(std::abs(stats::pearson(v1, v2) - target) < 0.01);
  }
}
