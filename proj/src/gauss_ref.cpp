#include "condcop/gauss_ref.hpp"

#include "condcop/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace condcop {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

template <std::size_t N>
double
horner(const std::array<double, N>& c, double x) noexcept
{
  double s = c[N - 1];
  for (std::size_t i = N - 1; i-- > 0;)
    s = s * x + c[i];
  return s;
}

// Wichura's AS241 (PPND16), relative accuracy about 1e-16.
double
ppnd16(double p) noexcept
{
  static constexpr std::array<double, 8> a = {
    3.3871328727963666080e0,  1.3314166789178437745e+2,
    1.9715909503065514427e+3, 1.3731693765509461125e+4,
    4.5921953931549871457e+4, 6.7265770927008700853e+4,
    3.3430575583588128105e+4, 2.5090809287301226727e+3
  };
  static constexpr std::array<double, 8> b = {
    1.0,                      4.2313330701600911252e+1,
    6.8718700749205790830e+2, 5.3941960214247511077e+3,
    2.1213794301586595867e+4, 3.9307895800092710610e+4,
    2.8729085735721942674e+4, 5.2264952788528545610e+3
  };
  static constexpr std::array<double, 8> c = {
    1.42343711074968357734e0,  4.63033784615654529590e0,
    5.76949722146069140550e0,  3.64784832476320460504e0,
    1.27045825245236838258e0,  2.41780725177450611770e-1,
    2.27238449892691845833e-2, 7.74545014278341407640e-4
  };
  static constexpr std::array<double, 8> d = {
    1.0,                       2.05319162663775882187e0,
    1.67638483018380384940e0,  6.89767334985100004550e-1,
    1.48103976427480074590e-1, 1.51986665636164571966e-2,
    5.47593808499534494600e-4, 1.05075007164441684324e-9
  };
  static constexpr std::array<double, 8> e = {
    6.65790464350110377720e0,  5.46378491116411436990e0,
    1.78482653991729133580e0,  2.96560571828504891230e-1,
    2.65321895265761230930e-2, 1.24266094738807843860e-3,
    2.71155556874348757815e-5, 2.01033439929228813265e-7
  };
  static constexpr std::array<double, 8> f = {
    1.0,                       5.99832206555887937690e-1,
    1.36929880922735805310e-1, 1.48753612908506148525e-2,
    7.86869131145613259100e-4, 1.84631831751005468180e-5,
    1.42151175831644588870e-7, 2.04426310338993978564e-15
  };

  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * horner(a, r) / horner(b, r);
  }
  double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = horner(c, r) / horner(d, r);
  } else {
    r -= 5.0;
    val = horner(e, r) / horner(f, r);
  }
  return q < 0.0 ? -val : val;
}

const GaussLegendreRule&
bvn_rule()
{
  static const GaussLegendreRule rule = gauss_legendre(20);
  return rule;
}

// Genz's BVNU: P(Z1 > h, Z2 > k) with correlation r.
double
bvnu(double h, double k, double r)
{
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (h == inf || k == inf)
    return 0.0;
  if (h == -inf)
    return k == -inf ? 1.0 : std_normal_cdf(-k);
  if (k == -inf)
    return std_normal_cdf(-h);
  if (r == 0.0)
    return std_normal_cdf(-h) * std_normal_cdf(-k);

  const auto& rule = bvn_rule();
  double hk = h * k;
  double bvn = 0.0;
  if (std::abs(r) < 0.925) {
    const double hs = 0.5 * (h * h + k * k);
    const double asr = 0.5 * std::asin(r);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double sn = std::sin(asr * (1.0 + rule.nodes[i]));
      bvn += rule.weights[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
    }
    return std::clamp(bvn * asr / two_pi + std_normal_cdf(-h) * std_normal_cdf(-k),
                      0.0,
                      1.0);
  }

  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (std::abs(r) < 1.0) {
    const double as = 1.0 - r * r;
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 80.0;
    double asr = -0.5 * (bs / as + hk);
    if (asr > -100.0)
      bvn = a * std::exp(asr) *
            (1.0 - c * (bs - as) * (1.0 - d * bs) / 3.0 + c * d * as * as);
    if (hk > -100.0) {
      const double bb = std::sqrt(bs);
      const double sp = std::sqrt(two_pi) * std_normal_cdf(-bb / a);
      bvn -= std::exp(-0.5 * hk) * sp * bb * (1.0 - c * bs * (1.0 - d * bs) / 3.0);
    }
    a *= 0.5;
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double ax = a * (1.0 + rule.nodes[i]);
      const double xs = ax * ax;
      asr = -0.5 * (bs / xs + hk);
      if (asr <= -100.0)
        continue;
      const double sp = 1.0 + c * xs * (1.0 + 5.0 * d * xs);
      const double rs = std::sqrt(1.0 - xs);
      const double ep = std::exp(-0.5 * hk * xs / ((1.0 + rs) * (1.0 + rs))) / rs;
      sum += rule.weights[i] * std::exp(asr) * (sp - ep);
    }
    bvn = (a * sum - bvn) / two_pi;
  }
  if (r > 0.0) {
    bvn += std_normal_cdf(-std::max(h, k));
  } else if (h >= k) {
    bvn = -bvn;
  } else {
    const double l = h < 0.0 ? std_normal_cdf(k) - std_normal_cdf(h)
                             : std_normal_cdf(-h) - std_normal_cdf(-k);
    bvn = l - bvn;
  }
  return std::clamp(bvn, 0.0, 1.0);
}

void
check_open_unit(double v, const char* what)
{
  if (!(v > 0.0 && v < 1.0))
    throw std::domain_error(std::string(what) + " must lie in (0, 1)");
}

void
check_correlation(double r, const char* what)
{
  if (!(r > -1.0 && r < 1.0))
    throw std::domain_error(std::string(what) + " must lie in (-1, 1)");
}

} // namespace

double
std_normal_cdf(double z) noexcept
{
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double
std_normal_pdf(double z) noexcept
{
  return std::exp(-0.5 * z * z) / std::sqrt(two_pi);
}

double
std_normal_quantile(double p)
{
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("normal quantile: p must lie in (0, 1)");
  if (p > 0.5)
    return -std_normal_quantile(1.0 - p);
  double x = ppnd16(p);
  // one Halley step against Phi
  const double err = (std_normal_cdf(x) - p) / std_normal_pdf(x);
  if (std::isfinite(err))
    x -= err / (1.0 + 0.5 * x * err);
  return x;
}

double
bivariate_normal_cdf(double z1, double z2, double rho)
{
  if (!(rho >= -1.0 && rho <= 1.0))
    throw std::domain_error("bivariate normal: rho must lie in [-1, 1]");
  return bvnu(-z1, -z2, rho);
}

double
partial_correlation(double rho12, double rho1X, double rho2X)
{
  check_correlation(rho12, "rho12");
  check_correlation(rho1X, "rho1X");
  check_correlation(rho2X, "rho2X");
  const double det = 1.0 - rho12 * rho12 - rho1X * rho1X - rho2X * rho2X +
                     2.0 * rho12 * rho1X * rho2X;
  if (!(det > 0.0))
    throw std::domain_error("correlation triple is not positive definite");
  const double r = (rho12 - rho1X * rho2X) /
                   std::sqrt((1.0 - rho1X * rho1X) * (1.0 - rho2X * rho2X));
  if (!(r > -1.0 && r < 1.0))
    throw std::domain_error("partial correlation outside (-1, 1)");
  return r;
}

void
GaussianCopulaSpec::validate() const
{
  (void)partial_correlation(rho12, rho1X, rho2X);
}

double
gaussian_copula(double u1, double u2, double rho)
{
  check_open_unit(u1, "u1");
  check_open_unit(u2, "u2");
  return bivariate_normal_cdf(std_normal_quantile(u1), std_normal_quantile(u2), rho);
}

double
gaussian_copula_closed(double u1, double u2, double rho)
{
  if (!(u1 >= 0.0 && u1 <= 1.0 && u2 >= 0.0 && u2 <= 1.0))
    throw std::domain_error("copula argument outside [0, 1]^2");
  if (u1 == 0.0 || u2 == 0.0)
    return 0.0;
  if (u1 == 1.0)
    return u2;
  if (u2 == 1.0)
    return u1;
  return gaussian_copula(u1, u2, rho);
}

double
gaussian_copula_du(double u1, double u2, double rho, int j)
{
  check_open_unit(u1, "u1");
  check_open_unit(u2, "u2");
  if (j != 1 && j != 2)
    throw std::invalid_argument("copula derivative index must be 1 or 2");
  check_correlation(rho, "rho");
  const double z1 = std_normal_quantile(u1);
  const double z2 = std_normal_quantile(u2);
  const double s = std::sqrt(1.0 - rho * rho);
  return j == 1 ? std_normal_cdf((z2 - rho * z1) / s)
                : std_normal_cdf((z1 - rho * z2) / s);
}

double
conditional_margin(double v, double x, double rho_jx)
{
  check_open_unit(v, "v");
  check_open_unit(x, "x");
  check_correlation(rho_jx, "rho");
  return std_normal_cdf((std_normal_quantile(v) - rho_jx * std_normal_quantile(x)) /
                        std::sqrt(1.0 - rho_jx * rho_jx));
}

double
conditional_quantile(double u, double x, double rho_jx)
{
  check_open_unit(u, "u");
  check_open_unit(x, "x");
  check_correlation(rho_jx, "rho");
  return std_normal_cdf(rho_jx * std_normal_quantile(x) +
                        std::sqrt(1.0 - rho_jx * rho_jx) * std_normal_quantile(u));
}

double
bridge_cov(double u1, double u2, double v1, double v2, double rho)
{
  for (double a : { u1, u2, v1, v2 })
    if (!(a > 0.0 && a <= 1.0))
      throw std::domain_error("bridge covariance: points must lie in (0, 1]^2");
  return gaussian_copula_closed(std::min(u1, v1), std::min(u2, v2), rho) -
         gaussian_copula_closed(u1, u2, rho) * gaussian_copula_closed(v1, v2, rho);
}

double
LimitLawSpec::sigma() const
{
  return std::sqrt(variance);
}

LimitLawSpec
limit_law(double u1, double u2, double rho)
{
  check_open_unit(u1, "u1");
  check_open_unit(u2, "u2");
  LimitLawSpec spec{ rho, u1, u2, 0.0, 0.0, 0.0, 0.0 };
  spec.copula = gaussian_copula(u1, u2, rho);
  spec.dc1 = gaussian_copula_du(u1, u2, rho, 1);
  spec.dc2 = gaussian_copula_du(u1, u2, rho, 2);

  const double pts[3][2] = { { u1, u2 }, { u1, 1.0 }, { 1.0, u2 } };
  const double coef[3] = { 1.0, -spec.dc1, -spec.dc2 };
  double var = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      var += coef[a] * coef[b] *
             bridge_cov(pts[a][0], pts[a][1], pts[b][0], pts[b][1], rho);
  if (var < -1e-12)
    throw std::runtime_error("limit variance is negative");
  spec.variance = std::max(var, 0.0);
  return spec;
}

double
limit_sigma(double u1, double u2, double rho)
{
  return limit_law(u1, u2, rho).sigma();
}

GaussianSampler::GaussianSampler(const GaussianCopulaSpec& spec,
                                 std::uint64_t seed)
  : rng_(seed)
{
  spec.validate();
  const double r[3][3] = { { 1.0, spec.rho12, spec.rho1X },
                           { spec.rho12, 1.0, spec.rho2X },
                           { spec.rho1X, spec.rho2X, 1.0 } };
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = r[i][j];
      for (int k = 0; k < j; ++k)
        s -= l_[i][k] * l_[j][k];
      if (i == j) {
        if (!(s > 0.0))
          throw std::domain_error("Cholesky factorization failed");
        l_[i][i] = std::sqrt(s);
      } else {
        l_[i][j] = s / l_[j][j];
      }
    }
  }
}

TrivariateSample
GaussianSampler::draw(std::size_t n)
{
  // keep uniforms strictly inside (0, 1) so conditional margins stay finite
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = std::nextafter(1.0, 0.0);
  auto to_unit = [&](double z) { return std::clamp(std_normal_cdf(z), lo, hi); };

  TrivariateSample s;
  s.x.resize(n);
  s.y1.resize(n);
  s.y2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double e0 = normal_(rng_);
    const double e1 = normal_(rng_);
    const double e2 = normal_(rng_);
    const double z1 = l_[0][0] * e0;
    const double z2 = l_[1][0] * e0 + l_[1][1] * e1;
    const double zx = l_[2][0] * e0 + l_[2][1] * e1 + l_[2][2] * e2;
    s.y1[i] = to_unit(z1);
    s.y2[i] = to_unit(z2);
    s.x[i] = to_unit(zx);
  }
  return s;
}

TrivariateSample
sample(const GaussianCopulaSpec& spec, std::size_t n, std::uint64_t seed)
{
  return GaussianSampler(spec, seed).draw(n);
}

} // namespace condcop
