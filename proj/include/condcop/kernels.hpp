#pragma once

namespace condcop {

enum class KernelFamily
{
  triweight, //!< (35/32)(1 - u^2)^3, twice continuously differentiable
  biweight   //!< (15/16)(1 - u^2)^2, continuously differentiable
};

//! Compactly supported polynomial kernel on (-1, 1).
//!
//! The family is a closed set so that the smoothness orders can be stated
//! per kernel: the triweight is evaluated up to its second derivative, the
//! biweight up to its first.
class Kernel
{
public:
  explicit Kernel(KernelFamily family) noexcept
    : family_(family)
  {}

  KernelFamily family() const noexcept { return family_; }

  //! Highest derivative order that may be requested from eval().
  int max_order() const noexcept;

  //! k^(order)(u); exactly 0 outside (-1, 1).
  //! Throws std::invalid_argument if order > max_order().
  double eval(double u, int order = 0) const;

  double operator()(double u) const noexcept { return value(u); }

  //! Integral of the kernel over (-inf, u].
  double integral_to(double u) const noexcept;

  //! Derivatives of w_k(u) = u^k k(u), k in {0, 1, 2, 3}.
  double weight(int k, double u, int order = 0) const;

  static constexpr double support_radius = 1.0;

private:
  double value(double u) const noexcept;

  KernelFamily family_;
};

double eval_kernel(const Kernel& k, double u, int order);
double weight_kernel(const Kernel& k, int k_index, double u, int order);

//! Constants a_K = 2 int_0^1 u K(u) du and c_K = 2 int_0^1 (u - a_K)^2 K(u) du
//! that bound the local-linear determinant from below. Diagnostic only.
struct KernelMoments
{
  double a;
  double c;
};

KernelMoments kernel_moments(const Kernel& k);

//! phi_h(y, Y) = int_{-inf}^{y} L_h(t - Y) dt, a smoothed version of
//! the indicator 1{Y <= y}.
class SmoothedIndicator
{
public:
  //! Throws std::invalid_argument unless h > 0.
  SmoothedIndicator(Kernel kernel, double h);

  double operator()(double y, double obs) const noexcept
  {
    return kernel_.integral_to((y - obs) / h_);
  }

  //! d/dy phi_h(y, Y) = L_h(y - Y).
  double derivative(double y, double obs) const noexcept
  {
    return kernel_((y - obs) / h_) / h_;
  }

  double bandwidth() const noexcept { return h_; }
  const Kernel& kernel() const noexcept { return kernel_; }

private:
  Kernel kernel_;
  double h_;
};

double phi(const SmoothedIndicator& si, double y, double obs);

} // namespace condcop
