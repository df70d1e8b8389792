#include "roughchain/kernel.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "roughchain/errors.hpp"

namespace roughchain {

KernelSpec KernelSpec::make(double hurst, double eps) {
  KernelSpec spec{hurst, eps};
  spec.validate();
  return spec;
}

void KernelSpec::validate() const {
  if (!(hurst > 0.0 && hurst < 0.5)) {
    throw ConfigError("kernel: Hurst parameter must lie in (0, 1/2), got " + std::to_string(hurst));
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw ConfigError("kernel: perturbation eps must be positive, got " + std::to_string(eps));
  }
}

double fractional_kernel(double t, double s, const KernelSpec& spec) {
  if (!(s < t)) {
    throw DomainError("fractional_kernel: requires s < t (kernel is singular at s == t)");
  }
  return std::pow(t - s, spec.hurst - 0.5) / std::tgamma(spec.hurst + 0.5);
}

double perturbed_kernel(double t, double s, const KernelSpec& spec) {
  if (s > t) {
    throw DomainError("perturbed_kernel: requires s <= t");
  }
  return std::pow(t + spec.eps - s, spec.hurst - 0.5) / std::tgamma(spec.hurst + 0.5);
}

LaplaceConstants laplace_constants(const KernelSpec& spec) {
  spec.validate();
  const double g = std::tgamma(spec.hurst + 0.5);
  LaplaceConstants c{};
  c.k_eps = std::pow(spec.eps, spec.hurst - 0.5) / g;
  c.r = std::pow(1.0 + spec.eps, spec.hurst - 0.5) / g;
  c.r_hat = -(0.5 - spec.hurst) / (1.0 + spec.eps);
  return c;
}

double laplace_density(double gamma, double hurst) {
  return std::pow(gamma, -hurst - 0.5) / (std::tgamma(hurst + 0.5) * std::tgamma(0.5 - hurst));
}

namespace {

// int_0^inf gamma^(-H-1/2) gamma^power exp(-rate * gamma) dgamma, normalised by
// the m(dgamma) constant. The piece on (0, 1] is mapped through
// gamma = u^(1/p), p = 1/2 - H, which removes the singular weight exactly; the
// tail uses gamma = e^z and is cut where the integrand is below e^-60.
double weighted_laplace_integral(double hurst, double rate, int power, double tol) {
  using boost::math::quadrature::gauss_kronrod;
  const double p = 0.5 - hurst;
  constexpr unsigned max_depth = 15;

  auto head = [&](double u) {
    if (u <= 0.0) return power == 0 ? 1.0 / p : 0.0;
    const double gamma = std::pow(u, 1.0 / p);
    return std::pow(gamma, power) * std::exp(-rate * gamma) / p;
  };
  auto tail = [&](double z) {
    return std::exp((p + power) * z - rate * std::exp(z));
  };

  double z_max = std::log(std::max(1.0, 200.0 / rate));
  while (rate * std::exp(z_max) - (p + power) * z_max < 60.0) z_max += 1.0;

  double err_head = 0.0;
  double err_tail = 0.0;
  const double i_head = gauss_kronrod<double, 61>::integrate(head, 0.0, 1.0, max_depth, tol * 0.1, &err_head);
  const double i_tail = gauss_kronrod<double, 61>::integrate(tail, 0.0, z_max, max_depth, tol * 0.1, &err_tail);
  const double total = i_head + i_tail;
  const double err = err_head + err_tail;
  if (!std::isfinite(total) || err > tol * std::abs(total)) {
    throw NumericalError("laplace_quadrature: no convergence (estimate " + std::to_string(total) +
                         ", error " + std::to_string(err) + ", tol " + std::to_string(tol) + ")");
  }
  return total / (std::tgamma(hurst + 0.5) * std::tgamma(0.5 - hurst));
}

}  // namespace

double laplace_quadrature(LaplaceIntegral kind, const KernelSpec& spec, double tol, double lag) {
  spec.validate();
  if (!(tol > 0.0)) throw ConfigError("laplace_quadrature: tol must be positive");
  switch (kind) {
    case LaplaceIntegral::r:
      return weighted_laplace_integral(spec.hurst, 1.0 + spec.eps, 0, tol);
    case LaplaceIntegral::r_hat_numerator:
      return weighted_laplace_integral(spec.hurst, 1.0 + spec.eps, 1, tol);
    case LaplaceIntegral::kernel:
      if (lag < 0.0) throw DomainError("laplace_quadrature: negative kernel lag");
      return weighted_laplace_integral(spec.hurst, lag + spec.eps, 0, tol);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double laplace_kernel_quadrature(double t, double s, const KernelSpec& spec, double tol) {
  if (s > t) throw DomainError("laplace_kernel_quadrature: requires s <= t");
  return laplace_quadrature(LaplaceIntegral::kernel, spec, tol, t - s);
}

}  // namespace roughchain
