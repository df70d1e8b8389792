#pragma once

namespace roughchain {

/// Power-law Volterra kernel with Hurst exponent `hurst` and its perturbation
/// by a positive time shift `eps`.
struct KernelSpec {
  double hurst = 0.12;
  double eps = 1e-8;

  /// Validates 0 < hurst < 1/2 and eps > 0.
  static KernelSpec make(double hurst, double eps);
  void validate() const;
};

/// Scalars the generator construction consumes.
///
/// `k_eps` is the perturbed kernel at zero lag, `r` normalises the
/// exponential factor linking the variance grid to the Laplace family and
/// `r_hat` is the (negative) mean-reversion coefficient that replaces the
/// Laplace integral in the variance drift.
struct LaplaceConstants {
  double k_eps;
  double r;
  double r_hat;
};

/// (t - s)^(H - 1/2) / Gamma(H + 1/2). Requires s < t.
double fractional_kernel(double t, double s, const KernelSpec& spec);

/// (t + eps - s)^(H - 1/2) / Gamma(H + 1/2). Requires s <= t.
double perturbed_kernel(double t, double s, const KernelSpec& spec);

/// Closed forms of K^eps, R and R-hat.
LaplaceConstants laplace_constants(const KernelSpec& spec);

/// Density of the Laplace measure m(dgamma) with respect to dgamma.
double laplace_density(double gamma, double hurst);

enum class LaplaceIntegral {
  r,                ///< int e^{-g eps} e^{-g} m(dg)
  r_hat_numerator,  ///< int e^{-g eps} g e^{-g} m(dg), so r_hat = -numerator / r
  kernel,           ///< int e^{-g (lag + eps)} m(dg) == perturbed kernel at lag
};

/// Adaptive quadrature of one of the Laplace-measure integrals over (0, inf).
/// Used as an independent check of the closed forms; `lag` is only read for
/// LaplaceIntegral::kernel. Throws NumericalError when the error estimate
/// stays above `tol` (relative to the integral).
double laplace_quadrature(LaplaceIntegral kind, const KernelSpec& spec, double tol, double lag = 0.0);

/// Quadrature of the Laplace representation of perturbed_kernel(t, s).
double laplace_kernel_quadrature(double t, double s, const KernelSpec& spec, double tol);

}  // namespace roughchain
