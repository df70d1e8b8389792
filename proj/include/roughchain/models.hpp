#pragma once

#include <string>
#include <string_view>
#include <utility>

#include "roughchain/kernel.hpp"

namespace roughchain {

enum class ModelFamily {
  rough_heston,
  rough_42,
  rough_alpha_hyper,
  rough_sabr,
  rough_heston_sabr,
  rough_quadratic_slv,
};

/// Canonical names: "rough-heston", "rough-42", "rough-alpha-hyper",
/// "rough-sabr", "rough-heston-sabr", "rough-quadratic-slv".
std::string_view model_name(ModelFamily family);
ModelFamily parse_model_family(std::string_view name);

/// Named parameters of all six families. Each family reads the subset it
/// needs; `a`, `b`, `c` are the family's own parameters, never the drift b(v).
struct ModelParams {
  double r = 0.0;
  double q = 0.0;
  double eta = 4.0;
  double vartheta = 0.035;
  double sigma = 0.8;
  double a = 0.02;
  double b = 0.05;
  double c = 1.0;
  double beta = 0.7;
};

class ModelSpec;

struct MarketParams {
  double S0 = 10.0;
  double V0 = 0.04;
  double rho = -0.75;

  void validate(const ModelSpec& model) const;
};

/// Coefficients of one rough stochastic local volatility family
///   dS = mu(S,V) dt + nu(S) phi(V) dW
///   V  = V0 + int K(t,s) (b(V) ds + sigma(V) dB)
/// together with the decoupling transforms g = int du/nu(u) and
/// F = int phi(u)/sigma(u) du (so that f = F / K^eps).
class ModelSpec {
 public:
  static ModelSpec make(ModelFamily family, const ModelParams& params);
  static ModelSpec make(std::string_view name, const ModelParams& params);

  ModelFamily family() const noexcept { return family_; }
  std::string_view name() const noexcept { return model_name(family_); }
  const ModelParams& params() const noexcept { return p_; }

  double mu(double s, double v) const;
  double nu(double s) const;
  double dnu(double s) const;
  double phi(double v) const;
  double dphi(double v) const;
  double drift_b(double v) const;
  double sigma(double v) const;
  double dsigma(double v) const;

  double g(double s) const;
  double g_inverse(double x) const;
  /// Open interval of values taken by g on the asset domain.
  std::pair<double, double> g_range() const;
  /// Kernel-free part of f: f(v) = F(v) / K^eps.
  double F(double v) const;
  double f(double v, const KernelSpec& kernel) const;
  double f(double v, double k_eps) const { return F(v) / k_eps; }

  bool asset_in_domain(double s) const;
  bool variance_in_domain(double v) const;
  /// True when phi or sigma involve sqrt(v) or v and need v > 0.
  bool needs_positive_variance() const;

 private:
  ModelSpec(ModelFamily family, const ModelParams& params) : family_(family), p_(params) {}
  void validate() const;

  ModelFamily family_;
  ModelParams p_;
};

enum class ThetaVariant {
  lemma,        ///< -(rho/2) K^eps (sigma phi' - sigma' phi)
  discretized,  ///< +(rho/2) (sigma phi' - sigma' phi)
};

std::string_view theta_variant_name(ThetaVariant variant);
ThetaVariant parse_theta_variant(std::string_view name);

/// Asset level reconstructed from the auxiliary state: g^-1(x + rho f(v)).
double reconstruct_asset(double x, double v, const ModelSpec& model, const MarketParams& market,
                         double k_eps);

/// Drift of the auxiliary process X = g(S) - rho f(V) with the Laplace
/// integral replaced by its grid representation (v - V0) R-hat.
double drift_theta(double x, double v, const ModelSpec& model, const MarketParams& market,
                   const LaplaceConstants& constants, ThetaVariant variant = ThetaVariant::lemma);
double drift_theta(double x, double v, const ModelSpec& model, const MarketParams& market,
                   const KernelSpec& kernel, ThetaVariant variant = ThetaVariant::lemma);

}  // namespace roughchain
