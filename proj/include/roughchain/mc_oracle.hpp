#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "roughchain/kernel.hpp"
#include "roughchain/models.hpp"
#include "roughchain/pricing.hpp"

namespace roughchain {

struct McConfig {
  std::size_t paths = 100000;
  /// time steps per year
  std::size_t steps = 512;
  std::uint64_t seed = 20240101;
  bool antithetic = true;
  unsigned threads = 1;

  void validate() const;
};

/// Which kernel drives the Volterra equation: the singular fractional kernel
/// or the perturbed kernel K(t + eps, s).
enum class VolterraKernel { rough, perturbed };

/// Kernel-integrated Euler weights on a uniform grid of n steps over [0, T].
/// drift[m] = int over one step of K at lag index m (exact power integral);
/// diffusion[m] = sqrt(int K^2 / dt), the L2-matched weight. Index m = k - j - 1.
struct VolterraWeights {
  std::vector<double> drift;
  std::vector<double> diffusion;
  double dt = 0.0;
};

VolterraWeights volterra_weights(const KernelSpec& kernel, VolterraKernel which, std::size_t n, double T);

/// Variance paths, one row per path and n + 1 columns (t_0 = 0 ... t_n = T).
/// dB is paths x n standard normals scaled by sqrt(dt); coefficients are
/// evaluated at the truncated state.
Eigen::MatrixXd simulate_v(const ModelSpec& model, const KernelSpec& kernel, VolterraKernel which,
                           const MarketParams& market, const Eigen::MatrixXd& dB, double T);

/// Same, with increments drawn from the configured RNG streams.
Eigen::MatrixXd simulate_v(const ModelSpec& model, const KernelSpec& kernel, VolterraKernel which,
                           const MarketParams& market, const McConfig& mc, double T);

struct McEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::size_t paths = 0;
  std::uint64_t seed = 0;
};

/// Discounted payoff mean of the European or terminal-barrier option.
McEstimate mc_price(const OptionSpec& option, const ModelSpec& model, const MarketParams& market,
                    const KernelSpec& kernel, VolterraKernel which, const McConfig& mc);

struct RateEstimate {
  double slope = 0.0;
  std::vector<double> eps;
  /// E |V^eps_T - V_T|^2 per eps, with common Brownian increments
  std::vector<double> gap;
};

RateEstimate estimate_l2_rate(const std::vector<double>& eps_list, const ModelSpec& model, const MarketParams& market,
                              const KernelSpec& kernel, const McConfig& mc, double T);

/// Variance floor used by the simulation for `model`.
double mc_variance_floor(const ModelSpec& model, const MarketParams& market);

}  // namespace roughchain
