#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "roughchain/ctmc.hpp"
#include "roughchain/matexp.hpp"

namespace roughchain {

enum class OptionKind { call, put };

std::string_view option_kind_name(OptionKind kind);
OptionKind parse_option_kind(std::string_view name);

/// Terminal barrier: the payoff is paid only when L < S_T < U.
struct Barrier {
  double L = 0.0;
  double U = HUGE_VAL;
};

struct OptionSpec {
  OptionKind kind = OptionKind::call;
  double strike = 4.0;
  double maturity = 1.0;
  double rate = 0.0;
  std::optional<Barrier> barrier;
  std::optional<std::size_t> bermudan_n;

  void validate() const;
  double intrinsic(double s) const;
  /// intrinsic(s) times the barrier indicator.
  double payoff(double s) const;
};

/// Index convention for the fast algorithm: `j` evaluates the inner price
/// under the regime the variance chain ends in; `l` keeps the starting regime
/// inside the sum.
enum class FastReading { j, l };

std::string_view fast_reading_name(FastReading reading);
FastReading parse_fast_reading(std::string_view name);

struct PricingOptions {
  ExpmOptions expm;
  FastReading reading = FastReading::j;
  unsigned threads = 1;
};

struct PriceResult {
  double price = 0.0;
  std::string method;
  std::size_t N = 0;
  std::size_t M = 0;
  double eps = 0.0;
  double wall_seconds = 0.0;
  std::string expm_method;
  std::size_t repaired_nodes = 0;
  std::size_t exercise_dates = 0;
};

/// Reconstructed asset levels s_{i,l} = g^-1(x_i + rho f(v_l)), one vector
/// of length N per variance node.
std::vector<Eigen::VectorXd> asset_levels(const Grid& xgrid, const Grid& vgrid, const ModelSpec& model,
                                          const MarketParams& market, const KernelSpec& kernel);

/// Payoff at flat index l*N + i, barrier indicator applied when present.
Eigen::VectorXd payoff_vector(const OptionSpec& option, const Grid& xgrid, const Grid& vgrid, const ModelSpec& model,
                              const MarketParams& market, const KernelSpec& kernel);

/// e^{-rT} [exp(Lambda T) values] at the anchor pair, through the coupled
/// generator.
double coupled_expectation(const GeneratorSet& gens, const Eigen::VectorXd& values, double T, double rate,
                           const PricingOptions& options = {});

/// Same expectation through the decoupled algorithm; values per regime.
double fast_expectation(const GeneratorSet& gens, const std::vector<Eigen::VectorXd>& values, double T, double rate,
                        const PricingOptions& options = {});

PriceResult price_european_coupled(const OptionSpec& option, const GeneratorSet& gens, const ModelSpec& model,
                                   const MarketParams& market, const KernelSpec& kernel,
                                   const PricingOptions& options = {});

/// Requires option.barrier.
PriceResult price_barrier_coupled(const OptionSpec& option, const GeneratorSet& gens, const ModelSpec& model,
                                  const MarketParams& market, const KernelSpec& kernel,
                                  const PricingOptions& options = {});

/// European or terminal-barrier price through the decoupled algorithm.
PriceResult price_fast(const OptionSpec& option, const GeneratorSet& gens, const ModelSpec& model,
                       const MarketParams& market, const KernelSpec& kernel, const PricingOptions& options = {});

/// Backward induction over n = option.bermudan_n equally spaced dates with
/// one cached one-step operator.
PriceResult price_bermudan(const OptionSpec& option, const GeneratorSet& gens, const ModelSpec& model,
                           const MarketParams& market, const KernelSpec& kernel, const PricingOptions& options = {});

}  // namespace roughchain
