#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "roughchain/ctmc.hpp"
#include "roughchain/mc_oracle.hpp"
#include "roughchain/models.hpp"
#include "roughchain/pricing.hpp"

namespace roughchain {

enum class PricingMethod { fast, coupled };

std::string_view pricing_method_name(PricingMethod method);
PricingMethod parse_pricing_method(std::string_view name);

struct NumericsConfig {
  std::size_t N = 100;
  std::size_t M = 100;
  std::optional<GridBounds> v_bounds;
  std::optional<GridBounds> x_bounds;
  GridStyle grid_style = GridStyle::piecewise_uniform;
  double regularity = 8.0;
  PricingMethod method = PricingMethod::fast;
  std::optional<std::size_t> bermudan_n;
  NegativeRatePolicy negative_rates = NegativeRatePolicy::upwind;
  ThetaVariant theta = ThetaVariant::lemma;
  FastReading fast_reading = FastReading::j;
  double expm_tol = 1e-10;
  std::size_t dense_cap = 1024;
};

struct OptionConfig {
  OptionKind kind = OptionKind::call;
  double D = 4.0;
  double T = 1.0;
  double r = 0.0;
  std::optional<double> L;
  std::optional<double> U;
};

/// Everything a run needs. The JSON layout mirrors the struct: blocks
/// "model" {name, params{q, eta, vartheta, sigma, a, b, c, beta}},
/// "market" {S0, V0, rho}, "kernel" {H, eps}, "numerics", "option"
/// {kind, D, T, r, L, U} and "mc" {paths, steps, seed, antithetic}.
/// Missing keys take the defaults above; unknown keys are rejected.
struct RunConfig {
  ModelFamily model = ModelFamily::rough_heston;
  ModelParams params;
  MarketParams market;
  KernelSpec kernel;
  NumericsConfig numerics;
  OptionConfig option;
  McConfig mc;
  /// "path=value" overrides applied on top of the file, in order.
  std::vector<std::string> overrides;

  void validate() const;
  ModelSpec model_spec() const;
  OptionSpec option_spec() const;
  GeneratorOptions generator_options(unsigned threads = 1) const;
  PricingOptions pricing_options(unsigned threads = 1) const;
};

nlohmann::json to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& doc);

/// Parses the file, applies `overrides` (each "dotted.path=value", value read
/// as JSON when it parses, else as a string) and validates.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});
RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});

void apply_override(nlohmann::json& doc, const std::string& assignment);

}  // namespace roughchain
