#include "roughchain/pricing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "parallel.hpp"
#include "roughchain/errors.hpp"

namespace roughchain {

std::string_view option_kind_name(OptionKind kind) { return kind == OptionKind::call ? "call" : "put"; }

OptionKind parse_option_kind(std::string_view name) {
  if (name == "call") return OptionKind::call;
  if (name == "put") return OptionKind::put;
  throw ConfigError("unknown option kind '" + std::string(name) + "' (expected call or put)");
}

std::string_view fast_reading_name(FastReading reading) { return reading == FastReading::j ? "j" : "l"; }

FastReading parse_fast_reading(std::string_view name) {
  if (name == "j") return FastReading::j;
  if (name == "l") return FastReading::l;
  throw ConfigError("unknown fast-algorithm reading '" + std::string(name) + "' (expected j or l)");
}

void OptionSpec::validate() const {
  if (!(strike >= 0.0) || !std::isfinite(strike)) throw ConfigError("option: strike D must be finite and >= 0");
  if (!(maturity > 0.0) || !std::isfinite(maturity)) throw ConfigError("option: maturity T must be > 0");
  if (!std::isfinite(rate)) throw ConfigError("option: rate r must be finite");
  if (barrier && !(barrier->L >= 0.0 && barrier->L < barrier->U)) {
    throw ConfigError("option: barrier needs 0 <= L < U");
  }
  if (bermudan_n && *bermudan_n < 1) throw ConfigError("option: bermudan_n must be >= 1");
}

double OptionSpec::intrinsic(double s) const {
  return kind == OptionKind::call ? std::max(s - strike, 0.0) : std::max(strike - s, 0.0);
}

double OptionSpec::payoff(double s) const {
  if (barrier && !(s > barrier->L && s < barrier->U)) return 0.0;
  return intrinsic(s);
}

std::vector<Eigen::VectorXd> asset_levels(const Grid& xgrid, const Grid& vgrid, const ModelSpec& model,
                                          const MarketParams& market, const KernelSpec& kernel) {
  const double k_eps = laplace_constants(kernel).k_eps;
  const auto N = static_cast<Eigen::Index>(xgrid.size());
  std::vector<Eigen::VectorXd> out(vgrid.size(), Eigen::VectorXd(N));
  for (std::size_t l = 0; l < vgrid.size(); ++l) {
    for (Eigen::Index i = 0; i < N; ++i) {
      out[l][i] = reconstruct_asset(xgrid.nodes[i], vgrid.nodes[l], model, market, k_eps);
    }
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<Eigen::VectorXd> payoff_by_regime(const OptionSpec& option, const GeneratorSet& gens,
                                              const ModelSpec& model, const MarketParams& market,
                                              const KernelSpec& kernel) {
  auto levels = asset_levels(gens.xgrid(), gens.vgrid(), model, market, kernel);
  for (auto& v : levels) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = option.payoff(v[i]);
  }
  return levels;
}

Eigen::VectorXd flatten(const std::vector<Eigen::VectorXd>& parts) {
  Eigen::Index total = 0;
  for (const auto& p : parts) total += p.size();
  Eigen::VectorXd out(total);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.segment(at, p.size()) = p;
    at += p.size();
  }
  return out;
}

Eigen::Index anchor_flat(const GeneratorSet& gens) {
  return static_cast<Eigen::Index>(gens.vgrid().anchor_index * gens.N() + gens.xgrid().anchor_index);
}

PriceResult make_result(const GeneratorSet& gens, std::string method) {
  PriceResult r;
  r.method = std::move(method);
  r.N = gens.N();
  r.M = gens.M();
  r.eps = gens.provenance().eps;
  r.repaired_nodes = gens.repaired_nodes();
  return r;
}

}  // namespace

Eigen::VectorXd payoff_vector(const OptionSpec& option, const Grid& xgrid, const Grid& vgrid, const ModelSpec& model,
                              const MarketParams& market, const KernelSpec& kernel) {
  auto levels = asset_levels(xgrid, vgrid, model, market, kernel);
  for (auto& v : levels) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = option.payoff(v[i]);
  }
  return flatten(levels);
}

double coupled_expectation(const GeneratorSet& gens, const Eigen::VectorXd& values, double T, double rate,
                           const PricingOptions& options) {
  const ExpmPlan plan(gens.coupled(), T, options.expm);
  const Eigen::VectorXd u = plan.apply(values);
  return std::exp(-rate * T) * u[anchor_flat(gens)];
}

double fast_expectation(const GeneratorSet& gens, const std::vector<Eigen::VectorXd>& values, double T, double rate,
                        const PricingOptions& options) {
  const std::size_t M = gens.M();
  if (values.size() != M) throw ConfigError("fast pricer: need one value vector per variance state");
  const std::size_t l0 = gens.vgrid().anchor_index;
  const std::size_t i0 = gens.xgrid().anchor_index;
  const Eigen::MatrixXd P = expm_dense(gens.Q().dense(), T, std::max<std::size_t>(options.expm.dense_cap, M));

  auto inner = [&](std::size_t j) {
    ExpmOptions opts = options.expm;
    if (opts.method == ExpmMethod::automatic) opts.method = ExpmMethod::uniformization;
    const double nu_t = [&] {
      double nu = 0.0;
      for (double d : gens.lambdas()[j].diag) nu = std::max(nu, std::abs(d));
      return nu * T;
    }();
    if (opts.method == ExpmMethod::uniformization && nu_t > opts.uniformization_budget) {
      opts.method = ExpmMethod::krylov_shift_invert;
    }
    return expm_action(gens.lambdas()[j].sparse(), values[j], T, opts)[static_cast<Eigen::Index>(i0)];
  };

  double total = 0.0;
  if (options.reading == FastReading::l) {
    const double row = P.row(static_cast<Eigen::Index>(l0)).sum();
    total = row * inner(l0);
  } else {
    std::vector<double> parts(M, 0.0);
    detail::parallel_for(M, options.threads, [&](std::size_t j) {
      const double w = P(static_cast<Eigen::Index>(l0), static_cast<Eigen::Index>(j));
      parts[j] = w == 0.0 ? 0.0 : w * inner(j);
    });
    for (double p : parts) total += p;
  }
  return std::exp(-rate * T) * total;
}

PriceResult price_european_coupled(const OptionSpec& option, const GeneratorSet& gens, const ModelSpec& model,
                                   const MarketParams& market, const KernelSpec& kernel,
                                   const PricingOptions& options) {
  option.validate();
  const auto start = Clock::now();
  PriceResult r = make_result(gens, option.barrier ? "barrier-coupled" : "european-coupled");
  const Eigen::VectorXd phi = payoff_vector(option, gens.xgrid(), gens.vgrid(), model, market, kernel);
  const ExpmPlan plan(gens.coupled(), option.maturity, options.expm);
  r.price = std::exp(-option.rate * option.maturity) * plan.apply(phi)[anchor_flat(gens)];
  r.expm_method = std::string(expm_method_name(plan.method()));
  r.wall_seconds = seconds_since(start);
  return r;
}

PriceResult price_barrier_coupled(const OptionSpec& option, const GeneratorSet& gens, const ModelSpec& model,
                                  const MarketParams& market, const KernelSpec& kernel,
                                  const PricingOptions& options) {
  if (!option.barrier) throw ConfigError("barrier pricer: option has no barrier levels");
  return price_european_coupled(option, gens, model, market, kernel, options);
}

PriceResult price_fast(const OptionSpec& option, const GeneratorSet& gens, const ModelSpec& model,
                       const MarketParams& market, const KernelSpec& kernel, const PricingOptions& options) {
  option.validate();
  const auto start = Clock::now();
  PriceResult r = make_result(gens, option.barrier ? "barrier-fast" : "european-fast");
  const auto payoffs = payoff_by_regime(option, gens, model, market, kernel);
  r.price = fast_expectation(gens, payoffs, option.maturity, option.rate, options);
  r.expm_method = "dense+uniformization";
  r.wall_seconds = seconds_since(start);
  return r;
}

PriceResult price_bermudan(const OptionSpec& option, const GeneratorSet& gens, const ModelSpec& model,
                           const MarketParams& market, const KernelSpec& kernel, const PricingOptions& options) {
  option.validate();
  if (!option.bermudan_n) throw ConfigError("bermudan pricer: option has no exercise-date count");
  const std::size_t n = *option.bermudan_n;
  const auto start = Clock::now();
  PriceResult r = make_result(gens, "bermudan-coupled");
  r.exercise_dates = n;
  const Eigen::VectorXd phi = payoff_vector(option, gens.xgrid(), gens.vgrid(), model, market, kernel);
  const double dt = option.maturity / static_cast<double>(n);
  const double disc = std::exp(-option.rate * dt);
  const ExpmPlan step(gens.coupled(), dt, options.expm);
  Eigen::VectorXd B = phi;
  for (std::size_t i = 0; i < n; ++i) {
    B = (disc * step.apply(B)).cwiseMax(phi);
  }
  r.price = B[anchor_flat(gens)];
  r.expm_method = std::string(expm_method_name(step.method()));
  r.wall_seconds = seconds_since(start);
  return r;
}

}  // namespace roughchain
