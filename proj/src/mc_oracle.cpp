#include "roughchain/mc_oracle.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <random>
#include <string>

#include "parallel.hpp"
#include "roughchain/errors.hpp"

namespace roughchain {

void McConfig::validate() const {
  if (paths < 1) throw ConfigError("mc: paths must be >= 1");
  if (steps < 1) throw ConfigError("mc: steps must be >= 1");
}

namespace {

std::size_t step_count(const McConfig& mc, double T) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(static_cast<double>(mc.steps) * T)));
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

bool log_euler(const ModelSpec& model) {
  switch (model.family()) {
    case ModelFamily::rough_heston:
    case ModelFamily::rough_42:
    case ModelFamily::rough_alpha_hyper:
      return true;
    default:
      return false;
  }
}

struct PathSimulator {
  const ModelSpec& model;
  const MarketParams& market;
  VolterraWeights w;
  double floor;
  std::size_t n;
  // scratch
  std::vector<double> v, drift_terms, noise_terms;

  PathSimulator(const ModelSpec& m, const MarketParams& mk, VolterraWeights weights, double fl)
      : model(m), market(mk), w(std::move(weights)), floor(fl), n(w.drift.size()) {
    v.resize(n + 1);
    drift_terms.resize(n);
    noise_terms.resize(n);
  }

  double clamp(double x) const { return std::max(x, floor); }

  // dB holds n Brownian increments; fills v[0..n].
  void variance(const double* dB) {
    v[0] = market.V0;
    for (std::size_t k = 1; k <= n; ++k) {
      const double vj = clamp(v[k - 1]);
      drift_terms[k - 1] = model.drift_b(vj);
      noise_terms[k - 1] = model.sigma(vj) * dB[k - 1];
      double acc = market.V0;
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t m = k - j - 1;
        acc += w.drift[m] * drift_terms[j] + w.diffusion[m] * noise_terms[j];
      }
      v[k] = acc;
    }
  }

  // Terminal asset given v[] and both increment streams.
  double asset(const double* dB, const double* dBperp) const {
    const double rho = market.rho;
    const double rc = std::sqrt(1.0 - rho * rho);
    const double dt = w.dt;
    if (log_euler(model)) {
      double x = std::log(market.S0);
      const double growth = model.mu(1.0, market.V0);  // mu is linear in s here
      for (std::size_t k = 0; k < n; ++k) {
        const double ph = model.phi(clamp(v[k]));
        x += (growth - 0.5 * ph * ph) * dt + ph * (rho * dB[k] + rc * dBperp[k]);
      }
      return std::exp(x);
    }
    const bool absorbing = model.asset_in_domain(-1.0) == false;
    double s = market.S0;
    for (std::size_t k = 0; k < n; ++k) {
      const double ph = model.phi(clamp(v[k]));
      s += model.mu(s, v[k]) * dt + model.nu(s) * ph * (rho * dB[k] + rc * dBperp[k]);
      if (absorbing && s <= 0.0) return 0.0;
    }
    return s;
  }
};

void fill_normals(std::mt19937_64& rng, double scale, double* out, std::size_t n) {
  std::normal_distribution<double> normal;
  for (std::size_t i = 0; i < n; ++i) out[i] = scale * normal(rng);
}

}  // namespace

VolterraWeights volterra_weights(const KernelSpec& kernel, VolterraKernel which, std::size_t n, double T) {
  if (which == VolterraKernel::perturbed) {
    kernel.validate();
  } else if (!(kernel.hurst > 0.0 && kernel.hurst <= 0.5)) {
    throw ConfigError("volterra weights: Hurst parameter must lie in (0, 1/2]");
  }
  const double alpha = kernel.hurst - 0.5;
  const double g = std::tgamma(kernel.hurst + 0.5);
  const double shift = which == VolterraKernel::perturbed ? kernel.eps : 0.0;
  VolterraWeights w;
  w.dt = T / static_cast<double>(n);
  w.drift.resize(n);
  w.diffusion.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double a = static_cast<double>(m) * w.dt + shift;
    const double b = a + w.dt;
    w.drift[m] = (std::pow(b, alpha + 1.0) - std::pow(a, alpha + 1.0)) / ((alpha + 1.0) * g);
    const double k2 = (std::pow(b, 2.0 * alpha + 1.0) - std::pow(a, 2.0 * alpha + 1.0)) / (2.0 * alpha + 1.0);
    w.diffusion[m] = std::sqrt(k2 / w.dt) / g;
  }
  return w;
}

double mc_variance_floor(const ModelSpec& model, const MarketParams& market) {
  if (model.family() == ModelFamily::rough_42) return 1e-3 * market.V0;
  return model.needs_positive_variance() ? DBL_MIN : -HUGE_VAL;
}

Eigen::MatrixXd simulate_v(const ModelSpec& model, const KernelSpec& kernel, VolterraKernel which,
                           const MarketParams& market, const Eigen::MatrixXd& dB, double T) {
  const auto n = static_cast<std::size_t>(dB.cols());
  if (n == 0) throw ConfigError("simulate_v: need at least one step");
  PathSimulator sim(model, market, volterra_weights(kernel, which, n, T), mc_variance_floor(model, market));
  Eigen::MatrixXd out(dB.rows(), static_cast<Eigen::Index>(n + 1));
  std::vector<double> row(n);
  for (Eigen::Index p = 0; p < dB.rows(); ++p) {
    for (std::size_t k = 0; k < n; ++k) row[k] = dB(p, static_cast<Eigen::Index>(k));
    sim.variance(row.data());
    for (std::size_t k = 0; k <= n; ++k) out(p, static_cast<Eigen::Index>(k)) = sim.v[k];
  }
  return out;
}

Eigen::MatrixXd simulate_v(const ModelSpec& model, const KernelSpec& kernel, VolterraKernel which,
                           const MarketParams& market, const McConfig& mc, double T) {
  mc.validate();
  const std::size_t n = step_count(mc, T);
  const double sq = std::sqrt(T / static_cast<double>(n));
  Eigen::MatrixXd dB(static_cast<Eigen::Index>(mc.paths), static_cast<Eigen::Index>(n));
  std::vector<double> z(n);
  for (std::size_t p = 0; p < mc.paths; ++p) {
    auto rng = stream(mc.seed, p);
    fill_normals(rng, sq, z.data(), n);
    for (std::size_t k = 0; k < n; ++k) dB(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k)) = z[k];
  }
  return simulate_v(model, kernel, which, market, dB, T);
}

McEstimate mc_price(const OptionSpec& option, const ModelSpec& model, const MarketParams& market,
                    const KernelSpec& kernel, VolterraKernel which, const McConfig& mc) {
  mc.validate();
  option.validate();
  market.validate(model);
  const double T = option.maturity;
  const std::size_t n = step_count(mc, T);
  const double sq = std::sqrt(T / static_cast<double>(n));
  const double disc = std::exp(-option.rate * T);
  const std::size_t samples = mc.antithetic ? (mc.paths + 1) / 2 : mc.paths;
  const VolterraWeights weights = volterra_weights(kernel, which, n, T);
  const double floor = mc_variance_floor(model, market);

  std::vector<double> values(samples, 0.0);
  const unsigned workers = std::max(1u, mc.threads);
  const std::size_t chunk = (samples + workers - 1) / workers;
  detail::parallel_for(workers, workers, [&](std::size_t w) {
    PathSimulator sim(model, market, weights, floor);
    std::vector<double> dB(n), dBp(n);
    const std::size_t end = std::min(samples, (w + 1) * chunk);
    for (std::size_t p = w * chunk; p < end; ++p) {
      auto rng = stream(mc.seed, p);
      fill_normals(rng, sq, dB.data(), n);
      fill_normals(rng, sq, dBp.data(), n);
      sim.variance(dB.data());
      double value = option.payoff(sim.asset(dB.data(), dBp.data()));
      if (mc.antithetic) {
        for (std::size_t k = 0; k < n; ++k) {
          dB[k] = -dB[k];
          dBp[k] = -dBp[k];
        }
        sim.variance(dB.data());
        value = 0.5 * (value + option.payoff(sim.asset(dB.data(), dBp.data())));
      }
      values[p] = disc * value;
    }
  });

  const double mean = pairwise_sum(values.data(), samples) / static_cast<double>(samples);
  std::vector<double> sq_dev(samples);
  for (std::size_t i = 0; i < samples; ++i) sq_dev[i] = (values[i] - mean) * (values[i] - mean);
  const double var = samples > 1 ? pairwise_sum(sq_dev.data(), samples) / static_cast<double>(samples - 1) : 0.0;
  McEstimate est;
  est.estimate = mean;
  est.stderr_ = std::sqrt(var / static_cast<double>(samples));
  est.paths = mc.antithetic ? 2 * samples : samples;
  est.seed = mc.seed;
  return est;
}

RateEstimate estimate_l2_rate(const std::vector<double>& eps_list, const ModelSpec& model, const MarketParams& market,
                              const KernelSpec& kernel, const McConfig& mc, double T) {
  mc.validate();
  if (eps_list.size() < 2) throw ConfigError("estimate_l2_rate: need at least two eps values");
  const std::size_t n = step_count(mc, T);
  const double sq = std::sqrt(T / static_cast<double>(n));
  const double floor = mc_variance_floor(model, market);
  const std::size_t E = eps_list.size();

  std::vector<VolterraWeights> weights;
  for (double e : eps_list) {
    weights.push_back(volterra_weights(KernelSpec::make(kernel.hurst, e), VolterraKernel::perturbed, n, T));
  }
  const VolterraWeights rough = volterra_weights(kernel, VolterraKernel::rough, n, T);

  // gaps[e * paths + p]
  std::vector<double> gaps(E * mc.paths, 0.0);
  const unsigned workers = std::max(1u, mc.threads);
  const std::size_t chunk = (mc.paths + workers - 1) / workers;
  detail::parallel_for(workers, workers, [&](std::size_t w) {
    PathSimulator ref(model, market, rough, floor);
    std::vector<PathSimulator> pert;
    for (const auto& wt : weights) pert.emplace_back(model, market, wt, floor);
    std::vector<double> dB(n);
    const std::size_t end = std::min(mc.paths, (w + 1) * chunk);
    for (std::size_t p = w * chunk; p < end; ++p) {
      auto rng = stream(mc.seed, p);
      fill_normals(rng, sq, dB.data(), n);
      ref.variance(dB.data());
      for (std::size_t e = 0; e < E; ++e) {
        pert[e].variance(dB.data());
        const double d = pert[e].v[n] - ref.v[n];
        gaps[e * mc.paths + p] = d * d;
      }
    }
  });

  RateEstimate out;
  out.eps = eps_list;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t e = 0; e < E; ++e) {
    const double g = pairwise_sum(gaps.data() + e * mc.paths, mc.paths) / static_cast<double>(mc.paths);
    out.gap.push_back(g);
    const double x = std::log(eps_list[e]);
    const double y = std::log(g);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(E);
  const bool positive = std::all_of(out.gap.begin(), out.gap.end(), [](double g) { return g > 0.0; });
  out.slope = positive ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : std::nan("");
  return out;
}

}  // namespace roughchain
