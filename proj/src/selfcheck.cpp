#include "roughchain/selfcheck.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "roughchain/ctmc.hpp"
#include "roughchain/errors.hpp"
#include "roughchain/kernel.hpp"
#include "roughchain/matexp.hpp"
#include "roughchain/pricing.hpp"

namespace roughchain {

namespace {

constexpr ModelFamily kAllFamilies[] = {ModelFamily::rough_heston,      ModelFamily::rough_42,
                                        ModelFamily::rough_alpha_hyper, ModelFamily::rough_sabr,
                                        ModelFamily::rough_heston_sabr, ModelFamily::rough_quadratic_slv};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt2(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

struct Setup {
  ModelSpec model;
  MarketParams market;
  KernelSpec kernel;
};

Setup reference(ModelFamily family) {
  return Setup{ModelSpec::make(family, ModelParams{}), MarketParams{}, KernelSpec{}};
}

// Worst relative row sum and most negative off-diagonal across Q and all Lambda_l.
void scan_generators(const GeneratorSet& g, double& row_sum, double& min_off) {
  auto take = [&](const GeneratorReport& r) {
    row_sum = std::max(row_sum, r.max_rel_row_sum);
    min_off = std::min(min_off, r.min_offdiag);
  };
  take(validate_generator(g.Q()));
  for (const auto& L : g.lambdas()) take(validate_generator(L));
}

// Normalised residuals of the first two local moments at interior nodes.
double moment_residual(const Tridiagonal& G, const Grid& grid, const std::vector<double>& drift,
                       const std::vector<double>& diffusion) {
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double h0 = grid.nodes[i] - grid.nodes[i - 1];
    const double h1 = grid.nodes[i + 1] - grid.nodes[i];
    const double m1 = -G.lower[i] * h0 + G.upper[i] * h1;
    const double m2 = G.lower[i] * h0 * h0 + G.upper[i] * h1 * h1;
    const double s1 = std::abs(G.lower[i] * h0) + std::abs(G.upper[i] * h1);
    const double s2 = std::abs(G.lower[i] * h0 * h0) + std::abs(G.upper[i] * h1 * h1);
    const double r0 = std::abs(G.lower[i] + G.diag[i] + G.upper[i]) / std::max(std::abs(G.diag[i]), 1e-300);
    worst = std::max({worst, r0, std::abs(m1 - drift[i]) / std::max(s1, 1e-300),
                      std::abs(m2 - diffusion[i]) / std::max(s2, 1e-300)});
  }
  return worst;
}

CheckResult check_kernel() {
  CheckResult c{"kernel Laplace identity <= 1e-8", true, ""};
  double worst = 0.0;
  for (double H : {0.05, 0.12, 0.3, 0.45}) {
    for (double eps : {1e-2, 1e-4, 1e-8}) {
      const auto spec = KernelSpec::make(H, eps);
      const auto lc = laplace_constants(spec);
      const double r = laplace_quadrature(LaplaceIntegral::r, spec, 1e-11);
      const double rh = -laplace_quadrature(LaplaceIntegral::r_hat_numerator, spec, 1e-11) / r;
      worst = std::max({worst, std::abs(r - lc.r) / lc.r, std::abs(rh - lc.r_hat) / std::abs(lc.r_hat)});
      for (double t : {0.25, 1.0}) {
        for (double s : {0.0, 0.125, t}) {
          const double k = perturbed_kernel(t, s, spec);
          worst = std::max(worst, std::abs(laplace_kernel_quadrature(t, s, spec, 1e-11) - k) / k);
        }
      }
    }
  }
  c.passed = worst <= 1e-8;
  c.detail = fmt("max relative deviation %.3e", worst);
  return c;
}

std::vector<CheckResult> check_generators(unsigned threads) {
  double row_sum = 0.0, min_off = 0.0, moment = 0.0;
  for (auto family : kAllFamilies) {
    const Setup s = reference(family);
    GeneratorOptions opt;
    opt.threads = threads;
    const auto g = build_generators(s.model, s.market, s.kernel, opt);
    scan_generators(g, row_sum, min_off);

    GeneratorOptions raw = opt;
    raw.N = raw.M = 30;
    raw.policy = NegativeRatePolicy::allow;
    const auto gr = build_generators(s.model, s.market, s.kernel, raw);
    const auto lc = laplace_constants(s.kernel);
    std::vector<double> d(gr.M()), q(gr.M());
    for (std::size_t i = 0; i < gr.M(); ++i) {
      const double v = gr.vgrid().nodes[i];
      d[i] = (v - s.market.V0) * lc.r_hat + lc.k_eps * s.model.drift_b(v);
      q[i] = std::pow(lc.k_eps * s.model.sigma(v), 2);
    }
    moment = std::max(moment, moment_residual(gr.Q(), gr.vgrid(), d, q));
    for (std::size_t l = 0; l < gr.M(); l += 7) {
      const double v = gr.vgrid().nodes[l];
      std::vector<double> th(gr.N(), 0.0), df(gr.N(), (1 - s.market.rho * s.market.rho) * std::pow(s.model.phi(v), 2));
      for (std::size_t i = 1; i + 1 < gr.N(); ++i) th[i] = drift_theta(gr.xgrid().nodes[i], v, s.model, s.market, lc);
      moment = std::max(moment, moment_residual(gr.lambdas()[l], gr.xgrid(), th, df));
    }
    double raw_min_off = 0.0;
    scan_generators(gr, row_sum, raw_min_off);
    const auto rc = validate_generator(gr.coupled());
    row_sum = std::max(row_sum, rc.max_rel_row_sum);
  }
  return {
      {"generator row sums <= 1e-12", row_sum <= 1e-12, fmt("max relative row sum %.3e", row_sum)},
      {"off-diagonal rates >= 0 at N=M=100", min_off >= 0.0, fmt("min off-diagonal %.6g", min_off)},
      {"moment matching reconstruction <= 1e-10", moment <= 1e-10, fmt("max normalised residual %.3e", moment)},
  };
}

SparseGenerator random_generator(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && u(rng) < 0.2) G(i, j) = 2.0 * u(rng);
    }
    G(i, i) = -G.row(i).sum();
  }
  return G.sparseView();
}

std::vector<CheckResult> check_expm() {
  const SparseGenerator G = random_generator(50, 7);
  ExpmOptions opt;
  opt.tol = 1e-10;
  opt.method = ExpmMethod::uniformization;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(50);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd w(50);
  for (auto& x : w) x = u(rng);

  const double cons = (expm_action(G, ones, 0.7, opt) - ones).lpNorm<Eigen::Infinity>();
  const Eigen::VectorXd a = expm_action(G, w, 0.7, opt);
  const double pos = a.minCoeff();
  const Eigen::VectorXd ab = expm_action(G, expm_action(G, w, 0.3, opt), 0.4, opt);
  const double semi = (ab - a).lpNorm<Eigen::Infinity>();
  const double dense = (expm_dense(Eigen::MatrixXd(G), 0.7) * w - a).lpNorm<Eigen::Infinity>();
  return {
      {"expm conservation", cons <= opt.tol, fmt("max |exp(Gt)1 - 1| %.3e", cons)},
      {"expm positivity", pos >= -opt.tol, fmt("min entry %.6g", pos)},
      {"expm semigroup", semi <= 10 * opt.tol, fmt("max deviation %.3e", semi)},
      {"expm action vs dense", dense <= 10 * opt.tol, fmt("max deviation %.3e", dense)},
  };
}

std::vector<CheckResult> check_pricing(unsigned threads) {
  std::vector<CheckResult> out;
  const Setup h = reference(ModelFamily::rough_heston);
  GeneratorOptions small;
  small.N = small.M = 20;
  small.threads = threads;
  const auto gs = build_generators(h.model, h.market, h.kernel, small);
  PricingOptions po;
  po.threads = threads;

  OptionSpec euro;
  const double pe = price_european_coupled(euro, gs, h.model, h.market, h.kernel, po).price;
  OptionSpec b1 = euro;
  b1.bermudan_n = 1;
  const double pb = price_bermudan(b1, gs, h.model, h.market, h.kernel, po).price;
  out.push_back({"bermudan n=1 equals european <= 1e-12", std::abs(pb - pe) <= 1e-12,
                 fmt2("bermudan %.15g european %.15g", pb, pe)});

  // Driftless chain (rough SABR with beta = 0 and rho = 0): the asset
  // coordinate is a martingale, so the call carries no early-exercise premium.
  ModelParams mp;
  mp.beta = 0.0;
  const auto sabr = ModelSpec::make(ModelFamily::rough_sabr, mp);
  MarketParams mk;
  mk.rho = 0.0;
  const auto gz = build_generators(sabr, mk, h.kernel, small);
  const double ez = price_european_coupled(euro, gz, sabr, mk, h.kernel, po).price;
  double worst = 0.0;
  for (std::size_t n : {2u, 5u, 10u}) {
    OptionSpec bn = euro;
    bn.bermudan_n = n;
    worst = std::max(worst, std::abs(price_bermudan(bn, gz, sabr, mk, h.kernel, po).price - ez));
  }
  out.push_back({"call no early exercise at r=q=0 <= 1e-9", worst <= 1e-9, fmt("max |bermudan - european| %.3e", worst)});

  GeneratorOptions ref;
  ref.threads = threads;
  const auto g = build_generators(h.model, h.market, h.kernel, ref);
  const double pf = price_fast(euro, g, h.model, h.market, h.kernel, po).price;
  OptionSpec open = euro;
  open.barrier = Barrier{0.0, HUGE_VAL};
  const double pbar = price_fast(open, g, h.model, h.market, h.kernel, po).price;
  out.push_back({"barrier(L=0, U=inf) equals european exactly", pbar == pf, fmt2("barrier %.17g european %.17g", pbar, pf)});

  OptionSpec zero = euro;
  zero.strike = 0.0;
  const double p0 = price_fast(zero, g, h.model, h.market, h.kernel, po).price;
  const double rel = std::abs(p0 - h.market.S0) / h.market.S0;
  out.push_back({"D=0 european within 2% of S0", rel <= 0.02, fmt2("price %.10g, relative deviation %.3e", p0, rel)});
  return out;
}

}  // namespace

std::vector<CheckResult> run_selfcheck(unsigned threads) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  std::vector<CheckResult> all;
  auto guarded = [&](const char* suite, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      all.push_back({suite, false, std::string("threw: ") + e.what()});
    }
  };
  guarded("kernel suite", [&] { all.push_back(check_kernel()); });
  guarded("generator suite", [&] {
    for (auto& c : check_generators(threads)) all.push_back(std::move(c));
  });
  guarded("expm suite", [&] {
    for (auto& c : check_expm()) all.push_back(std::move(c));
  });
  guarded("pricing suite", [&] {
    for (auto& c : check_pricing(threads)) all.push_back(std::move(c));
  });
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  all.push_back({"selfcheck wall time < 30 s", secs < 30.0, fmt("%.2f s", secs)});
  return all;
}

bool report_checks(std::ostream& out, const std::vector<CheckResult>& checks) {
  bool ok = true;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    ok = ok && c.passed;
  }
  return ok;
}

}  // namespace roughchain
