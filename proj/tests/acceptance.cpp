// Acceptance criteria at the reference parameter set. Usage:
//   acceptance [criterion...]     (no argument runs all eight)
// Prints one PASS/FAIL line per check and exits non-zero on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "roughchain/benchmarks.hpp"
#include "roughchain/ctmc.hpp"
#include "roughchain/mc_oracle.hpp"
#include "roughchain/pricing.hpp"
#include "roughchain/selfcheck.hpp"

using namespace roughchain;

namespace {

constexpr ModelFamily kFamilies[] = {ModelFamily::rough_heston,      ModelFamily::rough_42,
                                     ModelFamily::rough_alpha_hyper, ModelFamily::rough_sabr,
                                     ModelFamily::rough_heston_sabr, ModelFamily::rough_quadratic_slv};

// Tolerances
constexpr double kEuropeanTol = 0.010;
constexpr double kBarrierTol = 0.010;
constexpr double kAmericanTol = 0.015;
constexpr double kFastSeconds = 1.0;
constexpr double kAmericanSeconds = 300.0;
constexpr double kEpsLastGap = 5e-3;
constexpr double kEpsStepFactor = 1.5;
constexpr double kSlopeLo = 0.47;
constexpr double kSlopeHi = 0.77;
constexpr double kRateSeconds = 600.0;
constexpr double kFastVsCoupled = 5e-3;
constexpr double kMcStderrs = 3.0;
constexpr double kScalingRatio = 10.0;
constexpr double kCrossover = 5.0;

int failures = 0;

void line(bool ok, const std::string& id, const std::string& detail) {
  std::printf("%s criterion %s: %s\n", ok ? "PASS" : "FAIL", id.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

double seconds(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Case {
  ModelSpec model;
  MarketParams market;
  KernelSpec kernel;
};

Case reference(ModelFamily f, double eps = 1e-8) {
  return Case{ModelSpec::make(f, ModelParams{}), MarketParams{}, KernelSpec::make(0.12, eps)};
}

GeneratorOptions grid(std::size_t n) {
  GeneratorOptions g;
  g.N = g.M = n;
  return g;
}

OptionSpec call() { return OptionSpec{}; }

OptionSpec barrier_call() {
  OptionSpec o;
  o.barrier = Barrier{2.0, 15.0};
  return o;
}

// Fast price including generator construction, as a user would time it.
std::pair<double, double> timed_fast(const Case& c, const OptionSpec& o, std::size_t n) {
  double price = 0.0;
  const double t = seconds([&] {
    const auto g = build_generators(c.model, c.market, c.kernel, grid(n));
    price = price_fast(o, g, c.model, c.market, c.kernel).price;
  });
  return {price, t};
}

std::string name(ModelFamily f) { return std::string(model_name(f)); }

void table_check(const char* id, Product product, const OptionSpec& option, double tol) {
  for (auto f : kFamilies) {
    const Case c = reference(f);
    const double bench = reference_price(f, product);
    try {
      const auto [price, t] = timed_fast(c, option, 100);
      const double rel = std::abs(price - bench) / bench;
      line(rel <= tol && t <= kFastSeconds, std::string(id) + " " + name(f),
           fmt("price %.6g vs %.4f, rel err %.3e (tol %.1e), %.3f s (limit %.0f s)", price, bench, rel, tol, t,
               kFastSeconds));
    } catch (const std::exception& e) {
      line(false, std::string(id) + " " + name(f), std::string("threw: ") + e.what());
    }
  }
}

void criterion1() { table_check("1", Product::european, call(), kEuropeanTol); }

void criterion2() { table_check("2", Product::barrier, barrier_call(), kBarrierTol); }

void criterion3() {
  OptionSpec o = call();
  o.bermudan_n = 50;
  for (auto f : kFamilies) {
    const Case c = reference(f);
    const double bench = reference_price(f, Product::american);
    try {
      double price = 0.0;
      const double t = seconds([&] {
        const auto g = build_generators(c.model, c.market, c.kernel, grid(100));
        price = price_bermudan(o, g, c.model, c.market, c.kernel).price;
      });
      const double rel = std::abs(price - bench) / bench;
      line(rel <= kAmericanTol && t <= kAmericanSeconds, "3 " + name(f),
           fmt("price %.6g vs %.4f, rel err %.3e (tol %.1e), %.1f s (limit %.0f s)", price, bench, rel, kAmericanTol,
               t, kAmericanSeconds));
    } catch (const std::exception& e) {
      line(false, "3 " + name(f), std::string("threw: ") + e.what());
    }
  }
}

void criterion4() {
  const double eps[] = {1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  for (auto f : kFamilies) {
    try {
      std::vector<double> p;
      for (double e : eps) p.push_back(timed_fast(reference(f, e), call(), 100).first);
      std::vector<double> gap;
      for (std::size_t k = 0; k + 1 < p.size(); ++k) gap.push_back(std::abs(p[k] - p[k + 1]) / std::abs(p[k + 1]));
      bool shape = true;
      for (std::size_t k = 0; k + 1 < gap.size(); ++k) shape = shape && gap[k + 1] <= kEpsStepFactor * gap[k];
      const bool ok = gap.back() <= kEpsLastGap && shape;
      line(ok, "4 " + name(f),
           fmt("gaps %.2e %.2e %.2e %.2e (last <= %.0e, step factor <= %.1f), prices %.6g..%.6g", gap[0], gap[1],
               gap[2], gap[3], kEpsLastGap, kEpsStepFactor, p.front(), p.back()));
    } catch (const std::exception& e) {
      line(false, "4 " + name(f), std::string("threw: ") + e.what());
    }
  }
}

void criterion5() {
  const Case c = reference(ModelFamily::rough_heston);
  McConfig mc;
  mc.paths = 20000;
  mc.steps = 512;
  RateEstimate r;
  const double t = seconds([&] { r = estimate_l2_rate({1e-1, 1e-2, 1e-3, 1e-4}, c.model, c.market, c.kernel, mc, 1.0); });
  line(r.slope >= kSlopeLo && r.slope <= kSlopeHi && t <= kRateSeconds, "5",
       fmt("slope %.4f (accepted [%.2f, %.2f]); gaps %.3e %.3e %.3e %.3e; %.1f s", r.slope, kSlopeLo, kSlopeHi, r.gap[0],
           r.gap[1], r.gap[2], r.gap[3], t));
}

void criterion6() {
  const auto checks = run_selfcheck();
  for (const auto& c : checks) line(c.passed, "6 " + c.name, c.detail);
}

void criterion7() {
  for (auto f : kFamilies) {
    const Case c = reference(f);
    try {
      const auto g = build_generators(c.model, c.market, c.kernel, grid(30));
      const double fast = price_fast(call(), g, c.model, c.market, c.kernel).price;
      const double coupled = price_european_coupled(call(), g, c.model, c.market, c.kernel).price;
      const double rel = std::abs(fast - coupled) / std::abs(coupled);
      line(rel <= kFastVsCoupled, "7a " + name(f),
           fmt("fast %.10g coupled %.10g rel diff %.3e (tol %.0e)", fast, coupled, rel, kFastVsCoupled));
    } catch (const std::exception& e) {
      line(false, "7a " + name(f), std::string("threw: ") + e.what());
    }
  }
  const Case h = reference(ModelFamily::rough_heston);
  const double ctmc = timed_fast(h, call(), 100).first;
  McConfig mc;
  mc.paths = 100000;
  mc.steps = 512;
  const McEstimate est = mc_price(call(), h.model, h.market, h.kernel, VolterraKernel::rough, mc);
  const double z = (ctmc - est.estimate) / est.stderr_;
  line(std::abs(z) <= kMcStderrs, "7b rough-heston",
       fmt("ctmc %.6f, mc %.6f +- %.6f (%zu paths), z = %.2f (limit %.0f)", ctmc, est.estimate, est.stderr_, est.paths,
           z, kMcStderrs));
}

void criterion8() {
  const Case c = reference(ModelFamily::rough_heston);
  auto best_fast = [&](std::size_t n) {
    double best = HUGE_VAL;
    for (int rep = 0; rep < 3; ++rep) best = std::min(best, timed_fast(c, call(), n).second);
    return best;
  };
  const double t50 = best_fast(50);
  const double t100 = best_fast(100);
  line(t100 / t50 <= kScalingRatio, "8 scaling",
       fmt("fast %.4f s at N=M=50, %.4f s at N=M=100, ratio %.2f (limit %.0f)", t50, t100, t100 / t50, kScalingRatio));

  const auto g = build_generators(c.model, c.market, c.kernel, grid(100));
  double fast = HUGE_VAL, coupled = HUGE_VAL;
  for (int rep = 0; rep < 3; ++rep) {
    fast = std::min(fast, seconds([&] { price_fast(call(), g, c.model, c.market, c.kernel); }));
    coupled = std::min(coupled, seconds([&] {
                         const auto fresh = build_generators(c.model, c.market, c.kernel, grid(100));
                         price_european_coupled(call(), fresh, c.model, c.market, c.kernel);
                       }));
  }
  line(coupled / fast >= kCrossover, "8 crossover",
       fmt("coupled %.4f s vs fast %.4f s at N=M=100, ratio %.1f (need >= %.0f)", coupled, fast, coupled / fast,
           kCrossover));
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<void()>> all = {criterion1, criterion2, criterion3, criterion4,
                                                  criterion5, criterion6, criterion7, criterion8};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty()) {
    for (int i = 1; i <= 8; ++i) which.push_back(i);
  }
  for (int k : which) {
    if (k < 1 || k > 8) {
      std::fprintf(stderr, "unknown criterion %d\n", k);
      return 2;
    }
    all[static_cast<std::size_t>(k - 1)]();
  }
  return failures == 0 ? 0 : 1;
}
