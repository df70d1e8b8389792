#include <gtest/gtest.h>

#include <cmath>

#include "roughchain/errors.hpp"
#include "roughchain/models.hpp"

using namespace roughchain;

namespace {

constexpr ModelFamily kAll[] = {ModelFamily::rough_heston,      ModelFamily::rough_42,
                                ModelFamily::rough_alpha_hyper, ModelFamily::rough_sabr,
                                ModelFamily::rough_heston_sabr, ModelFamily::rough_quadratic_slv};

double central(double (*)(double), double) { return 0.0; }

template <class F>
double derivative(F fn, double x) {
  const double h = 1e-5 * std::max(1.0, std::abs(x));
  return (fn(x + h) - fn(x - h)) / (2.0 * h);
}

}  // namespace

TEST(Models, NamesRoundTrip) {
  for (auto f : kAll) EXPECT_EQ(parse_model_family(model_name(f)), f);
  EXPECT_THROW(parse_model_family("rough-bergomi"), ConfigError);
}

TEST(Models, HestonReferenceCoefficients) {
  const auto m = ModelSpec::make(ModelFamily::rough_heston, ModelParams{});
  EXPECT_DOUBLE_EQ(m.phi(0.04), 0.2);
  EXPECT_NEAR(m.drift_b(0.04), -0.02, 1e-15);
  EXPECT_NEAR(m.sigma(0.04), 0.16, 1e-15);
  EXPECT_DOUBLE_EQ(m.nu(10.0), 10.0);
  EXPECT_DOUBLE_EQ(m.g(std::exp(1.5)), 1.5);
}

TEST(Models, DerivativesMatchFiniteDifferences) {
  for (auto f : kAll) {
    const auto m = ModelSpec::make(f, ModelParams{});
    for (double v : {0.01, 0.04, 0.12}) {
      EXPECT_NEAR(m.dphi(v), derivative([&](double x) { return m.phi(x); }, v), 1e-6 * (1.0 + std::abs(m.dphi(v))))
          << model_name(f) << " v=" << v;
      EXPECT_NEAR(m.dsigma(v), derivative([&](double x) { return m.sigma(x); }, v), 1e-6 * (1.0 + std::abs(m.dsigma(v))))
          << model_name(f) << " v=" << v;
    }
    for (double s : {2.0, 10.0, 30.0}) {
      EXPECT_NEAR(m.dnu(s), derivative([&](double x) { return m.nu(x); }, s), 1e-6 * (1.0 + std::abs(m.dnu(s))))
          << model_name(f) << " s=" << s;
    }
  }
}

TEST(Models, TransformsAreConsistent) {
  // g' = 1/nu and F' = phi/sigma
  for (auto f : kAll) {
    const auto m = ModelSpec::make(f, ModelParams{});
    for (double s : {1.0, 10.0, 35.0}) {
      EXPECT_NEAR(derivative([&](double x) { return m.g(x); }, s), 1.0 / m.nu(s), 1e-7 / m.nu(s)) << model_name(f);
      EXPECT_NEAR(m.g_inverse(m.g(s)), s, 1e-12 * s) << model_name(f);
    }
    for (double v : {0.005, 0.04, 0.15}) {
      const double want = m.phi(v) / m.sigma(v);
      EXPECT_NEAR(derivative([&](double x) { return m.F(x); }, v), want, 1e-5 * std::abs(want)) << model_name(f);
    }
  }
}

TEST(Models, QuadraticTransformClosedForm) {
  ModelParams p;  // a=0.02, b=0.05, c=1
  const auto m = ModelSpec::make(ModelFamily::rough_quadratic_slv, p);
  const double d = std::sqrt(4.0 * 0.02 * 1.0 - 0.05 * 0.05);
  EXPECT_NEAR(m.g(10.0), 2.0 * std::atan((2.0 * 0.02 * 10.0 + 0.05) / d) / d, 1e-14);
  EXPECT_THROW(m.g_inverse(M_PI / d), DomainError);
}

TEST(Models, FortyTwoAuxiliaryTransform) {
  const auto m = ModelSpec::make(ModelFamily::rough_42, ModelParams{});
  const KernelSpec k = KernelSpec::make(0.12, 1e-8);
  const double keps = laplace_constants(k).k_eps;
  const double v = 0.04;
  EXPECT_NEAR(m.f(v, k), (0.02 * v + 0.05 * std::log(v)) / (keps * 0.8), 1e-15);
}

TEST(Models, HestonThetaMatchesClosedForm) {
  const auto m = ModelSpec::make(ModelFamily::rough_heston, ModelParams{});
  const MarketParams mk;
  const KernelSpec k = KernelSpec::make(0.12, 1e-8);
  const auto c = laplace_constants(k);
  for (double v : {0.01, 0.04, 0.1}) {
    // -v/2 - rho eta (vartheta - v)/sigma - rho (v - V0) Rhat / (K sigma)
    const double want = -0.5 * v - mk.rho * 4.0 * (0.035 - v) / 0.8 - mk.rho * (v - mk.V0) * c.r_hat / (c.k_eps * 0.8);
    EXPECT_NEAR(drift_theta(2.0, v, m, mk, k), want, 1e-13);
    EXPECT_NEAR(drift_theta(2.0, v, m, mk, k, ThetaVariant::discretized), want, 1e-13);
  }
}

TEST(Models, SabrThetaMatchesItoExpansion) {
  const auto m = ModelSpec::make(ModelFamily::rough_sabr, ModelParams{});
  const MarketParams mk;
  const KernelSpec k = KernelSpec::make(0.12, 1e-6);
  const auto c = laplace_constants(k);
  const double beta = 0.7;
  for (double x : {3.0, 5.0}) {
    for (double v : {0.02, 0.04}) {
      const double s = std::pow((1.0 - beta) * (x + mk.rho * v / (c.k_eps * 0.8)), 1.0 / (1.0 - beta));
      const double want = -0.5 * beta * std::pow(s, beta - 1.0) * v * v - mk.rho * (v - mk.V0) * c.r_hat / (c.k_eps * 0.8);
      EXPECT_NEAR(drift_theta(x, v, m, mk, k), want, 1e-12);
    }
  }
}

TEST(Models, FortyTwoThetaCorrectionFromIto) {
  // The lemma correction is -(rho/2) f'' K^2 sigma(v)^2 with f = (a v + b log v)/(K sigma),
  // which reduces to rho K b sigma / (2 v).
  const auto m = ModelSpec::make(ModelFamily::rough_42, ModelParams{});
  const MarketParams mk;
  const KernelSpec k = KernelSpec::make(0.12, 1e-4);
  const auto c = laplace_constants(k);
  const double v = 0.05, x = 2.0;
  const double lemma = drift_theta(x, v, m, mk, k, ThetaVariant::lemma);
  const double disc = drift_theta(x, v, m, mk, k, ThetaVariant::discretized);
  // the two variants differ only in the correction term
  const double w = -0.8 * 0.05 / v;  // sigma phi' - sigma' phi
  EXPECT_NEAR(lemma - disc, -0.5 * mk.rho * c.k_eps * w - 0.5 * mk.rho * w, 1e-9 * std::abs(lemma));
  EXPECT_NEAR(-0.5 * mk.rho * c.k_eps * w, mk.rho * c.k_eps * 0.05 * 0.8 / (2.0 * v), 1e-12 * c.k_eps);
}

TEST(Models, ParameterChecks) {
  ModelParams p;
  p.sigma = 0.0;
  EXPECT_THROW(ModelSpec::make(ModelFamily::rough_heston, p), ConfigError);
  p = ModelParams{};
  p.beta = 1.0;
  EXPECT_THROW(ModelSpec::make(ModelFamily::rough_sabr, p), ConfigError);
  p = ModelParams{};
  p.b = 1.0;  // 4ac = 0.08 < b^2
  EXPECT_THROW(ModelSpec::make(ModelFamily::rough_quadratic_slv, p), ConfigError);
  p = ModelParams{};
  p.a = -0.1;
  EXPECT_THROW(ModelSpec::make(ModelFamily::rough_alpha_hyper, p), ConfigError);
  MarketParams mk;
  mk.rho = 1.0;
  EXPECT_THROW(mk.validate(ModelSpec::make(ModelFamily::rough_heston, ModelParams{})), ConfigError);
}

TEST(Models, Domains) {
  const auto heston = ModelSpec::make(ModelFamily::rough_heston, ModelParams{});
  EXPECT_THROW(heston.g(-1.0), DomainError);
  EXPECT_THROW(heston.phi(-0.01), DomainError);
  ModelParams p;
  p.beta = 0.0;
  const auto normal_sabr = ModelSpec::make(ModelFamily::rough_sabr, p);
  EXPECT_TRUE(normal_sabr.asset_in_domain(-1.0));
  const auto qslv = ModelSpec::make(ModelFamily::rough_quadratic_slv, ModelParams{});
  EXPECT_TRUE(qslv.asset_in_domain(-3.0));
  const auto hyper = ModelSpec::make(ModelFamily::rough_alpha_hyper, ModelParams{});
  EXPECT_TRUE(hyper.variance_in_domain(-2.0));
}
