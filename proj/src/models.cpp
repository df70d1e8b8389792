#include "roughchain/models.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "roughchain/errors.hpp"

namespace roughchain {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct FamilyName {
  ModelFamily family;
  std::string_view name;
};

constexpr FamilyName kFamilies[] = {
    {ModelFamily::rough_heston, "rough-heston"},
    {ModelFamily::rough_42, "rough-42"},
    {ModelFamily::rough_alpha_hyper, "rough-alpha-hyper"},
    {ModelFamily::rough_sabr, "rough-sabr"},
    {ModelFamily::rough_heston_sabr, "rough-heston-sabr"},
    {ModelFamily::rough_quadratic_slv, "rough-quadratic-slv"},
};

bool is_sabr_type(ModelFamily f) {
  return f == ModelFamily::rough_sabr || f == ModelFamily::rough_heston_sabr;
}

double quadratic_disc(const ModelParams& p) { return std::sqrt(4.0 * p.a * p.c - p.b * p.b); }

void require(bool ok, std::string_view model, const std::string& what) {
  if (!ok) throw ConfigError(std::string(model) + ": " + what);
}

[[noreturn]] void domain_fail(std::string_view model, const char* fn, double arg) {
  throw DomainError(std::string(model) + ": " + fn + " argument " + std::to_string(arg) +
                    " outside the model domain");
}

}  // namespace

std::string_view model_name(ModelFamily family) {
  for (const auto& f : kFamilies) {
    if (f.family == family) return f.name;
  }
  return "unknown";
}

ModelFamily parse_model_family(std::string_view name) {
  for (const auto& f : kFamilies) {
    if (f.name == name) return f.family;
  }
  throw ConfigError("unknown model '" + std::string(name) +
                    "' (expected rough-heston, rough-42, rough-alpha-hyper, rough-sabr, "
                    "rough-heston-sabr or rough-quadratic-slv)");
}

ModelSpec ModelSpec::make(ModelFamily family, const ModelParams& params) {
  ModelSpec spec(family, params);
  spec.validate();
  return spec;
}

ModelSpec ModelSpec::make(std::string_view name, const ModelParams& params) {
  return make(parse_model_family(name), params);
}

void ModelSpec::validate() const {
  const auto n = name();
  require(std::isfinite(p_.r) && std::isfinite(p_.q), n, "r and q must be finite");
  require(p_.sigma > 0.0, n, "sigma > 0 violated");
  switch (family_) {
    case ModelFamily::rough_heston:
      break;
    case ModelFamily::rough_42:
      require(!(p_.a == 0.0 && p_.b == 0.0), n, "a and b cannot both vanish");
      break;
    case ModelFamily::rough_alpha_hyper:
      require(p_.vartheta > 0.0, n, "vartheta > 0 violated");
      require(p_.a > 0.0, n, "a > 0 violated");
      break;
    case ModelFamily::rough_sabr:
      require(p_.beta >= 0.0 && p_.beta < 1.0, n, "beta in [0, 1) violated");
      break;
    case ModelFamily::rough_heston_sabr:
      require(p_.beta >= 0.0 && p_.beta < 1.0, n, "beta in [0, 1) violated");
      require(p_.eta > 0.0, n, "eta > 0 violated");
      require(p_.vartheta > 0.0, n, "vartheta > 0 violated");
      break;
    case ModelFamily::rough_quadratic_slv:
      require(4.0 * p_.a * p_.c > p_.b * p_.b, n, "4ac > b^2 violated");
      require(p_.a > 0.0, n, "a > 0 violated");
      require(p_.eta > 0.0, n, "eta > 0 violated");
      require(p_.vartheta > 0.0, n, "vartheta > 0 violated");
      break;
  }
}

double ModelSpec::mu(double s, double) const {
  if (family_ == ModelFamily::rough_sabr) return 0.0;
  return (p_.r - p_.q) * s;
}

double ModelSpec::nu(double s) const {
  if (!asset_in_domain(s)) domain_fail(name(), "nu", s);
  if (is_sabr_type(family_)) return std::pow(s, p_.beta);
  if (family_ == ModelFamily::rough_quadratic_slv) return (p_.a * s + p_.b) * s + p_.c;
  return s;
}

double ModelSpec::dnu(double s) const {
  if (!asset_in_domain(s)) domain_fail(name(), "nu'", s);
  if (is_sabr_type(family_)) return p_.beta == 0.0 ? 0.0 : p_.beta * std::pow(s, p_.beta - 1.0);
  if (family_ == ModelFamily::rough_quadratic_slv) return 2.0 * p_.a * s + p_.b;
  return 1.0;
}

double ModelSpec::phi(double v) const {
  if (!variance_in_domain(v)) domain_fail(name(), "phi", v);
  switch (family_) {
    case ModelFamily::rough_42:
      return p_.a * std::sqrt(v) + p_.b / std::sqrt(v);
    case ModelFamily::rough_alpha_hyper:
      return std::exp(v);
    case ModelFamily::rough_sabr:
      return v;
    default:
      return std::sqrt(v);
  }
}

double ModelSpec::dphi(double v) const {
  if (!variance_in_domain(v)) domain_fail(name(), "phi'", v);
  switch (family_) {
    case ModelFamily::rough_42:
      return 0.5 * p_.a / std::sqrt(v) - 0.5 * p_.b / (v * std::sqrt(v));
    case ModelFamily::rough_alpha_hyper:
      return std::exp(v);
    case ModelFamily::rough_sabr:
      return 1.0;
    default:
      return 0.5 / std::sqrt(v);
  }
}

double ModelSpec::drift_b(double v) const {
  switch (family_) {
    case ModelFamily::rough_alpha_hyper:
      return p_.eta - p_.vartheta * std::exp(p_.a * v);
    case ModelFamily::rough_sabr:
      return 0.0;
    default:
      return p_.eta * (p_.vartheta - v);
  }
}

double ModelSpec::sigma(double v) const {
  if (!variance_in_domain(v)) domain_fail(name(), "sigma", v);
  switch (family_) {
    case ModelFamily::rough_alpha_hyper:
      return p_.sigma;
    case ModelFamily::rough_sabr:
      return p_.sigma * v;
    default:
      return p_.sigma * std::sqrt(v);
  }
}

double ModelSpec::dsigma(double v) const {
  if (!variance_in_domain(v)) domain_fail(name(), "sigma'", v);
  switch (family_) {
    case ModelFamily::rough_alpha_hyper:
      return 0.0;
    case ModelFamily::rough_sabr:
      return p_.sigma;
    default:
      return 0.5 * p_.sigma / std::sqrt(v);
  }
}

double ModelSpec::g(double s) const {
  if (!asset_in_domain(s)) domain_fail(name(), "g", s);
  if (is_sabr_type(family_)) return std::pow(s, 1.0 - p_.beta) / (1.0 - p_.beta);
  if (family_ == ModelFamily::rough_quadratic_slv) {
    const double d = quadratic_disc(p_);
    return 2.0 * std::atan((2.0 * p_.a * s + p_.b) / d) / d;
  }
  return std::log(s);
}

double ModelSpec::g_inverse(double x) const {
  const auto [lo, hi] = g_range();
  const bool open = family_ == ModelFamily::rough_quadratic_slv;
  const bool inside = open ? (x > lo && x < hi) : (x >= lo && x <= hi);
  if (!std::isfinite(x) || !inside) domain_fail(name(), "g^-1", x);
  if (is_sabr_type(family_)) {
    if (p_.beta == 0.0) return x;
    return std::pow((1.0 - p_.beta) * x, 1.0 / (1.0 - p_.beta));
  }
  if (family_ == ModelFamily::rough_quadratic_slv) {
    const double d = quadratic_disc(p_);
    return (d * std::tan(0.5 * x * d) - p_.b) / (2.0 * p_.a);
  }
  return std::exp(x);
}

std::pair<double, double> ModelSpec::g_range() const {
  if (is_sabr_type(family_)) return {p_.beta == 0.0 ? -kInf : 0.0, kInf};
  if (family_ == ModelFamily::rough_quadratic_slv) {
    const double half = M_PI / quadratic_disc(p_);
    return {-half, half};
  }
  return {-kInf, kInf};
}

double ModelSpec::F(double v) const {
  if (!variance_in_domain(v)) domain_fail(name(), "f", v);
  switch (family_) {
    case ModelFamily::rough_42:
      return (p_.a * v + p_.b * std::log(v)) / p_.sigma;
    case ModelFamily::rough_alpha_hyper:
      return std::exp(v) / p_.sigma;
    default:
      return v / p_.sigma;
  }
}

double ModelSpec::f(double v, const KernelSpec& kernel) const {
  return F(v) / laplace_constants(kernel).k_eps;
}

bool ModelSpec::asset_in_domain(double s) const {
  if (!std::isfinite(s)) return false;
  if (family_ == ModelFamily::rough_quadratic_slv) return true;
  if (is_sabr_type(family_)) return p_.beta == 0.0 || s >= 0.0;
  return s > 0.0;
}

bool ModelSpec::variance_in_domain(double v) const {
  if (!std::isfinite(v)) return false;
  return needs_positive_variance() ? v > 0.0 : true;
}

bool ModelSpec::needs_positive_variance() const {
  return family_ != ModelFamily::rough_alpha_hyper;
}

void MarketParams::validate(const ModelSpec& model) const {
  if (!(S0 > 0.0) || !model.asset_in_domain(S0)) throw ConfigError("market: S0 must be positive");
  if (!model.variance_in_domain(V0)) {
    throw ConfigError("market: V0 = " + std::to_string(V0) + " outside the variance domain of " +
                      std::string(model.name()));
  }
  if (!(rho > -1.0 && rho < 1.0)) throw ConfigError("market: rho must lie in (-1, 1)");
}

std::string_view theta_variant_name(ThetaVariant variant) {
  return variant == ThetaVariant::lemma ? "lemma" : "discretized";
}

ThetaVariant parse_theta_variant(std::string_view name) {
  if (name == "lemma") return ThetaVariant::lemma;
  if (name == "discretized") return ThetaVariant::discretized;
  throw ConfigError("unknown theta variant '" + std::string(name) + "' (expected lemma or discretized)");
}

double reconstruct_asset(double x, double v, const ModelSpec& model, const MarketParams& market,
                         double k_eps) {
  return model.g_inverse(x + market.rho * model.f(v, k_eps));
}

double drift_theta(double x, double v, const ModelSpec& model, const MarketParams& market,
                   const LaplaceConstants& c, ThetaVariant variant) {
  const double rho = market.rho;
  const double s = reconstruct_asset(x, v, model, market, c.k_eps);
  const double ph = model.phi(v);
  const double sg = model.sigma(v);
  const double nu = model.nu(s);
  if (!(nu > 0.0) || !(sg > 0.0)) {
    throw DomainError(std::string(model.name()) + ": nu or sigma vanishes at (x=" + std::to_string(x) +
                      ", v=" + std::to_string(v) + ")");
  }
  const double wronskian = sg * model.dphi(v) - model.dsigma(v) * ph;
  const double corr = variant == ThetaVariant::lemma ? -0.5 * rho * c.k_eps * wronskian : 0.5 * rho * wronskian;
  const double v_drift = (v - market.V0) * c.r_hat + c.k_eps * model.drift_b(v);
  return model.mu(s, v) / nu - 0.5 * model.dnu(s) * ph * ph + corr - rho * v_drift * ph / (c.k_eps * sg);
}

double drift_theta(double x, double v, const ModelSpec& model, const MarketParams& market,
                   const KernelSpec& kernel, ThetaVariant variant) {
  return drift_theta(x, v, model, market, laplace_constants(kernel), variant);
}

}  // namespace roughchain
