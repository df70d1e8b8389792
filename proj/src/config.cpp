#include "roughchain/config.hpp"

#include <fstream>
#include <sstream>

#include "roughchain/errors.hpp"

namespace roughchain {

using nlohmann::json;

std::string_view pricing_method_name(PricingMethod method) {
  return method == PricingMethod::fast ? "fast" : "coupled";
}

PricingMethod parse_pricing_method(std::string_view name) {
  if (name == "fast") return PricingMethod::fast;
  if (name == "coupled") return PricingMethod::coupled;
  throw ConfigError("unknown pricing method '" + std::string(name) + "' (expected fast or coupled)");
}

namespace {

void reject_unknown(const json& block, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!block.is_object()) throw ConfigError("config: '" + std::string(where) + "' must be an object");
  for (const auto& [key, _] : block.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("config: unknown key '" + std::string(where) + "." + key + "'");
  }
}

template <class T>
void read(const json& block, std::string_view where, const char* key, T& out) {
  if (!block.contains(key)) return;
  try {
    out = block.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config: bad value for '" + std::string(where) + "." + key + "': " + e.what());
  }
}

std::size_t read_count(const json& block, std::string_view where, const char* key, std::size_t fallback) {
  if (!block.contains(key)) return fallback;
  const json& v = block.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError("config: '" + std::string(where) + "." + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

template <class T>
std::optional<T> read_optional(const json& block, std::string_view where, const char* key,
                               std::optional<T> fallback) {
  if (!block.contains(key)) return fallback;
  if (block.at(key).is_null()) return std::nullopt;
  T value{};
  read(block, where, key, value);
  return value;
}

std::optional<GridBounds> read_bounds(const json& block, std::string_view where, const char* key,
                                      std::optional<GridBounds> fallback) {
  if (!block.contains(key)) return fallback;
  const json& v = block.at(key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError("config: '" + std::string(where) + "." + key + "' must be [lo, hi] or null");
  }
  return GridBounds{v[0].get<double>(), v[1].get<double>()};
}

std::string read_string(const json& block, std::string_view where, const char* key, std::string fallback) {
  read(block, where, key, fallback);
  return fallback;
}

json bounds_json(const std::optional<GridBounds>& b) {
  if (!b) return nullptr;
  return json::array({b->lo, b->hi});
}

template <class T>
json optional_json(const std::optional<T>& v) {
  if (!v) return nullptr;
  return *v;
}

}  // namespace

void RunConfig::validate() const {
  const ModelSpec m = model_spec();
  market.validate(m);
  kernel.validate();
  option_spec().validate();
  mc.validate();
  if (numerics.N < 3 || numerics.M < 3) throw ConfigError("numerics: N and M must be >= 3");
  if (!(numerics.expm_tol > 0.0)) throw ConfigError("numerics: expm_tol must be positive");
  if (!(numerics.regularity > 0.0)) throw ConfigError("numerics: regularity must be positive");
  if (option.L.has_value() != option.U.has_value()) {
    throw ConfigError("option: give both barrier levels L and U, or neither");
  }
}

ModelSpec RunConfig::model_spec() const {
  ModelParams p = params;
  p.r = option.r;
  return ModelSpec::make(model, p);
}

OptionSpec RunConfig::option_spec() const {
  OptionSpec o;
  o.kind = option.kind;
  o.strike = option.D;
  o.maturity = option.T;
  o.rate = option.r;
  if (option.L && option.U) o.barrier = Barrier{*option.L, *option.U};
  o.bermudan_n = numerics.bermudan_n;
  return o;
}

GeneratorOptions RunConfig::generator_options(unsigned threads) const {
  GeneratorOptions g;
  g.N = numerics.N;
  g.M = numerics.M;
  g.vgrid = GridOptions{numerics.grid_style, numerics.v_bounds, numerics.regularity};
  g.xgrid = GridOptions{numerics.grid_style, numerics.x_bounds, numerics.regularity};
  g.policy = numerics.negative_rates;
  g.theta = numerics.theta;
  g.threads = threads;
  return g;
}

PricingOptions RunConfig::pricing_options(unsigned threads) const {
  PricingOptions p;
  p.expm.tol = numerics.expm_tol;
  p.expm.dense_cap = numerics.dense_cap;
  p.reading = numerics.fast_reading;
  p.threads = threads;
  return p;
}

json to_json(const RunConfig& c) {
  json doc;
  doc["model"] = {{"name", std::string(model_name(c.model))},
                  {"params",
                   {{"q", c.params.q},
                    {"eta", c.params.eta},
                    {"vartheta", c.params.vartheta},
                    {"sigma", c.params.sigma},
                    {"a", c.params.a},
                    {"b", c.params.b},
                    {"c", c.params.c},
                    {"beta", c.params.beta}}}};
  doc["market"] = {{"S0", c.market.S0}, {"V0", c.market.V0}, {"rho", c.market.rho}};
  doc["kernel"] = {{"H", c.kernel.hurst}, {"eps", c.kernel.eps}};
  const auto& n = c.numerics;
  doc["numerics"] = {{"N", n.N},
                     {"M", n.M},
                     {"v_bounds", bounds_json(n.v_bounds)},
                     {"x_bounds", bounds_json(n.x_bounds)},
                     {"grid_style", std::string(grid_style_name(n.grid_style))},
                     {"regularity", n.regularity},
                     {"method", std::string(pricing_method_name(n.method))},
                     {"bermudan_n", optional_json(n.bermudan_n)},
                     {"negative_rates", std::string(negative_rate_policy_name(n.negative_rates))},
                     {"theta", std::string(theta_variant_name(n.theta))},
                     {"fast_reading", std::string(fast_reading_name(n.fast_reading))},
                     {"expm_tol", n.expm_tol},
                     {"dense_cap", n.dense_cap}};
  doc["option"] = {{"kind", std::string(option_kind_name(c.option.kind))},
                   {"D", c.option.D},
                   {"T", c.option.T},
                   {"r", c.option.r},
                   {"L", optional_json(c.option.L)},
                   {"U", optional_json(c.option.U)}};
  doc["mc"] = {{"paths", c.mc.paths}, {"steps", c.mc.steps}, {"seed", c.mc.seed}, {"antithetic", c.mc.antithetic}};
  return doc;
}

RunConfig config_from_json(const json& doc) {
  RunConfig c;
  reject_unknown(doc, "<root>", {"model", "market", "kernel", "numerics", "option", "mc"});
  if (doc.contains("model")) {
    const json& m = doc.at("model");
    reject_unknown(m, "model", {"name", "params"});
    c.model = parse_model_family(read_string(m, "model", "name", std::string(model_name(c.model))));
    if (m.contains("params")) {
      const json& p = m.at("params");
      reject_unknown(p, "model.params", {"q", "eta", "vartheta", "sigma", "a", "b", "c", "beta"});
      read(p, "model.params", "q", c.params.q);
      read(p, "model.params", "eta", c.params.eta);
      read(p, "model.params", "vartheta", c.params.vartheta);
      read(p, "model.params", "sigma", c.params.sigma);
      read(p, "model.params", "a", c.params.a);
      read(p, "model.params", "b", c.params.b);
      read(p, "model.params", "c", c.params.c);
      read(p, "model.params", "beta", c.params.beta);
    }
  }
  if (doc.contains("market")) {
    const json& m = doc.at("market");
    reject_unknown(m, "market", {"S0", "V0", "rho"});
    read(m, "market", "S0", c.market.S0);
    read(m, "market", "V0", c.market.V0);
    read(m, "market", "rho", c.market.rho);
  }
  if (doc.contains("kernel")) {
    const json& k = doc.at("kernel");
    reject_unknown(k, "kernel", {"H", "eps"});
    read(k, "kernel", "H", c.kernel.hurst);
    read(k, "kernel", "eps", c.kernel.eps);
  }
  if (doc.contains("numerics")) {
    const json& n = doc.at("numerics");
    auto& o = c.numerics;
    reject_unknown(n, "numerics",
                   {"N", "M", "v_bounds", "x_bounds", "grid_style", "regularity", "method", "bermudan_n",
                    "negative_rates", "theta", "fast_reading", "expm_tol", "dense_cap"});
    o.N = read_count(n, "numerics", "N", o.N);
    o.M = read_count(n, "numerics", "M", o.M);
    o.v_bounds = read_bounds(n, "numerics", "v_bounds", o.v_bounds);
    o.x_bounds = read_bounds(n, "numerics", "x_bounds", o.x_bounds);
    o.grid_style = parse_grid_style(read_string(n, "numerics", "grid_style", std::string(grid_style_name(o.grid_style))));
    read(n, "numerics", "regularity", o.regularity);
    o.method = parse_pricing_method(read_string(n, "numerics", "method", std::string(pricing_method_name(o.method))));
    if (n.contains("bermudan_n") && !n.at("bermudan_n").is_null()) {
      o.bermudan_n = read_count(n, "numerics", "bermudan_n", 0);
    } else if (n.contains("bermudan_n")) {
      o.bermudan_n.reset();
    }
    o.negative_rates = parse_negative_rate_policy(
        read_string(n, "numerics", "negative_rates", std::string(negative_rate_policy_name(o.negative_rates))));
    o.theta = parse_theta_variant(read_string(n, "numerics", "theta", std::string(theta_variant_name(o.theta))));
    o.fast_reading =
        parse_fast_reading(read_string(n, "numerics", "fast_reading", std::string(fast_reading_name(o.fast_reading))));
    read(n, "numerics", "expm_tol", o.expm_tol);
    o.dense_cap = read_count(n, "numerics", "dense_cap", o.dense_cap);
  }
  if (doc.contains("option")) {
    const json& op = doc.at("option");
    reject_unknown(op, "option", {"kind", "D", "T", "r", "L", "U"});
    c.option.kind = parse_option_kind(read_string(op, "option", "kind", std::string(option_kind_name(c.option.kind))));
    read(op, "option", "D", c.option.D);
    read(op, "option", "T", c.option.T);
    read(op, "option", "r", c.option.r);
    c.option.L = read_optional<double>(op, "option", "L", c.option.L);
    c.option.U = read_optional<double>(op, "option", "U", c.option.U);
  }
  if (doc.contains("mc")) {
    const json& m = doc.at("mc");
    reject_unknown(m, "mc", {"paths", "steps", "seed", "antithetic"});
    c.mc.paths = read_count(m, "mc", "paths", c.mc.paths);
    c.mc.steps = read_count(m, "mc", "steps", c.mc.steps);
    read(m, "mc", "seed", c.mc.seed);
    read(m, "mc", "antithetic", c.mc.antithetic);
  }
  return c;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' must look like path.to.key=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("override '" + assignment + "' has an empty path component");
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config: not valid JSON");
  for (const auto& o : overrides) apply_override(doc, o);
  RunConfig c = config_from_json(doc);
  c.overrides = overrides;
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

}  // namespace roughchain
