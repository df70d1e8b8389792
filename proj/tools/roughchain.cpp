#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "roughchain/benchmarks.hpp"
#include "roughchain/config.hpp"
#include "roughchain/ctmc.hpp"
#include "roughchain/errors.hpp"
#include "roughchain/mc_oracle.hpp"
#include "roughchain/pricing.hpp"
#include "roughchain/selfcheck.hpp"

using namespace roughchain;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;
constexpr int kSelfcheckFailed = 4;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  unsigned threads = 1;
  std::string out_path;
};

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

RunConfig resolve_config(const CommonArgs& args) {
  std::string path = args.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("ROUGHCHAIN_CONFIG"); env && *env) path = env;
  }
  if (path.empty()) return parse_config("{}", args.overrides);
  return load_config(path, args.overrides);
}

json provenance(const RunConfig& cfg, const CommonArgs& args) {
  json p;
  p["overrides"] = cfg.overrides;
  p["config_path"] = args.config_path.empty() ? json(nullptr) : json(args.config_path);
  p["threads"] = args.threads;
  return p;
}

void emit(const CommonArgs& args, const std::string& text) {
  if (args.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(args.out_path);
  if (!out) throw ConfigError("cannot write '" + args.out_path + "'");
  out << text;
}

Product product_of(const OptionSpec& option) {
  if (option.bermudan_n) return Product::american;
  return option.barrier ? Product::barrier : Product::european;
}

PriceResult run_pricer(const RunConfig& cfg, const GeneratorSet& gens, unsigned threads) {
  const ModelSpec model = cfg.model_spec();
  const OptionSpec option = cfg.option_spec();
  const PricingOptions po = cfg.pricing_options(threads);
  if (option.bermudan_n) return price_bermudan(option, gens, model, cfg.market, cfg.kernel, po);
  if (cfg.numerics.method == PricingMethod::fast) return price_fast(option, gens, model, cfg.market, cfg.kernel, po);
  return price_european_coupled(option, gens, model, cfg.market, cfg.kernel, po);
}

PriceResult price_config(const RunConfig& cfg, unsigned threads) {
  const auto gens = build_generators(cfg.model_spec(), cfg.market, cfg.kernel, cfg.generator_options(threads));
  return run_pricer(cfg, gens, threads);
}

json result_json(const PriceResult& r) {
  return {{"price", r.price},
          {"diagnostics",
           {{"method", r.method},
            {"N", r.N},
            {"M", r.M},
            {"eps", r.eps},
            {"expm", r.expm_method},
            {"wall_seconds", r.wall_seconds},
            {"repaired_nodes", r.repaired_nodes},
            {"exercise_dates", r.exercise_dates}}}};
}

int cmd_price(const CommonArgs& args) {
  const RunConfig cfg = resolve_config(args);
  const PriceResult r = price_config(cfg, args.threads);
  json doc = result_json(r);
  doc["command"] = "price";
  doc["config"] = to_json(cfg);
  doc["provenance"] = provenance(cfg, args);
  emit(args, doc.dump(2) + "\n");
  return kOk;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("cannot parse list entry '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty sweep list");
  return out;
}

int cmd_table(const CommonArgs& args, const std::string& sweep, const std::string& values, bool all_models) {
  const RunConfig base = resolve_config(args);
  std::vector<double> list;
  if (sweep == "eps") {
    list = parse_list(values.empty() ? "1e-4,1e-5,1e-6,1e-7,1e-8" : values);
  } else if (sweep == "grid") {
    list = parse_list(values.empty() ? "20,40,80" : values);
  } else {
    throw ConfigError("--sweep must be eps or grid");
  }
  std::vector<ModelFamily> families{base.model};
  if (all_models) {
    families = {ModelFamily::rough_heston,      ModelFamily::rough_42,          ModelFamily::rough_alpha_hyper,
                ModelFamily::rough_sabr,        ModelFamily::rough_heston_sabr, ModelFamily::rough_quadratic_slv};
  }
  std::ostringstream csv;
  csv << "model,product,N,M,eps,method,price,benchmark,rel_error,seconds\n";
  for (auto family : families) {
    for (double value : list) {
      RunConfig cfg = base;
      cfg.model = family;
      if (sweep == "eps") {
        cfg.kernel.eps = value;
      } else {
        if (value < 3 || value != std::floor(value)) throw ConfigError("grid sizes must be integers >= 3");
        cfg.numerics.N = cfg.numerics.M = static_cast<std::size_t>(value);
      }
      cfg.validate();
      const PriceResult r = price_config(cfg, args.threads);
      const Product product = product_of(cfg.option_spec());
      const double bench = reference_price(family, product);
      csv << model_name(family) << ',' << product_name(product) << ',' << r.N << ',' << r.M << ',' << g17(r.eps)
          << ',' << r.method << ',' << g17(r.price) << ',' << g17(bench) << ',' << g17(std::abs(r.price - bench) / bench)
          << ',' << g17(r.wall_seconds) << '\n';
    }
  }
  emit(args, csv.str());
  return kOk;
}

int cmd_compare_mc(const CommonArgs& args, const std::string& kernel_mode) {
  const RunConfig cfg = resolve_config(args);
  const OptionSpec option = cfg.option_spec();
  if (option.bermudan_n) throw ConfigError("compare-mc supports European and barrier options only");
  VolterraKernel which;
  if (kernel_mode == "rough") {
    which = VolterraKernel::rough;
  } else if (kernel_mode == "perturbed") {
    which = VolterraKernel::perturbed;
  } else {
    throw ConfigError("--kernel must be rough or perturbed");
  }
  const PriceResult r = price_config(cfg, args.threads);
  McConfig mc = cfg.mc;
  mc.threads = args.threads;
  const McEstimate est = mc_price(option, cfg.model_spec(), cfg.market, cfg.kernel, which, mc);
  json doc;
  doc["command"] = "compare-mc";
  doc["ctmc"] = result_json(r);
  doc["mc"] = {{"estimate", est.estimate},
               {"stderr", est.stderr_},
               {"paths", est.paths},
               {"seed", est.seed},
               {"steps", mc.steps},
               {"kernel", kernel_mode}};
  doc["z_score"] = est.stderr_ > 0.0 ? json((r.price - est.estimate) / est.stderr_) : json(nullptr);
  doc["config"] = to_json(cfg);
  doc["provenance"] = provenance(cfg, args);
  emit(args, doc.dump(2) + "\n");
  return kOk;
}

int cmd_selfcheck(const CommonArgs& args) {
  const auto checks = run_selfcheck(args.threads);
  std::ostringstream out;
  const bool ok = report_checks(out, checks);
  emit(args, out.str());
  return ok ? kOk : kSelfcheckFailed;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON run configuration (default: $ROUGHCHAIN_CONFIG)");
  cmd->add_option("--set", args.overrides, "Override a config value, e.g. numerics.N=50 (repeatable)");
  cmd->add_option("--threads", args.threads, "Worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", args.out_path, "Write output to FILE instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CTMC option pricing under rough stochastic local volatility"};
  app.require_subcommand(1);

  CommonArgs price_args, table_args, mc_args, check_args;
  auto* price = app.add_subcommand("price", "Price the configured option; prints one JSON record");
  add_common(price, price_args);

  auto* table = app.add_subcommand("table", "Sweep eps or N=M and print a CSV table");
  add_common(table, table_args);
  std::string sweep = "eps", values;
  bool all_models = false;
  table->add_option("--sweep", sweep, "eps or grid")->capture_default_str();
  table->add_option("--values", values, "Comma-separated sweep values");
  table->add_flag("--all-models", all_models, "Repeat the sweep for all six model families");

  auto* compare = app.add_subcommand("compare-mc", "CTMC price against the Monte Carlo oracle");
  add_common(compare, mc_args);
  std::string kernel_mode = "rough";
  compare->add_option("--kernel", kernel_mode, "Simulate the rough or the perturbed model")->capture_default_str();

  auto* selfcheck = app.add_subcommand("selfcheck", "Run the property suites");
  add_common(selfcheck, check_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*price) return cmd_price(price_args);
    if (*table) return cmd_table(table_args, sweep, values, all_models);
    if (*compare) return cmd_compare_mc(mc_args, kernel_mode);
    if (*selfcheck) return cmd_selfcheck(check_args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalError;
  }
  return kOk;
}
