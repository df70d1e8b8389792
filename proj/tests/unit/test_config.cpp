#include <gtest/gtest.h>

#include "roughchain/config.hpp"
#include "roughchain/errors.hpp"

using namespace roughchain;

TEST(Config, DefaultsMatchReferenceSetup) {
  const RunConfig c = parse_config("{}");
  EXPECT_EQ(c.model, ModelFamily::rough_heston);
  EXPECT_EQ(c.numerics.N, 100u);
  EXPECT_EQ(c.numerics.method, PricingMethod::fast);
  EXPECT_DOUBLE_EQ(c.kernel.eps, 1e-8);
  EXPECT_DOUBLE_EQ(c.option.D, 4.0);
  EXPECT_EQ(c.numerics.negative_rates, NegativeRatePolicy::upwind);
}

TEST(Config, JsonRoundTrip) {
  RunConfig c;
  c.model = ModelFamily::rough_sabr;
  c.params.beta = 0.3;
  c.kernel.eps = 1e-6;
  c.numerics.N = 42;
  c.numerics.bermudan_n = 7;
  c.numerics.x_bounds = GridBounds{-1.0, 5.0};
  c.option.L = 2.0;
  c.option.kind = OptionKind::put;
  c.mc.seed = 99;
  const nlohmann::json doc = to_json(c);
  const RunConfig back = config_from_json(doc);
  EXPECT_EQ(to_json(back), doc);
  EXPECT_EQ(back.model, ModelFamily::rough_sabr);
  EXPECT_DOUBLE_EQ(back.params.beta, 0.3);
  EXPECT_EQ(back.numerics.bermudan_n, std::optional<std::size_t>(7));
  EXPECT_DOUBLE_EQ(back.numerics.x_bounds->hi, 5.0);
  EXPECT_EQ(back.option.kind, OptionKind::put);
  EXPECT_EQ(back.mc.seed, 99u);
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_THROW(parse_config(R"({"modle": {}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"numerics": {"NN": 3}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"model": {"name": "rough-heston", "params": {"kappa": 1}}})"), ConfigError);
}

TEST(Config, RejectsBadValues) {
  EXPECT_THROW(parse_config(R"({"model": {"name": "heston"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"numerics": {"N": 2}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"kernel": {"H": 0.7}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"numerics": {"N": "many"}})"), ConfigError);
  EXPECT_THROW(parse_config("{not json"), ConfigError);
}

TEST(Config, Overrides) {
  const RunConfig c = parse_config("{}", {"numerics.N=50", "model.name=rough-quadratic-slv", "option.L=2", "option.U=15"});
  EXPECT_EQ(c.numerics.N, 50u);
  EXPECT_EQ(c.model, ModelFamily::rough_quadratic_slv);
  ASSERT_TRUE(c.option.U.has_value());
  EXPECT_DOUBLE_EQ(*c.option.U, 15.0);
  EXPECT_EQ(c.overrides.size(), 4u);
  EXPECT_THROW(parse_config("{}", {"numerics.N"}), ConfigError);
  EXPECT_THROW(parse_config("{}", {"numerics.bogus=1"}), ConfigError);
}

TEST(Config, DerivedSpecs) {
  const RunConfig c = parse_config(R"({"option": {"r": 0.03, "L": 2, "U": 15}, "numerics": {"bermudan_n": 5}})");
  const OptionSpec o = c.option_spec();
  EXPECT_DOUBLE_EQ(o.rate, 0.03);
  ASSERT_TRUE(o.barrier.has_value());
  EXPECT_DOUBLE_EQ(o.barrier->L, 2.0);
  EXPECT_EQ(o.bermudan_n, std::optional<std::size_t>(5));
  EXPECT_DOUBLE_EQ(c.model_spec().params().r, 0.03);
  EXPECT_EQ(c.generator_options().N, 100u);
}
