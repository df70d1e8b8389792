#include <gtest/gtest.h>

#include <sstream>

#include "roughchain/ctmc.hpp"
#include "roughchain/errors.hpp"

using namespace roughchain;

namespace {

Grid grid_of(std::vector<double> nodes) {
  Grid g;
  g.nodes = std::move(nodes);
  return g;
}

}  // namespace

TEST(Ctmc, ThreeStateMatchesLinearSolve) {
  // interior node 1 of {0, 1, 3}: solve the two moment equations directly
  const Grid g = grid_of({0.0, 1.0, 3.0});
  const double m = 0.3, s2 = 2.0;
  const auto G = moment_matched_generator(g, {0.0, m, 0.0}, {0.0, s2, 0.0}, NegativeRatePolicy::reject, "test");
  Eigen::Matrix2d A;
  A << -1.0, 2.0, 1.0, 4.0;  // [-h0, h1; h0^2, h1^2]
  const Eigen::Vector2d rates = A.colPivHouseholderQr().solve(Eigen::Vector2d(m, s2));
  EXPECT_NEAR(G.lower[1], rates(0), 1e-14);
  EXPECT_NEAR(G.upper[1], rates(1), 1e-14);
  EXPECT_NEAR(G.diag[1], -rates.sum(), 1e-14);
  // boundary rows absorb
  EXPECT_EQ(G.diag[0], 0.0);
  EXPECT_EQ(G.upper[0], 0.0);
  EXPECT_EQ(G.lower[2], 0.0);
  EXPECT_EQ(G.diag[2], 0.0);
}

TEST(Ctmc, NegativeRatePolicies) {
  const Grid g = grid_of({0.0, 1.0, 2.0});
  const std::vector<double> drift = {0.0, -5.0, 0.0}, diff = {0.0, 1.0, 0.0};
  EXPECT_THROW(moment_matched_generator(g, drift, diff, NegativeRatePolicy::reject, "test"), NegativeRateError);
  const auto raw = moment_matched_generator(g, drift, diff, NegativeRatePolicy::allow, "test");
  EXPECT_LT(raw.upper[1], 0.0);
  const auto up = moment_matched_generator(g, drift, diff, NegativeRatePolicy::upwind, "test");
  EXPECT_EQ(up.repaired_nodes, 1u);
  EXPECT_NEAR(up.lower[1], 0.5 + 5.0, 1e-14);
  EXPECT_NEAR(up.upper[1], 0.5, 1e-14);
  // first moment is still exact
  EXPECT_NEAR(-up.lower[1] + up.upper[1], -5.0, 1e-14);
}

TEST(Ctmc, RejectReportsNode) {
  const Grid g = grid_of({0.0, 1.0, 2.0, 3.0});
  try {
    moment_matched_generator(g, {0.0, 0.0, 10.0, 0.0}, {0.0, 1.0, 1.0, 0.0}, NegativeRatePolicy::reject, "X");
    FAIL();
  } catch (const NegativeRateError& e) {
    EXPECT_EQ(e.node(), 2u);
    EXPECT_EQ(e.chain(), "X");
    EXPECT_LT(e.value(), 0.0);
  }
}

TEST(Ctmc, CoupledAssemblyByHand) {
  Tridiagonal Q;
  Q.lower = {0.0, 0.0};
  Q.diag = {-2.0, -3.0};
  Q.upper = {2.0, 0.0};
  Q.lower[1] = 3.0;
  Tridiagonal L0, L1;
  L0.lower = {0.0, 1.0};
  L0.diag = {-4.0, -1.0};
  L0.upper = {4.0, 0.0};
  L1.lower = {0.0, 5.0};
  L1.diag = {-6.0, -5.0};
  L1.upper = {6.0, 0.0};
  const Eigen::MatrixXd C = Eigen::MatrixXd(build_coupled(Q, {L0, L1}));
  Eigen::Matrix4d want;
  // flat index l * N + i
  want << -6, 4, 2, 0,
           1, -3, 0, 2,
           3, 0, -9, 6,
           0, 3, 5, -8;
  EXPECT_TRUE(C.isApprox(want, 1e-15)) << C;
}

TEST(Ctmc, ReferenceGeneratorsAreValid) {
  const MarketParams mk;
  const KernelSpec k = KernelSpec::make(0.12, 1e-8);
  GeneratorOptions o;
  o.N = o.M = 40;
  for (auto f : {ModelFamily::rough_heston, ModelFamily::rough_sabr, ModelFamily::rough_quadratic_slv}) {
    const auto m = ModelSpec::make(f, ModelParams{});
    const auto set = build_generators(m, mk, k, o);
    const auto rq = validate_generator(set.Q());
    EXPECT_TRUE(rq.is_generator()) << model_name(f);
    EXPECT_TRUE(rq.boundary_rows_zero);
    for (const auto& l : set.lambdas()) EXPECT_TRUE(validate_generator(l).is_generator()) << model_name(f);
    const auto rc = validate_generator(set.coupled());
    EXPECT_TRUE(rc.is_generator(1e-12)) << model_name(f);
    EXPECT_EQ(set.coupled().rows(), 1600);
  }
}

TEST(Ctmc, QMatchesVarianceMoments) {
  const auto m = ModelSpec::make(ModelFamily::rough_heston, ModelParams{});
  const MarketParams mk;
  const KernelSpec k = KernelSpec::make(0.12, 1e-3);
  const auto c = laplace_constants(k);
  const Grid vg = build_variance_grid(30, mk, m);
  const auto Q = build_Q(vg, m, mk, k, NegativeRatePolicy::allow);
  for (std::size_t i = 1; i + 1 < vg.size(); ++i) {
    const double v = vg.nodes[i];
    const double h0 = v - vg.nodes[i - 1], h1 = vg.nodes[i + 1] - v;
    const double drift = (v - mk.V0) * c.r_hat + c.k_eps * 4.0 * (0.035 - v);
    const double diff = c.k_eps * c.k_eps * 0.64 * v;
    EXPECT_NEAR(-Q.lower[i] * h0 + Q.upper[i] * h1, drift, 1e-9 * (std::abs(drift) + diff / h1));
    EXPECT_NEAR(Q.lower[i] * h0 * h0 + Q.upper[i] * h1 * h1, diff, 1e-12 * diff);
  }
}

TEST(Ctmc, TripletFormat) {
  // diagonal entries are always stored, absorbing rows included
  Tridiagonal T;
  T.lower = {0.0, 1.5, 0.0};
  T.diag = {0.0, -2.0, 0.0};
  T.upper = {0.0, 0.5, 0.0};
  std::ostringstream out;
  write_triplets(out, T);
  EXPECT_EQ(out.str(), "% 3 3 5\n0 0 0\n1 0 1.5\n1 1 -2\n1 2 0.5\n2 2 0\n");
}

TEST(Ctmc, NamesParse) {
  EXPECT_EQ(parse_negative_rate_policy("upwind"), NegativeRatePolicy::upwind);
  EXPECT_EQ(parse_negative_rate_policy(negative_rate_policy_name(NegativeRatePolicy::reject)),
            NegativeRatePolicy::reject);
  EXPECT_THROW(parse_negative_rate_policy("clamp"), ConfigError);
}
