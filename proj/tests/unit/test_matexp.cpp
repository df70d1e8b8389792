#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "roughchain/errors.hpp"
#include "roughchain/matexp.hpp"

using namespace roughchain;

namespace {

Eigen::MatrixXd random_generator(int n, unsigned seed, double scale = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, scale);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && u(rng) < 0.3 * scale) G(i, j) = u(rng);
    }
    G(i, i) = -G.row(i).sum();
  }
  return G;
}

SparseGenerator sparse(const Eigen::MatrixXd& G) { return G.sparseView(); }

}  // namespace

TEST(Matexp, TwoStateClosedForm) {
  const double a = 3.0, b = 0.5, t = 0.7;
  Eigen::Matrix2d G;
  G << -a, a, b, -b;
  const Eigen::MatrixXd P = expm_dense(G, t);
  const double e = std::exp(-(a + b) * t);
  Eigen::Matrix2d want;
  want << b + a * e, a - a * e, b - b * e, a + b * e;
  want /= a + b;
  EXPECT_LT((P - want).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Matexp, StiffTwoStateStaysStochastic) {
  Eigen::Matrix2d G;
  G << -1e10, 1e10, 2.0, -2.0;
  const Eigen::MatrixXd P = expm_dense(G, 1.0);
  EXPECT_NEAR(P.row(0).sum(), 1.0, 1e-14);
  EXPECT_NEAR(P(0, 1), 1.0, 1e-9);
  EXPECT_GE(P.minCoeff(), 0.0);
}

TEST(Matexp, DenseRejectsNonGenerators) {
  Eigen::Matrix2d G;
  G << -1.0, 0.5, 0.0, 0.0;
  EXPECT_THROW(expm_dense(G, 1.0), NumericalError);
  EXPECT_THROW(expm_dense(Eigen::MatrixXd::Zero(3, 3), 1.0, 2), NumericalError);
  EXPECT_THROW(expm_dense(Eigen::MatrixXd::Zero(2, 2), -1.0), ConfigError);
}

TEST(Matexp, UniformizationMatchesDense) {
  const double tol = 1e-10;
  for (unsigned seed : {1u, 2u, 3u}) {
    const Eigen::MatrixXd G = random_generator(50, seed);
    const Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(50, -1.0, 2.0);
    const Eigen::VectorXd ref = expm_dense(G, 0.8) * w;
    ExpmOptions o;
    o.tol = tol;
    o.method = ExpmMethod::uniformization;
    ExpmStats st;
    const Eigen::VectorXd got = expm_action(sparse(G), w, 0.8, o, &st);
    EXPECT_LT((got - ref).lpNorm<Eigen::Infinity>(), 10 * tol);
    EXPECT_EQ(st.method, ExpmMethod::uniformization);
    EXPECT_GT(st.matvecs, 0u);
  }
}

TEST(Matexp, KrylovMatchesDenseOnStiffChain) {
  // birth-death chain with rates spanning eight decades
  const int n = 60;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i + 1 < n; ++i) {
    const double r = std::pow(10.0, 8.0 * i / n);
    G(i, i - 1) = r;
    G(i, i + 1) = 0.5 * r;
    G(i, i) = -1.5 * r;
  }
  const Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(n, 0.0, 1.0).array().square();
  const Eigen::VectorXd ref = expm_dense(G, 0.3) * w;
  ExpmOptions o;
  o.method = ExpmMethod::krylov_shift_invert;
  const Eigen::VectorXd got = expm_action(sparse(G), w, 0.3, o);
  EXPECT_LT((got - ref).lpNorm<Eigen::Infinity>(), 1e-7);
}

TEST(Matexp, PlanSelection) {
  const Eigen::MatrixXd G = random_generator(20, 7);
  EXPECT_EQ(ExpmPlan(sparse(G), 1.0).method(), ExpmMethod::dense);
  ExpmOptions o;
  o.dense_cap = 10;
  EXPECT_EQ(ExpmPlan(sparse(G), 1.0, o).method(), ExpmMethod::uniformization);
  o.uniformization_budget = 1e-3;
  EXPECT_EQ(ExpmPlan(sparse(G), 1.0, o).method(), ExpmMethod::krylov_shift_invert);
  const ExpmPlan cached(sparse(G), 0.25);
  ASSERT_NE(cached.cached(), nullptr);
  EXPECT_LT((*cached.cached() - expm_dense(G, 0.25)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Matexp, SemigroupAndIdentity) {
  const Eigen::MatrixXd G = random_generator(30, 11, 2.0);
  const Eigen::MatrixXd P1 = expm_dense(G, 0.3), P2 = expm_dense(G, 0.5), P = expm_dense(G, 0.8);
  EXPECT_LT((P1 * P2 - P).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(expm_dense(G, 0.0).isIdentity());
  const Eigen::VectorXd w = Eigen::VectorXd::Random(30);
  EXPECT_EQ(expm_action(sparse(G), w, 0.0), w);
}
