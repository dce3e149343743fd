#include <gtest/gtest.h>

#include "redex/errors.hpp"
#include "redex/norm.hpp"
#include "redex/prox.hpp"
#include "redex/sdp.hpp"
#include "test_support.hpp"

using namespace redex;

namespace {

SymMatrix diag2(double a, double b) {
  Vector d(2);
  d << a, b;
  return SymMatrix::diagonal(d);
}

LabeledDataset planted_scalar(std::mt19937_64& rng, Eigen::Index m, Eigen::Index d) {
  LabeledDataset data;
  data.inputs = redex::testing::random_matrix(rng, m, d);
  const SymMatrix truth = redex::testing::random_sym(rng, d);
  data.targets.resize(m, 1);
  for (Eigen::Index i = 0; i < m; ++i) data.targets(i, 0) = truth.quadratic_form(data.inputs.row(i).transpose());
  data.targets += 0.05 * redex::testing::random_matrix(rng, m, 1);
  return data;
}

}  // namespace

TEST(ProxTrace, Examples) {
  EXPECT_LE((prox_trace(diag2(3, -1), 1.0).matrix() - diag2(2, 0).matrix()).norm(), 1e-14);
  std::mt19937_64 rng(1);
  const SymMatrix a = redex::testing::random_sym(rng, 4);
  EXPECT_LE((prox_trace(a, 0.0).matrix() - a.matrix()).norm(), 1e-12);
}

TEST(ProxTrace, MatchesGridOnDiagonal) {
  // argmin_{b} ½‖B − A‖² + τ‖B‖_Tr over diagonal B, by brute force.
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int rep = 0; rep < 5; ++rep) {
    const double a = u(rng), b = u(rng), tau = 0.7;
    double best = 1e300, bx = 0, by = 0;
    for (int i = -3000; i <= 3000; ++i) {
      const double x = i * 1e-3;
      const double fx = 0.5 * (x - a) * (x - a) + tau * std::abs(x);
      if (fx < best) best = fx, bx = x;
    }
    best = 1e300;
    for (int i = -3000; i <= 3000; ++i) {
      const double y = i * 1e-3;
      const double fy = 0.5 * (y - b) * (y - b) + tau * std::abs(y);
      if (fy < best) best = fy, by = y;
    }
    const SymMatrix p = prox_trace(diag2(a, b), tau);
    EXPECT_NEAR(p(0, 0), bx, 1e-3);
    EXPECT_NEAR(p(1, 1), by, 1e-3);
  }
}

TEST(ProxTrace, Nonexpansive) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const SymMatrix a = redex::testing::random_sym(rng, 5), b = redex::testing::random_sym(rng, 5);
    EXPECT_LE((prox_trace(a, 0.4) - prox_trace(b, 0.4)).frobenius_norm(), (a - b).frobenius_norm() + 1e-9);
  }
}

TEST(SolveOneDim, ScalarLeastSquares) {
  LabeledDataset data;
  data.inputs = Matrix::Ones(1, 1);
  data.targets = Matrix::Constant(1, 1, 2.0);
  const auto [a, report] = solve_one_dim(data, ProxConfig{});
  EXPECT_TRUE(report.converged);
  EXPECT_NEAR(a(0, 0), 2.0, 1e-8);
}

TEST(SolveOneDim, HugeThresholdGivesZero) {
  std::mt19937_64 rng(4);
  const LabeledDataset data = planted_scalar(rng, 30, 3);
  ProxConfig cfg;
  cfg.l1 = 1e6;
  const auto [a, report] = solve_one_dim(data, cfg);
  EXPECT_EQ(a.frobenius_norm(), 0.0);
}

TEST(SolveOneDim, ObjectiveNeverIncreases) {
  std::mt19937_64 rng(5);
  const LabeledDataset data = planted_scalar(rng, 50, 4);
  ProxConfig cfg;
  cfg.l1 = 0.05;
  cfg.l2 = 0.01;
  const auto [a, report] = solve_one_dim(data, cfg);
  EXPECT_TRUE(report.converged);
  const auto& h = report.objective_history;
  for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LE(h[i], h[i - 1] + 1e-12);
  EXPECT_NEAR(report.objective, one_dim_objective(a, data, cfg), 1e-12);
  EXPECT_NEAR(trace_norm(a), trace_norm_k1(a).value, 1e-9);
}

TEST(SolveOneDim, RejectsVectorTargets) {
  LabeledDataset data;
  data.inputs = Matrix::Ones(2, 2);
  data.targets = Matrix::Ones(2, 2);
  EXPECT_THROW(solve_one_dim(data, ProxConfig{}), DimError);
}

TEST(SolveOneDim, AgreesWithSdpWhenWidthIsLoose) {
  // With λ₁ = 0 the minimal-Frobenius dominator is |A|, so program (4) with a
  // loose cap and λ = λ₂ has the same optimum as the prox objective.
  std::mt19937_64 rng(6);
  const LabeledDataset data = planted_scalar(rng, 40, 3);
  ProxConfig pcfg;
  pcfg.l2 = 0.02;
  const auto [a, prep] = solve_one_dim(data, pcfg);
  TrainConfig scfg;
  scfg.reg = 0.02;
  scfg.width = 10.0 * trace_norm(a) + 1.0;
  scfg.tol = 1e-8;
  scfg.max_iters = 100000;
  const auto [alt, srep] = solve_single_layer(data, scfg);
  double gap = 0.0;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const Vector x = data.inputs.row(i).transpose();
    gap += std::pow(a.quadratic_form(x) - alt.heads[0].quadratic_form(x), 2);
  }
  EXPECT_LE(gap / static_cast<double>(data.size()), 1e-4);
}

TEST(RecoverOneDim, Examples) {
  const RedExLayer layer = recover_one_dim(diag2(4, -1));
  Matrix v = Matrix::Zero(2, 2);
  v(0, 0) = 2;
  v(1, 1) = 1;
  EXPECT_LE((layer.extractor - v).norm(), 1e-12);
  EXPECT_LE((layer.heads[0].matrix() - diag2(1, -1).matrix()).norm(), 1e-12);
  const RedExLayer zero = recover_one_dim(SymMatrix::zero(3));
  EXPECT_EQ(zero.extractor.norm(), 0.0);
}

TEST(RecoverOneDim, RandomEvaluation) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 5; ++rep) {
    const SymMatrix a = redex::testing::random_sym(rng, 6);
    const RedExLayer layer = recover_one_dim(a);
    const EigenDecomp e = sym_eigendecompose(layer.heads[0]);
    for (Eigen::Index i = 0; i < e.rank(); ++i) {
      const double lam = e.eigenvalues(i);
      EXPECT_LE(std::min({std::abs(lam - 1), std::abs(lam), std::abs(lam + 1)}), 1e-8);
    }
    for (int s = 0; s < 100; ++s) {
      const Vector x = redex::testing::random_vector(rng, 6);
      EXPECT_LE(std::abs(layer(x)(0) - a.quadratic_form(x)), 1e-8 * (1 + std::pow(x.norm(), 4)));
    }
  }
}
