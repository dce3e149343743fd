#include <gtest/gtest.h>

#include "redex/errors.hpp"
#include "redex/norm.hpp"
#include "test_support.hpp"

using namespace redex;

namespace {

SymMatrix diag(std::initializer_list<double> v) {
  Vector d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d(i++) = x;
  return SymMatrix::diagonal(d);
}

bool feasible(const NormResult& r, const std::vector<SymMatrix>& heads, double tol) {
  if (min_eigenvalue(r.witness) < -tol) return false;
  for (const auto& a : heads) {
    if (min_eigenvalue(r.witness - a) < -tol) return false;
    if (min_eigenvalue(r.witness + a) < -tol) return false;
  }
  return std::abs(r.value - r.witness.trace()) <= tol;
}

}  // namespace

TEST(RedexNorm, DiagonalSingleHead) {
  const std::vector<SymMatrix> heads{diag({2, -3})};
  const NormResult r = redex_norm(heads);
  EXPECT_NEAR(r.value, 5.0, 1e-6);
  EXPECT_LE((r.witness.matrix() - diag({2, 3}).matrix()).norm(), 1e-5);
  EXPECT_TRUE(feasible(r, heads, 1e-7));
}

TEST(RedexNorm, ZeroTuple) {
  const NormResult r = redex_norm({SymMatrix::zero(3), SymMatrix::zero(3)});
  EXPECT_NEAR(r.value, 0.0, 1e-7);
}

TEST(RedexNorm, TwoCoordinateProjections) {
  // Principal minors force R_11, R_22 >= 1, so the value is at least 2; I attains it.
  const std::vector<SymMatrix> heads{diag({1, 0}), diag({0, 1})};
  const NormResult r = redex_norm(heads);
  EXPECT_NEAR(r.value, 2.0, 1e-6);
  EXPECT_LE((r.witness.matrix() - Matrix::Identity(2, 2)).norm(), 1e-4);
  EXPECT_TRUE(feasible(r, heads, 1e-7));
}

TEST(RedexNorm, AgreesWithTraceNormForOneHead) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 5; ++rep) {
    const SymMatrix a = redex::testing::random_sym(rng, 2 + rep * 2);
    const double exact = trace_norm_k1(a).value;
    EXPECT_NEAR(redex_norm({a}).value, exact, 1e-5 * std::max(1.0, exact));
  }
}

TEST(RedexNorm, LowerBoundAndKernelContainment) {
  std::mt19937_64 rng(22);
  for (int rep = 0; rep < 5; ++rep) {
    // Rank-deficient heads so the witness has a kernel.
    const Matrix b = redex::testing::random_matrix(rng, 5, 2);
    std::vector<SymMatrix> heads;
    for (int i = 0; i < 3; ++i) {
      const SymMatrix c = redex::testing::random_sym(rng, 2);
      heads.emplace_back(Matrix(b * c.matrix() * b.transpose()));
    }
    const NormResult r = redex_norm(heads);
    for (const auto& a : heads) EXPECT_GE(r.value, trace_norm(a) - 1e-5);
    const EigenDecomp e = sym_eigendecompose(r.witness);
    for (Eigen::Index i = 0; i < e.rank(); ++i) {
      if (std::abs(e.eigenvalues(i)) > 1e-8) continue;
      const Vector v = e.eigenvectors.row(i).transpose();
      for (const auto& a : heads) EXPECT_LE((a.matrix() * v).norm(), 1e-6);
    }
  }
}

TEST(RedexNorm, HomogeneityAndTriangle) {
  std::mt19937_64 rng(23);
  std::vector<SymMatrix> a, b;
  for (int i = 0; i < 2; ++i) {
    a.push_back(redex::testing::random_sym(rng, 4));
    b.push_back(redex::testing::random_sym(rng, 4));
  }
  std::vector<SymMatrix> scaled, sum;
  for (int i = 0; i < 2; ++i) {
    scaled.push_back(-2.5 * a[static_cast<std::size_t>(i)]);
    sum.push_back(a[static_cast<std::size_t>(i)] + b[static_cast<std::size_t>(i)]);
  }
  const double na = redex_norm(a).value, nb = redex_norm(b).value;
  EXPECT_NEAR(redex_norm(scaled).value, 2.5 * na, 1e-5 * 2.5 * na);
  EXPECT_LE(redex_norm(sum).value, na + nb + 1e-5);
}

TEST(RedexNorm, BudgetExceededCarriesFeasibleValue) {
  std::mt19937_64 rng(24);
  const std::vector<SymMatrix> heads{redex::testing::random_sym(rng, 5), redex::testing::random_sym(rng, 5)};
  try {
    redex_norm(heads, 1e-12, 2);
    FAIL() << "expected SolverBudgetExceeded";
  } catch (const SolverBudgetExceeded& e) {
    EXPECT_GE(e.best_value(), trace_norm(heads[0]) - 1e-9);
  }
}

TEST(TraceNormK1, Examples) {
  NormResult r = trace_norm_k1(diag({2, -3}));
  EXPECT_NEAR(r.value, 5.0, 1e-14);
  EXPECT_LE((r.witness.matrix() - diag({2, 3}).matrix()).norm(), 1e-14);
  EXPECT_EQ(trace_norm_k1(SymMatrix::zero(2)).value, 0.0);
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  r = trace_norm_k1(SymMatrix(swap));
  EXPECT_NEAR(r.value, 2.0, 1e-14);
  EXPECT_LE((r.witness.matrix() - Matrix::Identity(2, 2)).norm(), 1e-14);
}
