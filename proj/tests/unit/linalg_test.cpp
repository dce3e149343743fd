#include <gtest/gtest.h>

#include "redex/errors.hpp"
#include "redex/linalg.hpp"
#include "test_support.hpp"

using namespace redex;
using redex::testing::random_matrix;
using redex::testing::random_sym;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST(SymMatrix, SymmetrizesExactly) {
  const SymMatrix s(mat2(1.0, 2.0, 0.1, 3.0));
  EXPECT_EQ(s(0, 1), s(1, 0));
  EXPECT_DOUBLE_EQ(s(0, 1), 1.05);
}

TEST(SymMatrix, RejectsNonFinite) {
  EXPECT_THROW(SymMatrix(mat2(1.0, NAN, NAN, 1.0)), InvalidInput);
  EXPECT_THROW(SymMatrix(mat2(INFINITY, 0, 0, 1.0)), InvalidInput);
}

TEST(Eigendecompose, DiagonalCase) {
  const EigenDecomp e = sym_eigendecompose(SymMatrix::diagonal(Vector::LinSpaced(2, 1, 3).reverse()));
  EXPECT_DOUBLE_EQ(e.eigenvalues(0), 3.0);
  EXPECT_DOUBLE_EQ(e.eigenvalues(1), 1.0);
  EXPECT_TRUE(e.eigenvectors.isApprox(Matrix::Identity(2, 2)));
}

TEST(Eigendecompose, SwapMatrixFollowsSignConvention) {
  const EigenDecomp e = sym_eigendecompose(SymMatrix(mat2(0, 1, 1, 0)));
  EXPECT_NEAR(e.eigenvalues(0), 1.0, 1e-14);
  EXPECT_NEAR(e.eigenvalues(1), -1.0, 1e-14);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(e.eigenvectors(0, 0), r, 1e-14);
  EXPECT_NEAR(e.eigenvectors(0, 1), r, 1e-14);
  EXPECT_NEAR(e.eigenvectors(1, 0), r, 1e-14);
  EXPECT_NEAR(e.eigenvectors(1, 1), -r, 1e-14);
}

TEST(Eigendecompose, RandomReconstructionAndOrthonormality) {
  std::mt19937_64 rng(11);
  for (Eigen::Index n : {1, 2, 8, 17, 33, 64}) {
    const SymMatrix a = random_sym(rng, n);
    const EigenDecomp e = sym_eigendecompose(a);
    EXPECT_LE((e.reconstruct() - a.matrix()).norm(), 1e-9 * (1 + a.frobenius_norm()));
    EXPECT_LE((e.eigenvectors * e.eigenvectors.transpose() - Matrix::Identity(n, n)).norm(), 1e-9);
    for (Eigen::Index i = 1; i < n; ++i) EXPECT_GE(e.eigenvalues(i - 1), e.eigenvalues(i));
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index j = 0;
      while (std::abs(e.eigenvectors(i, j)) <= 1e-12) ++j;
      EXPECT_GT(e.eigenvectors(i, j), 0.0);
    }
  }
}

TEST(CompactDiagonalize, DropsTinyEigenpairs) {
  Vector d(2);
  d << 2.0, 1e-15;
  const EigenDecomp e = compact_diagonalize(SymMatrix::diagonal(d), 1e-10);
  ASSERT_EQ(e.rank(), 1);
  EXPECT_DOUBLE_EQ(e.eigenvalues(0), 2.0);
  EXPECT_NEAR(e.eigenvectors(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(e.eigenvectors(0, 1), 0.0, 1e-15);
}

TEST(CompactDiagonalize, ZeroMatrixGivesOneByOneZero) {
  for (double eps : {0.0, 1e-10, 1.0}) {
    const EigenDecomp e = compact_diagonalize(SymMatrix::zero(3), eps);
    ASSERT_EQ(e.rank(), 1);
    EXPECT_EQ(e.eigenvalues(0), 0.0);
    EXPECT_EQ(e.eigenvectors.rows(), 1);
    EXPECT_EQ(e.eigenvectors.norm(), 0.0);
  }
}

TEST(CompactDiagonalize, ZeroEpsKeepsEverything) {
  Vector d(3);
  d << 5, 3, 1;
  EXPECT_EQ(compact_diagonalize(SymMatrix::diagonal(d), 0.0).rank(), 3);
}

TEST(PsdProject, Examples) {
  Vector d(2);
  d << 1, -2;
  EXPECT_TRUE(psd_project(SymMatrix::diagonal(d)).matrix().isApprox(Matrix(Vector(Vector::Unit(2, 0)).asDiagonal())));
  const SymMatrix p = psd_project(SymMatrix(mat2(0, 1, 1, 0)));
  EXPECT_LE((p.matrix() - Matrix::Constant(2, 2, 0.5)).norm(), 1e-12);
}

TEST(PsdProject, IdempotentAndPsd) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const SymMatrix p = psd_project(random_sym(rng, 7));
    EXPECT_GE(min_eigenvalue(p), -1e-10);
    EXPECT_LE((psd_project(p).matrix() - p.matrix()).norm(), 1e-10);
  }
}

TEST(TraceBallProject, Examples) {
  auto diag2 = [](double a, double b) {
    Vector v(2);
    v << a, b;
    return SymMatrix::diagonal(v);
  };
  EXPECT_LE((trace_ball_project(diag2(1, 1), 3).matrix() - diag2(1, 1).matrix()).norm(), 1e-12);
  EXPECT_LE((trace_ball_project(diag2(4, 0), 2).matrix() - diag2(2, 0).matrix()).norm(), 1e-12);
  EXPECT_LE((trace_ball_project(diag2(3, 1), 2).matrix() - diag2(2, 0).matrix()).norm(), 1e-12);
  EXPECT_THROW(trace_ball_project(diag2(1, 1), 0.0), InvalidInput);
}

TEST(TraceBallProject, NearestPointAgainstGrid) {
  // Diagonal 2x2 inputs: the nearest feasible point is diagonal, so a grid
  // over (a, b) >= 0 with a + b <= M is an independent oracle.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 3.0);
  for (int rep = 0; rep < 10; ++rep) {
    const double x = u(rng), y = u(rng), bound = 1.5;
    Vector v(2);
    v << x, y;
    const SymMatrix proj = trace_ball_project(psd_project(SymMatrix::diagonal(v)), bound);
    EXPECT_LE(proj.trace(), bound + 1e-10);
    double best = 1e300;
    const int steps = 600;
    for (int i = 0; i <= steps; ++i)
      for (int j = 0; i + j <= steps; ++j) {
        const double a = bound * i / steps, b = bound * j / steps;
        best = std::min(best, (a - std::max(x, 0.0)) * (a - std::max(x, 0.0)) + (b - std::max(y, 0.0)) * (b - std::max(y, 0.0)));
      }
    const double got = std::pow(proj(0, 0) - std::max(x, 0.0), 2) + std::pow(proj(1, 1) - std::max(y, 0.0), 2);
    EXPECT_LE(got, best + 1e-9);
  }
}

TEST(PseudoInverse, Examples) {
  EXPECT_TRUE(pseudo_inverse(Matrix::Identity(3, 3)).isApprox(Matrix::Identity(3, 3)));
  Matrix v(1, 2);
  v << 2, 0;
  const Matrix p = pseudo_inverse(v);
  ASSERT_EQ(p.rows(), 2);
  EXPECT_DOUBLE_EQ(p(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(p(1, 0), 0.0);
}

TEST(PseudoInverse, ProjectorAndMoorePenrose) {
  std::mt19937_64 rng(9);
  const Matrix b = random_matrix(rng, 6, 3);
  const SymMatrix r(Matrix(b * b.transpose()));
  const EigenDecomp e = compact_diagonalize(r);
  const Matrix v = e.eigenvalues.cwiseSqrt().asDiagonal() * e.eigenvectors;
  const Matrix vp = pseudo_inverse(v);
  const Matrix projector = e.eigenvectors.transpose() * e.eigenvectors;
  EXPECT_LE((vp * v - projector).norm(), 1e-9);
  EXPECT_LE((v * vp * v - v).norm(), 1e-9);
  EXPECT_LE((vp * v * vp - vp).norm(), 1e-9);
}

TEST(Norms, SpectralAndTrace) {
  Vector d(3);
  d << 2, -3, 0.5;
  const SymMatrix a = SymMatrix::diagonal(d);
  EXPECT_NEAR(spectral_norm(a), 3.0, 1e-14);
  EXPECT_NEAR(trace_norm(a), 5.5, 1e-14);
  EXPECT_NEAR(min_eigenvalue(a), -3.0, 1e-14);
}

TEST(CappedSimplex, Projection) {
  Vector v(3);
  v << 0.2, -1.0, 0.3;
  EXPECT_TRUE(project_capped_simplex(v, 1.0).isApprox(Vector((Vector(3) << 0.2, 0.0, 0.3).finished())));
  v << 3, 1, 0;
  const Vector p = project_capped_simplex(v, 2.0);
  EXPECT_NEAR(p(0), 2.0, 1e-12);
  EXPECT_NEAR(p(1), 0.0, 1e-12);
}
