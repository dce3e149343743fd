#include <gtest/gtest.h>

#include "redex/errors.hpp"
#include "redex/model.hpp"
#include "redex/sdp.hpp"
#include "test_support.hpp"

using namespace redex;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST(ExtractExpand, Examples) {
  EXPECT_TRUE(extract_expand(Matrix::Identity(2, 2), vec({1, 2})).matrix().isApprox(mat2(1, 2, 2, 4)));
  EXPECT_EQ(extract_expand(Matrix::Zero(2, 2), vec({1, 2})).frobenius_norm(), 0.0);
  Matrix v(1, 2);
  v << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  EXPECT_NEAR(extract_expand(v, vec({1, -1}))(0, 0), 0.0, 1e-15);
  EXPECT_THROW(extract_expand(Matrix::Identity(2, 2), vec({1, 2, 3})), DimError);
}

TEST(ExtractExpand, RankOnePsd) {
  std::mt19937_64 rng(1);
  const Matrix v = redex::testing::random_matrix(rng, 3, 5);
  const SymMatrix x = extract_expand(v, redex::testing::random_vector(rng, 5));
  const EigenDecomp e = sym_eigendecompose(x);
  EXPECT_GE(e.eigenvalues(2), -1e-12);
  EXPECT_LE(std::abs(e.eigenvalues(1)), 1e-10 * e.eigenvalues(0));
}

TEST(ApplyHeads, Examples) {
  const SymMatrix x(mat2(1, 2, 2, 4));
  EXPECT_DOUBLE_EQ(apply_heads({SymMatrix::identity(2)}, x)(0), 5.0);
  EXPECT_DOUBLE_EQ(apply_heads({SymMatrix::zero(2)}, x)(0), 0.0);
  EXPECT_DOUBLE_EQ(apply_heads({SymMatrix(mat2(0, .5, .5, 0))}, x)(0), 2.0);
  EXPECT_THROW(apply_heads({SymMatrix::identity(3)}, x), DimError);
}

TEST(EvalAlt, Examples) {
  AltParam alt{{SymMatrix(mat2(0, .5, .5, 0))}, SymMatrix::identity(2)};
  EXPECT_DOUBLE_EQ(eval_alt(alt, vec({1, 1}))(0), 1.0);
  alt.heads = {SymMatrix::identity(2)};
  EXPECT_DOUBLE_EQ(eval_alt(alt, vec({3, 4}))(0), 25.0);
  alt.heads = {SymMatrix(mat2(1, 0, 0, -1))};
  EXPECT_DOUBLE_EQ(eval_alt(alt, vec({2, 1}))(0), 3.0);
  EXPECT_THROW(eval_alt(alt, vec({2})), DimError);
}

TEST(RedExLayer, ForwardMatchesAltForm) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    const AltParam alt = redex::testing::random_feasible_alt(rng, 6, 3, 4);
    const RedExLayer layer = recover_extractor(alt);
    const AltParam back = to_alt_param(layer);
    for (int s = 0; s < 10; ++s) {
      const Vector x = redex::testing::random_vector(rng, 6);
      EXPECT_LE((layer(x) - eval_alt(back, x)).norm(), 1e-9 * (1 + std::pow(x.norm(), 4)));
    }
  }
}

TEST(RedExLayer, InvariantChecks) {
  Matrix v(2, 2);
  v << 1, 1, 1, 0;
  EXPECT_THROW(RedExLayer::make(v, {SymMatrix::identity(2)}, 10.0), InvalidInput);  // rows not orthogonal
  EXPECT_THROW(RedExLayer::make(Matrix::Identity(2, 2), {SymMatrix::identity(2)}, 1.0), InvalidInput);  // width
  EXPECT_THROW(RedExLayer::make(Matrix::Identity(2, 2), {2.0 * SymMatrix::identity(2)}, 2.0), InvalidInput);
  EXPECT_THROW(RedExLayer::make(Matrix::Identity(2, 2), {SymMatrix::identity(3)}, 2.0), DimError);
  // Overshoot within tolerance is clipped.
  const RedExLayer ok = RedExLayer::make(Matrix::Identity(2, 2), {(1 + 1e-9) * SymMatrix::identity(2)}, 2.0);
  EXPECT_LE(spectral_norm(ok.heads[0]), 1.0);
}

TEST(ForwardMultilayer, IdentityGadget) {
  MultilayerModel model;
  model.constant = 1.0;
  model.extractors = {Matrix::Identity(3, 3)};
  Matrix head = Matrix::Zero(3, 3);
  head(0, 1) = head(1, 0) = 0.5;  // entry (c, x_1)
  model.heads = {SymMatrix(head)};
  EXPECT_DOUBLE_EQ(forward_multilayer(model, vec({0.7, -2}))(0), 0.7);
  model.heads = {SymMatrix::zero(3)};
  EXPECT_DOUBLE_EQ(forward_multilayer(model, vec({0.7, -2}))(0), 0.0);
  EXPECT_THROW(forward_multilayer(model, vec({1})), DimError);
}

TEST(ForwardMultilayer, TwoLayersFlattenRowMajor) {
  MultilayerModel model;
  model.constant = 2.0;
  Matrix v1(2, 2);
  v1 << 1, 0, 0, 1;
  model.extractors = {v1, Matrix::Identity(4, 4)};
  Matrix head = Matrix::Zero(4, 4);
  head(1, 1) = 1.0;  // squares flattened entry 1 = c·x
  model.heads = {SymMatrix(head)};
  EXPECT_DOUBLE_EQ(forward_multilayer(model, vec({3}))(0), 36.0);
  EXPECT_EQ(flatten_row_major(mat2(1, 2, 3, 4)), vec({1, 2, 3, 4}));
}

TEST(PruneRows, Examples) {
  Matrix v(2, 3);
  v << 1, 0, 0, 0, 1e-9, 0;
  EXPECT_EQ(prune_rows(v, 1e-6).rows(), 1);
  EXPECT_EQ(prune_rows(v, 0.0), v);
  std::mt19937_64 rng(2);
  Matrix w = redex::testing::random_matrix(rng, 40, 40);
  w *= 2.0 / w.norm();  // ‖W‖²_fr = 4
  EXPECT_LE(prune_rows(w, 0.5).rows(), 16);
  EXPECT_THROW(prune_rows(v, -1), InvalidInput);
}

TEST(Evaluate, Examples) {
  LabeledDataset data;
  data.inputs = Matrix::Ones(3, 2);
  data.targets = Matrix::Ones(3, 1);
  const Predictor perfect = [](const Vector&) { return Vector::Ones(1); };
  const Predictor zero = [](const Vector&) { return Vector::Zero(1); };
  EXPECT_EQ(evaluate(perfect, data, {}).mean_loss, 0.0);
  EXPECT_DOUBLE_EQ(evaluate(zero, data, {}).mean_loss, 1.0);

  LabeledDataset one;
  one.inputs = Matrix::Zero(1, 1);
  one.targets = mat2(0, 1, 0, 0).topRows(1);
  const Predictor fixed = [](const Vector&) { return vec({1, 0}); };
  const EvalReport r = evaluate(fixed, one, {});
  EXPECT_DOUBLE_EQ(r.mean_loss, 2.0);
  EXPECT_DOUBLE_EQ(r.per_coordinate_loss.sum(), r.mean_loss);
  EXPECT_EQ(r.loss_name, "square");
  EXPECT_THROW(evaluate(fixed, one, LossSpec{"hinge"}), ConfigError);
}

TEST(LabeledDataset, Validation) {
  LabeledDataset bad;
  bad.inputs = Matrix::Ones(2, 2);
  bad.targets = Matrix::Ones(3, 1);
  EXPECT_THROW(bad.validate(), DimError);
  bad.targets = Matrix::Ones(2, 1);
  bad.inputs(0, 0) = NAN;
  EXPECT_THROW(bad.validate(), InvalidInput);
}

TEST(Loss, HuberMatchesSquareInsideDelta) {
  const auto sq = make_loss({});
  const auto hu = make_loss({"huber", 2.0});
  EXPECT_DOUBLE_EQ(sq->coord_value(1.5, 0.5), hu->coord_value(1.5, 0.5));
  EXPECT_LT(hu->coord_value(10, 0), sq->coord_value(10, 0));
  EXPECT_THROW(make_loss({"huber", -1.0}), ConfigError);
}
