#include <gtest/gtest.h>

#include "redex/errors.hpp"
#include "redex/kravchuk.hpp"
#include "redex/layerwise.hpp"
#include "test_support.hpp"

using namespace redex;

TEST(LayerFeatures, Examples) {
  Matrix x(1, 2);
  x << 1, 0;
  const Matrix f = layer_features(Matrix::Identity(2, 2), x);
  ASSERT_EQ(f.cols(), 4);
  EXPECT_EQ(f.row(0), (Eigen::RowVector4d() << 1, 0, 0, 0).finished());
  EXPECT_THROW(layer_features(Matrix::Identity(3, 3), x), DimError);
}

TEST(LayerFeatures, NormIdentity) {
  std::mt19937_64 rng(1);
  const Matrix v = redex::testing::random_matrix(rng, 3, 5);
  const Matrix x = redex::testing::random_matrix(rng, 20, 5);
  const Matrix f = layer_features(v, x);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    EXPECT_NEAR(f.row(i).norm(), (v * x.row(i).transpose()).squaredNorm(), 1e-10);
}

TEST(TrainMultilayer, OneLayerIsSingleSolveOnAugmentedInputs) {
  std::mt19937_64 rng(2);
  LabeledDataset data;
  data.inputs = redex::testing::random_matrix(rng, 30, 3);
  data.targets = data.inputs.col(0).cwiseProduct(data.inputs.col(1)) + data.inputs.col(2);
  LayerwiseConfig cfg;
  cfg.widths = {2.0};
  cfg.regs = {0.01};
  cfg.prune_eps = 0.0;
  TrainConfig sdp;
  const LayerwiseResult result = train_multilayer(data, cfg, sdp);

  LabeledDataset augmented = data;
  augmented.inputs = augment_constant(data.inputs, kDefaultConstant);
  sdp.width = 2.0;
  sdp.reg = 0.01;
  const auto [alt, report] = solve_single_layer(augmented, sdp);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const double a = forward_multilayer(result.model, data.inputs.row(i).transpose())(0);
    const double b = eval_alt(alt, augmented.inputs.row(i).transpose())(0);
    EXPECT_NEAR(a, b, 1e-9);
  }
  EXPECT_NEAR(result.reports[0].objective, report.objective, 1e-12);
}

TEST(TrainMultilayer, KravchukQuadraticTargetOneLayer) {
  const KravchukTask task = KravchukTask::make(10, 2, 5);
  const LabeledDataset train = sample_dataset(task, 2000, 1);
  const LabeledDataset test = sample_dataset(task, 2000, 2);
  LayerwiseConfig cfg;
  cfg.widths = {1.5};
  cfg.regs = {1.0 / std::sqrt(2000.0)};
  const LayerwiseResult result = train_multilayer(train, cfg, TrainConfig{});
  EXPECT_LE(evaluate(result.model, test, {}).mean_loss, 0.05);
}

TEST(TrainMultilayer, FreshSplitUsesDisjointFolds) {
  std::mt19937_64 rng(3);
  LabeledDataset data;
  data.inputs = redex::testing::random_matrix(rng, 40, 2);
  data.targets = data.inputs.col(0).cwiseAbs2();
  LayerwiseConfig cfg;
  cfg.layers = 2;
  cfg.widths = {2.0, 4.0};
  cfg.regs = {0.01, 0.01};
  cfg.fresh_split = true;
  const LayerwiseResult result = train_multilayer(data, cfg, TrainConfig{});
  ASSERT_EQ(result.model.depth(), 2);
  EXPECT_EQ(result.model.extractors[1].cols(), result.model.extractors[0].rows() * result.model.extractors[0].rows());
  for (auto n : result.model.widths()) EXPECT_LE(n, 20);

  LabeledDataset tiny = data.subset(0, 1);
  EXPECT_THROW(train_multilayer(tiny, cfg, TrainConfig{}), ConfigError);
}

TEST(TrainMultilayer, GreedyLossDoesNotIncrease) {
  const KravchukTask task = KravchukTask::make(6, 2, 9);
  const LabeledDataset train = sample_dataset(task, 500, 3);
  LayerwiseConfig cfg;
  cfg.layers = 2;
  cfg.widths = {1.5, 4.0};
  cfg.regs = {1e-3, 1e-3};
  cfg.prune_eps = 0.05;
  const LayerwiseResult result = train_multilayer(train, cfg, TrainConfig{});
  ASSERT_EQ(result.train_loss.size(), 2u);
  EXPECT_LE(result.train_loss[1], result.train_loss[0] + 1e-3);
}

TEST(TrainMultilayer, DegenerateLayer) {
  LabeledDataset data;
  data.inputs = Matrix::Ones(5, 2);
  data.targets = Matrix::Zero(5, 1);
  LayerwiseConfig cfg;
  cfg.regs = {0.1};
  try {
    train_multilayer(data, cfg, TrainConfig{});
    FAIL() << "expected DegenerateLayer";
  } catch (const DegenerateLayer& e) {
    EXPECT_EQ(e.layer(), 1);
  }
}

TEST(TrainMultilayer, ConfigValidation) {
  LayerwiseConfig cfg;
  cfg.layers = 2;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.widths = {1, 1};
  cfg.regs = {0, -1};
  EXPECT_THROW(cfg.validate(), ConfigError);
}
