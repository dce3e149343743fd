#include <gtest/gtest.h>

#include <filesystem>

#include "redex/circuit.hpp"
#include "redex/errors.hpp"
#include "redex/io.hpp"
#include "test_support.hpp"

using namespace redex;

namespace {

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "redex_io_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST(FormatReal, RoundTrips) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = n(rng) * std::pow(10.0, i % 20 - 10);
    EXPECT_EQ(std::stod(format_real(v)), v);
  }
  EXPECT_EQ(format_real(3.0), "3");
  EXPECT_EQ(format_real(-0.0), "0");
}

TEST(ModelIo, LayerRoundTripIsBitExact) {
  std::mt19937_64 rng(2);
  const RedExLayer layer = recover_extractor(redex::testing::random_feasible_alt(rng, 5, 2, 3));
  const auto back = std::get<RedExLayer>(model_from_json(model_to_json(layer)));
  EXPECT_EQ(back.extractor, layer.extractor);
  EXPECT_EQ(back.heads[1], layer.heads[1]);
  EXPECT_EQ(back.width_bound, layer.width_bound);
}

TEST(ModelIo, MultilayerAndConvRoundTrip) {
  const CompiledCircuit compiled = compile_circuit(parse_circuit("g1 = XOR x1 x2\nout g1"));
  const auto back = std::get<MultilayerModel>(model_from_json(model_to_json(compiled.model)));
  ASSERT_EQ(back.depth(), compiled.model.depth());
  for (Eigen::Index t = 0; t < back.depth(); ++t)
    EXPECT_EQ(back.extractors[static_cast<std::size_t>(t)], compiled.model.extractors[static_cast<std::size_t>(t)]);
  EXPECT_EQ(back.heads[0], compiled.model.heads[0]);
  EXPECT_TRUE(back.expressive);

  const ConvRedExLayer conv = ConvRedExLayer::make(Matrix::Identity(2, 2), {{SymMatrix::identity(2), SymMatrix::zero(2)}}, 2.0);
  const auto cback = std::get<ConvRedExLayer>(model_from_json(model_to_json(conv)));
  EXPECT_EQ(cback.patch_count, 2);
  EXPECT_EQ(cback.heads[0][0], conv.heads[0][0]);
}

TEST(ModelIo, RejectsMalformed) {
  EXPECT_THROW(model_from_json("{"), InvalidInput);
  EXPECT_THROW(model_from_json("{\"format\": \"redex-model\", \"mode\": \"layer\"}"), InvalidInput);
  EXPECT_THROW(model_from_json(
                   "{\"format\": \"redex-model\", \"mode\": \"layer\", \"width_bound\": 1, \"extractor\": [[1, 0], [1, 0]], "
                   "\"heads\": [[[1, 0], [0, 1]]]}"),
               InvalidInput);
}

TEST(DatasetIo, RoundTripWithSidecar) {
  std::mt19937_64 rng(3);
  LabeledDataset data;
  data.patch_count = 2;
  data.inputs = redex::testing::random_matrix(rng, 5, 6);
  data.targets = redex::testing::random_matrix(rng, 5, 2);
  const std::string path = temp_path("patched.csv");
  write_dataset(path, data);
  const LabeledDataset back = read_dataset(path);
  EXPECT_EQ(back.inputs, data.inputs);
  EXPECT_EQ(back.targets, data.targets);
  EXPECT_EQ(back.patch_count, 2);
}

TEST(DatasetIo, Errors) {
  EXPECT_THROW(read_dataset(temp_path("missing.csv")), InvalidInput);
  const std::string path = temp_path("bad.csv");
  write_text_file(path, "x_1,y_1\n1,2\n3,abc\n");
  try {
    read_dataset(path);
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  write_text_file(path, "a,b\n1,2\n");
  EXPECT_THROW(read_dataset(path), InvalidInput);
}

TEST(TaskIo, RoundTrip) {
  const KravchukTask task = KravchukTask::make(12, 4, 7);
  const KravchukTask back = task_from_json(task_to_json(task));
  EXPECT_EQ(back.hidden, task.hidden);
  EXPECT_EQ(back.seed, task.seed);
  const KravchukTask sampled = task_from_json("{\"d\": 12, \"k\": 4, \"seed\": 7}");
  EXPECT_EQ(sampled.hidden, task.hidden);
  EXPECT_THROW(task_from_json("{\"d\": 12, \"k\": 3}"), ConfigError);
}

TEST(MatrixIo, SingleAndList) {
  EXPECT_EQ(matrices_from_json("[[1, 2], [2, 1]]").size(), 1u);
  EXPECT_EQ(matrices_from_json("[[[1]], [[2]]]").size(), 2u);
  EXPECT_EQ(matrices_from_json("{\"matrices\": [[[1]]]}").size(), 1u);
  EXPECT_THROW(matrices_from_json("[[1, 2], [3, 1]]"), InvalidInput);
}
