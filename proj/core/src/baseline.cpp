#include "redex/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "redex/errors.hpp"
#include "redex/io.hpp"
#include "redex/parallel.hpp"

namespace redex {

Eigen::Index RandomFeatureMap::output_dim() const {
  if (family == "monomial2") return 1 + input_dim + input_dim * (input_dim - 1) / 2 + input_dim;
  return 1 + weights.rows();
}

Matrix RandomFeatureMap::apply(const Matrix& inputs) const {
  if (inputs.cols() != input_dim) throw DimError("feature map: input dimension mismatch");
  const Eigen::Index m = inputs.rows();
  Matrix out(m, output_dim());
  out.col(0).setOnes();
  if (family == "monomial2") {
    const Eigen::Index d = input_dim;
    out.middleCols(1, d) = inputs;
    Eigen::Index col = 1 + d;
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = i + 1; j < d; ++j) out.col(col++) = inputs.col(i).cwiseProduct(inputs.col(j));
    for (Eigen::Index i = 0; i < d; ++i) out.col(col++) = inputs.col(i).cwiseAbs2();
    return out;
  }
  Matrix pre = inputs * weights.transpose();
  pre.rowwise() += bias.transpose();
  if (family == "relu")
    out.rightCols(pre.cols()) = pre.cwiseMax(0.0);
  else
    out.rightCols(pre.cols()) = std::sqrt(2.0) * pre.array().cos().matrix();
  return out;
}

RandomFeatureMap make_features(const FeatureSpec& spec) {
  if (spec.family != "relu" && spec.family != "cos" && spec.family != "monomial2")
    throw ConfigError("unknown feature family '" + spec.family + "'");
  if (spec.count < 1) throw ConfigError("feature count must be >= 1");
  if (spec.input_dim < 1) throw ConfigError("feature map input dimension must be >= 1");
  RandomFeatureMap map;
  map.family = spec.family;
  map.input_dim = spec.input_dim;
  map.seed = spec.seed;
  if (spec.family == "monomial2") return map;
  const Eigen::Index n = spec.count - 1;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.input_dim));
  map.weights.resize(n, spec.input_dim);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < spec.input_dim; ++c) map.weights(r, c) = normal(rng) * scale;
  map.bias = Vector::Zero(n);
  if (spec.family == "cos")
    for (Eigen::Index r = 0; r < n; ++r) map.bias(r) = phase(rng);
  return map;
}

namespace {

Matrix solve_normal(const Matrix& gram, const Matrix& rhs, double lambda) {
  const Eigen::Index n = gram.rows();
  if (lambda == 0.0) {
    Eigen::FullPivLU<Matrix> lu(gram);
    lu.setThreshold(1e-12);
    if (lu.rank() < n) throw SingularSystem("ridge_fit: features lack full column rank at lambda = 0");
    return lu.solve(rhs);
  }
  Eigen::LLT<Matrix> llt(gram + lambda * Matrix::Identity(n, n));
  if (llt.info() != Eigen::Success) throw SingularSystem("ridge_fit: normal equations are not positive definite");
  return llt.solve(rhs);
}

}  // namespace

Matrix ridge_fit(const Matrix& features, const Matrix& targets, double lambda) {
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw ConfigError("ridge lambda must be >= 0");
  if (features.rows() != targets.rows() || features.rows() == 0) throw DimError("ridge_fit: row counts differ");
  const double m = static_cast<double>(features.rows());
  const Matrix gram = features.transpose() * features / m;
  const Matrix rhs = features.transpose() * targets / m;
  return solve_normal(gram, rhs, lambda);
}

std::vector<SweepRow> baseline_sweep(const LabeledDataset& train, const LabeledDataset& test, const SweepGrid& grid) {
  train.validate();
  test.validate();
  if (train.input_dim() != test.input_dim() || train.output_dim() != test.output_dim())
    throw DimError("baseline_sweep: train/test shapes differ");
  for (double l : grid.lambdas)
    if (!(l >= 0)) throw ConfigError("sweep lambdas must be >= 0");

  struct Point {
    std::string family;
    Eigen::Index budget;
    std::uint64_t seed;
  };
  std::vector<Point> points;
  for (const auto& family : grid.families) {
    make_features({family, 1, train.input_dim(), 0});
    if (family == "monomial2") {
      // Deterministic map: one point regardless of budget and seed.
      points.push_back({family, 0, grid.seeds.empty() ? 0 : grid.seeds.front()});
      continue;
    }
    for (Eigen::Index n : grid.budgets)
      for (std::uint64_t seed : grid.seeds) points.push_back({family, n, seed});
  }

  const Eigen::Index k = train.output_dim();
  std::vector<std::vector<SweepRow>> slots(points.size());
  parallel_for(points.size(), [&](std::size_t idx) {
    const Point& pt = points[idx];
    const RandomFeatureMap map =
        make_features({pt.family, std::max<Eigen::Index>(pt.budget, 1), train.input_dim(), pt.seed});
    const Matrix phi = map.apply(train.inputs);
    const Matrix phi_test = map.apply(test.inputs);
    const double m = static_cast<double>(phi.rows());
    const Matrix gram = phi.transpose() * phi / m;
    const Matrix rhs = phi.transpose() * train.targets / m;
    const double m1 = phi.rowwise().norm().maxCoeff();
    for (double lambda : grid.lambdas) {
      Matrix w;
      try {
        w = solve_normal(gram, rhs, lambda);
      } catch (const SingularSystem&) {
        continue;
      }
      const Matrix residual = phi_test * w - test.targets;
      const double m2 = w.colwise().norm().maxCoeff();
      for (Eigen::Index c = 0; c < k; ++c) {
        SweepRow row{pt.family, map.output_dim(), lambda, pt.seed, c,
                     residual.col(c).squaredNorm() / static_cast<double>(residual.rows()), m1, m2};
        slots[idx].push_back(row);
      }
    }
  });

  std::vector<SweepRow> rows;
  for (auto& s : slots) rows.insert(rows.end(), s.begin(), s.end());
  return rows;
}

std::vector<SweepRow> baseline_sweep(const KravchukTask& task, Eigen::Index m_train, Eigen::Index m_test,
                                     std::uint64_t data_seed, const SweepGrid& grid) {
  const LabeledDataset train = sample_dataset(task, m_train, split_seed(data_seed, 1));
  const LabeledDataset test = sample_dataset(task, m_test, split_seed(data_seed, 2));
  return baseline_sweep(train, test, grid);
}

double best_sweep_loss(const std::vector<SweepRow>& rows, Eigen::Index coord) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : rows)
    if (r.coord == coord) best = std::min(best, r.test_loss);
  return best;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "family,N,lambda,seed,coord,test_loss,M1,M2\n";
  for (const auto& r : rows) {
    out += r.family + "," + std::to_string(r.features) + "," + format_real(r.lambda) + "," + std::to_string(r.seed) +
           "," + std::to_string(r.coord) + "," + format_real(r.test_loss) + "," + format_real(r.m1) + "," +
           format_real(r.m2) + "\n";
  }
  return out;
}

}  // namespace redex
