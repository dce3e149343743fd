#include "redex/layerwise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "redex/errors.hpp"

namespace redex {

void LayerwiseConfig::validate() const {
  if (layers < 1) throw ConfigError("layer count must be >= 1");
  if (static_cast<int>(widths.size()) != layers || static_cast<int>(regs.size()) != layers)
    throw ConfigError("widths and regs must list one value per layer");
  for (double w : widths)
    if (!(w > 0) || !std::isfinite(w)) throw ConfigError("layer widths must be positive");
  for (double r : regs)
    if (!(r >= 0) || !std::isfinite(r)) throw ConfigError("layer regs must be >= 0");
  if (!std::isfinite(constant)) throw ConfigError("constant must be finite");
  if (!(prune_eps >= 0)) throw ConfigError("prune_eps must be >= 0");
}

Matrix layer_features(const Matrix& extractor, const Matrix& inputs) {
  if (extractor.cols() != inputs.cols())
    throw DimError("layer_features: extractor expects dim " + std::to_string(extractor.cols()) + ", got " +
                   std::to_string(inputs.cols()));
  const Eigen::Index n = extractor.rows();
  const Matrix z = inputs * extractor.transpose();
  Matrix out(inputs.rows(), n * n);
  for (Eigen::Index i = 0; i < inputs.rows(); ++i)
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b) out(i, a * n + b) = z(i, a) * z(i, b);
  return out;
}

Matrix augment_constant(const Matrix& inputs, double constant) {
  Matrix out(inputs.rows(), inputs.cols() + 1);
  out.col(0).setConstant(constant);
  out.rightCols(inputs.cols()) = inputs;
  return out;
}

namespace {

std::vector<Eigen::Index> kept_rows(const Matrix& extractor, double eps, Eigen::Index cap) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < extractor.rows(); ++i)
    if (eps == 0 || extractor.row(i).norm() > eps) keep.push_back(i);
  if (static_cast<Eigen::Index>(keep.size()) > cap) {
    // Rows come out of the diagonalization in decreasing norm; keep the largest.
    std::stable_sort(keep.begin(), keep.end(), [&](Eigen::Index a, Eigen::Index b) {
      return extractor.row(a).norm() > extractor.row(b).norm();
    });
    keep.resize(static_cast<std::size_t>(cap));
    std::sort(keep.begin(), keep.end());
  }
  return keep;
}

}  // namespace

LayerwiseResult train_multilayer(const LabeledDataset& data, const LayerwiseConfig& cfg, const TrainConfig& sdp_cfg) {
  cfg.validate();
  data.validate();
  if (data.patched()) throw ConfigError("layer-wise training expects unpatched data");
  const Eigen::Index m = data.size();
  const int L = cfg.layers;
  if (cfg.fresh_split && m < L) throw ConfigError("fresh_split needs at least one sample per layer");

  LayerwiseResult result;
  result.model.constant = cfg.constant;
  result.model.training_size = m;
  const Matrix augmented = augment_constant(data.inputs, cfg.constant);

  for (int t = 0; t < L; ++t) {
    Eigen::Index begin = 0, end = m;
    if (cfg.fresh_split) {
      begin = m * t / L;
      end = m * (t + 1) / L;
    }
    LabeledDataset fold;
    fold.inputs = augmented.middleRows(begin, end - begin);
    fold.targets = data.targets.middleRows(begin, end - begin);
    for (const auto& v : result.model.extractors) fold.inputs = layer_features(v, fold.inputs);

    TrainConfig layer_cfg = sdp_cfg;
    layer_cfg.width = cfg.widths[static_cast<std::size_t>(t)];
    layer_cfg.reg = cfg.regs[static_cast<std::size_t>(t)];

    AltParam alt;
    SolverReport report;
    RedExLayer layer;
    try {
      std::tie(alt, report) = solve_single_layer(fold, layer_cfg);
      layer = recover_extractor(alt);
    } catch (const DegenerateLayer&) {
      throw;
    } catch (const Error& e) {
      throw Error(e.kind(), "layer " + std::to_string(t + 1) + ": " + e.what());
    }

    const std::vector<Eigen::Index> keep = kept_rows(layer.extractor, cfg.prune_eps, m);
    if (keep.empty() || layer.extractor.squaredNorm() == 0.0)
      throw DegenerateLayer(t + 1, "extractor is empty after pruning");
    const auto n = static_cast<Eigen::Index>(keep.size());
    Matrix extractor(n, layer.extractor.cols());
    for (Eigen::Index r = 0; r < n; ++r) extractor.row(r) = layer.extractor.row(keep[static_cast<std::size_t>(r)]);

    result.train_loss.push_back(evaluate(alt, fold, layer_cfg.loss).mean_loss);
    result.reports.push_back(std::move(report));
    result.layers.push_back(std::move(alt));
    result.model.extractors.push_back(std::move(extractor));

    if (t + 1 == L) {
      for (const auto& p : layer.heads) {
        Matrix sub(n, n);
        for (Eigen::Index a = 0; a < n; ++a)
          for (Eigen::Index b = 0; b < n; ++b)
            sub(a, b) = p.matrix()(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(b)]);
        result.model.heads.emplace_back(sub);
      }
    }
  }
  result.model.validate();
  return result;
}

}  // namespace redex
