#pragma once

#include <vector>

#include "redex/model.hpp"
#include "redex/sdp.hpp"

namespace redex {

/// Greedy layer-wise training parameters; widths/regs hold M_t and λ_t.
struct LayerwiseConfig {
  int layers = 1;
  std::vector<double> widths{1.0};
  std::vector<double> regs{0.0};
  double constant = kDefaultConstant;
  bool fresh_split = false;  ///< train layer t on the t-th of L disjoint folds
  double prune_eps = 1e-6;   ///< extractor rows with norm <= eps are dropped

  void validate() const;
};

struct LayerwiseResult {
  MultilayerModel model;
  std::vector<SolverReport> reports;  ///< one per layer
  std::vector<AltParam> layers;       ///< solved (A⃗, R) per layer, in that layer's input coordinates
  std::vector<double> train_loss;     ///< mean training loss of layer t's solution on its own fold
};

/// Prepends c, then for each layer solves the single-layer program on the
/// current features, keeps the extractor (pruned, at most m rows) and feeds
/// Ψ_V forward. Width, reg and iteration settings of `sdp_cfg` other than
/// width/reg are shared by all layers.
LayerwiseResult train_multilayer(const LabeledDataset& data, const LayerwiseConfig& cfg, const TrainConfig& sdp_cfg);

/// Rows flatten((Vx)(Vx)ᵀ) for each input row.
Matrix layer_features(const Matrix& extractor, const Matrix& inputs);

/// Inputs with the constant coordinate prepended.
Matrix augment_constant(const Matrix& inputs, double constant);

}  // namespace redex
