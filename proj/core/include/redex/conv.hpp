#pragma once

#include <utility>
#include <vector>

#include "redex/model.hpp"
#include "redex/sdp.hpp"

namespace redex {

/// Grid of heads indexed [output i][patch j].
using HeadGrid = std::vector<std::vector<SymMatrix>>;

/// Shared extractor over p patches with per-patch heads:
/// x ↦ (Σ_j ⟨P_{i,j}, (Vx_j)(Vx_j)ᵀ⟩)_i.
struct ConvRedExLayer {
  Matrix extractor;  ///< d'×d
  HeadGrid heads;    ///< k × p
  Eigen::Index patch_count = 1;
  double width_bound = 0.0;

  /// Same checks and repair policy as RedExLayer::make, applied to every head.
  static ConvRedExLayer make(Matrix extractor, HeadGrid heads, double width_bound, double tol = kInvariantTol);

  Eigen::Index patch_dim() const { return extractor.cols(); }
  Eigen::Index output_dim() const { return static_cast<Eigen::Index>(heads.size()); }
};

struct ConvAltParam {
  HeadGrid heads;      ///< A_{i,j}
  SymMatrix dominator; ///< shared R

  void validate(double tol = kInvariantTol) const;
  Eigen::Index output_dim() const { return static_cast<Eigen::Index>(heads.size()); }
  Eigen::Index patch_count() const { return heads.empty() ? 0 : static_cast<Eigen::Index>(heads.front().size()); }
};

/// `x` holds the p patches back to back (length p·d).
Vector conv_forward(const ConvRedExLayer& layer, const Vector& x);
Vector conv_forward(const ConvRedExLayer& layer, const std::vector<Vector>& patches);
/// (Σ_j x_jᵀA_{i,j}x_j)_i
Vector conv_eval_alt(const ConvAltParam& alt, const Vector& x);

/// min (1/m)Σℓ + λ₁Tr(R) + λ₂(‖R‖² + ‖A⃗‖²) s.t. -R ⪯ A_{i,j} ⪯ R, R ⪰ 0 (no
/// trace cap). Loss, tolerance, budget and span handling come from `cfg`.
std::pair<ConvAltParam, SolverReport> solve_conv_layer(const LabeledDataset& data, double l1, double l2,
                                                       const TrainConfig& cfg);

double conv_objective(const ConvAltParam& alt, const LabeledDataset& data, double l1, double l2,
                      const LossSpec& loss);

ConvRedExLayer recover_conv(const ConvAltParam& alt, double eps = kDefaultCompactEps);

EvalReport evaluate(const ConvRedExLayer& layer, const LabeledDataset& data, const LossSpec& loss);

}  // namespace redex
