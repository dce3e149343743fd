#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "redex/linalg.hpp"
#include "redex/loss.hpp"

namespace redex {

inline constexpr double kInvariantTol = 1e-8;
/// Default constant coordinate prepended to inputs by multilayer models.
inline const double kDefaultConstant = std::sqrt(2.0);

/// Deployed parametrization of a single layer: x ↦ (⟨P_i, (Vx)(Vx)ᵀ⟩)_i.
struct RedExLayer {
  Matrix extractor;                ///< d'×d, pairwise orthogonal rows
  std::vector<SymMatrix> heads;    ///< k matrices, d'×d', ‖P_i‖_sp <= 1
  double width_bound = 0.0;        ///< M with ‖V‖²_fr <= M

  /// Validates the invariants. Violations within `tol` are repaired (heads
  /// rescaled to unit spectral norm); larger violations throw InvalidInput.
  static RedExLayer make(Matrix extractor, std::vector<SymMatrix> heads, double width_bound,
                         double tol = kInvariantTol);

  Eigen::Index input_dim() const { return extractor.cols(); }
  Eigen::Index output_dim() const { return static_cast<Eigen::Index>(heads.size()); }
  Vector operator()(const Vector& x) const;
};

/// Convex-side parametrization: x ↦ (xᵀA_i x)_i with -R ⪯ A_i ⪯ R, R ⪰ 0.
struct AltParam {
  std::vector<SymMatrix> heads;  ///< A_1..A_k
  SymMatrix dominator;           ///< R

  /// Throws InvalidInput unless R and R ± A_i are PSD within tol·max(1, ‖R‖_sp).
  void validate(double tol = kInvariantTol) const;

  Eigen::Index dim() const { return dominator.dim(); }
  Eigen::Index output_dim() const { return static_cast<Eigen::Index>(heads.size()); }
};

/// Output of greedy layer-wise training (or of the circuit compiler): a
/// constant coordinate c, a stack of extractors, and the last layer's heads.
struct MultilayerModel {
  double constant = kDefaultConstant;
  std::vector<Matrix> extractors;   ///< V¹..V^L; V¹ is n_1×(d+1), V^t is n_t×n_{t-1}²
  std::vector<SymMatrix> heads;     ///< k matrices, n_L×n_L
  /// Compiled circuits use non-orthogonal gadget rows; trained models do not.
  bool expressive = false;
  /// Samples used for training; bounds each n_t when nonzero.
  Eigen::Index training_size = 0;

  Eigen::Index input_dim() const;
  Eigen::Index output_dim() const { return static_cast<Eigen::Index>(heads.size()); }
  Eigen::Index depth() const { return static_cast<Eigen::Index>(extractors.size()); }
  std::vector<Eigen::Index> widths() const;

  /// Throws DimError when the layer dimensions do not chain.
  void validate() const;
};

/// m samples of inputs in ℝ^{p·d} (p = 1 unless patched) and targets in ℝ^k.
struct LabeledDataset {
  Matrix inputs;   ///< m × (p·d), one sample per row
  Matrix targets;  ///< m × k
  Eigen::Index patch_count = 1;

  Eigen::Index size() const { return inputs.rows(); }
  Eigen::Index input_dim() const { return inputs.cols(); }
  Eigen::Index patch_dim() const { return inputs.cols() / patch_count; }
  Eigen::Index output_dim() const { return targets.cols(); }
  bool patched() const { return patch_count > 1; }

  /// Throws InvalidInput / DimError on empty, non-finite, or inconsistent data.
  void validate() const;
  LabeledDataset subset(Eigen::Index begin, Eigen::Index end) const;
};

struct EvalReport {
  double mean_loss = 0.0;
  Vector per_coordinate_loss;
  std::string loss_name;
};

using Predictor = std::function<Vector(const Vector&)>;

/// (Vx)(Vx)ᵀ
SymMatrix extract_expand(const Matrix& extractor, const Vector& x);
/// (⟨P_1, X⟩, ..., ⟨P_k, X⟩)
Vector apply_heads(const std::vector<SymMatrix>& heads, const SymMatrix& expanded);
/// (xᵀA_1x, ..., xᵀA_kx)
Vector eval_alt(const AltParam& alt, const Vector& x);
/// Prepends c, applies every extract-expand with row-major flattening, then the heads.
Vector forward_multilayer(const MultilayerModel& model, const Vector& x);

/// Row-major flattening of a square matrix.
Vector flatten_row_major(const Matrix& m);

/// Removes rows with Euclidean norm <= eps (eps = 0 keeps everything).
/// The result may have zero rows.
Matrix prune_rows(const Matrix& extractor, double eps);

/// Mean loss of a predictor on a dataset plus the per-output-coordinate breakdown.
EvalReport evaluate(const Predictor& predictor, const LabeledDataset& data, const LossSpec& loss);
EvalReport evaluate(const MultilayerModel& model, const LabeledDataset& data, const LossSpec& loss);
EvalReport evaluate(const AltParam& alt, const LabeledDataset& data, const LossSpec& loss);
EvalReport evaluate(const RedExLayer& layer, const LabeledDataset& data, const LossSpec& loss);

}  // namespace redex
