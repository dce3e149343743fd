#pragma once

#include <utility>

#include "redex/model.hpp"
#include "redex/solver_report.hpp"

namespace redex {

enum class SpanRestriction { Auto, On, Off };

/// Single-layer training configuration. In the default mode the program caps
/// Tr(R) <= width; `trace_penalty` adds λ₁·Tr(R) to the objective instead of
/// (or alongside) the cap.
struct TrainConfig {
  double width = 1.0;          ///< M
  double reg = 0.0;            ///< λ on ‖R‖²_fr + ‖A⃗‖²_fr
  double trace_penalty = 0.0;  ///< λ₁ on Tr(R)
  bool cap_trace = true;
  LossSpec loss;
  int max_iters = 20000;
  double tol = 1e-6;
  double rho = 1.0;
  /// Auto restricts to span{x_i} when d > m or the inputs are rank deficient.
  SpanRestriction restrict_to_data_span = SpanRestriction::Auto;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Solves min (1/m)Σℓ(x_iᵀA⃗x_i, y_i) + λ(‖R‖² + ‖A⃗‖²) subject to
/// -R ⪯ A_i ⪯ R, R ⪰ 0, Tr(R) <= M. The returned point is polished to be
/// feasible; `report.converged` is false when the iteration budget ran out.
std::pair<AltParam, SolverReport> solve_single_layer(const LabeledDataset& data, const TrainConfig& cfg);

/// Objective of the single-layer program at an arbitrary point (no
/// feasibility check).
double single_layer_objective(const AltParam& alt, const LabeledDataset& data, const TrainConfig& cfg);

/// Compact-diagonalize R = UᵀDU, then V = √D·U and P_i = (V†)ᵀA_iV†. Throws
/// InvalidInput when (A⃗, R) violates its invariants beyond 1e-8; head norm
/// overshoot up to 1e-6 is clipped.
RedExLayer recover_extractor(const AltParam& alt, double eps = kDefaultCompactEps);

/// Eigenvalue-based feasibility audit of an arbitrary candidate together with
/// its objective value. Never throws on infeasible input.
SolverReport kkt_feasibility(const AltParam& alt, const TrainConfig& cfg, const LabeledDataset& data);

/// ℛ(P⃗, V) = ‖VᵀV‖²_fr + Σ‖VᵀP_iV‖²_fr
double layer_regularizer(const RedExLayer& layer);

/// A_i = VᵀP_iV, R = VᵀV
AltParam to_alt_param(const RedExLayer& layer);

}  // namespace redex
