#pragma once

#include <utility>

#include "redex/model.hpp"
#include "redex/solver_report.hpp"

namespace redex {

/// Scalar-output training: min (1/m)Σℓ(x_iᵀAx_i, y_i) + λ₁‖A‖_Tr + 2λ₂‖A‖²_fr.
struct ProxConfig {
  double l1 = 0.0;         ///< λ₁ (trace-norm weight)
  double l2 = 0.0;         ///< λ₂ (the objective uses 2λ₂)
  double step = 1.0;       ///< initial step of the backtracking search
  int max_iters = 100000;
  double tol = 1e-10;      ///< stop when ‖A_{t+1} - A_t‖_fr <= tol
  LossSpec loss;

  void validate() const;
};

/// Proximal operator of τ‖·‖_Tr: eigenvalues soft-thresholded by τ.
SymMatrix prox_trace(const SymMatrix& a, double tau);

double one_dim_objective(const SymMatrix& a, const LabeledDataset& data, const ProxConfig& cfg);

/// Proximal gradient with halving backtracking (sufficient-decrease constant
/// 1e-4). Accepted steps never increase the objective. Returns the last
/// iterate with converged = false when the budget runs out.
std::pair<SymMatrix, SolverReport> solve_one_dim(const LabeledDataset& data, const ProxConfig& cfg);

/// A = UᵀDU ↦ V = √|D|·U, P = (V†)ᵀAV† (diagonal with entries ±1).
RedExLayer recover_one_dim(const SymMatrix& a, double eps = kDefaultCompactEps);

}  // namespace redex
