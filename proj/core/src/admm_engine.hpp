#pragma once

// Operator-splitting solver for the family of programs
//
//   min  (1/m) Σ_i ℓ(ŷ_i, y_i) + λ_F (‖R‖² + Σ‖A_b‖²) + λ_T Tr(R)
//   s.t. R - A_b ⪰ 0,  R + A_b ⪰ 0  for every head block b,
//        R ⪰ 0,  Tr(R) <= M (optional cap),
//
// where ŷ_{i,c} = Σ_j ⟨A_{c,j}, x_{i,j} x_{i,j}ᵀ⟩. Splitting duplicates each
// cone constraint into its own PSD block (W⁺_b, W⁻_b, W₀); the (A, R) step
// decouples because (R-A)² + (R+A)² has no cross term. With the heads fixed
// the same loop computes the RedEx norm.

#include <memory>
#include <optional>
#include <vector>

#include "redex/linalg.hpp"
#include "redex/loss.hpp"
#include "redex/sdp.hpp"
#include "redex/solver_report.hpp"

namespace redex::detail {

struct EngineProblem {
  Eigen::Index dim = 0;
  Eigen::Index outputs = 0;
  Eigen::Index patches = 1;

  Matrix features;  ///< m × (patches·s), rows are stacked svec(x xᵀ)
  Matrix targets;   ///< m × outputs
  std::shared_ptr<const Loss> loss;

  double frob_reg = 0.0;
  double trace_penalty = 0.0;
  std::optional<double> trace_cap;

  /// When non-empty the heads are constants (outputs·patches blocks, index
  /// c·patches + j) and only R is optimized.
  std::vector<Matrix> fixed_heads;
};

struct EngineOptions {
  int max_iters = 20000;
  double tol = 1e-6;
  double rho = 1.0;
  bool adapt_rho = true;
  bool record_history = true;
};

struct EngineResult {
  Matrix dominator;            ///< R (polished)
  std::vector<Matrix> heads;   ///< A blocks (polished), index c·patches + j
  SolverReport report;
};

EngineResult run_admm(const EngineProblem& problem, const EngineOptions& options);

/// Orthonormal coordinates of a symmetric matrix: diagonal entries as-is,
/// off-diagonal pairs (i < j) scaled by √2, row-wise order.
Vector svec(const Matrix& a);
Matrix smat(const Vector& v, Eigen::Index dim);
Eigen::Index svec_size(Eigen::Index dim);

/// Rows svec(x_j x_jᵀ) stacked over the patches of each sample.
Matrix quadratic_features(const Matrix& inputs, Eigen::Index patches);

/// Feasibility audit of arbitrary (blocks, R) against the cone constraints.
FeasibilityAudit audit_blocks(const std::vector<Matrix>& heads, const Matrix& dominator,
                              std::optional<double> trace_cap);

/// Orthonormal basis (d × r) of the row span of `rows`, or a 0×0 matrix when
/// no restriction applies. Auto restricts when d exceeds the row count or the
/// rows are rank deficient.
Matrix data_span_basis(const Matrix& rows, SpanRestriction mode);

/// Objective of the program at (blocks, R).
double engine_objective(const EngineProblem& problem, const std::vector<Matrix>& heads,
                        const Matrix& dominator);

}  // namespace redex::detail
