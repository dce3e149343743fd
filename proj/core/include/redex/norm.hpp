#pragma once

#include <vector>

#include "redex/linalg.hpp"
#include "redex/solver_report.hpp"

namespace redex {

/// ‖A⃗‖_Rx = min{Tr(R) : R ⪰ 0, -R ⪯ A_i ⪯ R} together with a feasible R
/// attaining it (up to solver tolerance).
struct NormResult {
  double value = 0.0;
  SymMatrix witness;
  SolverReport report;
};

/// Solves the trace-minimization program with the splitting engine. The
/// witness is feasible to rounding error; its trace is the returned value.
/// Throws SolverBudgetExceeded (carrying the feasible value) when the
/// residuals do not reach `tol` within `max_iters`.
NormResult redex_norm(const std::vector<SymMatrix>& heads, double tol = 1e-9, int max_iters = 200000);

/// k = 1 closed form: value Σ|λ_i|, witness Uᵀ|D|U.
NormResult trace_norm_k1(const SymMatrix& a);

}  // namespace redex
