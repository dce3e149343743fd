#pragma once

#include <string>
#include <vector>

namespace redex {

/// Min-eigenvalue violations of a candidate (A⃗, R), each reported as
/// max(0, -λ_min); zero means the constraint holds.
struct FeasibilityAudit {
  double dominator_violation = 0.0;  ///< R ⪰ 0
  double upper_violation = 0.0;      ///< max_i of R - A_i ⪰ 0
  double lower_violation = 0.0;      ///< max_i of R + A_i ⪰ 0
  double trace_slack = 0.0;          ///< M - Tr(R); negative when the cap is exceeded
  double objective = 0.0;

  double worst() const;
};

struct SolverReport {
  std::vector<double> objective_history;  ///< objective at each iterate (before polishing)
  std::vector<double> residual_history;   ///< consensus residual at each iterate
  double primal_residual = 0.0;           ///< consensus gap at the last iterate
  double dual_residual = 0.0;
  double constraint_residual = 0.0;       ///< worst violation of the returned point
  double objective = 0.0;                 ///< objective of the returned point
  int iters_used = 0;
  bool converged = false;
  FeasibilityAudit audit;
};

/// Structured-text (JSON) rendering; histories are summarized unless requested.
std::string to_json(const SolverReport& report, bool include_history = false);

}  // namespace redex
