#include "redex/norm.hpp"

#include <algorithm>

#include "admm_engine.hpp"
#include "redex/errors.hpp"

namespace redex {

NormResult redex_norm(const std::vector<SymMatrix>& heads, double tol, int max_iters) {
  if (heads.empty()) throw InvalidInput("redex_norm: empty tuple");
  if (!(tol > 0)) throw InvalidInput("redex_norm: tol must be > 0");
  const Eigen::Index d = heads.front().dim();
  double scale = 0.0;
  for (const auto& a : heads) {
    if (a.dim() != d) throw DimError("redex_norm: matrices have different dimensions");
    scale = std::max(scale, a.frobenius_norm());
  }
  NormResult out;
  if (scale == 0.0) {
    out.witness = SymMatrix::zero(d);
    out.report.converged = true;
    return out;
  }

  // Solve for A⃗/s and rescale; the norm is positively homogeneous.
  detail::EngineProblem problem;
  problem.dim = d;
  problem.outputs = static_cast<Eigen::Index>(heads.size());
  problem.trace_penalty = 1.0;
  for (const auto& a : heads) problem.fixed_heads.push_back(a.matrix() / scale);

  detail::EngineOptions options;
  options.tol = tol;
  options.max_iters = max_iters;
  options.record_history = false;
  detail::EngineResult result = detail::run_admm(problem, options);

  out.witness = SymMatrix(Matrix(result.dominator * scale));
  out.value = out.witness.trace();
  out.report = std::move(result.report);
  out.report.objective = out.value;
  out.report.audit.objective = out.value;
  if (!out.report.converged)
    throw SolverBudgetExceeded("redex_norm did not reach tolerance within the iteration budget", out.value);
  return out;
}

NormResult trace_norm_k1(const SymMatrix& a) {
  const EigenDecomp eig = sym_eigendecompose(a);
  NormResult out;
  const Vector magnitudes = eig.eigenvalues.cwiseAbs();
  out.value = magnitudes.sum();
  out.witness = SymMatrix(Matrix(eig.eigenvectors.transpose() * magnitudes.asDiagonal() * eig.eigenvectors));
  out.report.converged = true;
  out.report.objective = out.value;
  out.report.audit.objective = out.value;
  return out;
}

}  // namespace redex
