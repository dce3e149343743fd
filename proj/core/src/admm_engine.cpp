#include "admm_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "redex/errors.hpp"
#include "redex/parallel.hpp"

namespace redex::detail {

Eigen::Index svec_size(Eigen::Index dim) { return dim * (dim + 1) / 2; }

Vector svec(const Matrix& a) {
  const Eigen::Index d = a.rows();
  Vector v(svec_size(d));
  Eigen::Index pos = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    v(pos++) = a(i, i);
    for (Eigen::Index j = i + 1; j < d; ++j) v(pos++) = std::sqrt(2.0) * a(i, j);
  }
  return v;
}

Matrix smat(const Vector& v, Eigen::Index d) {
  Matrix a(d, d);
  Eigen::Index pos = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    a(i, i) = v(pos++);
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const double x = v(pos++) / std::sqrt(2.0);
      a(i, j) = x;
      a(j, i) = x;
    }
  }
  return a;
}

Matrix quadratic_features(const Matrix& inputs, Eigen::Index patches) {
  const Eigen::Index d = inputs.cols() / patches;
  const Eigen::Index s = svec_size(d);
  Matrix phi(inputs.rows(), patches * s);
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    for (Eigen::Index j = 0; j < patches; ++j) {
      const auto x = inputs.row(i).segment(j * d, d);
      Eigen::Index pos = j * s;
      for (Eigen::Index a = 0; a < d; ++a) {
        phi(i, pos++) = x(a) * x(a);
        for (Eigen::Index b = a + 1; b < d; ++b) phi(i, pos++) = std::sqrt(2.0) * x(a) * x(b);
      }
    }
  }
  return phi;
}

FeasibilityAudit audit_blocks(const std::vector<Matrix>& heads, const Matrix& dominator,
                              std::optional<double> trace_cap) {
  FeasibilityAudit audit;
  audit.dominator_violation = std::max(0.0, -min_eig(dominator));
  for (const auto& a : heads) {
    audit.upper_violation = std::max(audit.upper_violation, -min_eig(dominator - a));
    audit.lower_violation = std::max(audit.lower_violation, -min_eig(dominator + a));
  }
  if (trace_cap) audit.trace_slack = *trace_cap - dominator.trace();
  return audit;
}

Matrix data_span_basis(const Matrix& inputs, SpanRestriction mode) {
  if (mode == SpanRestriction::Off) return {};
  const Matrix gram = inputs.transpose() * inputs;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
  const Vector& ev = solver.eigenvalues();
  const double top = ev.size() ? std::max(ev.maxCoeff(), 0.0) : 0.0;
  const double cut = 1e-12 * std::max(top, 1e-300);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > cut) ++rank;
  const Eigen::Index d = inputs.cols();
  const bool wanted = mode == SpanRestriction::On || d > inputs.rows() || rank < d;
  if (!wanted || rank == d) return {};
  if (rank == 0) return Matrix::Zero(d, 0);
  // Eigen orders ascending; the top `rank` vectors span the data.
  return solver.eigenvectors().rightCols(rank);
}

namespace {

struct DataTerm {
  // Eigendecomposition of G = ΦᵀΦ/m and per-output sufficient statistics.
  Matrix basis;
  Vector spectrum;
  Matrix cross;     ///< Φᵀ Y / m, one column per output
  Vector target_sq; ///< mean y_c²
  double lipschitz_scale = 0.0;
};

DataTerm prepare_data(const EngineProblem& p) {
  DataTerm dt;
  const double m = static_cast<double>(p.features.rows());
  const Matrix gram = (p.features.transpose() * p.features) / m;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
  dt.basis = solver.eigenvectors();
  dt.spectrum = solver.eigenvalues().cwiseMax(0.0);
  dt.cross = (p.features.transpose() * p.targets) / m;
  dt.target_sq = p.targets.colwise().squaredNorm().transpose() / m;
  dt.lipschitz_scale = dt.spectrum.size() ? dt.spectrum.maxCoeff() : 0.0;
  return dt;
}

double data_loss(const EngineProblem& p, const DataTerm& dt, const std::vector<Vector>& coeffs) {
  if (p.features.rows() == 0) return 0.0;
  double total = 0.0;
  if (p.loss->is_square()) {
    for (Eigen::Index c = 0; c < p.outputs; ++c) {
      const Vector& a = coeffs[static_cast<std::size_t>(c)];
      const Vector proj = dt.basis.transpose() * a;
      total += proj.dot(dt.spectrum.cwiseProduct(proj)) - 2.0 * dt.cross.col(c).dot(a) + dt.target_sq(c);
    }
    return std::max(total, 0.0);
  }
  const double m = static_cast<double>(p.features.rows());
  for (Eigen::Index c = 0; c < p.outputs; ++c) {
    const Vector pred = p.features * coeffs[static_cast<std::size_t>(c)];
    for (Eigen::Index i = 0; i < pred.size(); ++i) total += p.loss->coord_value(pred(i), p.targets(i, c));
  }
  return total / m;
}

// argmin_a  (1/m) Σ φ(Φa, y_c) + (λ_F + ρ)‖a‖² - ρ⟨a, g⟩
void update_coefficients(const EngineProblem& p, const DataTerm& dt, Eigen::Index c, double rho,
                         const Vector& g, Vector& a) {
  const double shift = p.frob_reg + rho;
  if (p.loss->is_square()) {
    const Vector rhs = dt.cross.col(c) + 0.5 * rho * g;
    const Vector proj = dt.basis.transpose() * rhs;
    a = dt.basis * proj.cwiseQuotient((dt.spectrum.array() + shift).matrix());
    return;
  }
  // Inexact step: accelerated gradient on the strongly convex subproblem,
  // warm-started from the previous coefficients.
  const double m = static_cast<double>(p.features.rows());
  const double lipschitz = p.loss->curvature_bound() * dt.lipschitz_scale + 2.0 * shift;
  const double step = 1.0 / lipschitz;
  Vector y = a;
  Vector prev = a;
  double t = 1.0;
  for (int inner = 0; inner < 30; ++inner) {
    const Vector pred = p.features * y;
    Vector deriv(pred.size());
    for (Eigen::Index i = 0; i < pred.size(); ++i) deriv(i) = p.loss->coord_derivative(pred(i), p.targets(i, c));
    const Vector grad = p.features.transpose() * deriv / m + 2.0 * shift * y - rho * g;
    const Vector next = y - step * grad;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / t_next) * (next - prev);
    prev = next;
    t = t_next;
  }
  a = prev;
}

Matrix project_cap(const Matrix& s, std::optional<double> cap) {
  if (!cap) return psd_part(s);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
  const Vector lambda = project_capped_simplex(solver.eigenvalues(), *cap);
  Matrix out = solver.eigenvectors() * lambda.asDiagonal() * solver.eigenvectors().transpose();
  return (out + out.transpose()) * 0.5;
}

// Moves every block into the band [-R, R]: whiten by R on its range, clip
// the eigenvalues of the whitened head to [-1, 1], map back.
std::vector<Matrix> clip_into_band(const std::vector<Matrix>& heads, const Matrix& dominator) {
  Vector values;
  Matrix rows;
  eig_sorted(dominator, values, rows);
  const double cut = 1e-12 * std::max(1.0, values.size() ? values(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < values.size() && values(rank) > cut) ++rank;
  std::vector<Matrix> out;
  out.reserve(heads.size());
  const Eigen::Index d = dominator.rows();
  if (rank == 0) {
    for (std::size_t b = 0; b < heads.size(); ++b) out.emplace_back(Matrix::Zero(d, d));
    return out;
  }
  const Matrix u = rows.topRows(rank);
  const Vector root = values.head(rank).cwiseSqrt();
  const Vector inv_root = root.cwiseInverse();
  for (const auto& a : heads) {
    Matrix whitened = inv_root.asDiagonal() * (u * a * u.transpose()) * inv_root.asDiagonal();
    whitened = (whitened + whitened.transpose()) * 0.5;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(whitened);
    const Vector clipped = solver.eigenvalues().cwiseMax(-1.0).cwiseMin(1.0);
    const Matrix p = solver.eigenvectors() * clipped.asDiagonal() * solver.eigenvectors().transpose();
    Matrix back = u.transpose() * root.asDiagonal() * p * root.asDiagonal() * u;
    out.emplace_back((back + back.transpose()) * 0.5);
  }
  return out;
}

}  // namespace

double engine_objective(const EngineProblem& p, const std::vector<Matrix>& heads, const Matrix& dominator) {
  double value = p.trace_penalty * dominator.trace() + p.frob_reg * dominator.squaredNorm();
  if (p.fixed_heads.empty()) {
    DataTerm dt = prepare_data(p);
    std::vector<Vector> coeffs;
    const Eigen::Index s = svec_size(p.dim);
    for (Eigen::Index c = 0; c < p.outputs; ++c) {
      Vector a(p.patches * s);
      for (Eigen::Index j = 0; j < p.patches; ++j)
        a.segment(j * s, s) = svec(heads[static_cast<std::size_t>(c * p.patches + j)]);
      coeffs.push_back(std::move(a));
    }
    value += data_loss(p, dt, coeffs);
    for (const auto& a : heads) value += p.frob_reg * a.squaredNorm();
  }
  return value;
}

EngineResult run_admm(const EngineProblem& p, const EngineOptions& opt) {
  const Eigen::Index d = p.dim;
  const Eigen::Index s = svec_size(d);
  const bool fixed = !p.fixed_heads.empty();
  const std::size_t blocks = static_cast<std::size_t>(p.outputs * p.patches);
  if (fixed && p.fixed_heads.size() != blocks) throw DimError("engine: fixed head count mismatch");
  if (!fixed && !p.loss) throw ConfigError("engine: loss required when heads are optimized");
  if (opt.max_iters < 1 || !(opt.tol > 0) || !(opt.rho > 0)) throw ConfigError("engine: invalid options");

  DataTerm dt;
  if (!fixed) dt = prepare_data(p);

  std::vector<Matrix> heads = fixed ? p.fixed_heads : std::vector<Matrix>(blocks, Matrix::Zero(d, d));
  std::vector<Vector> coeffs(static_cast<std::size_t>(p.outputs), Vector::Zero(p.patches * s));
  Matrix r = Matrix::Zero(d, d);

  // Block layout: [0, blocks) upper (R - A_b), [blocks, 2·blocks) lower (R + A_b), last: R.
  const std::size_t nblocks = 2 * blocks + 1;
  std::vector<Matrix> w(nblocks, Matrix::Zero(d, d));
  std::vector<Matrix> u(nblocks, Matrix::Zero(d, d));
  std::vector<Matrix> w_old(nblocks);

  double rho = opt.rho;
  SolverReport report;
  const double denom_base = 2.0 * p.frob_reg;
  const Matrix eye = Matrix::Identity(d, d);

  auto constraint_image = [&](std::size_t b) -> Matrix {
    if (b < blocks) return r - heads[b];
    if (b < 2 * blocks) return r + heads[b - blocks];
    return r;
  };

  int it = 0;
  for (it = 1; it <= opt.max_iters; ++it) {
    // (A, R) step.
    Matrix sum = Matrix::Zero(d, d);
    for (std::size_t b = 0; b < nblocks; ++b) sum += w[b] - u[b];
    r = (rho * sum - p.trace_penalty * eye) / (denom_base + rho * static_cast<double>(nblocks));
    r = (r + r.transpose()) * 0.5;
    if (!fixed) {
      for (Eigen::Index c = 0; c < p.outputs; ++c) {
        Vector g(p.patches * s);
        for (Eigen::Index j = 0; j < p.patches; ++j) {
          const std::size_t b = static_cast<std::size_t>(c * p.patches + j);
          g.segment(j * s, s) = svec((w[blocks + b] - u[blocks + b]) - (w[b] - u[b]));
        }
        Vector& a = coeffs[static_cast<std::size_t>(c)];
        update_coefficients(p, dt, c, rho, g, a);
        for (Eigen::Index j = 0; j < p.patches; ++j)
          heads[static_cast<std::size_t>(c * p.patches + j)] = smat(a.segment(j * s, s), d);
      }
    }

    // Cone projections.
    for (std::size_t b = 0; b < nblocks; ++b) w_old[b] = w[b];
    parallel_for(nblocks, [&](std::size_t b) {
      const Matrix target = constraint_image(b) + u[b];
      w[b] = (b + 1 == nblocks) ? project_cap(target, p.trace_cap) : psd_part(target);
    });

    // Dual step and residuals.
    double primal_sq = 0.0;
    for (std::size_t b = 0; b < nblocks; ++b) {
      const Matrix gap = constraint_image(b) - w[b];
      primal_sq += gap.squaredNorm();
      u[b] += gap;
    }
    Matrix dual_r = Matrix::Zero(d, d);
    double dual_sq = 0.0;
    for (std::size_t b = 0; b < nblocks; ++b) dual_r += w[b] - w_old[b];
    dual_sq += dual_r.squaredNorm();
    if (!fixed)
      for (std::size_t b = 0; b < blocks; ++b)
        dual_sq += ((w[blocks + b] - w_old[blocks + b]) - (w[b] - w_old[b])).squaredNorm();
    const double primal = std::sqrt(primal_sq);
    const double dual = rho * std::sqrt(dual_sq);
    report.primal_residual = primal;
    report.dual_residual = dual;

    if (opt.record_history) {
      double obj = p.trace_penalty * r.trace() + p.frob_reg * r.squaredNorm();
      if (!fixed) {
        obj += data_loss(p, dt, coeffs);
        for (const auto& a : coeffs) obj += p.frob_reg * a.squaredNorm();
      }
      report.objective_history.push_back(obj);
      report.residual_history.push_back(primal);
    }

    if (primal <= opt.tol && dual <= opt.tol) {
      report.converged = true;
      break;
    }
    if (opt.adapt_rho && it % 10 == 0) {
      double scale = 1.0;
      if (primal > 10.0 * dual && rho < 1e6) scale = 2.0;
      else if (dual > 10.0 * primal && rho > 1e-6) scale = 0.5;
      if (scale != 1.0) {
        rho *= scale;
        for (auto& ub : u) ub /= scale;
      }
    }
  }
  report.iters_used = std::min(it, opt.max_iters);

  // Polish to an exactly feasible point: R first, then the heads.
  EngineResult result;
  if (fixed) {
    Matrix polished = psd_part(r);
    double shift = 0.0;
    for (const auto& a : heads) {
      shift = std::max(shift, -min_eig(polished - a));
      shift = std::max(shift, -min_eig(polished + a));
    }
    if (shift > 0) polished += (shift + 1e-14 * std::max(1.0, polished.norm())) * eye;
    result.dominator = polished;
    result.heads = heads;
  } else {
    result.dominator = project_cap(r, p.trace_cap);
    result.heads = clip_into_band(heads, result.dominator);
  }
  report.audit = audit_blocks(result.heads, result.dominator, p.trace_cap);
  report.objective = fixed ? p.trace_penalty * result.dominator.trace() + p.frob_reg * result.dominator.squaredNorm()
                           : engine_objective(p, result.heads, result.dominator);
  report.audit.objective = report.objective;
  report.constraint_residual = report.audit.worst();
  result.report = std::move(report);
  return result;
}

}  // namespace redex::detail
