#include "redex/prox.hpp"

#include <algorithm>
#include <cmath>

#include "redex/errors.hpp"

namespace redex {

void ProxConfig::validate() const {
  if (!(l1 >= 0) || !(l2 >= 0)) throw ConfigError("l1 and l2 must be >= 0");
  if (!(step > 0)) throw ConfigError("step must be > 0");
  if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (!(tol > 0)) throw ConfigError("tol must be > 0");
  make_loss(loss);
}

SymMatrix prox_trace(const SymMatrix& a, double tau) {
  if (tau < 0) throw InvalidInput("prox_trace: tau must be >= 0");
  if (tau == 0) return a;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix());
  Vector shrunk = solver.eigenvalues();
  for (Eigen::Index i = 0; i < shrunk.size(); ++i) {
    const double v = shrunk(i);
    shrunk(i) = v > 0 ? std::max(v - tau, 0.0) : -std::max(-v - tau, 0.0);
  }
  Matrix out = solver.eigenvectors() * shrunk.asDiagonal() * solver.eigenvectors().transpose();
  return SymMatrix::trusted((out + out.transpose()) * 0.5);
}

namespace {

struct SmoothTerm {
  const Matrix& x;
  const Vector y;
  const Loss& loss;
  double l2;

  Vector predictions(const Matrix& a) const { return (x * a).cwiseProduct(x).rowwise().sum(); }

  double value(const Matrix& a) const {
    const Vector pred = predictions(a);
    double total = 0.0;
    for (Eigen::Index i = 0; i < pred.size(); ++i) total += loss.coord_value(pred(i), y(i));
    return total / static_cast<double>(pred.size()) + 2.0 * l2 * a.squaredNorm();
  }

  Matrix gradient(const Matrix& a) const {
    const Vector pred = predictions(a);
    Vector w(pred.size());
    for (Eigen::Index i = 0; i < pred.size(); ++i) w(i) = loss.coord_derivative(pred(i), y(i));
    w /= static_cast<double>(pred.size());
    Matrix g = x.transpose() * w.asDiagonal() * x + 4.0 * l2 * a;
    return (g + g.transpose()) * 0.5;
  }
};

}  // namespace

double one_dim_objective(const SymMatrix& a, const LabeledDataset& data, const ProxConfig& cfg) {
  const auto loss = make_loss(cfg.loss);
  SmoothTerm smooth{data.inputs, data.targets.col(0), *loss, cfg.l2};
  return smooth.value(a.matrix()) + cfg.l1 * trace_norm(a);
}

std::pair<SymMatrix, SolverReport> solve_one_dim(const LabeledDataset& data, const ProxConfig& cfg) {
  data.validate();
  cfg.validate();
  if (data.output_dim() != 1) throw DimError("solve_one_dim requires scalar targets (k = 1)");
  const auto loss = make_loss(cfg.loss);
  SmoothTerm smooth{data.inputs, data.targets.col(0), *loss, cfg.l2};
  const Eigen::Index d = data.input_dim();

  SymMatrix a = SymMatrix::zero(d);
  double objective = smooth.value(a.matrix());
  double step = cfg.step;
  const double max_step = cfg.step * 1e6;
  SolverReport report;
  report.objective_history.push_back(objective);

  int it = 0;
  for (it = 1; it <= cfg.max_iters; ++it) {
    const Matrix grad = smooth.gradient(a.matrix());
    SymMatrix candidate;
    double candidate_obj = 0.0;
    double move = 0.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 200; ++halvings) {
      candidate = prox_trace(SymMatrix::trusted(a.matrix() - step * grad), step * cfg.l1);
      move = (candidate.matrix() - a.matrix()).norm();
      candidate_obj = smooth.value(candidate.matrix()) + cfg.l1 * trace_norm(candidate);
      if (candidate_obj <= objective - 1e-4 / step * move * move) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || move == 0.0) {
      report.converged = true;
      report.primal_residual = 0.0;
      break;
    }
    a = candidate;
    objective = candidate_obj;
    report.objective_history.push_back(objective);
    report.residual_history.push_back(move);
    report.primal_residual = move;
    if (move <= cfg.tol) {
      report.converged = true;
      break;
    }
    step = std::min(step * 2.0, max_step);
  }
  report.iters_used = std::min(it, cfg.max_iters);
  report.objective = objective;
  report.audit.objective = objective;
  return {a, report};
}

RedExLayer recover_one_dim(const SymMatrix& a, double eps) {
  const EigenDecomp compact = compact_diagonalize(a, eps);
  const Eigen::Index d = a.dim();
  if (compact.rank() == 1 && compact.eigenvalues(0) == 0.0)
    return RedExLayer::make(Matrix::Zero(1, d), {SymMatrix::zero(1)}, 0.0);
  const Vector magnitudes = compact.eigenvalues.cwiseAbs();
  const Matrix extractor = magnitudes.cwiseSqrt().asDiagonal() * compact.eigenvectors;
  const Matrix pinv = pseudo_inverse(extractor);
  SymMatrix head(Matrix(pinv.transpose() * a.matrix() * pinv));
  return RedExLayer::make(extractor, {head}, magnitudes.sum(), 1e-6);
}

}  // namespace redex
