#include "redex/sdp.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "admm_engine.hpp"
#include "redex/errors.hpp"

namespace redex {

double FeasibilityAudit::worst() const {
  return std::max({dominator_violation, upper_violation, lower_violation, std::max(0.0, -trace_slack)});
}

std::string to_json(const SolverReport& report, bool include_history) {
  nlohmann::json j;
  j["converged"] = report.converged;
  j["iters_used"] = report.iters_used;
  j["objective"] = report.objective;
  j["primal_residual"] = report.primal_residual;
  j["dual_residual"] = report.dual_residual;
  j["constraint_residual"] = report.constraint_residual;
  j["audit"] = {{"dominator_violation", report.audit.dominator_violation},
                {"upper_violation", report.audit.upper_violation},
                {"lower_violation", report.audit.lower_violation},
                {"trace_slack", report.audit.trace_slack},
                {"objective", report.audit.objective}};
  if (include_history) {
    j["objective_history"] = report.objective_history;
    j["residual_history"] = report.residual_history;
  } else if (!report.objective_history.empty()) {
    j["final_history_objective"] = report.objective_history.back();
  }
  return j.dump(2);
}

void TrainConfig::validate() const {
  if (!(width > 0) || !std::isfinite(width)) throw ConfigError("width M must be a positive finite number");
  if (!(reg >= 0)) throw ConfigError("regularization must be >= 0");
  if (!(trace_penalty >= 0)) throw ConfigError("trace penalty must be >= 0");
  if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (!(tol > 0)) throw ConfigError("tol must be > 0");
  if (!(rho > 0)) throw ConfigError("rho must be > 0");
  make_loss(loss);
}

std::pair<AltParam, SolverReport> solve_single_layer(const LabeledDataset& data, const TrainConfig& cfg) {
  data.validate();
  cfg.validate();
  const Eigen::Index d = data.input_dim();
  const Matrix basis = detail::data_span_basis(data.inputs, cfg.restrict_to_data_span);
  const bool restricted = basis.rows() > 0;

  if (restricted && basis.cols() == 0) {
    // All inputs are zero: every feasible point predicts 0, the optimum is (0, 0).
    AltParam alt{std::vector<SymMatrix>(static_cast<std::size_t>(data.output_dim()), SymMatrix::zero(d)),
                 SymMatrix::zero(d)};
    SolverReport report = kkt_feasibility(alt, cfg, data);
    report.converged = true;
    return {alt, report};
  }

  const Matrix inputs = restricted ? Matrix(data.inputs * basis) : data.inputs;
  detail::EngineProblem problem;
  problem.dim = inputs.cols();
  problem.outputs = data.output_dim();
  problem.patches = 1;
  problem.features = detail::quadratic_features(inputs, 1);
  problem.targets = data.targets;
  problem.loss = make_loss(cfg.loss);
  problem.frob_reg = cfg.reg;
  problem.trace_penalty = cfg.trace_penalty;
  if (cfg.cap_trace) problem.trace_cap = cfg.width;

  detail::EngineOptions options;
  options.max_iters = cfg.max_iters;
  options.tol = cfg.tol;
  options.rho = cfg.rho;
  detail::EngineResult result = detail::run_admm(problem, options);

  auto lift = [&](const Matrix& m) {
    return restricted ? SymMatrix(Matrix(basis * m * basis.transpose())) : SymMatrix(m);
  };
  AltParam alt;
  alt.dominator = lift(result.dominator);
  for (const auto& a : result.heads) alt.heads.push_back(lift(a));

  SolverReport report = std::move(result.report);
  if (restricted) {
    std::vector<Matrix> blocks;
    for (const auto& a : alt.heads) blocks.push_back(a.matrix());
    const double objective = report.objective;
    report.audit = detail::audit_blocks(blocks, alt.dominator.matrix(), problem.trace_cap);
    report.audit.objective = objective;
    report.constraint_residual = report.audit.worst();
  }
  return {alt, report};
}

double single_layer_objective(const AltParam& alt, const LabeledDataset& data, const TrainConfig& cfg) {
  const auto loss = make_loss(cfg.loss);
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.size(); ++i)
    total += loss->value(eval_alt(alt, data.inputs.row(i).transpose()), data.targets.row(i).transpose());
  double value = total / static_cast<double>(data.size());
  double frob = alt.dominator.squared_frobenius_norm();
  for (const auto& a : alt.heads) frob += a.squared_frobenius_norm();
  return value + cfg.reg * frob + cfg.trace_penalty * alt.dominator.trace();
}

RedExLayer recover_extractor(const AltParam& alt, double eps) {
  alt.validate(kInvariantTol);
  const EigenDecomp compact = compact_diagonalize(alt.dominator, eps);
  const Eigen::Index d = alt.dim();
  if (compact.rank() == 1 && compact.eigenvalues(0) == 0.0) {
    std::vector<SymMatrix> heads(alt.heads.size(), SymMatrix::zero(1));
    return RedExLayer::make(Matrix::Zero(1, d), std::move(heads), 0.0);
  }
  const Vector root = compact.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  const Matrix extractor = root.asDiagonal() * compact.eigenvectors;
  const Matrix pinv = pseudo_inverse(extractor);
  std::vector<SymMatrix> heads;
  heads.reserve(alt.heads.size());
  for (const auto& a : alt.heads) heads.emplace_back(Matrix(pinv.transpose() * a.matrix() * pinv));
  const double width = std::max(alt.dominator.trace(), extractor.squaredNorm());
  return RedExLayer::make(extractor, std::move(heads), width, 1e-6);
}

SolverReport kkt_feasibility(const AltParam& alt, const TrainConfig& cfg, const LabeledDataset& data) {
  std::vector<Matrix> blocks;
  for (const auto& a : alt.heads) {
    if (a.dim() != alt.dim()) throw DimError("kkt_feasibility: head/R dimension mismatch");
    blocks.push_back(a.matrix());
  }
  if (data.input_dim() != alt.dim()) throw DimError("kkt_feasibility: data/model dimension mismatch");
  SolverReport report;
  report.audit = detail::audit_blocks(blocks, alt.dominator.matrix(),
                                      cfg.cap_trace ? std::optional<double>(cfg.width) : std::nullopt);
  report.objective = single_layer_objective(alt, data, cfg);
  report.audit.objective = report.objective;
  report.constraint_residual = report.audit.worst();
  report.converged = report.constraint_residual <= cfg.tol;
  return report;
}

double layer_regularizer(const RedExLayer& layer) {
  const AltParam alt = to_alt_param(layer);
  double total = alt.dominator.squared_frobenius_norm();
  for (const auto& a : alt.heads) total += a.squared_frobenius_norm();
  return total;
}

AltParam to_alt_param(const RedExLayer& layer) {
  AltParam alt;
  const Matrix& v = layer.extractor;
  alt.dominator = SymMatrix(Matrix(v.transpose() * v));
  for (const auto& p : layer.heads) alt.heads.emplace_back(Matrix(v.transpose() * p.matrix() * v));
  return alt;
}

}  // namespace redex
