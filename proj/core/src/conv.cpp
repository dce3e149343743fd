#include "redex/conv.hpp"

#include <algorithm>

#include "admm_engine.hpp"
#include "redex/errors.hpp"

namespace redex {

namespace {

std::vector<SymMatrix> flatten_grid(const HeadGrid& grid) {
  std::vector<SymMatrix> out;
  for (const auto& row : grid) out.insert(out.end(), row.begin(), row.end());
  return out;
}

HeadGrid unflatten_grid(std::vector<SymMatrix> flat, std::size_t outputs, std::size_t patches) {
  HeadGrid grid(outputs);
  for (std::size_t i = 0; i < outputs; ++i)
    for (std::size_t j = 0; j < patches; ++j) grid[i].push_back(std::move(flat[i * patches + j]));
  return grid;
}

void check_grid(const HeadGrid& grid) {
  if (grid.empty() || grid.front().empty()) throw InvalidInput("head grid must be non-empty");
  for (const auto& row : grid)
    if (row.size() != grid.front().size()) throw DimError("head grid rows have different patch counts");
}

}  // namespace

ConvRedExLayer ConvRedExLayer::make(Matrix extractor, HeadGrid heads, double width_bound, double tol) {
  check_grid(heads);
  const std::size_t k = heads.size();
  const std::size_t p = heads.front().size();
  RedExLayer flat = RedExLayer::make(std::move(extractor), flatten_grid(heads), width_bound, tol);
  return ConvRedExLayer{std::move(flat.extractor), unflatten_grid(std::move(flat.heads), k, p),
                        static_cast<Eigen::Index>(p), width_bound};
}

void ConvAltParam::validate(double tol) const {
  check_grid(heads);
  AltParam{flatten_grid(heads), dominator}.validate(tol);
}

Vector conv_forward(const ConvRedExLayer& layer, const Vector& x) {
  const Eigen::Index d = layer.patch_dim();
  const Eigen::Index p = layer.patch_count;
  if (x.size() != p * d)
    throw DimError("conv_forward: expected " + std::to_string(p) + " patches of dim " + std::to_string(d));
  Vector out = Vector::Zero(layer.output_dim());
  for (Eigen::Index j = 0; j < p; ++j) {
    const Vector z = layer.extractor * x.segment(j * d, d);
    for (Eigen::Index i = 0; i < out.size(); ++i)
      out(i) += z.dot(layer.heads[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].matrix() * z);
  }
  return out;
}

Vector conv_forward(const ConvRedExLayer& layer, const std::vector<Vector>& patches) {
  if (static_cast<Eigen::Index>(patches.size()) != layer.patch_count) throw DimError("conv_forward: wrong patch count");
  Vector x(layer.patch_count * layer.patch_dim());
  for (std::size_t j = 0; j < patches.size(); ++j) {
    if (patches[j].size() != layer.patch_dim()) throw DimError("conv_forward: wrong patch dimension");
    x.segment(static_cast<Eigen::Index>(j) * layer.patch_dim(), layer.patch_dim()) = patches[j];
  }
  return conv_forward(layer, x);
}

Vector conv_eval_alt(const ConvAltParam& alt, const Vector& x) {
  const Eigen::Index d = alt.dominator.dim();
  const Eigen::Index p = alt.patch_count();
  if (x.size() != p * d) throw DimError("conv_eval_alt: input dimension mismatch");
  Vector out = Vector::Zero(alt.output_dim());
  for (Eigen::Index i = 0; i < out.size(); ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      out(i) += alt.heads[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].quadratic_form(x.segment(j * d, d));
  return out;
}

std::pair<ConvAltParam, SolverReport> solve_conv_layer(const LabeledDataset& data, double l1, double l2,
                                                       const TrainConfig& cfg) {
  data.validate();
  cfg.validate();
  if (!(l1 >= 0) || !(l2 >= 0)) throw ConfigError("conv regularization weights must be >= 0");
  const Eigen::Index m = data.size();
  const Eigen::Index p = data.patch_count;
  const Eigen::Index d = data.patch_dim();
  const auto k = static_cast<std::size_t>(data.output_dim());

  Matrix stacked(m * p, d);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < p; ++j) stacked.row(i * p + j) = data.inputs.row(i).segment(j * d, d);
  const Matrix basis = detail::data_span_basis(stacked, cfg.restrict_to_data_span);
  const bool restricted = basis.rows() > 0;

  if (restricted && basis.cols() == 0) {
    ConvAltParam alt{HeadGrid(k, std::vector<SymMatrix>(static_cast<std::size_t>(p), SymMatrix::zero(d))),
                     SymMatrix::zero(d)};
    SolverReport report;
    report.objective = conv_objective(alt, data, l1, l2, cfg.loss);
    report.audit.objective = report.objective;
    report.converged = true;
    return {alt, report};
  }

  Matrix inputs = data.inputs;
  Eigen::Index dim = d;
  if (restricted) {
    dim = basis.cols();
    inputs.resize(m, p * dim);
    for (Eigen::Index j = 0; j < p; ++j) inputs.middleCols(j * dim, dim) = data.inputs.middleCols(j * d, d) * basis;
  }

  detail::EngineProblem problem;
  problem.dim = dim;
  problem.outputs = data.output_dim();
  problem.patches = p;
  problem.features = detail::quadratic_features(inputs, p);
  problem.targets = data.targets;
  problem.loss = make_loss(cfg.loss);
  problem.frob_reg = l2;
  problem.trace_penalty = l1;

  detail::EngineOptions options;
  options.max_iters = cfg.max_iters;
  options.tol = cfg.tol;
  options.rho = cfg.rho;
  detail::EngineResult result = detail::run_admm(problem, options);

  auto lift = [&](const Matrix& a) {
    return restricted ? SymMatrix(Matrix(basis * a * basis.transpose())) : SymMatrix(a);
  };
  ConvAltParam alt;
  alt.dominator = lift(result.dominator);
  alt.heads.assign(k, {});
  for (std::size_t i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      alt.heads[i].push_back(lift(result.heads[i * static_cast<std::size_t>(p) + static_cast<std::size_t>(j)]));

  SolverReport report = std::move(result.report);
  if (restricted) {
    std::vector<Matrix> blocks;
    for (const auto& row : alt.heads)
      for (const auto& a : row) blocks.push_back(a.matrix());
    const double objective = report.objective;
    report.audit = detail::audit_blocks(blocks, alt.dominator.matrix(), std::nullopt);
    report.audit.objective = objective;
    report.constraint_residual = report.audit.worst();
  }
  return {alt, report};
}

double conv_objective(const ConvAltParam& alt, const LabeledDataset& data, double l1, double l2,
                      const LossSpec& spec) {
  const auto loss = make_loss(spec);
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.size(); ++i)
    total += loss->value(conv_eval_alt(alt, data.inputs.row(i).transpose()), data.targets.row(i).transpose());
  double frob = alt.dominator.squared_frobenius_norm();
  for (const auto& row : alt.heads)
    for (const auto& a : row) frob += a.squared_frobenius_norm();
  return total / static_cast<double>(data.size()) + l1 * alt.dominator.trace() + l2 * frob;
}

ConvRedExLayer recover_conv(const ConvAltParam& alt, double eps) {
  alt.validate(kInvariantTol);
  const RedExLayer flat = recover_extractor(AltParam{flatten_grid(alt.heads), alt.dominator}, eps);
  const std::size_t k = alt.heads.size();
  const std::size_t p = alt.heads.front().size();
  return ConvRedExLayer{flat.extractor, unflatten_grid(flat.heads, k, p), static_cast<Eigen::Index>(p),
                        flat.width_bound};
}

EvalReport evaluate(const ConvRedExLayer& layer, const LabeledDataset& data, const LossSpec& loss) {
  return evaluate([&](const Vector& x) { return conv_forward(layer, x); }, data, loss);
}

}  // namespace redex
