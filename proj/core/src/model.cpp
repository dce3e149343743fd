#include "redex/model.hpp"

#include <algorithm>
#include <cmath>

#include "redex/errors.hpp"

namespace redex {

RedExLayer RedExLayer::make(Matrix extractor, std::vector<SymMatrix> heads, double width_bound, double tol) {
  if (!extractor.allFinite()) throw InvalidInput("extractor entries must be finite");
  if (!(width_bound >= 0) || !std::isfinite(width_bound)) throw InvalidInput("width bound must be finite and >= 0");
  if (extractor.rows() > extractor.cols())
    throw InvalidInput("extractor has more rows than input dimensions");
  const double fro2 = extractor.squaredNorm();
  if (fro2 > width_bound + tol)
    throw InvalidInput("extractor width " + std::to_string(fro2) + " exceeds bound " +
                       std::to_string(width_bound));
  const Matrix gram = extractor * extractor.transpose();
  for (Eigen::Index i = 0; i < gram.rows(); ++i)
    for (Eigen::Index j = 0; j < gram.cols(); ++j)
      if (i != j && std::abs(gram(i, j)) > tol * std::max(1.0, fro2))
        throw InvalidInput("extractor rows are not orthogonal");
  for (auto& head : heads) {
    if (head.dim() != extractor.rows()) throw DimError("head dimension does not match extractor rows");
    const double sp = spectral_norm(head);
    if (sp > 1.0 + tol) throw InvalidInput("head spectral norm " + std::to_string(sp) + " exceeds 1");
    if (sp > 1.0) head = (1.0 / sp) * head;
  }
  return RedExLayer{std::move(extractor), std::move(heads), width_bound};
}

Vector RedExLayer::operator()(const Vector& x) const {
  return apply_heads(heads, extract_expand(extractor, x));
}

void AltParam::validate(double tol) const {
  const double scale = std::max(1.0, spectral_norm(dominator)) * tol;
  if (detail::min_eig(dominator.matrix()) < -scale) throw InvalidInput("R is not PSD");
  for (const auto& a : heads) {
    if (a.dim() != dominator.dim()) throw DimError("A_i and R dimensions differ");
    if (detail::min_eig(dominator.matrix() - a.matrix()) < -scale)
      throw InvalidInput("R - A_i is not PSD");
    if (detail::min_eig(dominator.matrix() + a.matrix()) < -scale)
      throw InvalidInput("R + A_i is not PSD");
  }
}

Eigen::Index MultilayerModel::input_dim() const {
  if (extractors.empty()) return 0;
  return extractors.front().cols() - 1;
}

std::vector<Eigen::Index> MultilayerModel::widths() const {
  std::vector<Eigen::Index> out;
  for (const auto& v : extractors) out.push_back(v.rows());
  return out;
}

void MultilayerModel::validate() const {
  if (extractors.empty()) throw DimError("model has no layers");
  if (extractors.front().cols() < 2) throw DimError("first extractor must read (c, x) with d >= 1");
  for (std::size_t t = 1; t < extractors.size(); ++t) {
    const Eigen::Index n_prev = extractors[t - 1].rows();
    if (extractors[t].cols() != n_prev * n_prev)
      throw DimError("layer " + std::to_string(t + 1) + " expects input dim " +
                     std::to_string(n_prev * n_prev) + ", got " + std::to_string(extractors[t].cols()));
  }
  const Eigen::Index n_last = extractors.back().rows();
  for (const auto& h : heads)
    if (h.dim() != n_last) throw DimError("final head dimension does not match last extractor");
  if (training_size > 0)
    for (const auto& v : extractors)
      if (v.rows() > training_size) throw DimError("layer width exceeds training set size");
}

void LabeledDataset::validate() const {
  if (inputs.rows() < 1) throw InvalidInput("dataset is empty");
  if (targets.rows() != inputs.rows()) throw DimError("inputs and targets have different sample counts");
  if (patch_count < 1 || inputs.cols() % patch_count != 0)
    throw DimError("input width is not a multiple of the patch count");
  if (!inputs.allFinite() || !targets.allFinite()) throw InvalidInput("dataset has non-finite entries");
}

LabeledDataset LabeledDataset::subset(Eigen::Index begin, Eigen::Index end) const {
  LabeledDataset out;
  out.inputs = inputs.middleRows(begin, end - begin);
  out.targets = targets.middleRows(begin, end - begin);
  out.patch_count = patch_count;
  return out;
}

SymMatrix extract_expand(const Matrix& extractor, const Vector& x) {
  if (x.size() != extractor.cols())
    throw DimError("extract_expand: input has dim " + std::to_string(x.size()) + ", extractor expects " +
                   std::to_string(extractor.cols()));
  const Vector z = extractor * x;
  return SymMatrix::trusted(z * z.transpose());
}

Vector apply_heads(const std::vector<SymMatrix>& heads, const SymMatrix& expanded) {
  Vector out(static_cast<Eigen::Index>(heads.size()));
  for (std::size_t i = 0; i < heads.size(); ++i) {
    if (heads[i].dim() != expanded.dim()) throw DimError("apply_heads: head/feature dimension mismatch");
    out(static_cast<Eigen::Index>(i)) = heads[i].matrix().cwiseProduct(expanded.matrix()).sum();
  }
  return out;
}

Vector eval_alt(const AltParam& alt, const Vector& x) {
  Vector out(alt.output_dim());
  for (Eigen::Index i = 0; i < alt.output_dim(); ++i)
    out(i) = alt.heads[static_cast<std::size_t>(i)].quadratic_form(x);
  return out;
}

Vector flatten_row_major(const Matrix& m) {
  Vector out(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i * m.cols() + j) = m(i, j);
  return out;
}

Vector forward_multilayer(const MultilayerModel& model, const Vector& x) {
  if (model.extractors.empty()) throw DimError("model has no layers");
  if (x.size() != model.input_dim())
    throw DimError("forward: input has dim " + std::to_string(x.size()) + ", model expects " +
                   std::to_string(model.input_dim()));
  Vector features(x.size() + 1);
  features(0) = model.constant;
  features.tail(x.size()) = x;
  for (std::size_t t = 0; t + 1 < model.extractors.size(); ++t) {
    const Vector z = model.extractors[t] * features;
    features = flatten_row_major(z * z.transpose());
  }
  return apply_heads(model.heads, extract_expand(model.extractors.back(), features));
}

Matrix prune_rows(const Matrix& extractor, double eps) {
  if (eps < 0) throw InvalidInput("prune_rows: eps must be >= 0");
  if (eps == 0) return extractor;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < extractor.rows(); ++i)
    if (extractor.row(i).norm() > eps) keep.push_back(i);
  Matrix out(static_cast<Eigen::Index>(keep.size()), extractor.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = extractor.row(keep[r]);
  return out;
}

EvalReport evaluate(const Predictor& predictor, const LabeledDataset& data, const LossSpec& spec) {
  const auto loss = make_loss(spec);
  data.validate();
  const Eigen::Index m = data.size();
  const Eigen::Index k = data.output_dim();
  Vector per_coord = Vector::Zero(k);
  double total = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Vector prediction = predictor(data.inputs.row(i).transpose());
    if (prediction.size() != k) throw DimError("evaluate: predictor output dim does not match targets");
    double sample = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      const double v = loss->coord_value(prediction(c), data.targets(i, c));
      per_coord(c) += v;
      sample += v;
    }
    total += sample;
  }
  EvalReport report;
  report.mean_loss = total / static_cast<double>(m);
  report.per_coordinate_loss = per_coord / static_cast<double>(m);
  report.loss_name = loss->name();
  return report;
}

EvalReport evaluate(const MultilayerModel& model, const LabeledDataset& data, const LossSpec& loss) {
  return evaluate([&](const Vector& x) { return forward_multilayer(model, x); }, data, loss);
}

EvalReport evaluate(const AltParam& alt, const LabeledDataset& data, const LossSpec& loss) {
  return evaluate([&](const Vector& x) { return eval_alt(alt, x); }, data, loss);
}

EvalReport evaluate(const RedExLayer& layer, const LabeledDataset& data, const LossSpec& loss) {
  return evaluate([&](const Vector& x) { return layer(x); }, data, loss);
}

}  // namespace redex
