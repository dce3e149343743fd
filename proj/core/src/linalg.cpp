#include "redex/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "redex/errors.hpp"

namespace redex {

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw DimError("SymMatrix requires a non-empty square matrix");
  if (!m.allFinite()) throw InvalidInput("SymMatrix entries must be finite");
  m_ = (m + m.transpose()) * 0.5;
}

SymMatrix SymMatrix::zero(Eigen::Index dim) { return SymMatrix(Matrix::Zero(dim, dim), TrustedTag{}); }

SymMatrix SymMatrix::identity(Eigen::Index dim) {
  return SymMatrix(Matrix::Identity(dim, dim), TrustedTag{});
}

SymMatrix SymMatrix::diagonal(const Vector& diag) {
  if (!diag.allFinite()) throw InvalidInput("SymMatrix entries must be finite");
  return SymMatrix(Matrix(diag.asDiagonal()), TrustedTag{});
}

SymMatrix SymMatrix::trusted(Matrix m) { return SymMatrix(std::move(m), TrustedTag{}); }

double SymMatrix::quadratic_form(const Vector& x) const {
  if (x.size() != dim()) throw DimError("quadratic form: vector/matrix dimension mismatch");
  return x.dot(m_ * x);
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw DimError("SymMatrix sum: dimension mismatch");
  return SymMatrix(a.m_ + b.m_, SymMatrix::TrustedTag{});
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw DimError("SymMatrix difference: dimension mismatch");
  return SymMatrix(a.m_ - b.m_, SymMatrix::TrustedTag{});
}

SymMatrix operator*(double s, const SymMatrix& a) { return SymMatrix(s * a.m_, SymMatrix::TrustedTag{}); }

Matrix EigenDecomp::reconstruct() const {
  return eigenvectors.transpose() * eigenvalues.asDiagonal() * eigenvectors;
}

namespace detail {

void eig_sorted(const Matrix& a, Vector& values, Matrix& rows) {
  const Eigen::Index n = a.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) throw InvalidInput("eigendecomposition failed");
  // Eigen returns ascending order with eigenvectors as columns.
  // Ties keep the solver's column order.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index p, Eigen::Index q) { return solver.eigenvalues()(p) > solver.eigenvalues()(q); });
  values.resize(n);
  rows.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = order[static_cast<std::size_t>(i)];
    values(i) = solver.eigenvalues()(src);
    rows.row(i) = solver.eigenvectors().col(src).transpose();
    for (Eigen::Index j = 0; j < n; ++j) {
      double c = rows(i, j);
      if (std::abs(c) > 1e-12) {
        if (c < 0) rows.row(i) *= -1.0;
        break;
      }
    }
  }
}

Matrix psd_part(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  const Vector clipped = solver.eigenvalues().cwiseMax(0.0);
  Matrix out = solver.eigenvectors() * clipped.asDiagonal() * solver.eigenvectors().transpose();
  return (out + out.transpose()) * 0.5;
}

double min_eig(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

}  // namespace detail

EigenDecomp sym_eigendecompose(const SymMatrix& a) {
  EigenDecomp out;
  detail::eig_sorted(a.matrix(), out.eigenvalues, out.eigenvectors);
  return out;
}

EigenDecomp compact_diagonalize(const SymMatrix& a, double eps) {
  if (eps < 0) throw InvalidInput("compact_diagonalize: eps must be >= 0");
  EigenDecomp full = sym_eigendecompose(a);
  const double scale = std::max(1.0, full.eigenvalues.cwiseAbs().maxCoeff());
  const double cut = eps * scale;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < full.rank(); ++i)
    if (std::abs(full.eigenvalues(i)) > cut) keep.push_back(i);
  EigenDecomp out;
  if (keep.empty()) {
    out.eigenvalues = Vector::Zero(1);
    out.eigenvectors = Matrix::Zero(1, a.dim());
    return out;
  }
  out.eigenvalues.resize(static_cast<Eigen::Index>(keep.size()));
  out.eigenvectors.resize(static_cast<Eigen::Index>(keep.size()), a.dim());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    out.eigenvalues(static_cast<Eigen::Index>(r)) = full.eigenvalues(keep[r]);
    out.eigenvectors.row(static_cast<Eigen::Index>(r)) = full.eigenvectors.row(keep[r]);
  }
  return out;
}

SymMatrix psd_project(const SymMatrix& s) { return SymMatrix::trusted(detail::psd_part(s.matrix())); }

Vector project_capped_simplex(const Vector& v, double bound) {
  if (!(bound > 0)) throw InvalidInput("trace bound must be > 0");
  Vector clipped = v.cwiseMax(0.0);
  if (clipped.sum() <= bound) return clipped;
  // Project onto {λ >= 0, Σλ = bound}: find θ with Σ max(v_i - θ, 0) = bound.
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cumulative += sorted[i];
    const double candidate = (cumulative - bound) / static_cast<double>(i + 1);
    if (i + 1 == sorted.size() || sorted[i + 1] <= candidate) {
      theta = candidate;
      break;
    }
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

SymMatrix trace_ball_project(const SymMatrix& r, double bound) {
  if (!(bound > 0)) throw InvalidInput("trace_ball_project: bound must be > 0");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(r.matrix());
  const Vector lambda = project_capped_simplex(solver.eigenvalues(), bound);
  Matrix out = solver.eigenvectors() * lambda.asDiagonal() * solver.eigenvectors().transpose();
  return SymMatrix::trusted((out + out.transpose()) * 0.5);
}

Matrix pseudo_inverse(const Matrix& v) {
  Matrix out = Matrix::Zero(v.cols(), v.rows());
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    const double sq = v.row(i).squaredNorm();
    if (sq > 0) out.col(i) = v.row(i).transpose() / sq;
  }
  return out;
}

double min_eigenvalue(const SymMatrix& a) { return detail::min_eig(a.matrix()); }

double spectral_norm(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double trace_norm(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace redex
