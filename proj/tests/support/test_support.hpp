#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "redex/linalg.hpp"
#include "redex/model.hpp"

namespace redex::testing {

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n) { return random_matrix(rng, n, 1).col(0); }

inline SymMatrix random_sym(std::mt19937_64& rng, Eigen::Index n) {
  const Matrix b = random_matrix(rng, n, n);
  return SymMatrix(Matrix((b + b.transpose()) / 2.0));
}

/// PSD square root through an explicit eigendecomposition.
inline Matrix psd_sqrt(const Matrix& r) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(r);
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

/// R = BBᵀ of rank `rank`, A_i = R^{1/2} C_i R^{1/2} with ‖C_i‖_sp <= 1.
inline AltParam random_feasible_alt(std::mt19937_64& rng, Eigen::Index dim, Eigen::Index k, Eigen::Index rank) {
  const Matrix b = random_matrix(rng, dim, rank);
  const Matrix r = b * b.transpose() / static_cast<double>(dim);
  const Matrix root = psd_sqrt(r);
  AltParam alt;
  alt.dominator = SymMatrix(r);
  std::uniform_real_distribution<double> shrink(0.3, 1.0);
  for (Eigen::Index i = 0; i < k; ++i) {
    const SymMatrix c = random_sym(rng, dim);
    const double sp = spectral_norm(c);
    const Matrix scaled = (sp > 0 ? shrink(rng) / sp : 0.0) * c.matrix();
    alt.heads.emplace_back(Matrix(root * scaled * root));
  }
  return alt;
}

}  // namespace redex::testing
