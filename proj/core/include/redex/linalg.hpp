#pragma once

#include <Eigen/Dense>

namespace redex {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense real symmetric matrix. Construction symmetrizes as (A + Aᵀ)/2, so
/// entries(i, j) == entries(j, i) bit for bit, and rejects non-finite input.
class SymMatrix {
 public:
  SymMatrix() : m_(Matrix::Zero(1, 1)) {}
  explicit SymMatrix(const Matrix& m);

  static SymMatrix zero(Eigen::Index dim);
  static SymMatrix identity(Eigen::Index dim);
  static SymMatrix diagonal(const Vector& diag);
  /// Wraps a matrix the caller guarantees is already exactly symmetric and finite.
  static SymMatrix trusted(Matrix m);

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  double trace() const { return m_.trace(); }
  double frobenius_norm() const { return m_.norm(); }
  double squared_frobenius_norm() const { return m_.squaredNorm(); }
  /// xᵀ A x
  double quadratic_form(const Vector& x) const;

  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator*(double s, const SymMatrix& a);
  friend bool operator==(const SymMatrix& a, const SymMatrix& b) { return a.m_ == b.m_; }

 private:
  struct TrustedTag {};
  SymMatrix(Matrix m, TrustedTag) : m_(std::move(m)) {}
  Matrix m_;
};

/// Eigenpairs with eigenvalues sorted descending. Row i of `eigenvectors`
/// pairs with eigenvalue i; rows are orthonormal (or a single zero row for the
/// compact form of the zero matrix).
struct EigenDecomp {
  Vector eigenvalues;
  Matrix eigenvectors;

  Eigen::Index rank() const { return eigenvalues.size(); }
  /// Uᵀ D U
  Matrix reconstruct() const;
};

inline constexpr double kDefaultCompactEps = 1e-10;

/// Full symmetric eigendecomposition. Sign convention: the first component of
/// each eigenvector with magnitude above 1e-12 is positive.
EigenDecomp sym_eigendecompose(const SymMatrix& a);

/// Drops eigenpairs with |λ| <= eps * max(1, ‖A‖_sp). If nothing survives the
/// result is the 1x1 zero decomposition (eigenvalue 0, one zero row).
EigenDecomp compact_diagonalize(const SymMatrix& a, double eps = kDefaultCompactEps);

/// Frobenius-nearest PSD matrix (negative eigenvalues clipped to 0).
SymMatrix psd_project(const SymMatrix& s);

/// Frobenius-nearest PSD matrix with trace <= bound. Throws InvalidInput for bound <= 0.
SymMatrix trace_ball_project(const SymMatrix& r, double bound);

/// Euclidean projection of v onto {λ >= 0, Σλ <= bound}.
Vector project_capped_simplex(const Vector& v, double bound);

/// Pseudo-inverse of a matrix with pairwise orthogonal rows:
/// Vᵀ diag(1/‖row_i‖²), zero rows mapping to zero columns.
Matrix pseudo_inverse(const Matrix& v);

double min_eigenvalue(const SymMatrix& a);
double spectral_norm(const SymMatrix& a);
/// Sum of absolute eigenvalues.
double trace_norm(const SymMatrix& a);

namespace detail {
// Raw-matrix kernels shared by the solvers; inputs must be exactly symmetric.
void eig_sorted(const Matrix& a, Vector& values, Matrix& vectors_as_rows);
Matrix psd_part(const Matrix& a);
double min_eig(const Matrix& a);
}  // namespace detail

}  // namespace redex
