#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "redex/kravchuk.hpp"
#include "redex/model.hpp"

namespace redex {

/// "relu" (max(0, wᵀx)), "cos" (√2·cos(wᵀx + b)), or "monomial2" (all
/// monomials of degree <= 2 in the form 1, x_i, x_ix_j for i < j, x_i²).
struct FeatureSpec {
  std::string family = "relu";
  Eigen::Index count = 100;  ///< N; ignored by monomial2, whose size is fixed by d
  Eigen::Index input_dim = 0;
  std::uint64_t seed = 0;
};

/// Frozen embedding. Random families put the constant feature 1 in column 0
/// and N - 1 random features after it.
struct RandomFeatureMap {
  std::string family;
  Eigen::Index input_dim = 0;
  Matrix weights;  ///< (N-1) × d, entries N(0, 1)/√d
  Vector bias;     ///< N-1 entries, U[0, 2π] for cos, zero for relu
  std::uint64_t seed = 0;

  Eigen::Index output_dim() const;
  /// One feature row per input row.
  Matrix apply(const Matrix& inputs) const;
};

/// Throws ConfigError for unknown families or N < 1.
RandomFeatureMap make_features(const FeatureSpec& spec);

/// argmin ‖Φw - Y‖²/m + λ‖w‖² via the normal equations. Throws
/// SingularSystem when λ = 0 and Φ lacks full column rank.
Matrix ridge_fit(const Matrix& features, const Matrix& targets, double lambda);

struct SweepGrid {
  std::vector<std::string> families{"relu", "cos", "monomial2"};
  std::vector<Eigen::Index> budgets{100, 500, 2000};
  std::vector<double> lambdas{1e-4, 1e-3, 1e-2, 1e-1};
  std::vector<std::uint64_t> seeds{1};
};

/// One (family, N, λ, seed, output coordinate) result.
struct SweepRow {
  std::string family;
  Eigen::Index features = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  Eigen::Index coord = 0;
  double test_loss = 0.0;
  double m1 = 0.0;  ///< max training feature norm
  double m2 = 0.0;  ///< max fitted weight-column norm
};

/// Fits every grid point on `train`, reports square loss per output
/// coordinate on `test`. Rows are ordered by (family, N, seed, λ, coord).
std::vector<SweepRow> baseline_sweep(const LabeledDataset& train, const LabeledDataset& test, const SweepGrid& grid);

/// Draws m_train / m_test samples with seeds derived from `data_seed`.
std::vector<SweepRow> baseline_sweep(const KravchukTask& task, Eigen::Index m_train, Eigen::Index m_test,
                                     std::uint64_t data_seed, const SweepGrid& grid);

/// Smallest test loss on `coord` over all rows.
double best_sweep_loss(const std::vector<SweepRow>& rows, Eigen::Index coord);

/// Header plus one line per row: family,N,lambda,seed,coord,test_loss,M1,M2.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace redex
