#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "redex/model.hpp"

namespace redex {

/// Orthonormal polynomials p_0..p_k for S = X_1 + ... + X_k with i.i.d.
/// uniform signs, built from the three-term recursion
///   x p_i = √((i+1)(k-i)) p_{i+1} + √(i(k-i+1)) p_{i-1},  p_0 = 1, p_1 = x/√k.
struct KravchukTable {
  int k = 0;
  /// coefficients[i][n] multiplies xⁿ in p_i.
  std::vector<std::vector<double>> coefficients;

  /// Horner evaluation of p_i at x.
  double evaluate(int i, double x) const;
};

/// Throws ConfigError unless 1 <= k <= 20.
KravchukTable kravchuk_table(int k);

/// P(S = s) for s ∈ {-k, -k+2, ..., k}: returns (support, probabilities).
std::pair<std::vector<double>, std::vector<double>> sign_sum_distribution(int k);

/// The hidden-subset regression problem: x uniform on {±1}^d, target
/// (p_0(S), p_2(S), ..., p_k(S)) with S the sum of the coordinates in `hidden`.
struct KravchukTask {
  int d = 0;
  int k = 0;
  std::vector<int> hidden;  ///< sorted, 0-based coordinates of x
  std::uint64_t seed = 0;
  KravchukTable table;

  /// Throws ConfigError for odd k, k > d, or an invalid hidden set. The set
  /// is drawn from `seed` when not given.
  static KravchukTask make(int d, int k, std::uint64_t seed, std::optional<std::vector<int>> hidden = std::nullopt);

  int output_dim() const { return 1 + k / 2; }
  double hidden_sum(const Vector& x) const;
};

/// h(x) = (p_0, p_2, ..., p_k)(S). Throws InvalidInput unless x ∈ {±1}^d.
Vector target_h(const KravchukTask& task, const Vector& x);

/// m i.i.d. samples; identical output for identical (task, m, seed).
LabeledDataset sample_dataset(const KravchukTask& task, Eigen::Index m, std::uint64_t seed);

/// p_i = Σ α_{j,l} p_j p_l over the index set T_i.
struct ProductDecomposition {
  int degree = 0;
  std::map<std::pair<int, int>, double> coefficients;

  double evaluate(const KravchukTable& table, double x) const;
  double max_abs_coefficient() const;
};

/// Builds α^i by one recursion step inside the sum, starting from
/// p_0 = p_0·p_0 and p_1 = p_1·p_0 (pairs are stored as (j, l)).
ProductDecomposition product_decompose(const KravchukTable& table, int i);

/// Membership in T_i: parity pattern, j + l <= i, and both indices capped by
/// max(2, 2^⌈log₂(i/2)⌉).
bool in_product_index_set(int i, int j, int l);

/// Deterministic child seed for independent streams (SplitMix64 mixing).
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace redex
