#include "redex/kravchuk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "redex/errors.hpp"

namespace redex {

double KravchukTable::evaluate(int i, double x) const {
  const auto& c = coefficients.at(static_cast<std::size_t>(i));
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

KravchukTable kravchuk_table(int k) {
  if (k < 1 || k > 20) throw ConfigError("Kravchuk table requires 1 <= k <= 20, got " + std::to_string(k));
  KravchukTable table;
  table.k = k;
  table.coefficients.resize(static_cast<std::size_t>(k) + 1);
  table.coefficients[0] = {1.0};
  table.coefficients[1] = {0.0, 1.0 / std::sqrt(static_cast<double>(k))};
  for (int i = 1; i < k; ++i) {
    const auto& cur = table.coefficients[static_cast<std::size_t>(i)];
    const auto& prev = table.coefficients[static_cast<std::size_t>(i - 1)];
    const double up = std::sqrt(static_cast<double>((i + 1) * (k - i)));
    const double down = std::sqrt(static_cast<double>(i * (k - i + 1)));
    std::vector<double> next(static_cast<std::size_t>(i) + 2, 0.0);
    for (std::size_t n = 0; n < cur.size(); ++n) next[n + 1] += cur[n];
    for (std::size_t n = 0; n < prev.size(); ++n) next[n] -= down * prev[n];
    for (double& v : next) v /= up;
    table.coefficients[static_cast<std::size_t>(i) + 1] = std::move(next);
  }
  return table;
}

std::pair<std::vector<double>, std::vector<double>> sign_sum_distribution(int k) {
  std::vector<double> support, prob;
  // Binomial(k, 1/2) via Pascal's rule (exact in double for k <= 50).
  std::vector<double> row{1.0};
  for (int n = 0; n < k; ++n) {
    std::vector<double> next(row.size() + 1, 0.0);
    for (std::size_t j = 0; j < row.size(); ++j) {
      next[j] += row[j];
      next[j + 1] += row[j];
    }
    row = std::move(next);
  }
  const double total = std::ldexp(1.0, k);
  for (int j = 0; j <= k; ++j) {
    support.push_back(static_cast<double>(2 * j - k));
    prob.push_back(row[static_cast<std::size_t>(j)] / total);
  }
  return {support, prob};
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

KravchukTask KravchukTask::make(int d, int k, std::uint64_t seed, std::optional<std::vector<int>> hidden) {
  if (d < 1) throw ConfigError("task dimension d must be >= 1");
  if (k < 2 || k % 2 != 0) throw ConfigError("task sparsity k must be even and >= 2, got " + std::to_string(k));
  if (k > d) throw ConfigError("task sparsity k must not exceed d");
  KravchukTask task;
  task.d = d;
  task.k = k;
  task.seed = seed;
  task.table = kravchuk_table(k);
  if (hidden) {
    std::vector<int> set = *hidden;
    std::sort(set.begin(), set.end());
    if (static_cast<int>(set.size()) != k || std::adjacent_find(set.begin(), set.end()) != set.end() ||
        set.front() < 0 || set.back() >= d)
      throw ConfigError("hidden set must contain k distinct coordinates in [0, d)");
    task.hidden = std::move(set);
  } else {
    std::vector<int> coords(static_cast<std::size_t>(d));
    std::iota(coords.begin(), coords.end(), 0);
    std::mt19937_64 rng(split_seed(seed, 0));
    for (int i = 0; i < k; ++i) {
      const auto span = static_cast<std::uint64_t>(d - i);
      const int pick = i + static_cast<int>(rng() % span);
      std::swap(coords[static_cast<std::size_t>(i)], coords[static_cast<std::size_t>(pick)]);
    }
    task.hidden.assign(coords.begin(), coords.begin() + k);
    std::sort(task.hidden.begin(), task.hidden.end());
  }
  return task;
}

double KravchukTask::hidden_sum(const Vector& x) const {
  double s = 0.0;
  for (int i : hidden) s += x(i);
  return s;
}

Vector target_h(const KravchukTask& task, const Vector& x) {
  if (x.size() != task.d) throw DimError("target_h: input dimension mismatch");
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x(i) != 1.0 && x(i) != -1.0) throw InvalidInput("target_h: inputs must be ±1");
  const double s = task.hidden_sum(x);
  Vector out(task.output_dim());
  for (int j = 0; j <= task.k / 2; ++j) out(j) = task.table.evaluate(2 * j, s);
  return out;
}

LabeledDataset sample_dataset(const KravchukTask& task, Eigen::Index m, std::uint64_t seed) {
  if (m < 1) throw InvalidInput("sample_dataset: m must be >= 1");
  std::mt19937_64 rng(seed);
  LabeledDataset data;
  data.inputs.resize(m, task.d);
  data.targets.resize(m, task.output_dim());
  for (Eigen::Index i = 0; i < m; ++i) {
    for (int j = 0; j < task.d; ++j) data.inputs(i, j) = (rng() >> 63) ? 1.0 : -1.0;
    data.targets.row(i) = target_h(task, data.inputs.row(i).transpose()).transpose();
  }
  return data;
}

double ProductDecomposition::evaluate(const KravchukTable& table, double x) const {
  double total = 0.0;
  for (const auto& [jl, alpha] : coefficients) total += alpha * table.evaluate(jl.first, x) * table.evaluate(jl.second, x);
  return total;
}

double ProductDecomposition::max_abs_coefficient() const {
  double best = 0.0;
  for (const auto& entry : coefficients) best = std::max(best, std::abs(entry.second));
  return best;
}

bool in_product_index_set(int i, int j, int l) {
  if (i < 0 || j < 0 || l < 0 || j + l > i) return false;
  int power = 1;
  while (2 * power < i) power *= 2;
  const int cap = std::max(2, power);
  if (j > cap || l > cap) return false;
  if (i % 2 == 0) return j <= l && j % 2 == 0 && l % 2 == 0;
  return j % 2 == 1 && l % 2 == 0;
}

namespace {

std::pair<int, int> canonical_pair(int degree, int j, int l) {
  if (degree % 2 == 0) return {std::min(j, l), std::max(j, l)};
  return j % 2 == 1 ? std::make_pair(j, l) : std::make_pair(l, j);
}

}  // namespace

ProductDecomposition product_decompose(const KravchukTable& table, int i) {
  const int k = table.k;
  if (i < 0 || i > k) throw InvalidInput("product_decompose: degree out of range");
  ProductDecomposition prev{0, {{{0, 0}, 1.0}}};
  if (i == 0) return prev;
  ProductDecomposition cur{1, {{{1, 0}, 1.0}}};
  for (int n = 1; n < i; ++n) {
    // p_{n+1} = (x p_n - √(n(k-n+1)) p_{n-1}) / √((n+1)(k-n)), with x p_j
    // expanded through the recursion on the first factor of each pair.
    const double norm = std::sqrt(static_cast<double>((n + 1) * (k - n)));
    const double back = std::sqrt(static_cast<double>(n * (k - n + 1)));
    ProductDecomposition next{n + 1, {}};
    for (const auto& [jl, alpha] : cur.coefficients) {
      const auto [j, l] = jl;
      const double up_coef = std::sqrt(static_cast<double>((j + 1) * (k - j)));
      const double down_coef = std::sqrt(static_cast<double>(j * (k - j + 1)));
      if (up_coef != 0.0) next.coefficients[canonical_pair(n + 1, j + 1, l)] += alpha * up_coef / norm;
      if (down_coef != 0.0) next.coefficients[canonical_pair(n + 1, j - 1, l)] += alpha * down_coef / norm;
    }
    for (const auto& [jl, alpha] : prev.coefficients)
      next.coefficients[canonical_pair(n + 1, jl.first, jl.second)] -= alpha * back / norm;
    std::erase_if(next.coefficients, [](const auto& entry) { return std::abs(entry.second) < 1e-13; });
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

}  // namespace redex
