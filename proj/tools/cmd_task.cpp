#include <cmath>
#include <iostream>
#include <memory>
#include <set>

#include "redex/errors.hpp"
#include "redex/io.hpp"
#include "redex/kravchuk.hpp"
#include "run_context.hpp"

namespace redex::cli {

namespace {

struct TaskOptions {
  int d = 12;
  int k = 4;
  int m = 4000;
  int m_test = 4000;
  std::uint64_t seed = 1;
  std::string hidden;
  std::string out_dir = "redex-task";
};

std::size_t shared_rows(const Matrix& a, const Matrix& b) {
  std::set<std::vector<double>> seen;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const Vector row = a.row(i).transpose();
    seen.insert(std::vector<double>(row.data(), row.data() + row.size()));
  }
  std::set<std::vector<double>> hit;
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    const Vector row = b.row(i).transpose();
    std::vector<double> key(row.data(), row.data() + row.size());
    if (seen.count(key)) hit.insert(std::move(key));
  }
  return hit.size();
}

int run_gen_task(const TaskOptions& o, const OptionSet& options) {
  if (o.m < 1 || o.m_test < 1) throw ConfigError("--m and --m-test must be >= 1");
  std::optional<std::vector<int>> hidden;
  if (!o.hidden.empty()) {
    hidden.emplace();
    for (long v : parse_int_list(o.hidden, "--hidden")) hidden->push_back(static_cast<int>(v));
  }
  const KravchukTask task = KravchukTask::make(o.d, o.k, o.seed, hidden);
  RunContext ctx("gen-task", o.out_dir);
  const LabeledDataset train = sample_dataset(task, o.m, split_seed(o.seed, 1));
  const LabeledDataset test = sample_dataset(task, o.m_test, split_seed(o.seed, 2));

  ctx.write_artifact("task.json", task_to_json(task));
  ctx.write_artifact("train.csv", dataset_csv(train));
  ctx.write_artifact("test.csv", dataset_csv(test));

  // Union bound over train/test pairs for the chance that any row is shared.
  const double pairs = static_cast<double>(o.m) * static_cast<double>(o.m_test) / std::ldexp(1.0, o.d);
  const double bound = std::min(1.0, pairs);
  const std::size_t shared = shared_rows(train.inputs, test.inputs);
  std::string hidden_text;
  for (std::size_t i = 0; i < task.hidden.size(); ++i) hidden_text += (i ? " " : "") + std::to_string(task.hidden[i]);
  const std::vector<std::pair<std::string, std::string>> rows{
      {"d", std::to_string(task.d)},
      {"k", std::to_string(task.k)},
      {"hidden", hidden_text},
      {"m_train", std::to_string(o.m)},
      {"m_test", std::to_string(o.m_test)},
      {"expected_shared_pairs", format_real(pairs)},
      {"shared_row_probability_bound", format_real(bound)},
      {"shared_distinct_rows", std::to_string(shared)},
  };
  ctx.write_artifact("metrics.csv", quantity_csv(rows));
  ctx.metric("hidden", task.hidden);
  ctx.metric("shared_row_probability_bound", bound);
  ctx.metric("shared_distinct_rows", shared);

  std::vector<std::vector<std::string>> table{{"quantity", "value"}};
  for (const auto& [k, v] : rows) table.push_back({k, v});
  print_table(table);
  ctx.finish(options, kExitOk);
  return kExitOk;
}

}  // namespace

Runner add_gen_task(CLI::App& app) {
  auto* sub = app.add_subcommand("gen-task", "sample a hidden-subset Kravchuk task with train/test splits");
  auto o = std::make_shared<TaskOptions>();
  auto options = std::make_shared<OptionSet>(sub);
  options->add("--d", o->d, "input dimension");
  options->add("--k", o->k, "hidden subset size (even)");
  options->add("--m", o->m, "training samples");
  options->add("--m-test", o->m_test, "test samples");
  options->add("--seed", o->seed, "seed for the hidden set and the samples");
  options->add("--hidden", o->hidden, "comma-separated 0-based hidden coordinates (default: drawn from --seed)");
  options->add("--out-dir", o->out_dir, "output directory");
  return [o, options] { return run_gen_task(*o, *options); };
}

}  // namespace redex::cli
