#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <memory>

#include "redex/baseline.hpp"
#include "redex/errors.hpp"
#include "redex/io.hpp"
#include "redex/kravchuk.hpp"
#include "redex/layerwise.hpp"
#include "redex/sdp.hpp"
#include "run_context.hpp"

namespace redex::cli {

namespace {

struct SeparationOptions {
  std::string task;
  int d = 12;
  int k = 4;
  std::uint64_t seed = 7;
  int m = 4000;
  int m_test = 4000;
  int layers = 2;
  std::string widths;
  double later_width = 20.0;
  std::string regs;
  double first_reg = 1e-3;
  double later_reg = 1e-4;
  double constant = kDefaultConstant;
  bool fresh_split = false;
  double prune_eps = 0.1;
  int max_iters = 20000;
  double tol = 1e-6;
  std::string families = "relu,cos,monomial2";
  std::string budgets = "100,500,2000";
  std::string lambdas = "1e-4,1e-3,1e-2,1e-1";
  std::string baseline_seeds = "1";
  std::string out_dir = "redex-separation";
};

SweepGrid make_grid(const SeparationOptions& o) {
  SweepGrid grid;
  grid.families = parse_word_list(o.families);
  grid.budgets.clear();
  for (long n : parse_int_list(o.budgets, "--budgets")) grid.budgets.push_back(n);
  grid.lambdas = parse_real_list(o.lambdas, "--lambdas");
  grid.seeds.clear();
  for (long s : parse_int_list(o.baseline_seeds, "--baseline-seeds")) {
    if (s < 0) throw ConfigError("--baseline-seeds must be >= 0");
    grid.seeds.push_back(static_cast<std::uint64_t>(s));
  }
  if (grid.families.empty() || grid.budgets.empty() || grid.lambdas.empty() || grid.seeds.empty())
    throw ConfigError("baseline grid must not be empty");
  return grid;
}

int run_separation(const SeparationOptions& o, const OptionSet& options) {
  const KravchukTask task = o.task.empty() ? KravchukTask::make(o.d, o.k, o.seed)
                                           : task_from_json(read_text_file(o.task));
  if (o.m < 1 || o.m_test < 1) throw ConfigError("--m and --m-test must be >= 1");
  if (o.layers < 1) throw ConfigError("--layers must be >= 1");
  const SweepGrid grid = make_grid(o);
  RunContext ctx("separation", o.out_dir);

  const LabeledDataset train = sample_dataset(task, o.m, split_seed(o.seed, 1));
  const LabeledDataset test = sample_dataset(task, o.m_test, split_seed(o.seed, 2));
  const Eigen::Index parity = task.output_dim() - 1;

  const double m1_minus = 0.5 + 1.0 / std::sqrt(2.0 - 2.0 / task.k);
  const double m1_plus = 0.5 + 1.0 / std::sqrt(2.0 + 2.0 / task.k);
  LayerwiseConfig lc;
  lc.layers = o.layers;
  lc.widths = parse_real_list(o.widths, "--widths");
  if (lc.widths.empty()) {
    lc.widths.assign(static_cast<std::size_t>(o.layers), o.later_width);
    lc.widths.front() = m1_minus;
  }
  lc.regs = parse_real_list(o.regs, "--regs");
  if (lc.regs.empty()) {
    lc.regs.assign(static_cast<std::size_t>(o.layers), o.later_reg);
    lc.regs.front() = o.first_reg;
  }
  if (static_cast<int>(lc.widths.size()) != o.layers || static_cast<int>(lc.regs.size()) != o.layers)
    throw ConfigError("--widths/--regs need one value per layer");
  lc.constant = o.constant;
  lc.fresh_split = o.fresh_split;
  lc.prune_eps = o.prune_eps;
  TrainConfig cfg;
  cfg.max_iters = o.max_iters;
  cfg.tol = o.tol;

  const LayerwiseResult result = train_multilayer(train, lc, cfg);
  const EvalReport redex_test = evaluate(result.model, test, LossSpec{});
  const std::vector<SweepRow> sweep = baseline_sweep(train, test, grid);

  // Mass of the first layer's R on coordinates outside the hidden set and the constant.
  const SymMatrix& r1 = result.layers.front().dominator;
  double off_support = 0.0;
  for (int j = 0; j < task.d; ++j)
    if (!std::binary_search(task.hidden.begin(), task.hidden.end(), j)) off_support += r1(j + 1, j + 1);

  std::string comparison = "method,coord,test_loss\n";
  std::vector<std::vector<std::string>> table{{"method", "coord", "test_loss"}};
  auto add = [&](const std::string& method, const std::string& coord, double loss) {
    comparison += method + "," + coord + "," + format_real(loss) + "\n";
    table.push_back({method, coord, format_real(loss)});
  };
  add("redex", "mean", redex_test.mean_loss);
  for (Eigen::Index c = 0; c < redex_test.per_coordinate_loss.size(); ++c)
    add("redex", std::to_string(c), redex_test.per_coordinate_loss(c));
  for (const auto& family : grid.families) {
    for (Eigen::Index c = 0; c < task.output_dim(); ++c) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& row : sweep)
        if (row.family == family && row.coord == c) best = std::min(best, row.test_loss);
      add("best_" + family, std::to_string(c), best);
    }
  }
  for (Eigen::Index c = 0; c < task.output_dim(); ++c) add("best_baseline", std::to_string(c), best_sweep_loss(sweep, c));

  double max_m1m2 = 0.0;
  for (const auto& row : sweep) max_m1m2 = std::max(max_m1m2, row.m1 * row.m2);
  std::string widths_text;
  for (auto n : result.model.widths()) widths_text += (widths_text.empty() ? "" : " ") + std::to_string(n);
  std::vector<std::pair<std::string, std::string>> diag{
      {"hidden", ""},
      {"parity_coord", std::to_string(parity)},
      {"redex_parity_test_loss", format_real(redex_test.per_coordinate_loss(parity))},
      {"baseline_parity_test_loss", format_real(best_sweep_loss(sweep, parity))},
      {"off_support_mass", format_real(off_support)},
      {"m1_constant_minus", format_real(m1_minus)},
      {"m1_constant_plus", format_real(m1_plus)},
      {"layer_widths", widths_text},
      {"baseline_max_m1_m2", format_real(max_m1m2)},
  };
  for (int j : task.hidden) diag[0].second += (diag[0].second.empty() ? "" : " ") + std::to_string(j);
  for (std::size_t t = 0; t < result.train_loss.size(); ++t) {
    diag.emplace_back("layer" + std::to_string(t + 1) + "_width_cap", format_real(lc.widths[t]));
    diag.emplace_back("layer" + std::to_string(t + 1) + "_reg", format_real(lc.regs[t]));
    diag.emplace_back("layer" + std::to_string(t + 1) + "_train_loss", format_real(result.train_loss[t]));
  }

  ctx.write_artifact("comparison.csv", comparison);
  ctx.write_artifact("sweep.csv", sweep_csv(sweep));
  ctx.write_artifact("diagnostics.csv", quantity_csv(diag));
  ctx.write_artifact("solver.csv", solver_csv(result.reports));
  ctx.write_artifact("model.json", model_to_json(result.model));

  bool converged = true;
  for (const auto& r : result.reports) converged = converged && r.converged;
  ctx.metric("redex_parity_test_loss", redex_test.per_coordinate_loss(parity));
  ctx.metric("baseline_parity_test_loss", best_sweep_loss(sweep, parity));
  ctx.metric("off_support_mass", off_support);
  ctx.metric("converged", converged);

  print_table(table);
  std::cout << "\n";
  std::vector<std::vector<std::string>> dtable{{"quantity", "value"}};
  for (const auto& [k, v] : diag) dtable.push_back({k, v});
  print_table(dtable);

  const int code = converged ? kExitOk : kExitBudget;
  if (!converged) std::cerr << "warning: iteration budget exhausted before convergence\n";
  ctx.finish(options, code);
  return code;
}

}  // namespace

Runner add_separation(CLI::App& app) {
  auto* sub = app.add_subcommand("separation", "layer-wise RedEx against fixed-representation baselines");
  auto o = std::make_shared<SeparationOptions>();
  auto options = std::make_shared<OptionSet>(sub);
  options->add("--task", o->task, "task spec JSON (default: drawn from --d, --k, --seed)");
  options->add("--d", o->d, "input dimension");
  options->add("--k", o->k, "hidden subset size (even)");
  options->add("--seed", o->seed, "task and data seed");
  options->add("--m", o->m, "training samples");
  options->add("--m-test", o->m_test, "test samples");
  options->add("--layers", o->layers, "RedEx depth");
  options->add("--widths", o->widths, "comma-separated M_t (default: first-layer constant, then --later-width)");
  options->add("--later-width", o->later_width, "M_t for layers after the first");
  options->add("--regs", o->regs, "comma-separated lambda_t (default: --first-reg, then --later-reg)");
  options->add("--first-reg", o->first_reg, "lambda_1");
  options->add("--later-reg", o->later_reg, "lambda_t for layers after the first");
  options->add("--constant", o->constant, "constant coordinate c");
  options->flag("--fresh-split", o->fresh_split, "train each layer on its own fold");
  options->add("--prune-eps", o->prune_eps, "drop extractor rows with norm <= eps");
  options->add("--max-iters", o->max_iters, "iteration budget per layer");
  options->add("--tol", o->tol, "solver tolerance");
  options->add("--families", o->families, "baseline feature families");
  options->add("--budgets", o->budgets, "baseline feature counts N");
  options->add("--lambdas", o->lambdas, "baseline ridge penalties");
  options->add("--baseline-seeds", o->baseline_seeds, "baseline feature seeds");
  options->add("--out-dir", o->out_dir, "output directory");
  return [o, options] { return run_separation(*o, *options); };
}

}  // namespace redex::cli
