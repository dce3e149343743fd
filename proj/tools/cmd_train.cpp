#include <iostream>
#include <memory>

#include "redex/conv.hpp"
#include "redex/errors.hpp"
#include "redex/io.hpp"
#include "redex/layerwise.hpp"
#include "redex/prox.hpp"
#include "redex/sdp.hpp"
#include "run_context.hpp"

namespace redex::cli {

namespace {

struct TrainOptions {
  std::string mode = "sdp";
  DataSource source;
  std::string out_dir = "redex-train";
  std::string loss = "square";
  double huber_delta = 1.0;
  double width = 1.0;
  double reg = 0.0;
  double trace_penalty = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  int max_iters = 20000;
  double tol = 1e-6;
  double rho = 1.0;
  std::string span = "auto";
  int layers = 1;
  std::string widths;
  std::string regs;
  double constant = kDefaultConstant;
  bool fresh_split = false;
  double prune_eps = 1e-6;
  double eps = kDefaultCompactEps;
};

SpanRestriction parse_span(const std::string& s) {
  if (s == "auto") return SpanRestriction::Auto;
  if (s == "on") return SpanRestriction::On;
  if (s == "off") return SpanRestriction::Off;
  throw ConfigError("--span must be auto, on or off");
}

std::vector<double> per_layer(const std::string& text, double fallback, int layers, const std::string& name) {
  std::vector<double> values = parse_real_list(text, name);
  if (values.empty()) values.assign(static_cast<std::size_t>(layers), fallback);
  if (values.size() == 1) values.resize(static_cast<std::size_t>(layers), values.front());
  if (static_cast<int>(values.size()) != layers) throw ConfigError(name + ": expected one value per layer");
  return values;
}

int run_train(const TrainOptions& o, const OptionSet& options) {
  RunContext ctx("train", o.out_dir);
  const auto [train, test] = o.source.load();

  TrainConfig cfg;
  cfg.width = o.width;
  cfg.reg = o.reg;
  cfg.trace_penalty = o.trace_penalty;
  cfg.loss = LossSpec{o.loss, o.huber_delta};
  cfg.max_iters = o.max_iters;
  cfg.tol = o.tol;
  cfg.rho = o.rho;
  cfg.restrict_to_data_span = parse_span(o.span);

  AnyModel model;
  std::vector<SolverReport> reports;
  std::vector<std::pair<std::string, EvalReport>> evals;
  auto score = [&](const auto& fitted) {
    evals.emplace_back("train", evaluate(fitted, train, cfg.loss));
    if (test) evals.emplace_back("test", evaluate(fitted, *test, cfg.loss));
  };

  if (o.mode == "sdp") {
    auto [alt, report] = solve_single_layer(train, cfg);
    RedExLayer layer = recover_extractor(alt, o.eps);
    reports.push_back(std::move(report));
    score(layer);
    model = std::move(layer);
  } else if (o.mode == "prox1d") {
    ProxConfig pc;
    pc.l1 = o.l1;
    pc.l2 = o.l2;
    pc.max_iters = o.max_iters;
    pc.tol = o.tol;
    pc.loss = cfg.loss;
    auto [a, report] = solve_one_dim(train, pc);
    RedExLayer layer = recover_one_dim(a, o.eps);
    reports.push_back(std::move(report));
    score(layer);
    model = std::move(layer);
  } else if (o.mode == "conv") {
    cfg.cap_trace = false;
    auto [alt, report] = solve_conv_layer(train, o.l1, o.l2, cfg);
    ConvRedExLayer layer = recover_conv(alt, o.eps);
    reports.push_back(std::move(report));
    score(layer);
    model = std::move(layer);
  } else if (o.mode == "layerwise") {
    LayerwiseConfig lc;
    if (o.layers < 1) throw ConfigError("--layers must be >= 1");
    lc.layers = o.layers;
    lc.widths = per_layer(o.widths, o.width, o.layers, "--widths");
    lc.regs = per_layer(o.regs, o.reg, o.layers, "--regs");
    lc.constant = o.constant;
    lc.fresh_split = o.fresh_split;
    lc.prune_eps = o.prune_eps;
    LayerwiseResult result = train_multilayer(train, lc, cfg);
    reports = std::move(result.reports);
    score(result.model);
    for (std::size_t t = 0; t < result.train_loss.size(); ++t)
      ctx.metric("layer" + std::to_string(t + 1) + "_train_loss", result.train_loss[t]);
    model = std::move(result.model);
  } else {
    throw ConfigError("--mode must be sdp, prox1d, layerwise or conv");
  }

  ctx.write_artifact("model.json", model_to_json(model));
  std::string report_json = "[\n";
  for (std::size_t i = 0; i < reports.size(); ++i) report_json += (i ? ",\n" : "") + to_json(reports[i]);
  ctx.write_artifact("reports.json", report_json + "\n]\n");
  ctx.write_artifact("solver.csv", solver_csv(reports));
  ctx.write_artifact("metrics.csv", eval_csv(evals));

  bool converged = true;
  for (const auto& r : reports) converged = converged && r.converged;
  std::vector<std::vector<std::string>> table{{"split", "coord", "loss"}};
  for (const auto& [split, ev] : evals) {
    table.push_back({split, "mean", format_real(ev.mean_loss)});
    ctx.metric(split + "_loss", ev.mean_loss);
    for (Eigen::Index c = 0; c < ev.per_coordinate_loss.size(); ++c)
      table.push_back({split, std::to_string(c), format_real(ev.per_coordinate_loss(c))});
  }
  print_table(table);
  for (std::size_t i = 0; i < reports.size(); ++i)
    std::cout << "layer " << i + 1 << ": " << (reports[i].converged ? "converged" : "NOT converged") << " after "
              << reports[i].iters_used << " iterations, constraint residual "
              << format_real(reports[i].constraint_residual) << "\n";
  ctx.metric("converged", converged);

  const int code = converged ? kExitOk : kExitBudget;
  if (!converged) std::cerr << "warning: iteration budget exhausted before convergence\n";
  ctx.finish(options, code);
  return code;
}

}  // namespace

Runner add_train(CLI::App& app) {
  auto* sub = app.add_subcommand("train", "train a RedEx model (sdp, prox1d, layerwise, conv)");
  auto o = std::make_shared<TrainOptions>();
  auto options = std::make_shared<OptionSet>(sub);
  options->add("--mode", o->mode, "sdp | prox1d | layerwise | conv");
  o->source.add_to(*options);
  options->add("--out-dir", o->out_dir, "output directory");
  options->add("--loss", o->loss, "square | huber");
  options->add("--huber-delta", o->huber_delta, "Huber transition point");
  options->add("--width", o->width, "trace cap M (sdp, default for layerwise)");
  options->add("--reg", o->reg, "Frobenius regularization (sdp, default for layerwise)");
  options->add("--trace-penalty", o->trace_penalty, "penalty on Tr(R) (sdp)");
  options->add("--l1", o->l1, "trace-norm weight (prox1d, conv)");
  options->add("--l2", o->l2, "Frobenius weight (prox1d, conv)");
  options->add("--max-iters", o->max_iters, "iteration budget per solve");
  options->add("--tol", o->tol, "stopping tolerance");
  options->add("--rho", o->rho, "initial ADMM penalty");
  options->add("--span", o->span, "restrict to data span: auto | on | off");
  options->add("--layers", o->layers, "number of layers (layerwise)");
  options->add("--widths", o->widths, "comma-separated M_t (layerwise)");
  options->add("--regs", o->regs, "comma-separated lambda_t (layerwise)");
  options->add("--constant", o->constant, "constant coordinate c (layerwise)");
  options->flag("--fresh-split", o->fresh_split, "train each layer on its own fold (layerwise)");
  options->add("--prune-eps", o->prune_eps, "drop extractor rows with norm <= eps (layerwise)");
  options->add("--eps", o->eps, "eigenvalue threshold for recovery");
  return [o, options] { return run_train(*o, *options); };
}

}  // namespace redex::cli
