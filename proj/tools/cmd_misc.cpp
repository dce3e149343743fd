#include <iostream>
#include <memory>

#include "redex/circuit.hpp"
#include "redex/errors.hpp"
#include "redex/io.hpp"
#include "redex/norm.hpp"
#include "run_context.hpp"

namespace redex::cli {

namespace {

struct CircuitOptions {
  std::string netlist;
  std::string out_dir = "redex-circuit";
};

struct NormOptions {
  std::string matrices;
  double tol = 1e-9;
  int max_iters = 200000;
  bool iterative = false;
  std::string out_dir = "redex-norm";
};

struct EvalOptions {
  std::string model;
  std::string data;
  std::string loss = "square";
  double huber_delta = 1.0;
  std::string out_dir = "redex-eval";
};

void print_quantities(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::vector<std::vector<std::string>> table{{"quantity", "value"}};
  for (const auto& [k, v] : rows) table.push_back({k, v});
  print_table(table);
}

int run_compile(const CircuitOptions& o, const OptionSet& options) {
  const Circuit circuit = parse_circuit(read_text_file(o.netlist));
  RunContext ctx("compile-circuit", o.out_dir);
  const CompiledCircuit compiled = compile_circuit(circuit);
  ctx.write_artifact("model.json", model_to_json(compiled.model));

  std::string verdict = "skipped";
  if (circuit.inputs <= 16) verdict = verify_compilation(circuit, compiled.model) ? "pass" : "fail";
  const std::vector<std::pair<std::string, std::string>> rows{
      {"inputs", std::to_string(circuit.inputs)},
      {"gates", std::to_string(circuit.size())},
      {"depth", std::to_string(compiled.depth)},
      {"max_width", std::to_string(compiled.max_width)},
      {"alpha", format_real(compiled.alpha)},
      {"beta", format_real(compiled.beta)},
      {"verification", verdict},
  };
  ctx.write_artifact("metrics.csv", quantity_csv(rows));
  ctx.metric("verification", verdict);
  ctx.metric("depth", compiled.depth);
  ctx.metric("max_width", compiled.max_width);
  print_quantities(rows);
  std::cout << "verification: " << verdict << "\n";

  const int code = verdict == "fail" ? kExitError : kExitOk;
  if (verdict == "fail") std::cerr << "error: compiled model disagrees with the circuit\n";
  ctx.finish(options, code);
  return code;
}

std::string matrix_json(const SymMatrix& s) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < s.dim(); ++i) {
    out += i ? ",\n " : "";
    out += "[";
    for (Eigen::Index j = 0; j < s.dim(); ++j) out += (j ? ", " : "") + format_real(s(i, j));
    out += "]";
  }
  return out + "]\n";
}

int run_norm(const NormOptions& o, const OptionSet& options) {
  const std::vector<SymMatrix> heads = matrices_from_json(read_text_file(o.matrices));
  if (heads.empty()) throw InvalidInput("no matrices in " + o.matrices);
  RunContext ctx("norm", o.out_dir);

  NormResult result;
  int code = kExitOk;
  std::string method = "splitting";
  if (heads.size() == 1 && !o.iterative) {
    result = trace_norm_k1(heads.front());
    method = "closed-form";
  } else {
    try {
      result = redex_norm(heads, o.tol, o.max_iters);
    } catch (const SolverBudgetExceeded& e) {
      std::cerr << "warning: " << e.what() << "\n";
      result.value = e.best_value();
      result.report.converged = false;
      code = kExitBudget;
    }
  }
  double lower = 0.0;
  for (const auto& a : heads) lower = std::max(lower, trace_norm(a));
  const std::vector<std::pair<std::string, std::string>> rows{
      {"value", format_real(result.value)},
      {"k", std::to_string(heads.size())},
      {"dim", std::to_string(heads.front().dim())},
      {"method", method},
      {"trace_norm_lower_bound", format_real(lower)},
      {"iters", std::to_string(result.report.iters_used)},
      {"converged", code == kExitOk ? "true" : "false"},
  };
  ctx.write_artifact("metrics.csv", quantity_csv(rows));
  if (code == kExitOk) ctx.write_artifact("witness.json", matrix_json(result.witness));
  ctx.metric("value", result.value);
  print_quantities(rows);
  ctx.finish(options, code);
  return code;
}

int run_eval(const EvalOptions& o, const OptionSet& options) {
  if (o.model.empty() || o.data.empty()) throw ConfigError("--model and --data are required");
  const AnyModel model = read_model(o.model);
  const LabeledDataset data = read_dataset(o.data);
  if (model_input_dim(model) != data.input_dim())
    throw DimError("model expects inputs of dimension " + std::to_string(model_input_dim(model)) + ", data has " +
                   std::to_string(data.input_dim()));
  RunContext ctx("eval", o.out_dir);
  const EvalReport report = evaluate(make_predictor(model), data, LossSpec{o.loss, o.huber_delta});
  ctx.write_artifact("metrics.csv", eval_csv({{"eval", report}}));
  ctx.metric("eval_loss", report.mean_loss);
  std::vector<std::vector<std::string>> table{{"coord", "loss"}, {"mean", format_real(report.mean_loss)}};
  for (Eigen::Index c = 0; c < report.per_coordinate_loss.size(); ++c)
    table.push_back({std::to_string(c), format_real(report.per_coordinate_loss(c))});
  print_table(table);
  ctx.finish(options, kExitOk);
  return kExitOk;
}

}  // namespace

Runner add_compile_circuit(CLI::App& app) {
  auto* sub = app.add_subcommand("compile-circuit", "compile a boolean netlist into a multilayer RedEx model");
  auto o = std::make_shared<CircuitOptions>();
  auto options = std::make_shared<OptionSet>(sub);
  options->add("netlist,--netlist", o->netlist, "netlist file")->required();
  options->add("--out-dir", o->out_dir, "output directory");
  return [o, options] { return run_compile(*o, *options); };
}

Runner add_norm(CLI::App& app) {
  auto* sub = app.add_subcommand("norm", "compute the RedEx norm of a tuple of symmetric matrices");
  auto o = std::make_shared<NormOptions>();
  auto options = std::make_shared<OptionSet>(sub);
  options->add("matrices,--matrices", o->matrices, "JSON file with one matrix or a list of matrices")->required();
  options->add("--tol", o->tol, "solver tolerance");
  options->add("--max-iters", o->max_iters, "iteration budget");
  options->flag("--iterative", o->iterative, "use the solver even for a single matrix");
  options->add("--out-dir", o->out_dir, "output directory");
  return [o, options] { return run_norm(*o, *options); };
}

Runner add_eval(CLI::App& app) {
  auto* sub = app.add_subcommand("eval", "evaluate a saved model on a dataset");
  auto o = std::make_shared<EvalOptions>();
  auto options = std::make_shared<OptionSet>(sub);
  options->add("--model", o->model, "model JSON");
  options->add("--data", o->data, "dataset CSV");
  options->add("--loss", o->loss, "square | huber");
  options->add("--huber-delta", o->huber_delta, "Huber transition point");
  options->add("--out-dir", o->out_dir, "output directory");
  return [o, options] { return run_eval(*o, *options); };
}

}  // namespace redex::cli
