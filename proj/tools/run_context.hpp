#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "redex/model.hpp"
#include "redex/solver_report.hpp"

namespace redex::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitBudget = 2;

/// Registers options on a subcommand and remembers how to render each bound
/// value back to text, so the manifest can replay the exact configuration.
class OptionSet {
 public:
  explicit OptionSet(CLI::App* app) : app_(app) {}

  CLI::Option* add(const std::string& name, double& value, const std::string& help);
  CLI::Option* add(const std::string& name, int& value, const std::string& help);
  CLI::Option* add(const std::string& name, std::uint64_t& value, const std::string& help);
  CLI::Option* add(const std::string& name, std::string& value, const std::string& help);
  CLI::Option* flag(const std::string& name, bool& value, const std::string& help);

  /// name (without dashes) -> rendered value, in registration order.
  std::vector<std::pair<std::string, std::string>> snapshot() const;
  CLI::App* app() const { return app_; }

 private:
  CLI::App* app_;
  std::vector<std::pair<std::string, std::function<std::string()>>> render_;
};

/// Collects artifacts and metrics of one command and writes its manifest.
class RunContext {
 public:
  RunContext(std::string command, std::string out_dir);

  const std::string& out_dir() const { return out_dir_; }
  std::string path(const std::string& name) const;

  /// Writes `content` to out_dir/name and records it as an artifact.
  void write_artifact(const std::string& name, const std::string& content);
  void metric(const std::string& key, const nlohmann::json& value) { metrics_[key] = value; }
  void note(const std::string& text) { notes_.push_back(text); }

  /// Writes manifest.json (config snapshot, seeds, artifacts, metrics).
  void finish(const OptionSet& options, int exit_code);

 private:
  std::string command_;
  std::string out_dir_;
  std::vector<std::string> artifacts_;
  nlohmann::json metrics_ = nlohmann::json::object();
  std::vector<std::string> notes_;
  std::chrono::steady_clock::time_point start_;
};

/// Where training data comes from: CSV files, or a task spec sampled with
/// streams 1 (train) and 2 (test) of --seed.
struct DataSource {
  std::string data;
  std::string test;
  std::string task;
  int m = 2000;
  int m_test = 2000;
  std::uint64_t seed = 1;

  void add_to(OptionSet& options);
  /// Throws ConfigError when neither --data nor --task is given.
  std::pair<LabeledDataset, std::optional<LabeledDataset>> load() const;
};

/// split,coord,loss with a "mean" row per split.
std::string eval_csv(const std::vector<std::pair<std::string, EvalReport>>& reports);
/// layer,converged,iters,objective,primal_residual,constraint_residual
std::string solver_csv(const std::vector<SolverReport>& reports);
/// quantity,value
std::string quantity_csv(const std::vector<std::pair<std::string, std::string>>& rows);

/// Comma-separated helpers for list-valued options.
std::vector<double> parse_real_list(const std::string& text, const std::string& option);
std::vector<long> parse_int_list(const std::string& text, const std::string& option);
std::vector<std::string> parse_word_list(const std::string& text);

/// Prints a fixed-width table (first row is the header).
void print_table(const std::vector<std::vector<std::string>>& rows);

// Command registration: each adds a subcommand and returns its runner.
using Runner = std::function<int()>;
Runner add_train(CLI::App& app);
Runner add_gen_task(CLI::App& app);
Runner add_separation(CLI::App& app);
Runner add_compile_circuit(CLI::App& app);
Runner add_norm(CLI::App& app);
Runner add_eval(CLI::App& app);

}  // namespace redex::cli
