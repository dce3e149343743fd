#include "run_context.hpp"

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "redex/errors.hpp"
#include "redex/io.hpp"
#include "redex/kravchuk.hpp"

namespace redex::cli {

namespace {

std::string bare(const std::string& name) {
  const std::string first = name.substr(0, name.find(','));
  return first.substr(first.find_first_not_of('-'));
}

}  // namespace

CLI::Option* OptionSet::add(const std::string& name, double& value, const std::string& help) {
  render_.emplace_back(bare(name), [&value] { return format_real(value); });
  return app_->add_option(name, value, help)->capture_default_str();
}

CLI::Option* OptionSet::add(const std::string& name, int& value, const std::string& help) {
  render_.emplace_back(bare(name), [&value] { return std::to_string(value); });
  return app_->add_option(name, value, help)->capture_default_str();
}

CLI::Option* OptionSet::add(const std::string& name, std::uint64_t& value, const std::string& help) {
  render_.emplace_back(bare(name), [&value] { return std::to_string(value); });
  return app_->add_option(name, value, help)->capture_default_str();
}

CLI::Option* OptionSet::add(const std::string& name, std::string& value, const std::string& help) {
  render_.emplace_back(bare(name), [&value] { return value; });
  return app_->add_option(name, value, help)->capture_default_str();
}

CLI::Option* OptionSet::flag(const std::string& name, bool& value, const std::string& help) {
  render_.emplace_back(bare(name), [&value] { return std::string(value ? "true" : "false"); });
  return app_->add_flag(name, value, help);
}

std::vector<std::pair<std::string, std::string>> OptionSet::snapshot() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [name, render] : render_) out.emplace_back(name, render());
  return out;
}

RunContext::RunContext(std::string command, std::string out_dir)
    : command_(std::move(command)), out_dir_(std::move(out_dir)), start_(std::chrono::steady_clock::now()) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir_, ec);
  if (ec) throw InvalidInput("cannot create output directory '" + out_dir_ + "': " + ec.message());
}

std::string RunContext::path(const std::string& name) const { return (std::filesystem::path(out_dir_) / name).string(); }

void RunContext::write_artifact(const std::string& name, const std::string& content) {
  write_text_file(path(name), content);
  artifacts_.push_back(name);
}

void RunContext::finish(const OptionSet& options, int exit_code) {
  nlohmann::ordered_json manifest;
  manifest["command"] = command_;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  nlohmann::ordered_json seeds = nlohmann::ordered_json::object();
  for (const auto& [key, value] : options.snapshot()) {
    config[key] = value;
    if (key.find("seed") != std::string::npos) seeds[key] = value;
  }
  manifest["config"] = config;
  manifest["seeds"] = seeds;
  manifest["threads"] = std::getenv("REDEX_THREADS") ? std::getenv("REDEX_THREADS") : "";
  manifest["artifacts"] = artifacts_;
  manifest["metrics"] = metrics_;
  if (!notes_.empty()) manifest["notes"] = notes_;
  manifest["exit_code"] = exit_code;
  manifest["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  write_text_file(path("manifest.json"), manifest.dump(2) + "\n");
}

std::vector<double> parse_real_list(const std::string& text, const std::string& option) {
  std::vector<double> out;
  for (const auto& word : parse_word_list(text)) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(word, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != word.size()) throw ConfigError(option + ": '" + word + "' is not a number");
    out.push_back(v);
  }
  return out;
}

std::vector<long> parse_int_list(const std::string& text, const std::string& option) {
  std::vector<long> out;
  for (const auto& word : parse_word_list(text)) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(word, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != word.size()) throw ConfigError(option + ": '" + word + "' is not an integer");
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> parse_word_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string word; std::getline(ss, word, ',');) {
    const auto b = word.find_first_not_of(' ');
    const auto e = word.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(word.substr(b, e - b + 1));
  }
  return out;
}

void print_table(const std::vector<std::vector<std::string>>& rows) {
  if (rows.empty()) return;
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size() && c < width.size(); ++c)
      std::cout << std::left << std::setw(static_cast<int>(width[c]) + 2) << rows[i][c];
    std::cout << "\n";
    if (i == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w + 2;
      std::cout << std::string(total, '-') << "\n";
    }
  }
}

}  // namespace redex::cli

namespace redex::cli {

void DataSource::add_to(OptionSet& options) {
  options.add("--data", data, "training CSV (x_*, y_* columns)");
  options.add("--test", test, "held-out CSV");
  options.add("--task", task, "task spec JSON, sampled instead of --data");
  options.add("--m", m, "training samples drawn from --task");
  options.add("--m-test", m_test, "test samples drawn from --task");
  options.add("--seed", seed, "data seed for --task");
}

std::pair<LabeledDataset, std::optional<LabeledDataset>> DataSource::load() const {
  if (!data.empty()) {
    LabeledDataset train = read_dataset(data);
    std::optional<LabeledDataset> held;
    if (!test.empty()) held = read_dataset(test);
    return {std::move(train), std::move(held)};
  }
  if (task.empty()) throw ConfigError("one of --data or --task is required");
  if (m < 1 || m_test < 0) throw ConfigError("--m must be >= 1 and --m-test >= 0");
  const KravchukTask spec = task_from_json(read_text_file(task));
  std::optional<LabeledDataset> held;
  if (m_test > 0) held = sample_dataset(spec, m_test, split_seed(seed, 2));
  return {sample_dataset(spec, m, split_seed(seed, 1)), std::move(held)};
}

std::string eval_csv(const std::vector<std::pair<std::string, EvalReport>>& reports) {
  std::string out = "split,coord,loss\n";
  for (const auto& [split, report] : reports) {
    out += split + ",mean," + format_real(report.mean_loss) + "\n";
    for (Eigen::Index c = 0; c < report.per_coordinate_loss.size(); ++c)
      out += split + "," + std::to_string(c) + "," + format_real(report.per_coordinate_loss(c)) + "\n";
  }
  return out;
}

std::string solver_csv(const std::vector<SolverReport>& reports) {
  std::string out = "layer,converged,iters,objective,primal_residual,constraint_residual\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    out += std::to_string(i + 1) + "," + (r.converged ? "true" : "false") + "," + std::to_string(r.iters_used) + "," +
           format_real(r.objective) + "," + format_real(r.primal_residual) + "," + format_real(r.constraint_residual) +
           "\n";
  }
  return out;
}

std::string quantity_csv(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::string out = "quantity,value\n";
  for (const auto& [k, v] : rows) out += k + "," + v + "\n";
  return out;
}

}  // namespace redex::cli
