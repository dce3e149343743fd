#include <algorithm>
#include <iostream>
#include <set>
#include <sstream>

#include "redex/errors.hpp"
#include "redex/io.hpp"
#include "run_context.hpp"

namespace {

using redex::cli::kExitBudget;
using redex::cli::kExitError;
using redex::cli::kExitOk;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

/// Option names the user passed explicitly (without dashes).
std::set<std::string> given_keys(const std::vector<std::string>& args) {
  std::set<std::string> keys;
  for (const auto& a : args)
    if (a.rfind("--", 0) == 0) keys.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  return keys;
}

/// `key = value` lines; blank lines and `#` comments are ignored.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(redex::read_text_file(path));
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw redex::ConfigError(path + ": line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    if (key.empty()) throw redex::ConfigError(path + ": line " + std::to_string(line_no) + ": empty key");
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

/// Puts `--key=value` for every entry the user did not override in front of
/// the user's own arguments, so flags win over the file.
std::vector<std::string> merge(const std::vector<std::pair<std::string, std::string>>& entries,
                               const std::vector<std::string>& user) {
  const std::set<std::string> keys = given_keys(user);
  std::vector<std::string> out;
  for (const auto& [k, v] : entries)
    if (!keys.count(k) && !v.empty()) out.push_back("--" + k + "=" + v);
  out.insert(out.end(), user.begin(), user.end());
  return out;
}

/// Expands `--config FILE` and `rerun MANIFEST` into plain arguments.
std::vector<std::string> expand(std::vector<std::string> args) {
  if (!args.empty() && args.front() == "rerun" && !(args.size() >= 2 && (args[1] == "--help" || args[1] == "-h"))) {
    if (args.size() < 2) throw redex::ConfigError("rerun needs a manifest path");
    nlohmann::json manifest;
    try {
      manifest = nlohmann::json::parse(redex::read_text_file(args[1]));
    } catch (const nlohmann::json::exception& e) {
      throw redex::InvalidInput(args[1] + ": " + e.what());
    }
    if (!manifest.contains("command") || !manifest.contains("config"))
      throw redex::InvalidInput(args[1] + ": not a run manifest");
    std::vector<std::pair<std::string, std::string>> entries;
    for (const auto& [k, v] : manifest["config"].items()) entries.emplace_back(k, v.get<std::string>());
    std::vector<std::string> out{manifest["command"].get<std::string>()};
    const auto rest = merge(entries, {args.begin() + 2, args.end()});
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
  }
  for (std::size_t i = 1; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
    } else {
      continue;
    }
    std::vector<std::string> out{args.front()};
    const auto rest = merge(read_config(path), {args.begin() + 1, args.end()});
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RedEx: training, task generation, baselines and circuit compilation"};
  app.require_subcommand(1);
  app.footer(
      "Every command accepts --config FILE (key = value lines; flags win) and writes manifest.json.\n"
      "`redex rerun DIR/manifest.json [--out-dir NEW]` replays a run from its manifest.\n"
      "Exit codes: 0 ok, 1 configuration or data error, 2 iteration budget exhausted.\n"
      "REDEX_THREADS caps worker threads.");
  std::vector<std::pair<CLI::App*, redex::cli::Runner>> commands;
  auto reg = [&](redex::cli::Runner runner, const std::string& name) {
    commands.emplace_back(app.get_subcommand(name), std::move(runner));
  };
  reg(redex::cli::add_train(app), "train");
  reg(redex::cli::add_gen_task(app), "gen-task");
  reg(redex::cli::add_separation(app), "separation");
  reg(redex::cli::add_compile_circuit(app), "compile-circuit");
  reg(redex::cli::add_norm(app), "norm");
  reg(redex::cli::add_eval(app), "eval");
  app.add_subcommand("rerun", "replay a run from its manifest.json")->allow_extras();

  try {
    std::vector<std::string> args = expand({argv + 1, argv + argc});
    std::reverse(args.begin(), args.end());
    app.parse(args);
    for (auto& [sub, runner] : commands)
      if (sub->parsed()) return runner();
    return kExitError;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  } catch (const redex::SolverBudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const redex::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitOk;
}
