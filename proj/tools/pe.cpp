// pe — possibilistic-evidence workbench.
//
//   pe eval <model.json> [--query NAME]... [--format json|csv] [--output PATH]
//   pe tabulate <model.json> --expr NAME [--format json|csv] [--output PATH]
//   pe check {<model.json> | --builtin} [--theorem SEL] [--seed N] [--trials N]
//            [--format json|csv] [--output PATH]
//
// Exit codes: 0 success, 1 check failures, 2 bad input.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "possev/cli.hpp"

namespace {

int deliver(const possev::cli::Outcome& outcome, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << outcome.text;
  } else {
    std::ofstream out(output_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << output_path << "\n";
      return 2;
    }
    out << outcome.text;
  }
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact-rational workbench for possibilistic bodies of evidence"};
  app.require_subcommand(1);

  std::string format_name = "json";
  std::string output_path;
  const auto add_io = [&](CLI::App* cmd) {
    cmd->add_option("--format", format_name, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--output", output_path, "write the result to PATH instead of stdout");
  };

  std::string model_path;
  std::vector<std::string> query_names;
  CLI::App* eval = app.add_subcommand("eval", "evaluate every query in a model");
  eval->add_option("model", model_path, "model file")->required();
  eval->add_option("--query", query_names, "restrict to queries on this expression");
  add_io(eval);

  std::string expr_name;
  CLI::App* tabulate =
      app.add_subcommand("tabulate", "print all functionals of one expression");
  tabulate->add_option("model", model_path, "model file")->required();
  tabulate->add_option("--expr", expr_name, "expression to tabulate")->required();
  add_io(tabulate);

  bool builtin = false;
  std::string theorem = "all";
  std::uint64_t seed = 1;
  int trials = 20;
  CLI::App* check = app.add_subcommand("check", "run the theorem checkers");
  check->add_option("model", model_path, "model file supplying the fuzzy subsets");
  check->add_flag("--builtin", builtin, "use the bundled check corpus instead of a model");
  check->add_option("--theorem", theorem,
                    "fundamental, operators, negation, bounds, dempster, or all");
  check->add_option("--seed", seed, "seed for randomized instances");
  check->add_option("--trials", trials, "random instances per deterministic one");
  add_io(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const possev::cli::Format format = possev::cli::parse_format(format_name);
    if (eval->parsed())
      return deliver(possev::cli::run_eval(possev::load_model(model_path), query_names, format),
                     output_path);
    if (tabulate->parsed())
      return deliver(
          possev::cli::run_tabulate(possev::load_model(model_path), expr_name, format),
          output_path);
    // check
    possev::require(builtin != !model_path.empty(), possev::errc::unknown_command,
                    "check needs a model file or --builtin, not both");
    const possev::cli::CheckSetup setup =
        builtin ? possev::cli::builtin_setup(seed)
                : possev::cli::setup_from_model(possev::load_model(model_path));
    return deliver(possev::cli::run_check(setup, theorem, seed, trials, format), output_path);
  } catch (const possev::Error& e) {
    std::cerr << "error [" << possev::errc_name(e.code()) << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
