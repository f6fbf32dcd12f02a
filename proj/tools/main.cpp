#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sumalloc/scenario.hpp"

namespace {

std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> values;
  if (text.empty()) return values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    values.push_back(std::stod(item));
  }
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Distributed sum-preserving resource allocation simulator: runs a "
      "scenario file through the configured gradient-exchange protocol and "
      "emits trajectory and certificate CSVs."};

  std::string scenario_path;
  std::string out_dir = ".";
  bool strict = false;
  bool quiet = false;
  std::optional<std::uint64_t> seed_override;
  std::vector<std::string> sweep_args;

  app.add_option("--scenario", scenario_path, "Scenario file (JSON)")->required();
  app.add_option("--out-dir", out_dir, "Directory for output CSVs");
  app.add_flag("--strict", strict, "Fail on any applicable certificate violation");
  app.add_option("--seed", seed_override, "Override the scenario seed");
  app.add_option("--sweep", sweep_args,
                 "Sweep a parameter: <param> <v1,v2,...> with param one of "
                 "q, eta, saturation, mu1, mu2, B")
      ->expected(2);
  app.add_flag("--quiet", quiet, "Suppress the per-run summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : sumalloc::exit_input_error;
  }

  sumalloc::Scenario scenario;
  try {
    scenario = sumalloc::load_scenario(scenario_path, seed_override);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sumalloc::exit_input_error;
  }

  sumalloc::RunOutcome outcome;
  if (!sweep_args.empty()) {
    std::vector<double> values;
    try {
      values = parse_value_list(sweep_args[1]);
    } catch (const std::exception&) {
      std::cerr << "error: bad sweep value list '" << sweep_args[1] << "'\n";
      return sumalloc::exit_input_error;
    }
    outcome = sumalloc::sweep(scenario, sweep_args[0], values, out_dir, strict, quiet);
  } else {
    outcome = sumalloc::run_scenario(scenario, out_dir, strict, quiet);
  }

  if (!outcome.message.empty()) {
    std::cerr << (outcome.exit_code == 0 ? "note: " : "error: ")
              << outcome.message << "\n";
  }
  return outcome.exit_code;
}
