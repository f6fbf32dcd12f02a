#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sumalloc/analysis.hpp"

namespace sumalloc {

/// Deterministic scenario randomness: mt19937_64 with uniform draws mapped
/// through u = (next() >> 11) * 2^-53, so realized parameters replicate
/// across platforms and implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) {
    const double u =
        static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Scenario input error (bad file, bad schema, infeasible setup). Carries
/// the CLI exit code 2.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

struct EtaRule {
  bool fraction_of_bound = false;  // eta = fraction * max_step_size
  double value = 0.0;              // fixed eta, or the fraction
};

/// A fully realized scenario: parameters drawn, costs and schedule built.
struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  ProblemSpec problem;
  GraphSchedule schedule = GraphSchedule::constant(WeightedGraph::cycle(2));
  ProtocolConfig config;
  EtaRule eta_rule;
  AnalysisOptions analysis;
  long csv_stride = 1;                  // trajectory row thinning for output
  std::vector<std::string> asserted;    // certificates gating the exit status
  std::vector<std::pair<std::string, std::string>> realized;  // report header
};

/// Parses and realizes a scenario file (JSON; see docs/scenario_schema.md).
/// Throws ScenarioError with the offending line/field on parse failures.
Scenario load_scenario(const std::string& path,
                       std::optional<std::uint64_t> seed_override = {});
Scenario scenario_from_json_text(const std::string& text,
                                 std::optional<std::uint64_t> seed_override = {},
                                 const std::string& origin = "<string>");

enum ExitCode : int {
  exit_ok = 0,
  exit_certificate_violation = 1,
  exit_input_error = 2,
  exit_numerical_abort = 3,
};

struct RunOutcome {
  int exit_code = exit_ok;
  AnalysisReport report;
  std::vector<std::string> output_files;
  std::string message;
};

/// Runs one scenario: executes the protocol, analyzes, and writes
/// <name>_trajectory.csv and <name>_report.csv atomically under out_dir.
/// Exit is nonzero when an asserted certificate is violated; --strict
/// additionally gates every applicable certificate.
RunOutcome run_scenario(const Scenario& s, const std::string& out_dir,
                        bool strict = false, bool quiet = false);

/// One run per value of the swept parameter (q, eta, saturation, mu1, mu2,
/// B); writes per-run outputs plus <name>_sweep_<param>.csv.
RunOutcome sweep(const Scenario& base, const std::string& parameter,
                 const std::vector<double>& values, const std::string& out_dir,
                 bool strict = false, bool quiet = false);

/// Shortest round-trip decimal formatting used for all CSV numbers.
std::string format_double(double x);

}  // namespace sumalloc
