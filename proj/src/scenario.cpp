#include "sumalloc/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace sumalloc {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ScenarioError("scenario field '" + where + "': " + what);
}

const json& require(const json& obj, const std::string& key,
                    const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    fail(where + "." + key, "missing required field");
  }
  return obj.at(key);
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

long as_integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<long>();
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

double get_number(const json& obj, const std::string& key, double fallback,
                  const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return as_number(obj.at(key), where + "." + key);
}

long get_integer(const json& obj, const std::string& key, long fallback,
                 const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return as_integer(obj.at(key), where + "." + key);
}

/// number -> n copies; array -> per-agent values; {"uniform": [lo, hi]} ->
/// one seeded draw per agent, in agent order.
std::vector<double> realize_values(const json& j, int n, Rng& rng,
                                   const std::string& where) {
  std::vector<double> out(static_cast<size_t>(n));
  if (j.is_number()) {
    std::fill(out.begin(), out.end(), j.get<double>());
  } else if (j.is_array()) {
    if (static_cast<int>(j.size()) != n) {
      fail(where, "array length must equal the agent count");
    }
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = as_number(j.at(i), where);
  } else if (j.is_object() && j.contains("uniform")) {
    const json& r = j.at("uniform");
    if (!r.is_array() || r.size() != 2) fail(where + ".uniform", "expected [lo, hi]");
    const double lo = as_number(r.at(0), where + ".uniform[0]");
    const double hi = as_number(r.at(1), where + ".uniform[1]");
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = rng.uniform(lo, hi);
  } else {
    fail(where, "expected a number, an array, or {\"uniform\": [lo, hi]}");
  }
  return out;
}

std::string join_values(const std::vector<double>& vs) {
  std::string s;
  for (size_t i = 0; i < vs.size(); ++i) {
    if (i) s += ' ';
    s += format_double(vs[i]);
  }
  return s;
}

Augmentation parse_augmentation(const json& j, const std::string& where) {
  Augmentation aug;
  const std::string kind = as_string(require(j, "kind", where), where + ".kind");
  if (kind == "none") {
    aug.kind = AugmentationKind::none;
  } else if (kind == "max") {
    aug.kind = AugmentationKind::penalty_max;
  } else if (kind == "softplus") {
    aug.kind = AugmentationKind::penalty_softplus;
  } else if (kind == "power") {
    aug.kind = AugmentationKind::penalty_power;
  } else if (kind == "barrier_log") {
    aug.kind = AugmentationKind::barrier_log;
  } else if (kind == "barrier_inverse") {
    aug.kind = AugmentationKind::barrier_inverse;
  } else {
    fail(where + ".kind", "unknown augmentation '" + kind + "'");
  }
  aug.c = get_number(j, "c", 1.0, where);
  aug.mu = get_number(j, "mu", 1.0, where);
  aug.kappa = static_cast<int>(get_integer(j, "kappa", 2, where));
  return aug;
}

void parse_problem(const json& j, Scenario& s, Rng& rng) {
  const std::string where = "problem";
  const std::string kind = as_string(require(j, "kind", where), where + ".kind");
  const int n = static_cast<int>(as_integer(require(j, "n", where), where + ".n"));
  if (n < 1) fail(where + ".n", "agent count must be positive");

  std::optional<Box> box;
  if (j.contains("box")) {
    const json& bj = j.at("box");
    if (!bj.is_array() || bj.size() != 2) fail(where + ".box", "expected [lo, hi]");
    box = Box{as_number(bj.at(0), where + ".box[0]"),
              as_number(bj.at(1), where + ".box[1]")};
  }
  Augmentation aug;
  if (j.contains("augmentation")) {
    aug = parse_augmentation(j.at("augmentation"), where + ".augmentation");
  }
  if (aug.kind != AugmentationKind::none && !box) {
    fail(where + ".augmentation", "augmentation requires a box");
  }

  ProblemSpec& p = s.problem;
  p.costs.clear();

  double demand_sum = 0.0;
  if (kind == "quadratic_cpu") {
    const auto pi = realize_values(require(j, "pi", where), n, rng, where + ".pi");
    const auto rho = realize_values(require(j, "rho", where), n, rng, where + ".rho");
    const auto occ =
        realize_values(require(j, "occupied", where), n, rng, where + ".occupied");
    for (int i = 0; i < n; ++i) {
      AgentCost c = AgentCost::quadratic_cpu(pi[static_cast<size_t>(i)],
                                             rho[static_cast<size_t>(i)],
                                             occ[static_cast<size_t>(i)]);
      if (box) c = c.with_box(*box, aug);
      p.costs.push_back(std::move(c));
      demand_sum += rho[static_cast<size_t>(i)] + occ[static_cast<size_t>(i)];
    }
    s.realized.emplace_back("pi", join_values(pi));
    s.realized.emplace_back("rho", join_values(rho));
    s.realized.emplace_back("occupied", join_values(occ));
  } else if (kind == "quartic") {
    const auto alpha =
        realize_values(require(j, "alpha", where), n, rng, where + ".alpha");
    const auto omega =
        realize_values(require(j, "omega", where), n, rng, where + ".omega");
    for (int i = 0; i < n; ++i) {
      AgentCost c = AgentCost::quartic(omega[static_cast<size_t>(i)],
                                       alpha[static_cast<size_t>(i)]);
      if (box) c = c.with_box(*box, aug);
      p.costs.push_back(std::move(c));
    }
    s.realized.emplace_back("alpha", join_values(alpha));
    s.realized.emplace_back("omega", join_values(omega));
  } else if (kind == "polynomial") {
    const json& cj = require(j, "coefficients", where);
    if (!cj.is_array() || static_cast<int>(cj.size()) != n) {
      fail(where + ".coefficients", "expected one coefficient array per agent");
    }
    for (int i = 0; i < n; ++i) {
      const json& row = cj.at(i);
      if (!row.is_array() || row.empty()) {
        fail(where + ".coefficients", "expected non-empty arrays");
      }
      std::vector<double> coeffs;
      for (const auto& v : row) coeffs.push_back(as_number(v, where + ".coefficients"));
      AgentCost c = AgentCost::polynomial(std::move(coeffs));
      if (box) c = c.with_box(*box, aug);
      p.costs.push_back(std::move(c));
    }
  } else {
    fail(where + ".kind", "unknown cost kind '" + kind + "'");
  }

  const json& bj = require(j, "b", where);
  if (bj.is_string()) {
    if (as_string(bj, where + ".b") != "sum_demand" || kind != "quadratic_cpu") {
      fail(where + ".b", "expected a number or \"sum_demand\" (quadratic_cpu only)");
    }
    p.b = demand_sum;
  } else {
    p.b = as_number(bj, where + ".b");
  }
  s.realized.emplace_back("b", format_double(p.b));

  if (j.contains("weights")) {
    const auto w = realize_values(j.at("weights"), n, rng, where + ".weights");
    p.weights = w;
    s.realized.emplace_back("weights", join_values(w));
  }
  p.validate();
}

WeightedGraph parse_generator(const std::string& text, double weight,
                              const std::string& where) {
  const auto open = text.find('(');
  const auto close = text.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    fail(where, "expected generator like \"cycle(12)\"");
  }
  const std::string name = text.substr(0, open);
  int n = 0;
  const std::string arg = text.substr(open + 1, close - open - 1);
  const auto res = std::from_chars(arg.data(), arg.data() + arg.size(), n);
  if (res.ec != std::errc() || n < 1) fail(where, "bad generator size '" + arg + "'");
  if (name == "cycle") return WeightedGraph::cycle(n, weight);
  if (name == "path") return WeightedGraph::path(n, weight);
  if (name == "complete") return WeightedGraph::complete(n, weight);
  if (name == "directed_cycle") return WeightedGraph::directed_cycle(n, weight);
  fail(where, "unknown generator '" + name + "'");
}

WeightedGraph parse_graph(const json& j, const std::string& where) {
  const double weight = get_number(j, "weight", 1.0, where);
  if (j.contains("generator")) {
    return parse_generator(as_string(j.at("generator"), where + ".generator"),
                           weight, where + ".generator");
  }
  if (j.contains("edges")) {
    const int n = static_cast<int>(as_integer(require(j, "n", where), where + ".n"));
    const bool directed =
        j.contains("directed") && j.at("directed").is_boolean() && j.at("directed").get<bool>();
    std::vector<std::tuple<int, int, double>> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || (e.size() != 2 && e.size() != 3)) {
        fail(where + ".edges", "expected [i, j] or [i, j, w] entries");
      }
      const int a = static_cast<int>(as_integer(e.at(0), where + ".edges"));
      const int b = static_cast<int>(as_integer(e.at(1), where + ".edges"));
      const double w = e.size() == 3 ? as_number(e.at(2), where + ".edges") : weight;
      edges.emplace_back(a, b, w);
    }
    return WeightedGraph::from_edges(n, edges, directed);
  }
  fail(where, "expected 'generator' or 'edges'");
}

void parse_network(const json& j, Scenario& s) {
  const std::string where = "network";
  if (j.contains("schedule")) {
    const json& sj = j.at("schedule");
    const json& frames = require(sj, "frames", where + ".schedule");
    if (!frames.is_array() || frames.empty()) {
      fail(where + ".schedule.frames", "expected a non-empty array");
    }
    std::vector<GraphSchedule::Frame> fs;
    int idx = 0;
    for (const auto& fj : frames) {
      const std::string fw = where + ".schedule.frames[" + std::to_string(idx++) + "]";
      fs.push_back({parse_graph(fj, fw),
                    static_cast<int>(get_integer(fj, "steps", 1, fw))});
    }
    const bool cyclic = !sj.contains("cyclic") || sj.at("cyclic").get<bool>();
    s.schedule = GraphSchedule(std::move(fs), cyclic);
  } else {
    s.schedule = GraphSchedule::constant(parse_graph(j, where));
  }
}

void parse_protocol(const json& j, Scenario& s) {
  const std::string where = "protocol";
  const std::string variant =
      as_string(require(j, "variant", where), where + ".variant");
  if (variant == "dt_node") {
    s.config.variant = Variant::dt_node;
  } else if (variant == "dt_link") {
    s.config.variant = Variant::dt_link;
  } else if (variant == "ct_node") {
    s.config.variant = Variant::ct_node;
  } else if (variant == "ct_link") {
    s.config.variant = Variant::ct_link;
  } else {
    fail(where + ".variant", "unknown variant '" + variant + "'");
  }

  const json& ej = require(j, "eta", where);
  if (ej.is_number()) {
    s.eta_rule = {false, ej.get<double>()};
    s.config.eta = ej.get<double>();
  } else if (ej.is_object() && ej.contains("fraction_of_bound")) {
    s.eta_rule = {true, as_number(ej.at("fraction_of_bound"),
                                  where + ".eta.fraction_of_bound")};
  } else {
    fail(where + ".eta", "expected a number or {\"fraction_of_bound\": f}");
  }

  s.config.dt = get_number(j, "dt", 1e-2, where);
  s.config.horizon = get_integer(j, "horizon", 1000, where);
  if (s.config.horizon < 0) fail(where + ".horizon", "must be nonnegative");

  if (j.contains("initializer")) {
    const json& ij = j.at("initializer");
    if (ij.is_string()) {
      const std::string name = ij.get<std::string>();
      if (name == "equal_split") {
        s.config.initializer = Initializer::equal_split();
      } else if (name == "weighted_feasible") {
        s.config.initializer = Initializer::weighted_feasible();
      } else {
        fail(where + ".initializer", "unknown initializer '" + name + "'");
      }
    } else if (ij.is_object() && ij.contains("custom")) {
      const json& cj = ij.at("custom");
      Vector x(cj.size());
      for (size_t i = 0; i < cj.size(); ++i) {
        x[static_cast<Eigen::Index>(i)] =
            as_number(cj.at(i), where + ".initializer.custom");
      }
      s.config.initializer = Initializer::custom_vector(std::move(x));
    } else {
      fail(where + ".initializer", "expected a name or {\"custom\": [...]}");
    }
  }
}

void parse_nonlinearity(const json& j, Scenario& s) {
  const std::string where = "nonlinearity";
  const std::string kind = as_string(require(j, "kind", where), where + ".kind");
  if (kind == "identity") {
    s.config.map = NonlinearMap::identity();
  } else if (kind == "saturation") {
    s.config.map =
        NonlinearMap::saturation(as_number(require(j, "level", where), where + ".level"));
  } else if (kind == "log_quantizer") {
    s.config.map =
        NonlinearMap::log_quantizer(as_number(require(j, "q", where), where + ".q"));
  } else if (kind == "uniform_quantizer") {
    s.config.map =
        NonlinearMap::uniform_quantizer(as_number(require(j, "q", where), where + ".q"));
  } else if (kind == "signpower_sum") {
    s.config.map = NonlinearMap::signpower_sum(
        as_number(require(j, "mu1", where), where + ".mu1"),
        as_number(require(j, "mu2", where), where + ".mu2"));
  } else {
    fail(where + ".kind", "unknown nonlinearity '" + kind + "'");
  }
}

void parse_analysis(const json& j, Scenario& s) {
  const std::string where = "analysis";
  s.analysis.tail_fraction = get_number(j, "tail_fraction", 0.1, where);
  s.analysis.tail_min_rows = get_integer(j, "tail_min_rows", 100, where);
  if (j.contains("rate_window")) {
    s.analysis.rate_window =
        static_cast<int>(as_integer(j.at("rate_window"), where + ".rate_window"));
  }
  s.csv_stride = get_integer(j, "csv_stride", 1, where);
  if (s.csv_stride < 1) fail(where + ".csv_stride", "must be positive");
  if (j.contains("assert")) {
    for (const auto& a : j.at("assert")) {
      s.asserted.push_back(as_string(a, where + ".assert"));
    }
  }
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text,
                                 std::optional<std::uint64_t> seed_override,
                                 const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // turn the byte offset into a line/column pair
    size_t line = 1, col = 1;
    for (size_t i = 0; i < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << origin << ": parse error at line " << line << ", column " << col
       << ": " << e.what();
    throw ScenarioError(os.str());
  }
  if (!root.is_object()) throw ScenarioError(origin + ": expected a JSON object");

  Scenario s;
  try {
    s.name = as_string(require(root, "name", "scenario"), "name");
    s.seed = static_cast<std::uint64_t>(as_integer(require(root, "seed", "scenario"), "seed"));
    if (seed_override) s.seed = *seed_override;
    Rng rng(s.seed);
    s.realized.emplace_back("seed", std::to_string(s.seed));

    parse_problem(require(root, "problem", "scenario"), s, rng);
    parse_network(require(root, "network", "scenario"), s);
    parse_protocol(require(root, "protocol", "scenario"), s);
    parse_nonlinearity(require(root, "nonlinearity", "scenario"), s);
    if (root.contains("analysis")) parse_analysis(root.at("analysis"), s);

    if (s.schedule.agent_count() != s.problem.size()) {
      fail("network", "agent count disagrees with the problem");
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError(origin + ": " + e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path,
                       std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json_text(buf.str(), seed_override, path);
}

namespace {

void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ScenarioError("cannot write output file '" + tmp.string() + "'");
    out << content;
  }
  fs::rename(tmp, path);
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

double resolve_eta(const Scenario& s, const ProblemSpec& problem) {
  if (!s.eta_rule.fraction_of_bound) return s.config.eta;

  std::string note;
  const auto sp = schedule_spectrum(s.schedule, &note);
  if (!sp) {
    throw ScenarioError(
        "eta fraction_of_bound: step-size bound needs an undirected network");
  }
  const Vector x_star = solve_oracle(problem);
  const CurvatureSummary cs = problem_curvature(problem, x_star);

  // size the sector range from the initial exchange arguments
  const Vector x0 = initial_state(problem, s.config.initializer);
  const Vector g = gradients(problem, x0);
  double range = 1.0;
  if (variant_is_node_based(s.config.variant)) {
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      for (Eigen::Index j = i + 1; j < g.size(); ++j) {
        range = std::max(range, std::abs(g[i] - g[j]));
      }
    }
  } else {
    range = std::max(range, g.cwiseAbs().maxCoeff());
  }

  const auto bound = max_step_size(*sp, cs.u, s.config.map.sector_bounds(2.0 * range));
  if (!bound) {
    throw ScenarioError(
        "eta fraction_of_bound: no step-size bound for a non-sector map");
  }
  return s.eta_rule.value * *bound;
}

std::string render_trajectory_csv(const Scenario& s, const Trajectory& traj,
                                  const AnalysisReport& rep) {
  std::ostringstream os;
  const int n = traj.agents();
  os << "step,t";
  for (int i = 1; i <= n; ++i) os << ",x_" << i;
  os << ",sum_x,residual,dispersion_norm,distance_to_opt\n";

  const long rows = traj.rows();
  const long stride = std::max<long>(1, s.csv_stride);
  for (long r = 0; r < rows; r += stride) {
    const long row = r;
    os << traj.step_index[static_cast<size_t>(row)] << ','
       << format_double(traj.times[static_cast<size_t>(row)]);
    for (int i = 0; i < n; ++i) os << ',' << format_double(traj.states(row, i));
    os << ',' << format_double(traj.sums[static_cast<size_t>(row)]) << ','
       << format_double(rep.residuals[static_cast<size_t>(row)]) << ','
       << format_double(rep.dispersion_norms[static_cast<size_t>(row)]) << ','
       << format_double(rep.distances[static_cast<size_t>(row)]) << '\n';
    if (row != rows - 1 && row + stride >= rows) {
      // always emit the final row
      r = rows - 1 - stride;
    }
  }
  return os.str();
}

std::string render_report_csv(const Scenario& s, const Trajectory& traj,
                              const AnalysisReport& rep) {
  std::ostringstream os;
  os << "# scenario = " << s.name << "\n";
  for (const auto& [key, value] : s.realized) {
    os << "# " << key << " = " << value << "\n";
  }
  os << "# curvature_interval = [" << format_double(rep.curvature_lo) << ", "
     << format_double(rep.curvature_hi) << "] (" << rep.curvature_interval_note
     << ")\n";
  for (const auto& w : rep.warnings) os << "# warning = " << w << "\n";

  os << "name,value,status,slack\n";
  const auto cert_row = [&](const Certificate& c) {
    os << c.name << ',' << format_double(c.value) << ',' << to_string(c.status)
       << ',' << format_double(c.slack);
    if (!c.note.empty()) os << ',' << csv_quote(c.note);
    os << '\n';
  };
  cert_row(rep.feasibility);
  cert_row(rep.step_size);
  cert_row(rep.rate);
  cert_row(rep.epsilon);

  const auto info_row = [&](const std::string& name, double value) {
    os << name << ',' << format_double(value) << ",info,\n";
  };
  info_row("final_distance", rep.final_distance);
  info_row("final_residual", rep.final_residual);
  info_row("final_kkt", rep.final_kkt);
  info_row("tail_max_distance", rep.tail_max_distance);
  info_row("tail_mean_distance", rep.tail_mean_distance);
  info_row("tail_oscillation", rep.tail_oscillation);
  info_row("feasibility_drift", rep.feasibility_drift);
  info_row("v", rep.v);
  info_row("u", rep.u);
  if (rep.lambda2) info_row("lambda2", *rep.lambda2);
  if (rep.lambda_n) info_row("lambda_n", *rep.lambda_n);
  if (rep.eta_bound) info_row("eta_bound", *rep.eta_bound);
  info_row("eta_applied", traj.applied_step);
  info_row("steps", static_cast<double>(traj.steps));
  info_row("f_star", rep.f_star);
  return os.str();
}

}  // namespace

RunOutcome run_scenario(const Scenario& s, const std::string& out_dir,
                        bool strict, bool quiet) {
  RunOutcome outcome;
  try {
    ProblemSpec problem =
        s.problem.weighted() ? reweight(s.problem) : s.problem;

    ProtocolConfig config = s.config;
    config.eta = resolve_eta(s, problem);
    config.record_states = true;

    const Trajectory traj = run(config, problem, s.schedule);
    outcome.report = analyze(traj, problem, s.schedule, config.map, s.analysis);

    fs::create_directories(out_dir.empty() ? "." : out_dir);
    const fs::path dir = out_dir.empty() ? "." : out_dir;
    const fs::path traj_path = dir / (s.name + "_trajectory.csv");
    const fs::path report_path = dir / (s.name + "_report.csv");
    atomic_write(traj_path, render_trajectory_csv(s, traj, outcome.report));
    atomic_write(report_path, render_report_csv(s, traj, outcome.report));
    outcome.output_files = {traj_path.string(), report_path.string()};

    // gate the exit status on the asserted certificates (--strict gates all)
    std::set<std::string> gated(s.asserted.begin(), s.asserted.end());
    const auto gate = [&](const Certificate& c) {
      const bool wanted = strict || gated.count(c.name) > 0;
      if (wanted && c.status == CertStatus::violated) {
        outcome.exit_code = exit_certificate_violation;
        outcome.message += "certificate '" + c.name + "' violated; ";
      }
    };
    gate(outcome.report.feasibility);
    gate(outcome.report.step_size);
    gate(outcome.report.rate);
    gate(outcome.report.epsilon);

    if (!quiet) {
      std::cout << s.name << ": steps=" << traj.steps
                << " final_distance=" << format_double(outcome.report.final_distance)
                << " final_residual=" << format_double(outcome.report.final_residual)
                << " drift=" << format_double(outcome.report.feasibility_drift)
                << "\n";
      for (const Certificate* c :
           {&outcome.report.feasibility, &outcome.report.step_size,
            &outcome.report.rate, &outcome.report.epsilon}) {
        std::cout << "  " << c->name << ": " << to_string(c->status);
        if (!std::isnan(c->value)) std::cout << " (value " << format_double(c->value) << ")";
        std::cout << "\n";
      }
    }
  } catch (const NumericalAbort& e) {
    outcome.exit_code = exit_numerical_abort;
    outcome.message = e.what();
  } catch (const ScenarioError& e) {
    outcome.exit_code = exit_input_error;
    outcome.message = e.what();
  } catch (const std::exception& e) {
    outcome.exit_code = exit_input_error;
    outcome.message = e.what();
  }
  return outcome;
}

RunOutcome sweep(const Scenario& base, const std::string& parameter,
                 const std::vector<double>& values, const std::string& out_dir,
                 bool strict, bool quiet) {
  RunOutcome outcome;
  const std::set<std::string> known{"q", "eta", "saturation", "mu1", "mu2", "B"};
  if (!known.count(parameter)) {
    outcome.exit_code = exit_input_error;
    outcome.message = "unknown sweep parameter '" + parameter +
                      "' (expected one of q, eta, saturation, mu1, mu2, B)";
    return outcome;
  }

  std::ostringstream summary;
  summary << parameter
          << ",final_distance,final_residual,feasibility,step_size,rate,epsilon\n";

  for (double value : values) {
    Scenario s = base;
    s.name = base.name + "_" + parameter + "_" + format_double(value);
    try {
      if (parameter == "q") {
        if (s.config.map.kind() == MapKind::uniform_quantizer) {
          s.config.map = NonlinearMap::uniform_quantizer(value);
        } else if (s.config.map.kind() == MapKind::log_quantizer) {
          s.config.map = NonlinearMap::log_quantizer(value);
        } else {
          throw ScenarioError("sweep q: scenario does not use a quantizer");
        }
      } else if (parameter == "eta") {
        s.eta_rule = {false, value};
        s.config.eta = value;
      } else if (parameter == "saturation") {
        if (s.config.map.kind() != MapKind::saturation) {
          throw ScenarioError("sweep saturation: scenario does not use saturation");
        }
        s.config.map = NonlinearMap::saturation(value);
      } else if (parameter == "mu1" || parameter == "mu2") {
        if (s.config.map.kind() != MapKind::signpower_sum) {
          throw ScenarioError("sweep " + parameter +
                              ": scenario does not use signpower_sum");
        }
        const double m1 = parameter == "mu1" ? value : s.config.map.mu1();
        const double m2 = parameter == "mu2" ? value : s.config.map.mu2();
        s.config.map = NonlinearMap::signpower_sum(m1, m2);
      } else if (parameter == "B") {
        s.analysis.rate_window = static_cast<int>(value);
      }
    } catch (const std::exception& e) {
      outcome.exit_code = exit_input_error;
      outcome.message = e.what();
      return outcome;
    }

    const RunOutcome one = run_scenario(s, out_dir, strict, quiet);
    outcome.exit_code = std::max(outcome.exit_code, one.exit_code);
    if (!one.message.empty()) outcome.message += one.message + "; ";
    for (const auto& f : one.output_files) outcome.output_files.push_back(f);

    summary << format_double(value) << ','
            << format_double(one.report.final_distance) << ','
            << format_double(one.report.final_residual) << ','
            << to_string(one.report.feasibility.status) << ','
            << to_string(one.report.step_size.status) << ','
            << to_string(one.report.rate.status) << ','
            << to_string(one.report.epsilon.status) << '\n';
  }

  fs::create_directories(out_dir.empty() ? "." : out_dir);
  const fs::path dir = out_dir.empty() ? "." : out_dir;
  const fs::path summary_path = dir / (base.name + "_sweep_" + parameter + ".csv");
  atomic_write(summary_path, summary.str());
  outcome.output_files.push_back(summary_path.string());
  return outcome;
}

}  // namespace sumalloc
