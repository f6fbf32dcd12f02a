#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sumalloc/analysis.hpp"
#include "sumalloc/scenario.hpp"

namespace py = pybind11;
using namespace sumalloc;

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Distributed sum-preserving resource allocation: Laplacian gradient "
      "protocols with pluggable nonlinearities, feasibility and accuracy "
      "certificates.";

  // ----- topology -----
  py::class_<WeightedGraph>(m, "WeightedGraph")
      .def(py::init<Matrix>(), py::arg("weights"))
      .def_static("cycle", &WeightedGraph::cycle, py::arg("n"), py::arg("weight") = 1.0)
      .def_static("path", &WeightedGraph::path, py::arg("n"), py::arg("weight") = 1.0)
      .def_static("complete", &WeightedGraph::complete, py::arg("n"), py::arg("weight") = 1.0)
      .def_static("directed_cycle", &WeightedGraph::directed_cycle, py::arg("n"),
                  py::arg("weight") = 1.0)
      .def_static("from_edges", &WeightedGraph::from_edges, py::arg("n"),
                  py::arg("edges"), py::arg("directed") = false)
      .def_property_readonly("n", &WeightedGraph::size)
      .def_property_readonly("weights", &WeightedGraph::weights)
      .def("is_undirected", &WeightedGraph::is_undirected)
      .def("is_weight_balanced", &WeightedGraph::is_weight_balanced)
      .def("is_connected", &WeightedGraph::is_connected);

  py::class_<GraphSchedule::Frame>(m, "Frame")
      .def(py::init<WeightedGraph, int>(), py::arg("graph"), py::arg("steps") = 1)
      .def_readonly("steps", &GraphSchedule::Frame::steps)
      .def_readonly("graph", &GraphSchedule::Frame::graph);

  py::class_<GraphSchedule>(m, "GraphSchedule")
      .def(py::init<std::vector<GraphSchedule::Frame>, bool>(), py::arg("frames"),
           py::arg("cyclic") = true)
      .def_static("constant", &GraphSchedule::constant, py::arg("graph"))
      .def_property_readonly("period", &GraphSchedule::period)
      .def_property_readonly("agent_count", &GraphSchedule::agent_count)
      .def("frame_index_at", &GraphSchedule::frame_index_at, py::arg("k"))
      .def("union_graph", &GraphSchedule::union_graph, py::arg("start"),
           py::arg("window"));

  py::class_<LaplacianSpectrum>(m, "LaplacianSpectrum")
      .def_readonly("eigenvalues", &LaplacianSpectrum::eigenvalues)
      .def_readonly("lambda2", &LaplacianSpectrum::lambda2)
      .def_readonly("lambda_n", &LaplacianSpectrum::lambda_n)
      .def_readonly("connected", &LaplacianSpectrum::connected);

  m.def("laplacian", &laplacian, py::arg("graph"));
  m.def("spectrum", &spectrum, py::arg("laplacian_matrix"));
  m.def("symmetric_eigenvalues", &symmetric_eigenvalues, py::arg("matrix"));
  m.def("is_b_connected", &is_b_connected, py::arg("schedule"), py::arg("b"));
  m.def("quadratic_form_bounds_check", &quadratic_form_bounds_check, py::arg("L"),
        py::arg("x"));

  // ----- nonlinearity -----
  py::class_<SectorBounds>(m, "SectorBounds")
      .def_readonly("lower", &SectorBounds::lower)
      .def_readonly("upper", &SectorBounds::upper);

  py::class_<NonlinearMap>(m, "NonlinearMap")
      .def_static("identity", &NonlinearMap::identity)
      .def_static("saturation", &NonlinearMap::saturation, py::arg("level"))
      .def_static("log_quantizer", &NonlinearMap::log_quantizer, py::arg("q"))
      .def_static("uniform_quantizer", &NonlinearMap::uniform_quantizer, py::arg("q"))
      .def_static("signpower_sum", &NonlinearMap::signpower_sum, py::arg("mu1"),
                  py::arg("mu2"))
      .def("__call__", &NonlinearMap::operator(), py::arg("z"))
      .def("sector_bounds", &NonlinearMap::sector_bounds, py::arg("range"))
      .def_property_readonly("name", &NonlinearMap::name);

  py::class_<AssumptionReport>(m, "AssumptionReport")
      .def_readonly("ratio_inf", &AssumptionReport::ratio_inf)
      .def_readonly("ratio_sup", &AssumptionReport::ratio_sup)
      .def_readonly("oddness_defect", &AssumptionReport::oddness_defect)
      .def_readonly("monotonicity_violations", &AssumptionReport::monotonicity_violations)
      .def_readonly("sector", &AssumptionReport::sector)
      .def_readonly("sample_count", &AssumptionReport::sample_count);

  m.def("verify_assumptions", &verify_assumptions, py::arg("map"), py::arg("lo"),
        py::arg("hi"), py::arg("count") = 1000);

  // ----- objective -----
  m.def("penalty_max", &penalty_max, py::arg("x"), py::arg("m"), py::arg("M"),
        py::arg("c"));
  m.def("penalty_softplus", &penalty_softplus, py::arg("z"), py::arg("mu"));
  m.def("penalty_power", &penalty_power, py::arg("z"), py::arg("kappa"));

  py::enum_<BarrierKind>(m, "BarrierKind")
      .value("log", BarrierKind::log_barrier)
      .value("inverse", BarrierKind::inverse_barrier);
  m.def("barrier", &barrier, py::arg("kind"), py::arg("g_value"));

  py::enum_<AugmentationKind>(m, "AugmentationKind")
      .value("none", AugmentationKind::none)
      .value("penalty_max", AugmentationKind::penalty_max)
      .value("penalty_softplus", AugmentationKind::penalty_softplus)
      .value("penalty_power", AugmentationKind::penalty_power)
      .value("barrier_log", AugmentationKind::barrier_log)
      .value("barrier_inverse", AugmentationKind::barrier_inverse);

  py::class_<Augmentation>(m, "Augmentation")
      .def(py::init([](AugmentationKind kind, double c, double mu, int kappa) {
             return Augmentation{kind, c, mu, kappa};
           }),
           py::arg("kind") = AugmentationKind::none, py::arg("c") = 1.0,
           py::arg("mu") = 1.0, py::arg("kappa") = 2)
      .def_readwrite("kind", &Augmentation::kind)
      .def_readwrite("c", &Augmentation::c)
      .def_readwrite("mu", &Augmentation::mu)
      .def_readwrite("kappa", &Augmentation::kappa);

  py::class_<Box>(m, "Box")
      .def(py::init([](double lo, double hi) { return Box{lo, hi}; }),
           py::arg("lo"), py::arg("hi"))
      .def_readwrite("lo", &Box::lo)
      .def_readwrite("hi", &Box::hi);

  py::class_<Eval>(m, "Eval")
      .def_readonly("value", &Eval::value)
      .def_readonly("gradient", &Eval::gradient)
      .def_readonly("curvature", &Eval::curvature);

  py::class_<AgentCost>(m, "AgentCost")
      .def_static("quadratic_cpu", &AgentCost::quadratic_cpu, py::arg("pi"),
                  py::arg("rho"), py::arg("occupied"))
      .def_static("quartic", &AgentCost::quartic, py::arg("omega"), py::arg("alpha"))
      .def_static("polynomial", &AgentCost::polynomial, py::arg("coefficients"))
      .def("with_box", &AgentCost::with_box, py::arg("box"), py::arg("augmentation"))
      .def("scaled_input", &AgentCost::scaled_input, py::arg("s"))
      .def("eval", &AgentCost::eval, py::arg("x"))
      .def("value_difference", &AgentCost::value_difference, py::arg("x"),
           py::arg("x_ref"))
      .def("box_in_input_frame", &AgentCost::box_in_input_frame);

  py::class_<CurvatureBounds>(m, "CurvatureBounds")
      .def_readonly("v", &CurvatureBounds::v)
      .def_readonly("u", &CurvatureBounds::u)
      .def_readonly("lo", &CurvatureBounds::lo)
      .def_readonly("hi", &CurvatureBounds::hi);

  m.def("curvature_bounds", &curvature_bounds, py::arg("cost"), py::arg("lo"),
        py::arg("hi"), py::arg("samples") = 10000);

  py::class_<ProblemSpec>(m, "ProblemSpec")
      .def(py::init([](std::vector<AgentCost> costs, double b,
                       std::vector<double> weights) {
             ProblemSpec s{std::move(costs), b, std::move(weights)};
             s.validate();
             return s;
           }),
           py::arg("costs"), py::arg("b"), py::arg("weights") = std::vector<double>{})
      .def_readonly("costs", &ProblemSpec::costs)
      .def_readonly("b", &ProblemSpec::b)
      .def_readonly("weights", &ProblemSpec::weights)
      .def_property_readonly("n", &ProblemSpec::size);

  m.def("reweight", &reweight, py::arg("spec"));
  m.def("gradients", &gradients, py::arg("spec"), py::arg("x"));
  m.def("total_cost", &total_cost, py::arg("spec"), py::arg("x"));
  m.def("kkt_residual", &kkt_residual, py::arg("spec"), py::arg("x"));

  // ----- protocol -----
  py::enum_<Variant>(m, "Variant")
      .value("dt_node", Variant::dt_node)
      .value("dt_link", Variant::dt_link)
      .value("ct_node", Variant::ct_node)
      .value("ct_link", Variant::ct_link);

  py::class_<Initializer>(m, "Initializer")
      .def_static("equal_split", &Initializer::equal_split)
      .def_static("weighted_feasible", &Initializer::weighted_feasible)
      .def_static("custom", &Initializer::custom_vector, py::arg("x"));

  py::class_<ProtocolConfig>(m, "ProtocolConfig")
      .def(py::init([](Variant variant, double eta, double dt, long horizon,
                       NonlinearMap map, Initializer init, bool record_states) {
             ProtocolConfig c;
             c.variant = variant;
             c.eta = eta;
             c.dt = dt;
             c.horizon = horizon;
             c.map = std::move(map);
             c.initializer = std::move(init);
             c.record_states = record_states;
             return c;
           }),
           py::arg("variant") = Variant::dt_node, py::arg("eta") = 1e-2,
           py::arg("dt") = 1e-2, py::arg("horizon") = 1000,
           py::arg("map") = NonlinearMap::identity(),
           py::arg("initializer") = Initializer::equal_split(),
           py::arg("record_states") = true)
      .def_readwrite("variant", &ProtocolConfig::variant)
      .def_readwrite("eta", &ProtocolConfig::eta)
      .def_readwrite("dt", &ProtocolConfig::dt)
      .def_readwrite("horizon", &ProtocolConfig::horizon)
      .def_readwrite("map", &ProtocolConfig::map)
      .def_readwrite("record_states", &ProtocolConfig::record_states);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("states", &Trajectory::states)
      .def_readonly("times", &Trajectory::times)
      .def_readonly("step_index", &Trajectory::step_index)
      .def_readonly("sums", &Trajectory::sums)
      .def_readonly("frame_index", &Trajectory::frame_index)
      .def_readonly("applied_step", &Trajectory::applied_step)
      .def_readonly("steps", &Trajectory::steps)
      .def_readonly("feasibility_drift", &Trajectory::feasibility_drift)
      .def("final_state", &Trajectory::final_state);

  m.def("initial_state", &initial_state, py::arg("spec"), py::arg("initializer"));
  m.def("step_dt_node", &step_dt_node, py::arg("x"), py::arg("graph"),
        py::arg("spec"), py::arg("map"), py::arg("eta"));
  m.def("step_dt_link", &step_dt_link, py::arg("x"), py::arg("graph"),
        py::arg("spec"), py::arg("map"), py::arg("eta"));
  m.def("run", &run, py::arg("config"), py::arg("spec"), py::arg("schedule"),
        py::call_guard<py::gil_scoped_release>());
  m.def("max_step_size", &max_step_size, py::arg("spectrum"), py::arg("u"),
        py::arg("sector"));

  // ----- analysis -----
  m.def("solve_oracle", &solve_oracle, py::arg("spec"));
  m.def("quadratic_closed_form", &quadratic_closed_form, py::arg("spec"));
  m.def("dispersion", &dispersion, py::arg("spec"), py::arg("x"));
  m.def("epsilon_accuracy", &epsilon_accuracy, py::arg("q"), py::arg("v"),
        py::arg("n"));
  m.def("quantization_inverse_design", &quantization_inverse_design,
        py::arg("epsilon"), py::arg("v"), py::arg("n"));

  py::class_<SandwichReport>(m, "SandwichReport")
      .def_readonly("applicable", &SandwichReport::applicable)
      .def_readonly("worst_slack", &SandwichReport::worst_slack)
      .def("all", &SandwichReport::all);

  m.def("sandwich_check", &sandwich_check, py::arg("spec"), py::arg("x"),
        py::arg("x_star"), py::arg("v"), py::arg("u"), py::arg("rel_tol") = 1e-8);

  py::enum_<CertStatus>(m, "CertStatus")
      .value("holds", CertStatus::holds)
      .value("violated", CertStatus::violated)
      .value("not_applicable", CertStatus::not_applicable);

  py::class_<Certificate>(m, "Certificate")
      .def_readonly("name", &Certificate::name)
      .def_readonly("value", &Certificate::value)
      .def_readonly("status", &Certificate::status)
      .def_readonly("slack", &Certificate::slack)
      .def_readonly("note", &Certificate::note);

  py::class_<AnalysisOptions>(m, "AnalysisOptions")
      .def(py::init<>())
      .def_readwrite("tail_fraction", &AnalysisOptions::tail_fraction)
      .def_readwrite("tail_min_rows", &AnalysisOptions::tail_min_rows)
      .def_readwrite("rate_window", &AnalysisOptions::rate_window);

  py::class_<AnalysisReport>(m, "AnalysisReport")
      .def_readonly("x_star", &AnalysisReport::x_star)
      .def_readonly("f_star", &AnalysisReport::f_star)
      .def_readonly("residuals", &AnalysisReport::residuals)
      .def_readonly("dispersion_norms", &AnalysisReport::dispersion_norms)
      .def_readonly("distances", &AnalysisReport::distances)
      .def_readonly("feasibility_drift", &AnalysisReport::feasibility_drift)
      .def_readonly("final_distance", &AnalysisReport::final_distance)
      .def_readonly("final_residual", &AnalysisReport::final_residual)
      .def_readonly("final_kkt", &AnalysisReport::final_kkt)
      .def_readonly("v", &AnalysisReport::v)
      .def_readonly("u", &AnalysisReport::u)
      .def_readonly("lambda2", &AnalysisReport::lambda2)
      .def_readonly("lambda_n", &AnalysisReport::lambda_n)
      .def_readonly("eta_bound", &AnalysisReport::eta_bound)
      .def_readonly("tail_max_distance", &AnalysisReport::tail_max_distance)
      .def_readonly("tail_mean_distance", &AnalysisReport::tail_mean_distance)
      .def_readonly("tail_oscillation", &AnalysisReport::tail_oscillation)
      .def_readonly("feasibility", &AnalysisReport::feasibility)
      .def_readonly("step_size", &AnalysisReport::step_size)
      .def_readonly("rate", &AnalysisReport::rate)
      .def_readonly("epsilon", &AnalysisReport::epsilon)
      .def_readonly("warnings", &AnalysisReport::warnings);

  m.def("analyze", &analyze, py::arg("trajectory"), py::arg("spec"),
        py::arg("schedule"), py::arg("map"),
        py::arg("options") = AnalysisOptions{},
        py::call_guard<py::gil_scoped_release>());

  // ----- scenario harness -----
  py::class_<RunOutcome>(m, "RunOutcome")
      .def_readonly("exit_code", &RunOutcome::exit_code)
      .def_readonly("report", &RunOutcome::report)
      .def_readonly("output_files", &RunOutcome::output_files)
      .def_readonly("message", &RunOutcome::message);

  m.def(
      "run_scenario",
      [](const std::string& path, const std::string& out_dir, bool strict,
         bool quiet, std::optional<std::uint64_t> seed) {
        const Scenario s = load_scenario(path, seed);
        return run_scenario(s, out_dir, strict, quiet);
      },
      py::arg("path"), py::arg("out_dir") = ".", py::arg("strict") = false,
      py::arg("quiet") = true, py::arg("seed") = std::nullopt);

  m.def(
      "sweep",
      [](const std::string& path, const std::string& parameter,
         const std::vector<double>& values, const std::string& out_dir,
         bool strict, bool quiet) {
        const Scenario s = load_scenario(path, std::nullopt);
        return sweep(s, parameter, values, out_dir, strict, quiet);
      },
      py::arg("path"), py::arg("parameter"), py::arg("values"),
      py::arg("out_dir") = ".", py::arg("strict") = false, py::arg("quiet") = true);

  m.attr("__version__") = "0.1.0";
}
