#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sumalloc/objective.hpp"
#include "sumalloc/protocol.hpp"

namespace sumalloc {

// ---------------------------------------------------------------------------
// Ground-truth solver
// ---------------------------------------------------------------------------

/// Centralized optimizer by scalar search: bisection over the common
/// gradient value lambda such that sum_i (f_i')^{-1}(lambda) = b (for
/// weighted problems, f_i'(y_i) = lambda * a_i and sum a_i y_i = b).
/// Throws on infeasible boxes and on detected non-monotone gradients.
Vector solve_oracle(const ProblemSpec& spec);

/// Closed-form optimizer for pure quadratic costs (no augmentation):
/// x_i = (lambda + demand_i) / pi_i with lambda from the resource balance.
Vector quadratic_closed_form(const ProblemSpec& spec);

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Gradient dispersion xi_i = f_i'(x_i) - mean_j f_j'(x_j); sums to zero and
/// vanishes exactly at the optimizer.
Vector dispersion(const ProblemSpec& spec, const Vector& x);

/// epsilon = sqrt(n) * q / (4v): radius of the neighborhood of the optimizer
/// reachable under uniform quantization with level q.
double epsilon_accuracy(double q, double v, int n);

/// Largest quantization level that still guarantees the demanded accuracy:
/// q = 4 * v * epsilon / sqrt(n).
double quantization_inverse_design(double epsilon, double v, int n);

/// The three residual/distance/dispersion sandwiches for a feasible state:
///   v|x-x*|^2 <= F(x)-F(x*) <= u|x-x*|^2
///   |xi|/(2u) <= |x-x*| <= |xi|/(2v)
///   xi'xi/(4u) <= F(x)-F(x*) <= xi'xi/(4v)
struct SandwichReport {
  bool applicable = false;  // v > 0 required
  bool residual_distance_lower = false, residual_distance_upper = false;
  bool distance_dispersion_lower = false, distance_dispersion_upper = false;
  bool residual_dispersion_lower = false, residual_dispersion_upper = false;
  double worst_slack = 0.0;  // most negative margin, scaled
  bool all() const {
    return applicable && residual_distance_lower && residual_distance_upper &&
           distance_dispersion_lower && distance_dispersion_upper &&
           residual_dispersion_lower && residual_dispersion_upper;
  }
};

SandwichReport sandwich_check(const ProblemSpec& spec, const Vector& x,
                              const Vector& x_star, double v, double u,
                              double rel_tol = 1e-8);

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

enum class CertStatus { holds, violated, not_applicable };

std::string to_string(CertStatus s);

struct Certificate {
  std::string name;
  double value = 0.0;   // bound value (step bound, contraction bound, epsilon, drift)
  CertStatus status = CertStatus::not_applicable;
  double slack = 0.0;   // margin by which the bound holds (negative if violated)
  std::string note;
};

/// Per-window residual contraction check against the bound
///   F(k+B)/F(k) <= 1 - eta*v*(a_lower*lambda2 - u/2*lambda_n^2*a_upper*eta).
struct RateCheck {
  double contraction_bound = 0.0;
  double max_ratio = 0.0;
  long windows_checked = 0;
  long violations = 0;
};

RateCheck check_rate(const std::vector<double>& residuals, double eta,
                     double v, double u, const SectorBounds& sector,
                     const LaplacianSpectrum& sp, int window = 1,
                     double residual_floor = 1e-12, double tol = 1e-10);

/// Problem-wide curvature bounds over the default operating intervals:
/// the agent's box when present, otherwise a window of half-width
/// max(|b|, 1) around the optimizer.
struct CurvatureSummary {
  double v = 0.0, u = 0.0;
  double lo = 0.0, hi = 0.0;  // hull of the sampled intervals
  bool from_boxes = false;
};

CurvatureSummary problem_curvature(const ProblemSpec& spec,
                                   const Vector& x_star, int samples = 10000);

/// Spectrum of the network the certificates refer to: the single frame for
/// static undirected schedules, the period-union graph for time-varying ones
/// (a heuristic extension, flagged in *note), nullopt when any frame is
/// directed.
std::optional<LaplacianSpectrum> schedule_spectrum(const GraphSchedule& schedule,
                                                   std::string* note = nullptr);

// ---------------------------------------------------------------------------
// Full-trajectory analysis
// ---------------------------------------------------------------------------

struct AnalysisOptions {
  double tail_fraction = 0.1;  // tail window for epsilon certification
  long tail_min_rows = 100;
  double feasibility_tol_scale = 1e-9;  // drift allowance 1e-9 * (1 + |b|)
  double residual_floor = 1e-12;
  double rate_tol = 1e-10;
  std::optional<int> rate_window;  // override (B); defaults to schedule period
  int curvature_samples = 10000;
};

struct AnalysisReport {
  Vector x_star;
  double f_star = 0.0;

  std::vector<double> residuals;        // F(x(k)) - F(x*), per recorded row
  std::vector<double> dispersion_norms; // |xi(x(k))|
  std::vector<double> distances;        // |x(k) - x*|

  double feasibility_drift = 0.0;
  double final_distance = 0.0;
  double final_residual = 0.0;
  double final_kkt = 0.0;

  double v = 0.0, u = 0.0;              // curvature bounds used
  double curvature_lo = 0.0, curvature_hi = 0.0;  // sampling interval hull
  std::string curvature_interval_note;

  std::optional<double> lambda2, lambda_n;
  std::optional<double> eta_bound;      // step-size bound when available
  std::optional<SectorBounds> sector;   // sector bounds used
  double sector_range = 0.0;

  double tail_max_distance = 0.0;
  double tail_mean_distance = 0.0;
  double tail_oscillation = 0.0;        // max - min tail distance
  long tail_rows = 0;

  Certificate feasibility, step_size, rate, epsilon;

  std::vector<std::string> warnings;
};

/// Evaluates metrics and the feasibility / step-size / rate / epsilon
/// certificates for a finished run.
AnalysisReport analyze(const Trajectory& traj, const ProblemSpec& spec,
                       const GraphSchedule& schedule, const NonlinearMap& h,
                       const AnalysisOptions& options = {});

}  // namespace sumalloc
