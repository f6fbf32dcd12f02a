#pragma once

#include <stdexcept>
#include <vector>

#include "sumalloc/nonlinearity.hpp"
#include "sumalloc/objective.hpp"
#include "sumalloc/topology.hpp"

namespace sumalloc {

enum class Variant { dt_node, dt_link, ct_node, ct_link };

bool variant_is_continuous(Variant v);
bool variant_is_node_based(Variant v);

struct Initializer {
  enum class Kind { equal_split, weighted_feasible, custom };
  Kind kind = Kind::equal_split;
  Vector custom;

  static Initializer equal_split() { return {}; }
  static Initializer weighted_feasible() {
    return {Kind::weighted_feasible, {}};
  }
  static Initializer custom_vector(Vector x) {
    return {Kind::custom, std::move(x)};
  }
};

struct ProtocolConfig {
  Variant variant = Variant::dt_node;
  double eta = 1e-2;   // DT step size, or CT rate
  double dt = 1e-2;    // CT integration step; effective step is eta * dt
  long horizon = 1000; // number of steps K
  NonlinearMap map = NonlinearMap::identity();
  Initializer initializer;
  bool record_states = true;    // keep the full state history
  double divergence_guard = 1e12;

  double effective_step() const;
};

/// Raised when a state turns non-finite or exceeds the divergence guard;
/// carries the step index at which integration stopped.
class NumericalAbort : public std::runtime_error {
 public:
  NumericalAbort(long step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

struct Trajectory {
  Matrix states;                 // (rows x n); full history or first+last row
  std::vector<double> times;     // per recorded row: k (DT) or k*dt (CT)
  std::vector<long> step_index;  // per recorded row
  std::vector<double> sums;      // compensated state sum per recorded row
  std::vector<int> frame_index;  // active schedule frame, per step
  double applied_step = 0.0;     // effective step size used throughout
  long steps = 0;                // K
  double feasibility_drift = 0.0; // max over all steps |sum - b|
  double resource_total = 0.0;    // b

  int agents() const { return static_cast<int>(states.cols()); }
  long rows() const { return static_cast<long>(states.rows()); }
  Vector row(long r) const { return states.row(r).transpose(); }
  Vector final_state() const { return states.row(states.rows() - 1).transpose(); }
  /// Largest |h input| seen during the run (gradient differences for
  /// node-based variants, gradients for link-based); sizes the sector range.
  double max_map_argument = 0.0;
};

/// Initial allocation summing to b, the last agent compensated so the
/// recorded sum is exact. weighted_feasible distributes b across the boxes
/// proportionally to capacity and requires every agent boxed.
Vector initial_state(const ProblemSpec& spec, const Initializer& init);

/// One step of the node-based dynamics
///   x_i += eta * sum_j W(i,j) h(f_j'(x_j) - f_i'(x_i));
/// requires symmetric weights. The update is accumulated per undirected edge
/// as an equal-and-opposite pair, so the state sum is conserved exactly.
Vector step_dt_node(const Vector& x, const WeightedGraph& g,
                    const ProblemSpec& spec, const NonlinearMap& h, double eta);

/// One step of the link-based dynamics
///   x_i += eta * sum_j W(i,j) (h(f_j'(x_j)) - h(f_i'(x_i)));
/// requires a weight-balanced graph (undirected graphs qualify).
Vector step_dt_link(const Vector& x, const WeightedGraph& g,
                    const ProblemSpec& spec, const NonlinearMap& h, double eta);

/// Runs the configured dynamics over the schedule. CT variants integrate by
/// forward Euler with effective step eta*dt, which coincides with the DT
/// update rule, so feasibility guarantees carry over.
Trajectory run(const ProtocolConfig& config, const ProblemSpec& spec,
               const GraphSchedule& schedule);

/// Largest provably convergent step size 2*a_lower*lambda2/(u*lambda_n^2*a_upper)
/// for a sector map on a connected undirected network; nullopt when the map
/// is non-sector or the spectrum lacks lambda2 (disconnected).
std::optional<double> max_step_size(const LaplacianSpectrum& sp, double u,
                                    const std::optional<SectorBounds>& sector);

}  // namespace sumalloc
