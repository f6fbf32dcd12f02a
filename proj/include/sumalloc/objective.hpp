#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sumalloc/topology.hpp"  // Vector

namespace sumalloc {

// ---------------------------------------------------------------------------
// Penalty and barrier primitives
// ---------------------------------------------------------------------------

/// Exterior penalty c*[x - M]^+ + c*[m - x]^+ on the box [m, M].
double penalty_max(double x, double m, double M, double c);

/// Smooth surrogate of [z]^+: (1/mu) log(1 + exp(mu z)), overflow-safe.
double penalty_softplus(double z, double mu);

/// ([z]^+)^kappa for integer kappa > 1; throws std::invalid_argument otherwise.
double penalty_power(double z, int kappa);

enum class BarrierKind { log_barrier, inverse_barrier };

/// Interior barrier evaluated at a constraint value g < 0:
/// -log(-g) or -1/g. Throws std::domain_error at or outside the boundary.
double barrier(BarrierKind kind, double g_value);

// ---------------------------------------------------------------------------
// Agent costs
// ---------------------------------------------------------------------------

enum class CostKind { quadratic_cpu, quartic, polynomial };

enum class AugmentationKind {
  none,
  penalty_max,       // non-smooth; subgradient 0 at the kink
  penalty_softplus,
  penalty_power,
  barrier_log,
  barrier_inverse,
};

struct Augmentation {
  AugmentationKind kind = AugmentationKind::none;
  double c = 1.0;   // constraint weight
  double mu = 1.0;  // softplus sharpness
  int kappa = 2;    // power exponent
};

struct Box {
  double lo = 0.0;
  double hi = 0.0;
};

struct Eval {
  double value = 0.0;
  double gradient = 0.0;
  double curvature = 0.0;
};

/// One agent's strictly convex cost with analytic derivatives, optionally
/// augmented by a penalty or barrier on a box, and optionally pre-composed
/// with the linear change of variable y = s*x (used to fold per-agent
/// weights into an unweighted problem).
class AgentCost {
 public:
  /// 0.5*pi*(x - (rho + occupied)/pi)^2 : pi the node capacity, rho the
  /// cycles requested, occupied the cycles already in use.
  static AgentCost quadratic_cpu(double pi, double rho, double occupied);
  static AgentCost quartic(double omega, double alpha);
  static AgentCost polynomial(std::vector<double> coeffs);  // ascending powers

  AgentCost with_box(Box box, Augmentation aug) const;
  AgentCost scaled_input(double s) const;  // f(x) = this(s * x)

  /// Value, gradient and second derivative at x, augmentation included.
  /// Barrier kinds throw std::domain_error at or outside the box boundary,
  /// naming the violated constraint.
  Eval eval(double x) const;

  /// f(x) - f(x_ref) in factored form, accurate in a relative sense even
  /// when the two values nearly cancel (residuals near the optimizer).
  double value_difference(double x, double x_ref) const;

  CostKind kind() const { return kind_; }
  const Augmentation& augmentation() const { return aug_; }
  const std::optional<Box>& box() const { return box_; }  // base frame
  double input_scale() const { return scale_; }
  bool nonsmooth() const { return aug_.kind == AugmentationKind::penalty_max; }
  bool barrier_augmented() const;

  /// Box expressed in the input frame (endpoints reordered when the scale is
  /// negative); nullopt when unboxed.
  std::optional<Box> box_in_input_frame() const;
  /// Open domain in the input frame for barrier-augmented costs.
  std::optional<Box> domain_in_input_frame() const;

  // base parameters (for closed forms and reports)
  double pi() const { return p0_; }
  double demand() const { return p1_ + p2_; }  // rho + occupied
  double omega() const { return p0_; }
  double alpha() const { return p1_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

 private:
  AgentCost() = default;
  Eval eval_base(double y) const;
  Eval eval_augmentation(double y) const;

  CostKind kind_ = CostKind::quadratic_cpu;
  double p0_ = 1.0, p1_ = 0.0, p2_ = 0.0;
  std::vector<double> coeffs_;
  std::optional<Box> box_;
  Augmentation aug_;
  double scale_ = 1.0;
};

/// Sampled curvature bounds 2v <= f'' <= 2u over [lo, hi].
struct CurvatureBounds {
  double v = 0.0;
  double u = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int samples = 0;
};

CurvatureBounds curvature_bounds(const AgentCost& f, double lo, double hi,
                                 int samples = 10000);

// ---------------------------------------------------------------------------
// Global problem
// ---------------------------------------------------------------------------

/// min sum_i f_i(x_i) subject to sum_i x_i = b, or sum_i a_i y_i = b when
/// per-agent weights a_i are present.
struct ProblemSpec {
  std::vector<AgentCost> costs;
  double b = 0.0;
  std::vector<double> weights;  // empty => unweighted

  int size() const { return static_cast<int>(costs.size()); }
  bool weighted() const { return !weights.empty(); }

  /// Throws on empty cost list, zero weights, or an empty feasible set
  /// (sum of box minima must not exceed b, nor b the sum of maxima, when
  /// every agent is boxed).
  void validate() const;
};

/// Change of variable x_i = a_i * y_i: returns the equivalent unweighted
/// problem; boxes map through the transform with endpoint order corrected.
ProblemSpec reweight(const ProblemSpec& spec);

Vector gradients(const ProblemSpec& spec, const Vector& x);
double total_cost(const ProblemSpec& spec, const Vector& x);

/// F(x) - F(x_ref) accumulated from the per-agent factored differences.
double total_cost_difference(const ProblemSpec& spec, const Vector& x,
                             const Vector& x_ref);

/// Gradient-equalization optimality defect: max_i f_i'(x_i) - min_i f_i'(x_i)
/// (for weighted problems, of f_i'(y_i)/a_i). Zero exactly at the optimizer.
double kkt_residual(const ProblemSpec& spec, const Vector& x);

}  // namespace sumalloc
