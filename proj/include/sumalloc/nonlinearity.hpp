#pragma once

#include <optional>
#include <string>

namespace sumalloc {

enum class MapKind {
  identity,
  saturation,
  log_quantizer,
  uniform_quantizer,
  signpower_sum,
};

/// Ratio bounds 0 < lower <= h(z)/z <= upper valid on a stated range.
struct SectorBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Scalar map h applied to exchanged gradient values, either at nodes
/// (actuation) or on links (communication). All built-ins are odd with
/// h(0) = 0, so paired exchanges cancel.
class NonlinearMap {
 public:
  static NonlinearMap identity();
  static NonlinearMap saturation(double level);
  static NonlinearMap log_quantizer(double q);
  static NonlinearMap uniform_quantizer(double q);
  static NonlinearMap signpower_sum(double mu1, double mu2);

  MapKind kind() const { return kind_; }
  double level() const { return a_; }  // saturation level or quantizer step
  double mu1() const { return a_; }
  double mu2() const { return b_; }

  double operator()(double z) const;
  bool odd() const { return true; }

  /// Exact bounds of h(z)/z over 0 < |z| <= range when positive and finite;
  /// nullopt marks the map non-sector there (uniform quantizer dead zone,
  /// signpower blow-up at the origin).
  std::optional<SectorBounds> sector_bounds(double range) const;

  std::string name() const;

 private:
  NonlinearMap(MapKind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}
  MapKind kind_;
  double a_ = 0.0;
  double b_ = 0.0;
};

/// Sampled check of the sector/oddness/monotonicity assumptions. Samples
/// log-spaced magnitudes in [lo, hi] plus sign flips.
struct AssumptionReport {
  double ratio_inf = 0.0;      // measured inf of h(z)/z over samples
  double ratio_sup = 0.0;      // measured sup
  double oddness_defect = 0.0; // max |h(z) + h(-z)|
  int monotonicity_violations = 0;
  bool sector = false;         // inf > 0 and sup finite
  int sample_count = 0;
};

AssumptionReport verify_assumptions(const NonlinearMap& h, double lo, double hi,
                                    int count = 1000);

}  // namespace sumalloc
