#pragma once

#include <span>

namespace sumalloc {

/// Error-free transform: returns s = fl(a + b) and sets e so that
/// s + e equals a + b exactly (Knuth's TwoSum, no magnitude ordering needed).
inline double two_sum(double a, double b, double& e) {
  const double s = a + b;
  const double bb = s - a;
  e = (a - (s - bb)) + (b - bb);
  return s;
}

/// A double-double accumulator: the represented value is hi + lo with
/// |lo| bounded by half an ulp of hi. Adding a double loses only
/// O(2^-105) of the magnitude per operation, which keeps per-agent
/// resource bookkeeping exact at double precision over long runs.
struct CompensatedValue {
  double hi = 0.0;
  double lo = 0.0;

  CompensatedValue() = default;
  explicit CompensatedValue(double v) : hi(v) {}

  double value() const { return hi + lo; }

  void add(double d) {
    double e;
    const double s = two_sum(hi, d, e);
    const double t = lo + e;
    // renormalize (FastTwoSum; |t| <= |s| holds here)
    hi = s + t;
    lo = t - (hi - s);
  }
};

/// Neumaier-compensated running sum of doubles.
class NeumaierSum {
 public:
  void add(double x) {
    double e;
    sum_ = two_sum(sum_, x, e);
    comp_ += e;
  }
  double result() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double neumaier_sum(std::span<const double> xs) {
  NeumaierSum acc;
  for (double x : xs) acc.add(x);
  return acc.result();
}

}  // namespace sumalloc
