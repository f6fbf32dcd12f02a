#include "sumalloc/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "sumalloc/compensated.hpp"

namespace sumalloc {

double penalty_max(double x, double m, double M, double c) {
  if (!(m <= M)) throw std::invalid_argument("penalty_max: requires m <= M");
  if (!(c > 0.0)) throw std::invalid_argument("penalty_max: requires c > 0");
  return c * std::max(x - M, 0.0) + c * std::max(m - x, 0.0);
}

double penalty_softplus(double z, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("penalty_softplus: requires mu > 0");
  const double t = mu * z;
  if (t > 30.0) return z + std::log1p(std::exp(-t)) / mu;
  return std::log1p(std::exp(t)) / mu;
}

double penalty_power(double z, int kappa) {
  if (kappa <= 1) throw std::invalid_argument("penalty_power: requires integer kappa > 1");
  if (z <= 0.0) return 0.0;
  return std::pow(z, kappa);
}

double barrier(BarrierKind kind, double g_value) {
  if (!(g_value < 0.0)) {
    std::ostringstream os;
    os << "barrier: constraint value g = " << g_value
       << " is not strictly negative (state at or outside the boundary)";
    throw std::domain_error(os.str());
  }
  if (kind == BarrierKind::log_barrier) return -std::log(-g_value);
  return -1.0 / g_value;
}

namespace {

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double positive_pow(double z, int k) {       // [z]^+ ^ k with 0^0 treated as 0
  if (z <= 0.0) return 0.0;
  if (k <= 0) return 1.0;
  return std::pow(z, k);
}

}  // namespace

AgentCost AgentCost::quadratic_cpu(double pi, double rho, double occupied) {
  if (!(pi > 0.0)) throw std::invalid_argument("quadratic_cpu: capacity pi must be positive");
  AgentCost c;
  c.kind_ = CostKind::quadratic_cpu;
  c.p0_ = pi;
  c.p1_ = rho;
  c.p2_ = occupied;
  return c;
}

AgentCost AgentCost::quartic(double omega, double alpha) {
  if (omega < 0.0) throw std::invalid_argument("quartic: omega must be nonnegative");
  AgentCost c;
  c.kind_ = CostKind::quartic;
  c.p0_ = omega;
  c.p1_ = alpha;
  return c;
}

AgentCost AgentCost::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) throw std::invalid_argument("polynomial: needs coefficients");
  AgentCost c;
  c.kind_ = CostKind::polynomial;
  c.coeffs_ = std::move(coeffs);
  return c;
}

AgentCost AgentCost::with_box(Box box, Augmentation aug) const {
  if (!(box.lo <= box.hi)) throw std::invalid_argument("box: requires lo <= hi");
  if (aug.kind == AugmentationKind::penalty_power && aug.kappa <= 1) {
    throw std::invalid_argument("penalty_power: requires integer kappa > 1");
  }
  if (aug.kind != AugmentationKind::none && !(aug.c > 0.0)) {
    throw std::invalid_argument("augmentation: requires c > 0");
  }
  if (aug.kind == AugmentationKind::penalty_softplus && !(aug.mu > 0.0)) {
    throw std::invalid_argument("penalty_softplus: requires mu > 0");
  }
  AgentCost c = *this;
  c.box_ = box;
  c.aug_ = aug;
  return c;
}

AgentCost AgentCost::scaled_input(double s) const {
  if (s == 0.0 || !std::isfinite(s)) {
    throw std::invalid_argument("scaled_input: scale must be finite and nonzero");
  }
  AgentCost c = *this;
  c.scale_ *= s;
  return c;
}

bool AgentCost::barrier_augmented() const {
  return aug_.kind == AugmentationKind::barrier_log ||
         aug_.kind == AugmentationKind::barrier_inverse;
}

std::optional<Box> AgentCost::box_in_input_frame() const {
  if (!box_) return std::nullopt;
  const double a = box_->lo / scale_;
  const double b = box_->hi / scale_;
  return Box{std::min(a, b), std::max(a, b)};
}

std::optional<Box> AgentCost::domain_in_input_frame() const {
  if (!barrier_augmented()) return std::nullopt;
  return box_in_input_frame();
}

Eval AgentCost::eval_base(double y) const {
  Eval e;
  switch (kind_) {
    case CostKind::quadratic_cpu: {
      const double d = y - (p1_ + p2_) / p0_;
      e.value = 0.5 * p0_ * d * d;
      e.gradient = p0_ * d;
      e.curvature = p0_;
      break;
    }
    case CostKind::quartic: {
      const double d = y - p1_;
      const double d2 = d * d;
      e.value = p0_ * d2 * d2;
      e.gradient = 4.0 * p0_ * d2 * d;
      e.curvature = 12.0 * p0_ * d2;
      break;
    }
    case CostKind::polynomial: {
      // Horner for f, f', f'' in one pass
      double v = 0.0, g = 0.0, c = 0.0;
      for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        c = c * y + 2.0 * g;
        g = g * y + v;
        v = v * y + *it;
      }
      e.value = v;
      e.gradient = g;
      e.curvature = c;
      break;
    }
  }
  return e;
}

Eval AgentCost::eval_augmentation(double y) const {
  Eval e;
  if (aug_.kind == AugmentationKind::none || !box_) return e;
  const double m = box_->lo;
  const double M = box_->hi;
  const double zu = y - M;  // ge 0 above the box
  const double zl = m - y;  // ge 0 below the box
  const double c = aug_.c;

  switch (aug_.kind) {
    case AugmentationKind::none:
      break;
    case AugmentationKind::penalty_max:
      e.value = c * (std::max(zu, 0.0) + std::max(zl, 0.0));
      e.gradient = c * ((zu > 0.0 ? 1.0 : 0.0) - (zl > 0.0 ? 1.0 : 0.0));
      e.curvature = 0.0;
      break;
    case AugmentationKind::penalty_softplus: {
      const double mu = aug_.mu;
      const double su = sigmoid(mu * zu);
      const double sl = sigmoid(mu * zl);
      e.value = c * (penalty_softplus(zu, mu) + penalty_softplus(zl, mu));
      e.gradient = c * (su - sl);
      e.curvature = c * mu * (su * (1.0 - su) + sl * (1.0 - sl));
      break;
    }
    case AugmentationKind::penalty_power: {
      const int k = aug_.kappa;
      e.value = c * (positive_pow(zu, k) + positive_pow(zl, k));
      e.gradient = c * k * (positive_pow(zu, k - 1) - positive_pow(zl, k - 1));
      e.curvature =
          c * k * (k - 1) * (positive_pow(zu, k - 2) + positive_pow(zl, k - 2));
      break;
    }
    case AugmentationKind::barrier_log:
    case AugmentationKind::barrier_inverse: {
      if (zu >= 0.0 || zl >= 0.0) {
        std::ostringstream os;
        os << "barrier domain violated: "
           << (zu >= 0.0 ? "g_upper(x) = x - M = " : "g_lower(x) = m - x = ")
           << (zu >= 0.0 ? zu : zl) << " >= 0";
        throw std::domain_error(os.str());
      }
      const double du = M - y;  // distance to the upper boundary
      const double dl = y - m;
      if (aug_.kind == AugmentationKind::barrier_log) {
        e.value = c * (-std::log(du) - std::log(dl));
        e.gradient = c * (1.0 / du - 1.0 / dl);
        e.curvature = c * (1.0 / (du * du) + 1.0 / (dl * dl));
      } else {
        e.value = c * (1.0 / du + 1.0 / dl);
        e.gradient = c * (1.0 / (du * du) - 1.0 / (dl * dl));
        e.curvature = c * (2.0 / (du * du * du) + 2.0 / (dl * dl * dl));
      }
      break;
    }
  }
  return e;
}

Eval AgentCost::eval(double x) const {
  const double y = scale_ * x;
  Eval base = eval_base(y);
  const Eval aug = eval_augmentation(y);
  base.value += aug.value;
  base.gradient += aug.gradient;
  base.curvature += aug.curvature;
  base.gradient *= scale_;
  base.curvature *= scale_ * scale_;
  return base;
}

namespace {

// a^k - b^k for a, b >= 0 without cancellation: (a - b) * sum a^i b^(k-1-i)
double positive_pow_difference(double a, double b, int k) {
  if (a == b) return 0.0;
  double acc = 0.0;
  for (int i = 0; i < k; ++i) {
    acc += positive_pow(a, i) * positive_pow(b, k - 1 - i);
  }
  return (a - b) * acc;
}

}  // namespace

double AgentCost::value_difference(double x, double x_ref) const {
  const double y = scale_ * x;
  const double r = scale_ * x_ref;
  double diff = 0.0;

  switch (kind_) {
    case CostKind::quadratic_cpu: {
      const double c = (p1_ + p2_) / p0_;
      diff = 0.5 * p0_ * (y - r) * ((y - c) + (r - c));
      break;
    }
    case CostKind::quartic: {
      const double a = y - p1_;
      const double b = r - p1_;
      diff = p0_ * (a - b) * (a + b) * (a * a + b * b);
      break;
    }
    case CostKind::polynomial:
      diff = eval_base(y).value - eval_base(r).value;
      break;
  }

  if (aug_.kind == AugmentationKind::none || !box_) return diff;
  const double m = box_->lo;
  const double M = box_->hi;
  const double c = aug_.c;
  const double zu = y - M, zu_r = r - M;
  const double zl = m - y, zl_r = m - r;

  switch (aug_.kind) {
    case AugmentationKind::none:
      break;
    case AugmentationKind::penalty_max:
      diff += c * (std::max(zu, 0.0) - std::max(zu_r, 0.0) +
                   std::max(zl, 0.0) - std::max(zl_r, 0.0));
      break;
    case AugmentationKind::penalty_softplus:
      diff += c * (penalty_softplus(zu, aug_.mu) - penalty_softplus(zu_r, aug_.mu) +
                   penalty_softplus(zl, aug_.mu) - penalty_softplus(zl_r, aug_.mu));
      break;
    case AugmentationKind::penalty_power:
      diff += c * (positive_pow_difference(std::max(zu, 0.0), std::max(zu_r, 0.0), aug_.kappa) +
                   positive_pow_difference(std::max(zl, 0.0), std::max(zl_r, 0.0), aug_.kappa));
      break;
    case AugmentationKind::barrier_log: {
      if (zu >= 0.0 || zl >= 0.0 || zu_r >= 0.0 || zl_r >= 0.0) {
        eval_augmentation(zu >= 0.0 || zl >= 0.0 ? y : r);  // throws
      }
      const double du = M - y, dl = y - m;
      const double du_r = M - r, dl_r = r - m;
      diff += c * (std::log1p((du_r - du) / du) + std::log1p((dl_r - dl) / dl));
      break;
    }
    case AugmentationKind::barrier_inverse: {
      if (zu >= 0.0 || zl >= 0.0 || zu_r >= 0.0 || zl_r >= 0.0) {
        eval_augmentation(zu >= 0.0 || zl >= 0.0 ? y : r);  // throws
      }
      const double du = M - y, dl = y - m;
      const double du_r = M - r, dl_r = r - m;
      diff += c * ((du_r - du) / (du * du_r) + (dl_r - dl) / (dl * dl_r));
      break;
    }
  }
  return diff;
}

CurvatureBounds curvature_bounds(const AgentCost& f, double lo, double hi,
                                 int samples) {
  if (!(lo < hi)) throw std::invalid_argument("curvature_bounds: requires lo < hi");
  if (samples < 2) throw std::invalid_argument("curvature_bounds: needs at least 2 samples");
  if (auto dom = f.domain_in_input_frame()) {
    const double margin = 1e-9 * (dom->hi - dom->lo);
    lo = std::max(lo, dom->lo + margin);
    hi = std::min(hi, dom->hi - margin);
  }
  CurvatureBounds cb;
  cb.lo = lo;
  cb.hi = hi;
  cb.samples = samples;
  cb.v = std::numeric_limits<double>::infinity();
  cb.u = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / (samples - 1);
    const double half = 0.5 * f.eval(x).curvature;
    cb.v = std::min(cb.v, half);
    cb.u = std::max(cb.u, half);
  }
  return cb;
}

void ProblemSpec::validate() const {
  if (costs.empty()) throw std::invalid_argument("problem: needs at least one agent");
  if (weighted()) {
    if (weights.size() != costs.size()) {
      throw std::invalid_argument("problem: weights must match the agent count");
    }
    for (double a : weights) {
      if (a == 0.0 || !std::isfinite(a)) {
        throw std::invalid_argument("problem: degenerate weight a_i = 0");
      }
    }
  }
  // feasibility of the box constraints against the resource total
  bool all_boxed = true;
  double lo_sum = 0.0, hi_sum = 0.0;
  for (size_t i = 0; i < costs.size(); ++i) {
    const auto box = costs[i].box_in_input_frame();
    if (!box) {
      all_boxed = false;
      break;
    }
    const double a = weighted() ? weights[i] : 1.0;
    const double e1 = a * box->lo;
    const double e2 = a * box->hi;
    lo_sum += std::min(e1, e2);
    hi_sum += std::max(e1, e2);
  }
  if (all_boxed && !(lo_sum <= b && b <= hi_sum)) {
    std::ostringstream os;
    os << "problem: empty feasible set - resource total " << b
       << " outside the box sum range [" << lo_sum << ", " << hi_sum << "]";
    throw std::invalid_argument(os.str());
  }
}

ProblemSpec reweight(const ProblemSpec& spec) {
  if (!spec.weighted()) return spec;
  spec.validate();
  ProblemSpec out;
  out.b = spec.b;
  out.costs.reserve(spec.costs.size());
  for (size_t i = 0; i < spec.costs.size(); ++i) {
    out.costs.push_back(spec.costs[i].scaled_input(1.0 / spec.weights[i]));
  }
  return out;
}

Vector gradients(const ProblemSpec& spec, const Vector& x) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    g[i] = spec.costs[static_cast<size_t>(i)].eval(x[i]).gradient;
  }
  return g;
}

double total_cost(const ProblemSpec& spec, const Vector& x) {
  NeumaierSum acc;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    acc.add(spec.costs[static_cast<size_t>(i)].eval(x[i]).value);
  }
  return acc.result();
}

double total_cost_difference(const ProblemSpec& spec, const Vector& x,
                             const Vector& x_ref) {
  NeumaierSum acc;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    acc.add(spec.costs[static_cast<size_t>(i)].value_difference(x[i], x_ref[i]));
  }
  return acc.result();
}

double kkt_residual(const ProblemSpec& spec, const Vector& x) {
  if (x.size() != spec.size()) {
    throw std::invalid_argument("kkt_residual: state size mismatch");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double g = spec.costs[static_cast<size_t>(i)].eval(x[i]).gradient;
    if (spec.weighted()) g /= spec.weights[static_cast<size_t>(i)];
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  }
  return hi - lo;
}

}  // namespace sumalloc
