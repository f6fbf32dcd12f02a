#include "sumalloc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sumalloc/compensated.hpp"

namespace sumalloc {

namespace {

// Solves f'(x) = target on the strictly increasing gradient by bracketing
// plus bisection. Barrier-augmented costs are bracketed from inside the box.
double invert_gradient(const AgentCost& f, double target) {
  double lo, hi;
  const auto dom = f.domain_in_input_frame();
  if (dom) {
    const double span = dom->hi - dom->lo;
    if (!(span > 0.0)) return dom->lo;
    double eps = 0.25;
    lo = dom->lo + eps * span;
    while (f.eval(lo).gradient > target) {
      eps *= 0.5;
      const double next = dom->lo + eps * span;
      if (next <= dom->lo || next == lo) break;
      lo = next;
    }
    eps = 0.25;
    hi = dom->hi - eps * span;
    while (f.eval(hi).gradient < target) {
      eps *= 0.5;
      const double next = dom->hi - eps * span;
      if (next >= dom->hi || next == hi) break;
      hi = next;
    }
  } else {
    double center = 0.0;
    if (const auto box = f.box_in_input_frame()) {
      center = 0.5 * (box->lo + box->hi);
    }
    double step = 1.0 + std::abs(center);
    lo = center - step;
    hi = center + step;
    int guard = 0;
    while (f.eval(lo).gradient > target) {
      step *= 2.0;
      lo = center - step;
      if (++guard > 300) {
        throw std::runtime_error("oracle: cannot bracket the gradient inverse (lower side)");
      }
    }
    guard = 0;
    step = 1.0 + std::abs(center);
    while (f.eval(hi).gradient < target) {
      step *= 2.0;
      hi = center + step;
      if (++guard > 300) {
        throw std::runtime_error("oracle: cannot bracket the gradient inverse (upper side)");
      }
    }
  }

  if (f.eval(lo).gradient > f.eval(hi).gradient) {
    throw std::runtime_error(
        "oracle: non-monotone gradient detected - cost is not convex on the bracket");
  }

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (f.eval(mid).gradient < target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * (1.0 + std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Vector solve_oracle(const ProblemSpec& spec) {
  spec.validate();
  const int n = spec.size();
  Vector x(n);

  const auto weight = [&](int i) {
    return spec.weighted() ? spec.weights[static_cast<size_t>(i)] : 1.0;
  };

  // weighted resource total at the gradient-equalization point for lambda:
  // f_i'(y_i) = lambda * a_i, allocation sum = sum a_i y_i
  const auto allocation = [&](double lambda) {
    NeumaierSum s;
    for (int i = 0; i < n; ++i) {
      const double a = weight(i);
      x[i] = invert_gradient(spec.costs[static_cast<size_t>(i)], lambda * a);
      s.add(a * x[i]);
    }
    return s.result();
  };

  double llo = 0.0, lhi = 0.0;
  double s0 = allocation(0.0);
  if (s0 < spec.b) {
    double step = 1.0;
    int guard = 0;
    do {
      lhi += step;
      step *= 2.0;
      if (++guard > 300) {
        throw std::runtime_error("oracle: resource total unreachable (infeasible problem)");
      }
    } while (allocation(lhi) < spec.b);
  } else {
    double step = 1.0;
    int guard = 0;
    while (allocation(llo) > spec.b) {
      llo -= step;
      step *= 2.0;
      if (++guard > 300) {
        throw std::runtime_error("oracle: resource total unreachable (infeasible problem)");
      }
    }
  }

  double lambda = 0.5 * (llo + lhi);
  for (int it = 0; it < 300; ++it) {
    lambda = 0.5 * (llo + lhi);
    if (lambda == llo || lambda == lhi) break;
    const double s = allocation(lambda);
    if (s < spec.b) {
      llo = lambda;
    } else {
      lhi = lambda;
    }
    if (lhi - llo <= 1e-15 * (1.0 + std::abs(lambda)) &&
        std::abs(s - spec.b) <= 1e-13 * (1.0 + std::abs(spec.b))) {
      break;
    }
  }
  allocation(0.5 * (llo + lhi));
  return x;
}

Vector quadratic_closed_form(const ProblemSpec& spec) {
  spec.validate();
  if (spec.weighted()) {
    throw std::invalid_argument("closed form: reweight the problem first");
  }
  double inv_pi_sum = 0.0;
  double target_sum = 0.0;
  for (const auto& c : spec.costs) {
    if (c.kind() != CostKind::quadratic_cpu ||
        c.augmentation().kind != AugmentationKind::none || c.input_scale() != 1.0) {
      throw std::invalid_argument(
          "closed form: only pure quadratic costs have a closed-form optimizer");
    }
    inv_pi_sum += 1.0 / c.pi();
    target_sum += c.demand() / c.pi();
  }
  const double lambda = (spec.b - target_sum) / inv_pi_sum;
  Vector x(spec.size());
  for (int i = 0; i < spec.size(); ++i) {
    const auto& c = spec.costs[static_cast<size_t>(i)];
    x[i] = (lambda + c.demand()) / c.pi();
  }
  return x;
}

Vector dispersion(const ProblemSpec& spec, const Vector& x) {
  Vector g = gradients(spec, x);
  NeumaierSum s;
  for (Eigen::Index i = 0; i < g.size(); ++i) s.add(g[i]);
  const double mean = s.result() / static_cast<double>(g.size());
  return g - Vector::Constant(g.size(), mean);
}

double epsilon_accuracy(double q, double v, int n) {
  if (!(q > 0.0)) throw std::invalid_argument("epsilon_accuracy: requires q > 0");
  if (!(v > 0.0)) throw std::invalid_argument("epsilon_accuracy: requires v > 0");
  if (n < 1) throw std::invalid_argument("epsilon_accuracy: requires n >= 1");
  return std::sqrt(static_cast<double>(n)) * q / (4.0 * v);
}

double quantization_inverse_design(double epsilon, double v, int n) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("inverse design: requires epsilon > 0");
  if (!(v > 0.0)) throw std::invalid_argument("inverse design: requires v > 0");
  if (n < 1) throw std::invalid_argument("inverse design: requires n >= 1");
  return 4.0 * v * epsilon / std::sqrt(static_cast<double>(n));
}

SandwichReport sandwich_check(const ProblemSpec& spec, const Vector& x,
                              const Vector& x_star, double v, double u,
                              double rel_tol) {
  SandwichReport rep;
  if (!(v > 0.0)) return rep;  // not applicable
  rep.applicable = true;

  const double residual = total_cost_difference(spec, x, x_star);
  const double d2 = (x - x_star).squaredNorm();
  const double d = std::sqrt(d2);
  const Vector xi = dispersion(spec, x);
  const double xi2 = xi.squaredNorm();
  const double xin = std::sqrt(xi2);

  rep.worst_slack = std::numeric_limits<double>::infinity();
  const auto check = [&](double lhs, double rhs, bool& flag) {
    // lhs <= rhs within rel_tol of the comparison scale
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    const double margin = (rhs - lhs) / scale;
    flag = margin >= -rel_tol;
    rep.worst_slack = std::min(rep.worst_slack, margin);
  };

  check(v * d2, residual, rep.residual_distance_lower);
  check(residual, u * d2, rep.residual_distance_upper);
  check(xin / (2.0 * u), d, rep.distance_dispersion_lower);
  check(d, xin / (2.0 * v), rep.distance_dispersion_upper);
  check(xi2 / (4.0 * u), residual, rep.residual_dispersion_lower);
  check(residual, xi2 / (4.0 * v), rep.residual_dispersion_upper);
  return rep;
}

std::string to_string(CertStatus s) {
  switch (s) {
    case CertStatus::holds: return "holds";
    case CertStatus::violated: return "violated";
    case CertStatus::not_applicable: return "not_applicable";
  }
  return "unknown";
}

RateCheck check_rate(const std::vector<double>& residuals, double eta,
                     double v, double u, const SectorBounds& sector,
                     const LaplacianSpectrum& sp, int window,
                     double residual_floor, double tol) {
  if (!sp.lambda2) throw std::invalid_argument("check_rate: spectrum lacks lambda2");
  if (window < 1) throw std::invalid_argument("check_rate: window must be positive");
  RateCheck rc;
  const double l2 = *sp.lambda2;
  const double ln = sp.lambda_n;
  rc.contraction_bound =
      1.0 - eta * v * (sector.lower * l2 - 0.5 * u * ln * ln * sector.upper * eta);
  for (size_t k = 0; k + static_cast<size_t>(window) < residuals.size(); ++k) {
    const double f0 = residuals[k];
    if (!(f0 > residual_floor)) continue;
    const double ratio = residuals[k + static_cast<size_t>(window)] / f0;
    if (rc.windows_checked == 0 || ratio > rc.max_ratio) rc.max_ratio = ratio;
    ++rc.windows_checked;
    if (ratio > rc.contraction_bound + tol) ++rc.violations;
  }
  return rc;
}

CurvatureSummary problem_curvature(const ProblemSpec& spec,
                                   const Vector& x_star, int samples) {
  CurvatureSummary cs;
  cs.v = std::numeric_limits<double>::infinity();
  cs.u = -std::numeric_limits<double>::infinity();
  cs.lo = std::numeric_limits<double>::infinity();
  cs.hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < spec.size(); ++i) {
    const auto& cost = spec.costs[static_cast<size_t>(i)];
    double lo, hi;
    if (const auto box = cost.box_in_input_frame()) {
      lo = box->lo;
      hi = box->hi;
      cs.from_boxes = true;
    } else {
      const double r = std::max(std::abs(spec.b), 1.0);
      lo = x_star[i] - r;
      hi = x_star[i] + r;
    }
    const auto cb = curvature_bounds(cost, lo, hi, samples);
    cs.v = std::min(cs.v, cb.v);
    cs.u = std::max(cs.u, cb.u);
    cs.lo = std::min(cs.lo, cb.lo);
    cs.hi = std::max(cs.hi, cb.hi);
  }
  return cs;
}

std::optional<LaplacianSpectrum> schedule_spectrum(const GraphSchedule& schedule,
                                                   std::string* note) {
  for (const auto& f : schedule.frames()) {
    if (!f.graph.is_undirected()) {
      if (note) *note = "bound certificates are issued for undirected networks only";
      return std::nullopt;
    }
  }
  const WeightedGraph g = schedule.is_static()
                              ? schedule.frames().front().graph
                              : schedule.union_graph(0, schedule.period());
  if (!schedule.is_static() && note) {
    *note = "heuristic extension: union-graph spectrum over one period";
  }
  return spectrum(laplacian(g));
}

AnalysisReport analyze(const Trajectory& traj, const ProblemSpec& spec,
                       const GraphSchedule& schedule, const NonlinearMap& h,
                       const AnalysisOptions& options) {
  AnalysisReport rep;
  const int n = spec.size();

  rep.x_star = solve_oracle(spec);
  rep.f_star = total_cost(spec, rep.x_star);

  const CurvatureSummary cs =
      problem_curvature(spec, rep.x_star, options.curvature_samples);
  rep.v = cs.v;
  rep.u = cs.u;
  rep.curvature_lo = cs.lo;
  rep.curvature_hi = cs.hi;
  rep.curvature_interval_note =
      cs.from_boxes ? "per-agent box" : "optimizer-centered window of half-width max(|b|,1)";
  if (rep.v < 0.0) {
    rep.warnings.push_back("sampled curvature is negative somewhere on the operating interval");
  }

  // per-row series
  const long rows = traj.rows();
  rep.residuals.reserve(static_cast<size_t>(rows));
  rep.dispersion_norms.reserve(static_cast<size_t>(rows));
  rep.distances.reserve(static_cast<size_t>(rows));
  Vector grad(n);
  for (long r = 0; r < rows; ++r) {
    NeumaierSum gsum;
    double dist2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double xi = traj.states(r, i);
      grad[i] = spec.costs[static_cast<size_t>(i)].eval(xi).gradient;
      gsum.add(grad[i]);
      const double d = xi - rep.x_star[i];
      dist2 += d * d;
    }
    const double mean = gsum.result() / n;
    double xi2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double c = grad[i] - mean;
      xi2 += c * c;
    }
    rep.residuals.push_back(
        total_cost_difference(spec, traj.row(r), rep.x_star));
    rep.dispersion_norms.push_back(std::sqrt(xi2));
    rep.distances.push_back(std::sqrt(dist2));
  }

  rep.feasibility_drift = traj.feasibility_drift;
  rep.final_distance = rep.distances.back();
  rep.final_residual = rep.residuals.back();
  rep.final_kkt = kkt_residual(spec, traj.final_state());

  // feasibility certificate
  const double feas_tol = options.feasibility_tol_scale * (1.0 + std::abs(spec.b));
  rep.feasibility = {"feasibility", rep.feasibility_drift,
                     rep.feasibility_drift <= feas_tol ? CertStatus::holds
                                                       : CertStatus::violated,
                     feas_tol - rep.feasibility_drift, ""};

  // spectrum of the active network (undirected only); time-varying schedules
  // use the union graph over one period, as a heuristic extension
  std::string spectrum_note;
  const std::optional<LaplacianSpectrum> sp =
      schedule_spectrum(schedule, &spectrum_note);
  if (sp) {
    rep.lambda2 = sp->lambda2;
    rep.lambda_n = sp->lambda_n;
  }

  rep.sector_range = std::max(traj.max_map_argument, 1e-9);
  rep.sector = h.sector_bounds(rep.sector_range);

  // step-size certificate
  if (sp && rep.sector && rep.u > 0.0) {
    rep.eta_bound = max_step_size(*sp, rep.u, rep.sector);
  }
  if (rep.eta_bound) {
    const double slack = *rep.eta_bound - traj.applied_step;
    rep.step_size = {"step_size", *rep.eta_bound,
                     slack >= 0.0 ? CertStatus::holds : CertStatus::violated,
                     slack, spectrum_note};
  } else {
    std::string why = spectrum_note;
    if (sp && !rep.sector) {
      why = "map is non-sector on the observed range";
    } else if (sp && !sp->connected) {
      why = "network (or union graph) is not connected";
    }
    rep.step_size = {"step_size", std::numeric_limits<double>::quiet_NaN(),
                     CertStatus::not_applicable, 0.0, why};
  }

  // rate certificate over windows of one schedule period (or an override)
  const int window = options.rate_window.value_or(
      schedule.is_static() ? 1 : schedule.period());
  const bool consecutive = traj.rows() == traj.steps + 1;
  if (rep.eta_bound && rep.step_size.status == CertStatus::holds &&
      rep.v > 0.0 && consecutive && traj.rows() > window) {
    const auto rc = check_rate(rep.residuals, traj.applied_step, rep.v, rep.u,
                               *rep.sector, *sp, window,
                               options.residual_floor, options.rate_tol);
    rep.rate = {"rate", rc.contraction_bound,
                rc.violations == 0 ? CertStatus::holds : CertStatus::violated,
                rc.windows_checked > 0 ? rc.contraction_bound - rc.max_ratio : 0.0,
                spectrum_note};
    if (rc.windows_checked == 0) rep.rate.note = "vacuous: residual at the floor";
  } else {
    std::string why;
    if (!rep.eta_bound) {
      why = "requires a sector map on a connected undirected network";
    } else if (rep.step_size.status != CertStatus::holds) {
      why = "step size exceeds the certified bound";
    } else if (!(rep.v > 0.0)) {
      why = "strong-convexity lower bound v is zero on the operating interval";
    } else {
      why = "needs a consecutively recorded trajectory";
    }
    rep.rate = {"rate", std::numeric_limits<double>::quiet_NaN(),
                CertStatus::not_applicable, 0.0, why};
  }

  // tail statistics and the epsilon certificate for uniform quantization
  const long tail =
      std::max<long>(std::min<long>(options.tail_min_rows, rows),
                     static_cast<long>(std::ceil(options.tail_fraction * rows)));
  rep.tail_rows = std::min(tail, rows);
  double tmax = 0.0, tmin = std::numeric_limits<double>::infinity(), tsum = 0.0;
  for (long r = rows - rep.tail_rows; r < rows; ++r) {
    const double d = rep.distances[static_cast<size_t>(r)];
    tmax = std::max(tmax, d);
    tmin = std::min(tmin, d);
    tsum += d;
  }
  rep.tail_max_distance = tmax;
  rep.tail_mean_distance = tsum / static_cast<double>(rep.tail_rows);
  rep.tail_oscillation = tmax - tmin;

  if (h.kind() == MapKind::uniform_quantizer) {
    if (rep.v > 0.0) {
      const double eps = epsilon_accuracy(h.level(), rep.v, n);
      rep.epsilon = {"epsilon", eps,
                     rep.tail_max_distance < eps ? CertStatus::holds
                                                 : CertStatus::violated,
                     eps - rep.tail_max_distance, ""};
    } else {
      rep.epsilon = {"epsilon", std::numeric_limits<double>::quiet_NaN(),
                     CertStatus::not_applicable, 0.0,
                     "withheld: sampled strong-convexity lower bound v is zero "
                     "on the operating interval"};
      rep.warnings.push_back(
          "epsilon accuracy not certified: v = 0 on the operating interval");
    }
  } else {
    rep.epsilon = {"epsilon", std::numeric_limits<double>::quiet_NaN(),
                   CertStatus::not_applicable, 0.0,
                   "applies to uniform quantization only"};
  }

  for (const auto& cost : spec.costs) {
    if (cost.nonsmooth()) {
      rep.warnings.push_back(
          "non-smooth max penalty in use: subgradient at the kink is taken "
          "as 0 (interior value)");
      break;
    }
  }

  return rep;
}

}  // namespace sumalloc
