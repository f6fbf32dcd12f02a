#include "sumalloc/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sumalloc/compensated.hpp"

namespace sumalloc {

bool variant_is_continuous(Variant v) {
  return v == Variant::ct_node || v == Variant::ct_link;
}

bool variant_is_node_based(Variant v) {
  return v == Variant::dt_node || v == Variant::ct_node;
}

double ProtocolConfig::effective_step() const {
  return variant_is_continuous(variant) ? eta * dt : eta;
}

Vector initial_state(const ProblemSpec& spec, const Initializer& init) {
  spec.validate();
  const int n = spec.size();
  Vector x(n);

  switch (init.kind) {
    case Initializer::Kind::equal_split:
      x.setConstant(spec.b / n);
      break;
    case Initializer::Kind::custom:
      if (init.custom.size() != n) {
        throw std::invalid_argument("custom initializer: size mismatch");
      }
      x = init.custom;
      break;
    case Initializer::Kind::weighted_feasible: {
      double lo_sum = 0.0, span_sum = 0.0;
      std::vector<Box> boxes;
      boxes.reserve(static_cast<size_t>(n));
      for (const auto& cost : spec.costs) {
        const auto box = cost.box_in_input_frame();
        if (!box) {
          throw std::invalid_argument(
              "weighted_feasible initializer requires box constraints on every agent");
        }
        boxes.push_back(*box);
        lo_sum += box->lo;
        span_sum += box->hi - box->lo;
      }
      const double fraction =
          span_sum > 0.0 ? (spec.b - lo_sum) / span_sum : 0.0;
      for (int i = 0; i < n; ++i) {
        x[i] = boxes[static_cast<size_t>(i)].lo +
               fraction * (boxes[static_cast<size_t>(i)].hi -
                           boxes[static_cast<size_t>(i)].lo);
      }
      break;
    }
  }

  if (n > 1) {
    // compensate the last agent so the recorded sum is exact
    NeumaierSum head;
    for (int i = 0; i + 1 < n; ++i) head.add(x[i]);
    x[n - 1] = spec.b - head.result();
  } else {
    x[0] = spec.b;
  }
  return x;
}

namespace {

struct Edge {
  int i, j;
  double w;
};

std::vector<Edge> undirected_edges(const WeightedGraph& g) {
  std::vector<Edge> edges;
  const Matrix& w = g.weights();
  for (int i = 0; i < g.size(); ++i) {
    for (int j = i + 1; j < g.size(); ++j) {
      if (w(i, j) > 0.0) edges.push_back({i, j, w(i, j)});
    }
  }
  return edges;
}

// Shrink a transfer so both endpoints stay strictly inside their barrier
// domains, landing at 90% of the distance to the nearest crossed boundary.
double clip_transfer(double delta, double xi, double xj,
                     const std::optional<Box>& dom_i,
                     const std::optional<Box>& dom_j) {
  double allowed = std::abs(delta);
  if (delta == 0.0) return 0.0;
  if (dom_i) {
    const double room = delta > 0.0 ? dom_i->hi - xi : xi - dom_i->lo;
    allowed = std::min(allowed, 0.9 * std::max(room, 0.0));
  }
  if (dom_j) {
    const double room = delta > 0.0 ? xj - dom_j->lo : dom_j->hi - xj;
    allowed = std::min(allowed, 0.9 * std::max(room, 0.0));
  }
  return delta > 0.0 ? allowed : -allowed;
}

double clip_step(double delta, double x, const std::optional<Box>& dom) {
  if (!dom || delta == 0.0) return delta;
  const double room = delta > 0.0 ? dom->hi - x : x - dom->lo;
  const double allowed = std::min(std::abs(delta), 0.9 * std::max(room, 0.0));
  return delta > 0.0 ? allowed : -allowed;
}

void require_frames(const GraphSchedule& schedule, bool node_based) {
  for (const auto& f : schedule.frames()) {
    if (node_based) {
      if (!f.graph.is_undirected()) {
        throw std::invalid_argument(
            "node-based variants require an undirected (symmetric-weight) "
            "network: the paired exchange that conserves the resource sum "
            "needs symmetric weights");
      }
    } else if (!f.graph.is_weight_balanced()) {
      throw std::invalid_argument(
          "link-based variants require a weight-balanced network: per-node "
          "in-weight must equal out-weight for the sum to be conserved");
    }
  }
}

}  // namespace

Vector step_dt_node(const Vector& x, const WeightedGraph& g,
                    const ProblemSpec& spec, const NonlinearMap& h,
                    double eta) {
  if (!g.is_undirected()) {
    throw std::invalid_argument(
        "node-based variants require an undirected (symmetric-weight) network");
  }
  Vector grad = gradients(spec, x);
  Vector next = x;
  for (const Edge& e : undirected_edges(g)) {
    const double delta = eta * e.w * h(grad[e.j] - grad[e.i]);
    next[e.i] += delta;
    next[e.j] -= delta;
  }
  return next;
}

Vector step_dt_link(const Vector& x, const WeightedGraph& g,
                    const ProblemSpec& spec, const NonlinearMap& h,
                    double eta) {
  if (!g.is_weight_balanced()) {
    throw std::invalid_argument(
        "link-based variants require a weight-balanced network");
  }
  Vector grad = gradients(spec, x);
  Vector msg(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) msg[i] = h(grad[i]);
  Vector next = x;
  const Matrix& w = g.weights();
  for (int i = 0; i < g.size(); ++i) {
    double acc = 0.0;
    for (int j = 0; j < g.size(); ++j) {
      if (w(i, j) > 0.0) acc += w(i, j) * (msg[j] - msg[i]);
    }
    next[i] += eta * acc;
  }
  return next;
}

Trajectory run(const ProtocolConfig& config, const ProblemSpec& spec,
               const GraphSchedule& schedule) {
  spec.validate();
  if (spec.weighted()) {
    throw std::invalid_argument(
        "run: protocols operate on the unweighted form; apply reweight() first");
  }
  if (schedule.agent_count() != spec.size()) {
    throw std::invalid_argument("run: schedule and problem disagree on the agent count");
  }
  if (config.horizon < 0) throw std::invalid_argument("run: horizon must be nonnegative");
  if (!(config.eta > 0.0)) throw std::invalid_argument("run: step size must be positive");
  if (variant_is_continuous(config.variant) && !(config.dt > 0.0)) {
    throw std::invalid_argument("run: CT integration step must be positive");
  }
  const bool node_based = variant_is_node_based(config.variant);
  require_frames(schedule, node_based);

  const int n = spec.size();
  const long K = config.horizon;
  const double eta = config.effective_step();
  const double t_scale = variant_is_continuous(config.variant) ? config.dt : 1.0;

  // barrier domains per agent (steps are clipped to stay strictly inside)
  std::vector<std::optional<Box>> domains(static_cast<size_t>(n));
  bool any_domain = false;
  for (int i = 0; i < n; ++i) {
    domains[static_cast<size_t>(i)] = spec.costs[static_cast<size_t>(i)].domain_in_input_frame();
    any_domain = any_domain || domains[static_cast<size_t>(i)].has_value();
  }

  // per-frame undirected edge lists for the paired node-based update
  std::vector<std::vector<Edge>> frame_edges;
  if (node_based) {
    frame_edges.reserve(static_cast<size_t>(schedule.frame_count()));
    for (const auto& f : schedule.frames()) {
      frame_edges.push_back(undirected_edges(f.graph));
    }
  }

  const Vector x0 = initial_state(spec, config.initializer);

  // compensated per-agent state; a final correction on the last agent pins
  // the represented total to b exactly
  std::vector<CompensatedValue> xs(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) xs[static_cast<size_t>(i)] = CompensatedValue(x0[i]);
  {
    CompensatedValue total;
    for (const auto& s : xs) {
      total.add(s.hi);
      total.add(s.lo);
    }
    CompensatedValue corr(spec.b);
    corr.add(-total.hi);
    corr.add(-total.lo);
    xs[static_cast<size_t>(n - 1)].add(corr.hi);
    xs[static_cast<size_t>(n - 1)].add(corr.lo);
  }

  Trajectory traj;
  traj.steps = K;
  traj.applied_step = eta;
  traj.resource_total = spec.b;
  const long rows = config.record_states ? K + 1 : std::min<long>(K, 1) + 1;
  traj.states.resize(rows, n);
  traj.times.reserve(static_cast<size_t>(rows));
  traj.step_index.reserve(static_cast<size_t>(rows));
  traj.sums.reserve(static_cast<size_t>(rows));
  if (config.record_states) traj.frame_index.reserve(static_cast<size_t>(K));

  const auto state_sum = [&]() {
    NeumaierSum acc;
    for (const auto& s : xs) {
      acc.add(s.hi);
      acc.add(s.lo);
    }
    return acc.result();
  };

  Vector x = x0;
  double drift = 0.0;
  {
    const double s0 = state_sum();
    drift = std::abs(s0 - spec.b);
    traj.states.row(0) = x0.transpose();
    traj.times.push_back(0.0);
    traj.step_index.push_back(0);
    traj.sums.push_back(s0);
  }

  Vector grad(n), msg(n);
  long recorded = 1;
  for (long k = 0; k < K; ++k) {
    const int fidx = schedule.frame_index_at(k);
    const WeightedGraph& g = schedule.frames()[static_cast<size_t>(fidx)].graph;

    for (int i = 0; i < n; ++i) {
      grad[i] = spec.costs[static_cast<size_t>(i)].eval(x[i]).gradient;
    }

    if (node_based) {
      for (const Edge& e : frame_edges[static_cast<size_t>(fidx)]) {
        const double z = grad[e.j] - grad[e.i];
        traj.max_map_argument = std::max(traj.max_map_argument, std::abs(z));
        double delta = eta * e.w * config.map(z);
        if (any_domain) {
          delta = clip_transfer(delta, x[e.i], x[e.j],
                                domains[static_cast<size_t>(e.i)],
                                domains[static_cast<size_t>(e.j)]);
        }
        xs[static_cast<size_t>(e.i)].add(delta);
        xs[static_cast<size_t>(e.j)].add(-delta);
      }
    } else {
      const Matrix& w = g.weights();
      for (int i = 0; i < n; ++i) {
        traj.max_map_argument = std::max(traj.max_map_argument, std::abs(grad[i]));
        msg[i] = config.map(grad[i]);
      }
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
          if (w(i, j) > 0.0) acc += w(i, j) * (msg[j] - msg[i]);
        }
        double delta = eta * acc;
        if (any_domain) {
          delta = clip_step(delta, x[i], domains[static_cast<size_t>(i)]);
        }
        xs[static_cast<size_t>(i)].add(delta);
      }
    }

    double max_abs = 0.0;
    for (int i = 0; i < n; ++i) {
      x[i] = xs[static_cast<size_t>(i)].value();
      if (!std::isfinite(x[i])) {
        std::ostringstream os;
        os << "state of agent " << i << " became non-finite at step " << k + 1
           << " (step size too large?)";
        throw NumericalAbort(k + 1, os.str());
      }
      max_abs = std::max(max_abs, std::abs(x[i]));
    }
    if (max_abs > config.divergence_guard) {
      std::ostringstream os;
      os << "divergence guard tripped at step " << k + 1 << ": |x|_inf = "
         << max_abs;
      throw NumericalAbort(k + 1, os.str());
    }

    const double s = state_sum();
    drift = std::max(drift, std::abs(s - spec.b));

    if (config.record_states) {
      traj.states.row(recorded) = x.transpose();
      traj.times.push_back(static_cast<double>(k + 1) * t_scale);
      traj.step_index.push_back(k + 1);
      traj.sums.push_back(s);
      traj.frame_index.push_back(fidx);
      ++recorded;
    } else if (k + 1 == K) {
      traj.states.row(recorded) = x.transpose();
      traj.times.push_back(static_cast<double>(K) * t_scale);
      traj.step_index.push_back(K);
      traj.sums.push_back(s);
      ++recorded;
    }
  }

  traj.feasibility_drift = drift;
  return traj;
}

std::optional<double> max_step_size(const LaplacianSpectrum& sp, double u,
                                    const std::optional<SectorBounds>& sector) {
  if (!(u > 0.0)) throw std::invalid_argument("max_step_size: requires u > 0");
  if (!sector || !(sector->lower > 0.0) || !std::isfinite(sector->upper)) {
    return std::nullopt;
  }
  if (!sp.connected || !sp.lambda2) return std::nullopt;
  const double l2 = *sp.lambda2;
  const double ln = sp.lambda_n;
  return 2.0 * sector->lower * l2 / (u * ln * ln * sector->upper);
}

}  // namespace sumalloc
