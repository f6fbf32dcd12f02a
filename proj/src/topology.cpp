#include "sumalloc/topology.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sumalloc {

namespace {

void check_square_nonnegative(const Matrix& w) {
  if (w.rows() != w.cols() || w.rows() < 1) {
    throw std::invalid_argument("weight matrix must be square and non-empty");
  }
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    if (w(i, i) != 0.0) {
      throw std::invalid_argument("weight matrix must have a zero diagonal");
    }
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      if (!(w(i, j) >= 0.0)) {
        throw std::invalid_argument("weights must be nonnegative and finite");
      }
    }
  }
}

}  // namespace

WeightedGraph::WeightedGraph(Matrix weights) : w_(std::move(weights)) {
  check_square_nonnegative(w_);
}

WeightedGraph WeightedGraph::cycle(int n, double weight) {
  if (n < 1) throw std::invalid_argument("cycle: n must be positive");
  Matrix w = Matrix::Zero(n, n);
  if (n > 1) {
    for (int i = 0; i < n; ++i) {
      const int j = (i + 1) % n;
      if (i == j) continue;  // n == 1
      w(i, j) = weight;
      w(j, i) = weight;
    }
  }
  return WeightedGraph(std::move(w));
}

WeightedGraph WeightedGraph::path(int n, double weight) {
  if (n < 1) throw std::invalid_argument("path: n must be positive");
  Matrix w = Matrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    w(i, i + 1) = weight;
    w(i + 1, i) = weight;
  }
  return WeightedGraph(std::move(w));
}

WeightedGraph WeightedGraph::complete(int n, double weight) {
  if (n < 1) throw std::invalid_argument("complete: n must be positive");
  Matrix w = Matrix::Constant(n, n, weight);
  w.diagonal().setZero();
  return WeightedGraph(std::move(w));
}

WeightedGraph WeightedGraph::directed_cycle(int n, double weight) {
  if (n < 2) throw std::invalid_argument("directed_cycle: n must be at least 2");
  Matrix w = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) w(i, (i + 1) % n) = weight;
  return WeightedGraph(std::move(w));
}

WeightedGraph WeightedGraph::from_edges(
    int n, const std::vector<std::tuple<int, int, double>>& edges,
    bool directed) {
  if (n < 1) throw std::invalid_argument("from_edges: n must be positive");
  Matrix w = Matrix::Zero(n, n);
  for (const auto& [i, j, weight] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
      throw std::invalid_argument("from_edges: edge endpoints out of range");
    }
    w(i, j) += weight;
    if (!directed) w(j, i) += weight;
  }
  return WeightedGraph(std::move(w));
}

bool WeightedGraph::is_undirected() const {
  for (Eigen::Index i = 0; i < w_.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < w_.cols(); ++j) {
      if (w_(i, j) != w_(j, i)) return false;
    }
  }
  return true;
}

bool WeightedGraph::is_weight_balanced() const {
  const double max_w = w_.maxCoeff();
  const double tol = 1e-12 * std::max(max_w, 1.0);
  const Vector in = w_.rowwise().sum();
  const Vector out = w_.colwise().sum().transpose();
  return ((in - out).cwiseAbs().maxCoeff()) <= tol;
}

bool WeightedGraph::is_connected() const {
  const int n = size();
  std::vector<char> seen(static_cast<size_t>(n), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int j = 0; j < n; ++j) {
      if (!seen[j] && (w_(i, j) > 0.0 || w_(j, i) > 0.0)) {
        seen[j] = 1;
        ++count;
        stack.push_back(j);
      }
    }
  }
  return count == n;
}

bool WeightedGraph::has_isolated_node() const {
  for (int i = 0; i < size(); ++i) {
    if (w_.row(i).sum() == 0.0 && w_.col(i).sum() == 0.0) return true;
  }
  return false;
}

GraphSchedule::GraphSchedule(std::vector<Frame> frames, bool cyclic)
    : frames_(std::move(frames)), cyclic_(cyclic), period_(0) {
  if (frames_.empty()) throw std::invalid_argument("schedule needs at least one frame");
  const int n = frames_.front().graph.size();
  for (const auto& f : frames_) {
    if (f.graph.size() != n) {
      throw std::invalid_argument("all schedule frames must share the agent count");
    }
    if (f.steps < 1) throw std::invalid_argument("frame duration must be positive");
    period_ += f.steps;
  }
}

GraphSchedule GraphSchedule::constant(WeightedGraph g) {
  return GraphSchedule({Frame{std::move(g), 1}}, true);
}

int GraphSchedule::agent_count() const { return frames_.front().graph.size(); }

int GraphSchedule::frame_index_at(long k) const {
  if (k < 0) k = 0;
  long t = cyclic_ ? (k % period_) : std::min<long>(k, period_ - 1);
  for (size_t f = 0; f < frames_.size(); ++f) {
    if (t < frames_[f].steps) return static_cast<int>(f);
    t -= frames_[f].steps;
  }
  return static_cast<int>(frames_.size()) - 1;
}

const WeightedGraph& GraphSchedule::frame_at(long k) const {
  return frames_[static_cast<size_t>(frame_index_at(k))].graph;
}

WeightedGraph GraphSchedule::union_graph(long start, int window) const {
  const int n = agent_count();
  Matrix w = Matrix::Zero(n, n);
  for (int s = 0; s < window; ++s) {
    w += frame_at(start + s).weights();
  }
  return WeightedGraph(std::move(w));
}

Matrix laplacian(const WeightedGraph& g) {
  const Matrix& w = g.weights();
  Matrix l = -w;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    l(i, i) = w.row(i).sum();
  }
  return l;
}

std::vector<double> symmetric_eigenvalues(Matrix a) {
  const int n = static_cast<int>(a.rows());
  if (n == 1) return {a(0, 0)};
  const double norm = a.norm();
  if (norm == 0.0) return std::vector<double>(static_cast<size_t>(n), 0.0);
  const double stop = 1e-12 * norm;
  const double skip = stop / (static_cast<double>(n) * n);

  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
    }
    if (std::sqrt(off) < stop) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= skip) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        double t;
        if (std::isinf(theta)) {
          t = 0.0;
        } else {
          t = ((theta >= 0.0) ? 1.0 : -1.0) /
              (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = a(p, k) = c * akp - s * akq;
          a(k, q) = a(q, k) = s * akp + c * akq;
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;
      }
    }
  }

  std::vector<double> ev(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) ev[static_cast<size_t>(i)] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

LaplacianSpectrum spectrum(const Matrix& laplacian_matrix) {
  const Matrix& l = laplacian_matrix;
  if (l.rows() != l.cols()) throw std::invalid_argument("spectrum: matrix must be square");
  const double scale = std::max(1.0, l.cwiseAbs().maxCoeff());
  const double asym = (l - l.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * scale) {
    throw std::invalid_argument(
        "spectrum: matrix is not symmetric; pass the symmetrized part "
        "(L + L^T)/2 - the step-size bound applies to undirected networks");
  }

  LaplacianSpectrum sp;
  sp.eigenvalues = symmetric_eigenvalues(l);
  sp.lambda_n = sp.eigenvalues.back();
  const double threshold = 1e-9 * std::max(sp.lambda_n, 0.0);
  int zeros = 0;
  for (double ev : sp.eigenvalues) {
    if (ev <= threshold) {
      ++zeros;
    } else if (!sp.lambda2) {
      sp.lambda2 = ev;
    }
  }
  sp.connected = (zeros == 1) && sp.lambda2.has_value();
  return sp;
}

bool is_b_connected(const GraphSchedule& s, int b) {
  if (b < 1) throw std::invalid_argument("is_b_connected: B must be at least 1");
  if (s.agent_count() == 1) return true;
  for (long start = 0; start < s.period(); ++start) {
    if (!s.union_graph(start, b).is_connected()) return false;
  }
  return true;
}

bool quadratic_form_bounds_check(const Matrix& L, const Vector& x) {
  const LaplacianSpectrum sp = spectrum(L);
  const double n = static_cast<double>(x.size());
  const Vector xbar = x - Vector::Constant(x.size(), x.sum() / n);
  const double q = x.dot(L * x);
  const double qbar = xbar.dot(L * xbar);
  const double nb = xbar.squaredNorm();

  const double lo = sp.lambda2.value_or(0.0) * nb;
  const double hi = sp.lambda_n * nb;
  const double tol = 1e-8 * std::max({std::abs(q), hi, 1e-30});
  return q >= lo - tol && q <= hi + tol && std::abs(q - qbar) <= tol;
}

}  // namespace sumalloc
