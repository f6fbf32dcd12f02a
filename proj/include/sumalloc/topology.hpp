#pragma once

#include <Eigen/Dense>
#include <optional>
#include <tuple>
#include <vector>

namespace sumalloc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Weighted digraph over n agents. weights(i, j) is the weight agent i
/// places on messages received from agent j; the diagonal is zero.
/// Immutable after construction.
class WeightedGraph {
 public:
  explicit WeightedGraph(Matrix weights);

  static WeightedGraph cycle(int n, double weight = 1.0);
  static WeightedGraph path(int n, double weight = 1.0);
  static WeightedGraph complete(int n, double weight = 1.0);
  /// Each agent listens to its successor on the ring; weight-balanced but
  /// not symmetric.
  static WeightedGraph directed_cycle(int n, double weight = 1.0);
  /// Edge list (i, j, w). Undirected edges set both directions.
  static WeightedGraph from_edges(int n,
                                  const std::vector<std::tuple<int, int, double>>& edges,
                                  bool directed = false);

  int size() const { return static_cast<int>(w_.rows()); }
  const Matrix& weights() const { return w_; }

  bool is_undirected() const;      // exact weight symmetry
  bool is_weight_balanced() const; // per-node in-sum == out-sum, tol 1e-12 * max weight
  bool is_connected() const;       // on the undirected support
  bool has_isolated_node() const;

 private:
  Matrix w_;
};

/// Piecewise-constant schedule of graphs, each frame held for a number of
/// protocol steps. Cyclic schedules repeat; otherwise the last frame holds.
class GraphSchedule {
 public:
  struct Frame {
    WeightedGraph graph;
    int steps = 1;
  };

  GraphSchedule(std::vector<Frame> frames, bool cyclic = true);
  static GraphSchedule constant(WeightedGraph g);

  int agent_count() const;
  int period() const { return period_; }
  bool cyclic() const { return cyclic_; }
  int frame_count() const { return static_cast<int>(frames_.size()); }
  const std::vector<Frame>& frames() const { return frames_; }

  /// Frame active at protocol step k (wraps if cyclic, holds last otherwise).
  const WeightedGraph& frame_at(long k) const;
  int frame_index_at(long k) const;

  /// Union of the graphs over steps [start, start + window), weights summed
  /// across the window for repeated edges.
  WeightedGraph union_graph(long start, int window) const;
  bool is_static() const { return frames_.size() == 1; }

 private:
  std::vector<Frame> frames_;
  bool cyclic_;
  int period_;
};

struct LaplacianSpectrum {
  std::vector<double> eigenvalues;  // ascending
  std::optional<double> lambda2;    // smallest eigenvalue above 1e-9 * lambda_n
  double lambda_n = 0.0;
  bool connected = false;           // exactly one structural zero eigenvalue
};

/// L = D - W with D the diagonal of per-row weight sums; rows sum to zero
/// by construction.
Matrix laplacian(const WeightedGraph& g);

/// Eigenvalues of a symmetric matrix via cyclic Jacobi rotations, ascending.
/// Converges when the off-diagonal Frobenius mass drops below 1e-12 times
/// the matrix norm.
std::vector<double> symmetric_eigenvalues(Matrix m);

/// Throws std::invalid_argument for matrices that are not symmetric within
/// 1e-9 (use the symmetrized part (L + L^T)/2; the step-size bound applies
/// to undirected networks only).
LaplacianSpectrum spectrum(const Matrix& laplacian_matrix);

/// True iff the union of the schedule over every window of B consecutive
/// steps is connected. Cyclic schedules are checked over one period plus
/// wrap-around windows.
bool is_b_connected(const GraphSchedule& s, int b);

/// Checks lambda2*|xbar|^2 <= x'Lx <= lambda_n*|xbar|^2 and x'Lx == xbar'Lxbar
/// with xbar the mean-centered x, at relative tolerance 1e-8.
bool quadratic_form_bounds_check(const Matrix& L, const Vector& x);

}  // namespace sumalloc
