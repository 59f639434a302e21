#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace sonclust {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Input points for clustering, one point per row.
struct Dataset {
  Matrix points;  // n x d

  Eigen::Index n() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }

  // Throws std::invalid_argument on empty data or non-finite coordinates.
  void validate() const;
};

/// Cluster assignment over indices 0..n-1. Canonical form: ids are
/// contiguous starting at 0 and increase with the smallest member index,
/// so two partitions are equal iff their assignment vectors are equal.
struct Partition {
  std::vector<int> assignment;
  int num_clusters = 0;

  Eigen::Index n() const { return static_cast<Eigen::Index>(assignment.size()); }

  // Relabels ids into canonical form.
  void canonicalize();

  // Member lists per cluster, ordered by cluster id.
  std::vector<std::vector<int>> clusters() const;

  bool operator==(const Partition& other) const {
    return assignment == other.assignment;
  }
};

/// Union-find with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n), size_(n, 1) {
    for (int i = 0; i < n; ++i) parent_[i] = i;
  }

  int find(int p) {
    while (p != parent_[p]) {
      parent_[p] = parent_[parent_[p]];
      p = parent_[p];
    }
    return p;
  }

  void merge(int a, int b) {
    int ra = find(a), rb = find(b);
    if (ra == rb) return;
    if (size_[ra] < size_[rb]) std::swap(ra, rb);
    parent_[rb] = ra;
    size_[ra] += size_[rb];
  }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

struct SonSolution {
  Matrix x;  // n x d representatives
  Partition partition;
  double lambda = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective_value = 0.0;
  bool converged = false;
};

// (1/2) sum_i ||x_i - a_i||^2 + lambda * sum_{i<j} ||x_i - x_j||.
double objective(const Dataset& dataset, const Matrix& x, double lambda);

// Connected components of the graph with an edge wherever
// ||x_i - x_j|| <= delta; transitive closure via union-find.
Partition extract_clusters(const Matrix& x, double delta);

// delta = 1e-5 * diameter(x), or 1e-5 when the diameter is zero.
double default_cluster_delta(const Matrix& x);

// True iff every cluster of `fine` is contained in a cluster of `coarse`.
bool is_refinement(const Partition& fine, const Partition& coarse);

// Index of unordered pair (i,j), i<j, in row-major pair order over n items.
inline Eigen::Index pair_index(Eigen::Index i, Eigen::Index j, Eigen::Index n) {
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

inline Eigen::Index num_pairs(Eigen::Index n) { return n * (n - 1) / 2; }

}  // namespace sonclust
