#include "sonclust/core.hpp"

#include <algorithm>
#include <cmath>

namespace sonclust {

void Dataset::validate() const {
  if (points.rows() < 1 || points.cols() < 1) {
    throw std::invalid_argument("dataset must have n >= 1 points of dimension d >= 1");
  }
  if (!points.allFinite()) {
    throw std::invalid_argument("dataset contains non-finite coordinates");
  }
}

void Partition::canonicalize() {
  const size_t max_ids =
      num_clusters > 0 ? static_cast<size_t>(num_clusters) : assignment.size();
  std::vector<int> relabel(max_ids, -1);
  int next = 0;
  for (int& a : assignment) {
    if (a < 0 || a >= static_cast<int>(relabel.size())) {
      throw std::invalid_argument("partition assignment out of range");
    }
    if (relabel[a] < 0) relabel[a] = next++;
    a = relabel[a];
  }
  num_clusters = next;
}

std::vector<std::vector<int>> Partition::clusters() const {
  std::vector<std::vector<int>> out(num_clusters);
  for (int i = 0; i < static_cast<int>(assignment.size()); ++i) {
    out[assignment[i]].push_back(i);
  }
  return out;
}

double objective(const Dataset& dataset, const Matrix& x, double lambda) {
  if (x.rows() != dataset.n() || x.cols() != dataset.dim()) {
    throw std::invalid_argument("objective: x has wrong shape");
  }
  if (lambda < 0) throw std::invalid_argument("objective: lambda must be nonnegative");
  double fidelity = 0.5 * (x - dataset.points).squaredNorm();
  double fusion = 0.0;
  const Eigen::Index n = x.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      fusion += (x.row(i) - x.row(j)).norm();
    }
  }
  return fidelity + lambda * fusion;
}

Partition extract_clusters(const Matrix& x, double delta) {
  if (delta <= 0) throw std::invalid_argument("extract_clusters: delta must be positive");
  const int n = static_cast<int>(x.rows());
  UnionFind uf(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if ((x.row(i) - x.row(j)).norm() <= delta) uf.merge(i, j);
    }
  }
  Partition p;
  p.assignment.resize(n);
  for (int i = 0; i < n; ++i) p.assignment[i] = uf.find(i);
  p.num_clusters = n;
  p.canonicalize();
  return p;
}

double default_cluster_delta(const Matrix& x) {
  const Eigen::Index n = x.rows();
  double diam = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      diam = std::max(diam, (x.row(i) - x.row(j)).norm());
    }
  }
  if (diam == 0.0) diam = 1.0;
  return 1e-5 * diam;
}

bool is_refinement(const Partition& fine, const Partition& coarse) {
  if (fine.assignment.size() != coarse.assignment.size()) {
    throw std::invalid_argument("is_refinement: partitions cover different index sets");
  }
  // Every fine cluster must map into a single coarse cluster.
  std::vector<int> image(fine.num_clusters, -1);
  for (size_t i = 0; i < fine.assignment.size(); ++i) {
    int f = fine.assignment[i];
    int c = coarse.assignment[i];
    if (image[f] < 0) {
      image[f] = c;
    } else if (image[f] != c) {
      return false;
    }
  }
  return true;
}

}  // namespace sonclust
