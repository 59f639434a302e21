#pragma once

#include <random>
#include <vector>

#include "sonclust/core.hpp"

namespace testutil {

inline sonclust::Dataset dataset1d(const std::vector<double>& values) {
  sonclust::Dataset d;
  d.points.resize(values.size(), 1);
  for (size_t i = 0; i < values.size(); ++i) d.points(i, 0) = values[i];
  return d;
}

inline sonclust::Matrix matrix1d(const std::vector<double>& values) {
  sonclust::Matrix m(values.size(), 1);
  for (size_t i = 0; i < values.size(); ++i) m(i, 0) = values[i];
  return m;
}

inline sonclust::Dataset random_dataset(std::mt19937& rng, int n, int d, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  sonclust::Dataset data;
  data.points.resize(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) data.points(i, j) = normal(rng);
  }
  return data;
}

// Partition from explicit member lists, e.g. {{0,1},{2}}.
inline sonclust::Partition partition_of(const std::vector<std::vector<int>>& clusters) {
  int n = 0;
  for (const auto& c : clusters) n += static_cast<int>(c.size());
  sonclust::Partition p;
  p.assignment.resize(n);
  for (size_t c = 0; c < clusters.size(); ++c) {
    for (int i : clusters[c]) p.assignment[i] = static_cast<int>(c);
  }
  p.num_clusters = static_cast<int>(clusters.size());
  p.canonicalize();
  return p;
}

inline sonclust::Partition random_partition(std::mt19937& rng, int n, int max_clusters) {
  std::uniform_int_distribution<int> pick(0, max_clusters - 1);
  sonclust::Partition p;
  p.assignment.resize(n);
  for (int i = 0; i < n; ++i) p.assignment[i] = pick(rng);
  p.num_clusters = max_clusters;
  p.canonicalize();
  return p;
}

// Coarsens `p` by merging each cluster id into a random group.
inline sonclust::Partition random_coarsening(std::mt19937& rng, const sonclust::Partition& p) {
  const int groups = std::max(1, p.num_clusters / 2);
  std::uniform_int_distribution<int> pick(0, groups - 1);
  std::vector<int> group_of(p.num_clusters);
  for (int& g : group_of) g = pick(rng);
  sonclust::Partition out;
  out.assignment.resize(p.assignment.size());
  for (size_t i = 0; i < p.assignment.size(); ++i) {
    out.assignment[i] = group_of[p.assignment[i]];
  }
  out.num_clusters = groups;
  out.canonicalize();
  return out;
}

}  // namespace testutil
