#pragma once

#include "sonclust/core.hpp"
#include "sonclust/solver.hpp"

namespace sonclust {

struct SolveMeta {
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Two or more clusters at grid index `lambda_index - 1` sharing a common
/// cluster at `lambda_index`. merge_lambda equals the grid value unless
/// bisection refinement was requested.
struct MergeEvent {
  int lambda_index = 0;
  std::vector<std::vector<int>> children;  // member lists at the previous grid point
  std::vector<int> parent;                 // member list at lambda_index
  double merge_lambda = 0.0;
};

struct ClusterPath {
  std::vector<double> lambdas;
  std::vector<Partition> partitions;
  std::vector<MergeEvent> merge_events;
  std::vector<SolveMeta> meta;
};

struct MergeNode {
  double lambda = 0.0;
  std::vector<std::vector<int>> children;
  std::vector<int> parent;
};

struct PathOptions {
  // Bisect each merge interval to localize the merge lambda within
  // 1e-6 * (largest grid lambda).
  bool refine_merge_lambdas = false;
};

// Solves at each lambda in ascending order, warm-starting from the previous
// splitting state with the dual rescaled by lambda_prev/lambda_next.
ClusterPath compute_path(const Dataset& dataset, const std::vector<double>& lambdas,
                         const SolverConfig& config, const PathOptions& options = {});

// Consecutive index pairs (k, k+1) where partitions[k] fails to refine
// partitions[k+1]; empty means agglomeration held along the grid.
std::vector<std::pair<int, int>> check_agglomeration(const ClusterPath& path);

// Hierarchy induced by the path. Leaves are the clusters at the smallest
// lambda; each node records the grid lambda where its children first
// co-cluster. Requires an agglomeration-clean path.
std::vector<MergeNode> merge_tree(const ClusterPath& path);

}  // namespace sonclust
