#include "sonclust/clusterpath.hpp"

#include <algorithm>
#include <sstream>

namespace sonclust {

namespace {

// Merge events between consecutive partitions: groups of fine clusters whose
// members land in one coarse cluster.
std::vector<MergeEvent> events_between(const Partition& fine, const Partition& coarse,
                                       int coarse_index, double coarse_lambda) {
  const auto fine_clusters = fine.clusters();
  const auto coarse_clusters = coarse.clusters();
  std::vector<std::vector<int>> children_of(coarse_clusters.size());
  for (int f = 0; f < fine.num_clusters; ++f) {
    const int member = fine_clusters[f].front();
    children_of[coarse.assignment[member]].push_back(f);
  }
  std::vector<MergeEvent> events;
  for (int c = 0; c < coarse.num_clusters; ++c) {
    if (children_of[c].size() < 2) continue;
    MergeEvent ev;
    ev.lambda_index = coarse_index;
    ev.merge_lambda = coarse_lambda;
    for (int f : children_of[c]) ev.children.push_back(fine_clusters[f]);
    ev.parent = coarse_clusters[c];
    events.push_back(std::move(ev));
  }
  return events;
}

bool co_clustered(const Partition& partition, const std::vector<int>& members) {
  for (int m : members) {
    if (partition.assignment[m] != partition.assignment[members.front()]) return false;
  }
  return true;
}

// Smallest lambda in (lo, hi] at which `members` co-cluster, to within tol.
// Agglomeration makes the predicate monotone in lambda.
double bisect_merge_lambda(const Dataset& dataset, const SolverConfig& config,
                           const std::vector<int>& members, double lo, double hi,
                           double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    SolverConfig c = config;
    c.lambda = mid;
    if (co_clustered(solve(dataset, c).partition, members)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

ClusterPath compute_path(const Dataset& dataset, const std::vector<double>& lambdas,
                         const SolverConfig& config, const PathOptions& options) {
  if (lambdas.empty()) throw std::invalid_argument("compute_path: empty lambda grid");
  if (lambdas.front() < 0 || !std::is_sorted(lambdas.begin(), lambdas.end()) ||
      std::adjacent_find(lambdas.begin(), lambdas.end()) != lambdas.end()) {
    throw std::invalid_argument("compute_path: grid must be strictly increasing and nonnegative");
  }

  ClusterPath path;
  path.lambdas = lambdas;
  std::optional<SplittingState> warm;
  double lambda_prev = 0.0;
  for (size_t k = 0; k < lambdas.size(); ++k) {
    SolverConfig c = config;
    c.lambda = lambdas[k];
    if (warm && lambdas[k] > 0) {
      warm->y *= lambda_prev / lambdas[k];
    }
    SplittingState state;
    SonSolution sol = solve(dataset, c, warm, &state);
    warm = std::move(state);
    lambda_prev = lambdas[k];
    path.partitions.push_back(sol.partition);
    path.meta.push_back({sol.primal_residual, sol.dual_residual, sol.iterations, sol.converged});
  }

  const double grid_max = lambdas.back();
  for (size_t k = 0; k + 1 < lambdas.size(); ++k) {
    auto events = events_between(path.partitions[k], path.partitions[k + 1],
                                 static_cast<int>(k + 1), lambdas[k + 1]);
    if (options.refine_merge_lambdas) {
      for (auto& ev : events) {
        ev.merge_lambda = bisect_merge_lambda(dataset, config, ev.parent, lambdas[k],
                                              lambdas[k + 1], 1e-6 * grid_max);
      }
    }
    path.merge_events.insert(path.merge_events.end(), events.begin(), events.end());
  }
  return path;
}

std::vector<std::pair<int, int>> check_agglomeration(const ClusterPath& path) {
  std::vector<std::pair<int, int>> violations;
  for (size_t k = 0; k + 1 < path.partitions.size(); ++k) {
    if (!is_refinement(path.partitions[k], path.partitions[k + 1])) {
      violations.emplace_back(static_cast<int>(k), static_cast<int>(k + 1));
    }
  }
  return violations;
}

std::vector<MergeNode> merge_tree(const ClusterPath& path) {
  const auto violations = check_agglomeration(path);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "merge_tree: agglomeration violations at grid index pairs";
    for (auto [a, b] : violations) msg << " (" << a << "," << b << ")";
    throw std::invalid_argument(msg.str());
  }
  std::vector<MergeNode> nodes;
  nodes.reserve(path.merge_events.size());
  for (const auto& ev : path.merge_events) {
    nodes.push_back({ev.merge_lambda, ev.children, ev.parent});
  }
  return nodes;
}

}  // namespace sonclust
