#pragma once

#include <optional>

#include "sonclust/core.hpp"

namespace sonclust {

struct SolverConfig {
  double lambda = 0.0;
  double rho = 1.0;
  double tol_primal = 1e-8;
  double tol_dual = 1e-8;
  int max_iterations = 100000;
  double cluster_delta = 0.0;  // <= 0 means auto (scale-free default)

  void validate() const;
};

/// Splitting variables for the consensus reformulation
///   min (1/2) sum ||x_i - a_i||^2 + lambda sum ||u_ij||
///   s.t. x_i - x_j = u_ij  for i < j.
/// u and y hold one row per unordered pair in pair_index order; y is the
/// scaled dual.
struct SplittingState {
  Matrix x;  // n x d
  Matrix u;  // n(n-1)/2 x d
  Matrix y;  // n(n-1)/2 x d
};

struct StepResiduals {
  double primal = 0.0;
  double dual = 0.0;
};

// Block soft threshold: v * max(0, 1 - kappa/||v||), zero inside the ball.
Vector prox_group_norm(const Vector& v, double kappa);

// One splitting iteration in place: closed-form x-update on the complete
// fusion graph, per-pair shrinkage u-update, dual ascent y-update.
StepResiduals splitting_step(const Dataset& dataset, SplittingState& state,
                             const SolverConfig& config);

// Cold-start state: x = a, u_ij = a_i - a_j, y = 0.
SplittingState cold_start(const Dataset& dataset);

// Iterates splitting_step until both residuals fall below tolerance or the
// iteration cap is hit; non-convergence is reported via the residual fields
// and converged flag, never thrown.
SonSolution solve(const Dataset& dataset, const SolverConfig& config,
                  const std::optional<SplittingState>& warm_start = std::nullopt,
                  SplittingState* final_state = nullptr);

}  // namespace sonclust
