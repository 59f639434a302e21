#include "sonclust/solver.hpp"

#include <cmath>

namespace sonclust {

void SolverConfig::validate() const {
  if (lambda < 0) throw std::invalid_argument("solver: lambda must be nonnegative");
  if (rho <= 0) throw std::invalid_argument("solver: rho must be positive");
  if (tol_primal <= 0 || tol_dual <= 0) {
    throw std::invalid_argument("solver: tolerances must be positive");
  }
  if (max_iterations < 1) throw std::invalid_argument("solver: max_iterations must be >= 1");
}

Vector prox_group_norm(const Vector& v, double kappa) {
  if (kappa < 0) throw std::invalid_argument("prox_group_norm: kappa must be nonnegative");
  const double norm = v.norm();
  if (norm <= kappa) return Vector::Zero(v.size());
  return v * (1.0 - kappa / norm);
}

StepResiduals splitting_step(const Dataset& dataset, SplittingState& state,
                             const SolverConfig& config) {
  const Eigen::Index n = dataset.n();
  const Eigen::Index d = dataset.dim();
  const double rho = config.rho;
  const double kappa = config.lambda / rho;

  // x-update. b_i = sum_{j != i} s_ij with s_ij = u_ij - y_ij (i<j) and
  // s_ij = -(u_ji - y_ji) (i>j); the antisymmetry makes sum_i b_i = 0, so
  // the centroid of x equals the centroid of a at every iterate.
  Matrix b = Matrix::Zero(n, d);
  {
    Eigen::Index p = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j, ++p) {
        const auto s = state.u.row(p) - state.y.row(p);
        b.row(i) += s;
        b.row(j) -= s;
      }
    }
  }
  const Eigen::RowVectorXd col_sum_a = dataset.points.colwise().sum();
  const double denom = 1.0 + rho * static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    state.x.row(i) = (dataset.points.row(i) + rho * b.row(i) + rho * col_sum_a) / denom;
  }

  // u-update (block soft threshold on x_i - x_j + y_ij) and y-update.
  StepResiduals res;
  Eigen::Index p = 0;
  Vector v(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j, ++p) {
      v = (state.x.row(i) - state.x.row(j) + state.y.row(p)).transpose();
      const double norm = v.norm();
      Eigen::RowVectorXd u_new;
      if (norm <= kappa) {
        u_new = Eigen::RowVectorXd::Zero(d);
      } else {
        u_new = v.transpose() * (1.0 - kappa / norm);
      }
      res.dual = std::max(res.dual, rho * (u_new - state.u.row(p)).norm());
      state.u.row(p) = u_new;
      const Eigen::RowVectorXd gap = state.x.row(i) - state.x.row(j) - u_new;
      res.primal = std::max(res.primal, gap.norm());
      state.y.row(p) += gap;
    }
  }
  return res;
}

SplittingState cold_start(const Dataset& dataset) {
  const Eigen::Index n = dataset.n();
  const Eigen::Index d = dataset.dim();
  SplittingState state;
  state.x = dataset.points;
  state.u.resize(num_pairs(n), d);
  state.y = Matrix::Zero(num_pairs(n), d);
  Eigen::Index p = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j, ++p) {
      state.u.row(p) = dataset.points.row(i) - dataset.points.row(j);
    }
  }
  return state;
}

SonSolution solve(const Dataset& dataset, const SolverConfig& config,
                  const std::optional<SplittingState>& warm_start,
                  SplittingState* final_state) {
  dataset.validate();
  config.validate();

  SplittingState state;
  if (warm_start) {
    const Eigen::Index n = dataset.n();
    const Eigen::Index d = dataset.dim();
    if (warm_start->x.rows() != n || warm_start->x.cols() != d ||
        warm_start->u.rows() != num_pairs(n) || warm_start->u.cols() != d ||
        warm_start->y.rows() != num_pairs(n) || warm_start->y.cols() != d) {
      throw std::invalid_argument("solve: warm start has wrong dimensions");
    }
    state = *warm_start;
  } else {
    state = cold_start(dataset);
  }

  SonSolution sol;
  sol.lambda = config.lambda;
  StepResiduals res;
  int iter = 0;
  for (; iter < config.max_iterations; ++iter) {
    res = splitting_step(dataset, state, config);
    if (res.primal <= config.tol_primal && res.dual <= config.tol_dual) {
      ++iter;
      sol.converged = true;
      break;
    }
  }

  sol.x = state.x;
  sol.iterations = iter;
  sol.primal_residual = res.primal;
  sol.dual_residual = res.dual;
  sol.objective_value = objective(dataset, state.x, config.lambda);
  // Auto delta scales with the input data, not the iterate: a fully merged
  // solution has diam(x) at solver-tolerance scale, which would put the
  // threshold below the residual gap between merged representatives.
  const double delta = config.cluster_delta > 0 ? config.cluster_delta
                                                : default_cluster_delta(dataset.points);
  sol.partition = extract_clusters(state.x, delta);
  if (final_state) *final_state = std::move(state);
  return sol;
}

}  // namespace sonclust
