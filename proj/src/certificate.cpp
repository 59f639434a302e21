#include "sonclust/certificate.hpp"

#include <algorithm>
#include <cmath>

namespace sonclust {

namespace {

std::vector<int> validated_cluster(const Dataset& dataset, std::vector<int> cluster) {
  if (cluster.empty()) throw std::invalid_argument("certificate: cluster must be nonempty");
  std::sort(cluster.begin(), cluster.end());
  if (std::adjacent_find(cluster.begin(), cluster.end()) != cluster.end()) {
    throw std::invalid_argument("certificate: duplicate index in cluster");
  }
  if (cluster.front() < 0 || cluster.back() >= dataset.n()) {
    throw std::invalid_argument("certificate: cluster index out of range");
  }
  return cluster;
}

Eigen::RowVectorXd cluster_centroid(const Dataset& dataset, const std::vector<int>& cluster) {
  Eigen::RowVectorXd centroid = Eigen::RowVectorXd::Zero(dataset.dim());
  for (int idx : cluster) centroid += dataset.points.row(idx);
  return centroid / static_cast<double>(cluster.size());
}

// Row sums sum_{j != i} z_ij per cluster position, with z_ji = -z_ij.
Matrix row_sums(const Matrix& z, Eigen::Index k, Eigen::Index d) {
  Matrix sums = Matrix::Zero(k, d);
  Eigen::Index p = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j, ++p) {
      sums.row(i) += z.row(p);
      sums.row(j) -= z.row(p);
    }
  }
  return sums;
}

// Minimum-norm correction restoring the equality system exactly.
void project_onto_equalities(Matrix& z, const Matrix& target_row_sums, Eigen::Index k) {
  const Matrix residual = row_sums(z, k, z.cols()) - target_row_sums;
  const double inv_k = 1.0 / static_cast<double>(k);
  Eigen::Index p = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j, ++p) {
      z.row(p) -= (residual.row(i) - residual.row(j)) * inv_k;
    }
  }
}

}  // namespace

void Multipliers::refresh_diagnostics(const Dataset& dataset) {
  const Eigen::Index k = static_cast<Eigen::Index>(cluster.size());
  max_norm = 0.0;
  for (Eigen::Index p = 0; p < z.rows(); ++p) {
    max_norm = std::max(max_norm, z.row(p).norm());
  }
  const Eigen::RowVectorXd centroid = cluster_centroid(dataset, cluster);
  const Matrix sums = row_sums(z, k, dataset.dim());
  equality_residual = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double r =
        (dataset.points.row(cluster[i]) - centroid - lambda * sums.row(i)).norm();
    equality_residual = std::max(equality_residual, r);
  }
}

std::string to_string(CertificateStatus status) {
  switch (status) {
    case CertificateStatus::FeasibleByLeastSquares:
      return "feasible-by-least-squares";
    case CertificateStatus::FeasibleByRefinement:
      return "feasible-by-refinement";
    case CertificateStatus::InfeasibleAtRefinementLimit:
      return "infeasible-at-refinement-limit";
  }
  return "unknown";
}

Multipliers least_squares_multipliers(const Dataset& dataset, std::vector<int> cluster,
                                      double lambda) {
  if (lambda <= 0) throw std::invalid_argument("certificate: lambda must be positive");
  Multipliers m;
  m.cluster = validated_cluster(dataset, std::move(cluster));
  m.lambda = lambda;
  const Eigen::Index k = static_cast<Eigen::Index>(m.cluster.size());
  m.z.resize(num_pairs(k), dataset.dim());
  const double scale = 1.0 / (lambda * static_cast<double>(k));
  Eigen::Index p = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j, ++p) {
      m.z.row(p) =
          (dataset.points.row(m.cluster[i]) - dataset.points.row(m.cluster[j])) * scale;
    }
  }
  m.refresh_diagnostics(dataset);
  return m;
}

CertificateResult refine_multipliers(const Dataset& dataset, std::vector<int> cluster,
                                     double lambda, int max_iterations, double tol) {
  Multipliers ls = least_squares_multipliers(dataset, std::move(cluster), lambda);
  const Eigen::Index k = static_cast<Eigen::Index>(ls.cluster.size());
  if (k < 2) throw std::invalid_argument("refine_multipliers: |C| must be >= 2");

  CertificateResult result;
  result.multipliers = ls;
  if (ls.feasible(tol)) {
    result.status = CertificateStatus::FeasibleByLeastSquares;
    return result;
  }

  // Target row sums of the equality system: (a_i - centroid) / lambda.
  const Eigen::RowVectorXd centroid = cluster_centroid(dataset, ls.cluster);
  Matrix target(k, dataset.dim());
  for (Eigen::Index i = 0; i < k; ++i) {
    target.row(i) = (dataset.points.row(ls.cluster[i]) - centroid) / lambda;
  }

  // Dykstra: the ball-product projection carries a correction term, the
  // affine projection does not.
  Matrix z = ls.z;
  Matrix correction = Matrix::Zero(z.rows(), z.cols());
  Multipliers best = ls;
  int iterations = 0;
  for (int it = 1; it <= max_iterations; ++it) {
    iterations = it;
    Matrix w = z + correction;
    for (Eigen::Index p = 0; p < w.rows(); ++p) {
      const double norm = w.row(p).norm();
      if (norm > 1.0) w.row(p) /= norm;
    }
    correction = z + correction - w;
    z = w;
    project_onto_equalities(z, target, k);

    double max_norm = 0.0;
    for (Eigen::Index p = 0; p < z.rows(); ++p) {
      max_norm = std::max(max_norm, z.row(p).norm());
    }
    if (max_norm < best.max_norm) {
      best.z = z;
      best.refresh_diagnostics(dataset);
    }
    if (max_norm <= 1.0 + tol) break;
  }

  result.multipliers = best;
  result.iterations_used = iterations;
  result.status = best.feasible(tol) ? CertificateStatus::FeasibleByRefinement
                                     : CertificateStatus::InfeasibleAtRefinementLimit;
  return result;
}

CertificateResult check_sufficient(const Dataset& dataset, std::vector<int> cluster,
                                   double lambda, int max_iterations, double tol) {
  if (lambda <= 0) throw std::invalid_argument("certificate: lambda must be positive");
  cluster = validated_cluster(dataset, std::move(cluster));
  if (cluster.size() == 1) {
    // Vacuous system: no pairs, no equalities beyond a_i = a_i.
    CertificateResult result;
    result.status = CertificateStatus::FeasibleByLeastSquares;
    result.multipliers.cluster = cluster;
    result.multipliers.lambda = lambda;
    result.multipliers.z = Matrix::Zero(0, dataset.dim());
    return result;
  }
  return refine_multipliers(dataset, std::move(cluster), lambda, max_iterations, tol);
}

std::vector<CertificateResult> certify_partition(const Dataset& dataset,
                                                 const SonSolution& solution,
                                                 int max_iterations, double tol) {
  std::vector<CertificateResult> results;
  for (const auto& members : solution.partition.clusters()) {
    results.push_back(check_sufficient(dataset, members, solution.lambda, max_iterations, tol));
  }
  return results;
}

Multipliers rescale_certificate(const Multipliers& m, double lambda_bar) {
  if (m.lambda <= 0) throw std::invalid_argument("rescale_certificate: lambda must be positive");
  if (lambda_bar < m.lambda) {
    throw std::invalid_argument("rescale_certificate: lambda_bar must be >= lambda");
  }
  Multipliers out = m;
  const double factor = m.lambda / lambda_bar;
  out.z *= factor;
  out.lambda = lambda_bar;
  out.max_norm = m.max_norm * factor;
  // Both sides of the equality system rescale consistently.
  return out;
}

}  // namespace sonclust
