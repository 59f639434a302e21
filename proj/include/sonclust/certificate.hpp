#pragma once

#include <string>

#include "sonclust/core.hpp"
#include "sonclust/solver.hpp"

namespace sonclust {

constexpr double kDefaultCertTol = 1e-8;
constexpr int kDefaultRefineIterations = 5000;

/// Antisymmetric multiplier family z_ij over a candidate cluster C.
/// z holds one row per unordered pair (positions i<j within the sorted
/// index list); z_ji is obtained by negation, so antisymmetry is structural.
struct Multipliers {
  std::vector<int> cluster;  // sorted dataset indices
  Matrix z;                  // |C|(|C|-1)/2 x d
  double lambda = 0.0;
  double max_norm = 0.0;
  double equality_residual = 0.0;

  bool feasible(double tol = kDefaultCertTol) const {
    return max_norm <= 1.0 + tol && equality_residual <= tol;
  }

  // Recomputes max_norm and equality_residual against the dataset:
  //   equality_residual = max_i || a_i - mean(a_C) - lambda * sum_j z_ij ||.
  void refresh_diagnostics(const Dataset& dataset);
};

enum class CertificateStatus {
  FeasibleByLeastSquares,
  FeasibleByRefinement,
  InfeasibleAtRefinementLimit,
};

std::string to_string(CertificateStatus status);

struct CertificateResult {
  CertificateStatus status = CertificateStatus::InfeasibleAtRefinementLimit;
  Multipliers multipliers;
  int iterations_used = 0;

  bool feasible() const { return status != CertificateStatus::InfeasibleAtRefinementLimit; }
};

// Closed-form minimum-norm solution of the equality system:
// z_ij = (a_i - a_j) / (lambda |C|). Satisfies the equalities exactly.
Multipliers least_squares_multipliers(const Dataset& dataset, std::vector<int> cluster,
                                      double lambda);

// Dykstra alternating projections between the affine equality set and the
// product of unit balls, started from the least-squares point. An exhausted
// iteration budget is inconclusive, not a proof of infeasibility.
CertificateResult refine_multipliers(const Dataset& dataset, std::vector<int> cluster,
                                     double lambda,
                                     int max_iterations = kDefaultRefineIterations,
                                     double tol = kDefaultCertTol);

// Least squares first, refinement as fallback. A feasible result certifies
// that all of C shares one value in the optimizer, whatever the other
// points are.
CertificateResult check_sufficient(const Dataset& dataset, std::vector<int> cluster,
                                   double lambda,
                                   int max_iterations = kDefaultRefineIterations,
                                   double tol = kDefaultCertTol);

// check_sufficient on every cluster of the solution at its lambda.
// Diagnostic: true clusters always admit multipliers, so persistent
// infeasibility points at solver inaccuracy or over-merging.
std::vector<CertificateResult> certify_partition(const Dataset& dataset,
                                                 const SonSolution& solution,
                                                 int max_iterations = kDefaultRefineIterations,
                                                 double tol = kDefaultCertTol);

// Scales z by lambda/lambda_bar; preserves the equalities at lambda_bar and
// shrinks max_norm, which is exactly the agglomeration mechanism.
Multipliers rescale_certificate(const Multipliers& m, double lambda_bar);

}  // namespace sonclust
