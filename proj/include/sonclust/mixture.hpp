#pragma once

#include <cstdint>
#include <optional>

#include "sonclust/core.hpp"
#include "sonclust/solver.hpp"

namespace sonclust {

/// Spherical Gaussian mixture: K means, per-component standard deviations
/// and weights (weights positive, summing to 1).
struct MixtureModel {
  Matrix means;    // K x d
  Vector sigmas;   // K
  Vector weights;  // K

  Eigen::Index k() const { return means.rows(); }
  Eigen::Index dim() const { return means.cols(); }
  void validate() const;
};

/// Deterministic seeded generator with an explicit polar-method Gaussian
/// transform, so identical seeds reproduce identical samples on any build.
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  // Uniform in [0, 1).
  double uniform();
  // Standard normal deviate (Marsaglia polar method).
  double gaussian();

 private:
  std::uint64_t next_bits();
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct MixtureSample {
  Dataset dataset;
  std::vector<int> labels;  // source component per point
};

// n i.i.d. draws: component by weight, then N(mu_m, sigma_m^2 I).
MixtureSample sample_mixture(const MixtureModel& model, int n, std::uint64_t seed);

// P(chi^2_d <= theta^2): probability a spherical Gaussian sample lies within
// theta standard deviations of its mean. Note the evaluation point is
// theta squared. Regularized lower incomplete gamma P(d/2, theta^2/2),
// absolute error below 1e-12.
double chi2_cdf(double theta, int d);

// Eq-style lower bound 2 theta sigma_m / ((F(theta,d) w_m - eps) n); the
// fusion guarantee for V_m holds for lambda at or above this.
double lambda_lower_bound(const MixtureModel& model, int m, double theta, double epsilon,
                          int n);

// min over pairs ||mu_m - mu_m'|| / (2(n-1)); lambdas strictly below keep
// the V_m clusters distinct.
double lambda_upper_bound(const MixtureModel& model, int n);

// 16 d sigma_max / (c_d w_min) with c_d = chi2_cdf(2d, d). Mean separation
// above this admits a single lambda recovering every V_m at once.
double separation_bound(const MixtureModel& model);

struct LambdaPolicy {
  enum class Kind { Explicit, MidpointOfBounds };
  Kind kind = Kind::MidpointOfBounds;
  double explicit_lambda = 0.0;

  static LambdaPolicy explicit_value(double lambda) {
    return {Kind::Explicit, lambda};
  }
  static LambdaPolicy midpoint() { return {Kind::MidpointOfBounds, 0.0}; }
};

struct RecoveryReport {
  std::uint64_t trial_seed = 0;
  std::vector<int> v_sizes;                  // |V_m| per component
  std::vector<bool> coherent;                // all of V_m in one cluster
  std::vector<std::vector<bool>> distinct;   // K x K, pairwise disjoint cluster ids
  double lambda_used = 0.0;
  std::vector<double> lambda_lb;
  double lambda_ub = 0.0;
  bool feasible_window = true;               // false: max lb >= ub, trial skipped
  bool recovered = false;                    // all coherent and all pairs distinct
};

// Per trial (seed + trial index): sample, build V_m from the true means,
// pick lambda per policy, solve, report coherence and distinctness.
std::vector<RecoveryReport> run_recovery_experiment(
    const MixtureModel& model, int n, double theta, double epsilon,
    const LambdaPolicy& policy, int trials, std::uint64_t seed,
    const SolverConfig& solver_config = {});

}  // namespace sonclust
