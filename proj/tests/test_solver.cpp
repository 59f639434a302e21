#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "sonclust/solver.hpp"

using namespace sonclust;
using testutil::dataset1d;

namespace {

SolverConfig config_for(double lambda) {
  SolverConfig c;
  c.lambda = lambda;
  return c;
}

}  // namespace

TEST_CASE("prox_group_norm") {
  Vector v(2);
  v << 3.0, 4.0;
  CHECK((prox_group_norm(v, 0.0) - v).norm() == 0.0);
  CHECK(prox_group_norm(v, 5.0).norm() == 0.0);
  const Vector shrunk = prox_group_norm(v, 2.5);
  CHECK(shrunk[0] == doctest::Approx(1.5));
  CHECK(shrunk[1] == doctest::Approx(2.0));
  CHECK(prox_group_norm(Vector::Zero(2), 1.0).norm() == 0.0);
  CHECK_THROWS_AS(prox_group_norm(v, -1.0), std::invalid_argument);
}

TEST_CASE("splitting_step hand iteration at lambda=0") {
  const Dataset data = dataset1d({0.0, 4.0});
  SolverConfig cfg = config_for(0.0);
  SplittingState state;
  state.x = Matrix::Zero(2, 1);
  state.u = Matrix::Zero(1, 1);
  state.y = Matrix::Zero(1, 1);
  splitting_step(data, state, cfg);
  // x_i = (a_i + sum a) / (1 + 2) with u = y = 0.
  CHECK(state.x(0, 0) == doctest::Approx(4.0 / 3.0));
  CHECK(state.x(1, 0) == doctest::Approx(8.0 / 3.0));
  for (int it = 0; it < 200; ++it) splitting_step(data, state, cfg);
  CHECK(state.x(0, 0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(state.x(1, 0) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("splitting_step fixed point has zero residuals") {
  const Dataset data = dataset1d({0.0, 4.0});
  SolverConfig cfg = config_for(1.0);
  // Converge first, then one more step must not move.
  SplittingState state;
  solve(data, cfg, std::nullopt, &state);
  const Matrix x_before = state.x;
  const auto res = splitting_step(data, state, cfg);
  CHECK(res.primal <= 1e-8);
  CHECK(res.dual <= 1e-8);
  CHECK((state.x - x_before).norm() <= 1e-8);
}

TEST_CASE("splitting_step preserves the centroid") {
  std::mt19937 rng(3);
  const Dataset data = testutil::random_dataset(rng, 7, 3);
  SolverConfig cfg = config_for(0.7);
  SplittingState state = cold_start(data);
  for (int it = 0; it < 20; ++it) {
    splitting_step(data, state, cfg);
    CHECK((state.x.colwise().sum() - data.points.colwise().sum()).norm() <= 1e-12);
  }
}

TEST_CASE("solve: two points below and above the merge threshold") {
  const Dataset data = dataset1d({0.0, 4.0});
  const SonSolution low = solve(data, config_for(1.0));
  CHECK(low.converged);
  CHECK(low.x(0, 0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(low.x(1, 0) == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(low.partition == testutil::partition_of({{0}, {1}}));

  const SonSolution high = solve(data, config_for(2.0));
  CHECK(high.x(0, 0) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(high.x(1, 0) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(high.partition == testutil::partition_of({{0, 1}}));
}

TEST_CASE("solve at lambda=0 returns the data") {
  std::mt19937 rng(5);
  const Dataset data = testutil::random_dataset(rng, 5, 2);
  const SonSolution sol = solve(data, config_for(0.0));
  CHECK((sol.x - data.points).norm() <= 1e-7);
  CHECK(sol.partition.num_clusters == 5);
}

TEST_CASE("solve: three collinear points fuse at lambda=1") {
  const Dataset data = dataset1d({0.0, 2.0, 4.0});
  const SonSolution sol = solve(data, config_for(1.0));
  CHECK(sol.partition == testutil::partition_of({{0, 1, 2}}));
  for (int i = 0; i < 3; ++i) CHECK(sol.x(i, 0) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("solve rejects invalid config and warm-start shapes") {
  const Dataset data = dataset1d({0.0, 4.0});
  SolverConfig bad = config_for(1.0);
  bad.rho = 0.0;
  CHECK_THROWS_AS(solve(data, bad), std::invalid_argument);
  SplittingState wrong;
  wrong.x = Matrix::Zero(3, 1);
  wrong.u = Matrix::Zero(3, 1);
  wrong.y = Matrix::Zero(3, 1);
  CHECK_THROWS_AS(solve(data, config_for(1.0), wrong), std::invalid_argument);
}

TEST_CASE("non-convergence is reported, not thrown") {
  const Dataset data = dataset1d({0.0, 4.0});
  SolverConfig cfg = config_for(1.0);
  cfg.max_iterations = 2;
  const SonSolution sol = solve(data, cfg);
  CHECK_FALSE(sol.converged);
  CHECK(sol.iterations == 2);
}

TEST_CASE("two-point oracle over random instances") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> unif(0.0, 3.0);
  std::uniform_int_distribution<int> dim(1, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const Dataset data = testutil::random_dataset(rng, 2, dim(rng), 2.0);
    const double lambda = unif(rng);
    const SonSolution sol = solve(data, config_for(lambda));
    const Matrix expected = testutil::two_point_solution(data, lambda);
    CHECK((sol.x - expected).norm() <= 1e-6);
  }
}

TEST_CASE("brute-force oracle on n=3 d=1 instances") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> unif(0.05, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const Dataset data = testutil::random_dataset(rng, 3, 1, 2.0);
    const double lambda = unif(rng);
    const SonSolution sol = solve(data, config_for(lambda));
    const double oracle = testutil::brute_force_objective_3x1(data, lambda);
    CHECK(sol.objective_value == doctest::Approx(oracle).epsilon(1e-6));
  }
}

TEST_CASE("objective never exceeds the cold-start objective") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset data = testutil::random_dataset(rng, 8, 2);
    const double lambda = 0.1 + 0.1 * trial;
    const SonSolution sol = solve(data, config_for(lambda));
    CHECK(sol.objective_value <= objective(data, data.points, lambda) + 1e-10);
  }
}

TEST_CASE("converged solutions are locally optimal") {
  std::mt19937 rng(29);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 5; ++trial) {
    const Dataset data = testutil::random_dataset(rng, 6, 2);
    const SonSolution sol = solve(data, config_for(0.3));
    for (int p = 0; p < 100; ++p) {
      Matrix noise(6, 2);
      for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 2; ++j) noise(i, j) = normal(rng);
      }
      noise *= 1e-3 / noise.norm();
      CHECK(sol.objective_value <= objective(data, sol.x + noise, 0.3) + 1e-12);
    }
  }
}

TEST_CASE("single cluster above the global fusion threshold") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const Dataset data = testutil::random_dataset(rng, 8, 2);
    double diam = 0.0;
    for (int i = 0; i < 8; ++i) {
      for (int j = i + 1; j < 8; ++j) {
        diam = std::max(diam, (data.points.row(i) - data.points.row(j)).norm());
      }
    }
    const SonSolution sol = solve(data, config_for(diam / 8.0));
    CHECK(sol.partition.num_clusters == 1);
  }
}

TEST_CASE("solve is deterministic") {
  std::mt19937 rng(37);
  const Dataset data = testutil::random_dataset(rng, 6, 2);
  const SonSolution a = solve(data, config_for(0.4));
  const SonSolution b = solve(data, config_for(0.4));
  CHECK(a.x == b.x);
  CHECK(a.iterations == b.iterations);
  CHECK(a.primal_residual == b.primal_residual);
  CHECK(a.dual_residual == b.dual_residual);
}
