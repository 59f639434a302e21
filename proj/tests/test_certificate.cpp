#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "sonclust/certificate.hpp"

using namespace sonclust;
using testutil::dataset1d;

TEST_CASE("least-squares multipliers on two points") {
  const Dataset data = dataset1d({0.0, 4.0});
  const Multipliers at2 = least_squares_multipliers(data, {0, 1}, 2.0);
  CHECK(at2.z(0, 0) == doctest::Approx(-1.0));
  CHECK(at2.max_norm == doctest::Approx(1.0));
  CHECK(at2.equality_residual <= 1e-12);
  CHECK(at2.feasible());

  const Multipliers at1 = least_squares_multipliers(data, {0, 1}, 1.0);
  CHECK(at1.z(0, 0) == doctest::Approx(-2.0));
  CHECK(at1.max_norm == doctest::Approx(2.0));
  CHECK_FALSE(at1.feasible());
}

TEST_CASE("least-squares multipliers: singleton and input validation") {
  const Dataset data = dataset1d({0.0, 4.0});
  const Multipliers single = least_squares_multipliers(data, {1}, 1.0);
  CHECK(single.z.rows() == 0);
  CHECK(single.max_norm == 0.0);
  CHECK(single.equality_residual <= 1e-15);
  CHECK(single.feasible());

  CHECK_THROWS_AS(least_squares_multipliers(data, {0, 1}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(least_squares_multipliers(data, {0, 0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(least_squares_multipliers(data, {0, 5}, 1.0), std::invalid_argument);
}

TEST_CASE("least-squares multipliers satisfy the equalities on random inputs") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> unif(0.1, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Dataset data = testutil::random_dataset(rng, 10, 3, 2.0);
    std::vector<int> cluster;
    for (int i = 0; i < 10; ++i) {
      if (rng() % 2) cluster.push_back(i);
    }
    if (cluster.empty()) cluster.push_back(0);
    const Multipliers m = least_squares_multipliers(data, cluster, unif(rng));
    const double scale = 1.0 + data.points.rowwise().norm().maxCoeff();
    CHECK(m.equality_residual <= 1e-10 * scale);
  }
}

TEST_CASE("refinement finds the hand-verified feasible point for {0,2,4}") {
  const Dataset data = dataset1d({0.0, 2.0, 4.0});
  const Multipliers ls = least_squares_multipliers(data, {0, 1, 2}, 1.0);
  CHECK(ls.max_norm == doctest::Approx(4.0 / 3.0));  // z_13 = -4/3, infeasible
  const CertificateResult result = refine_multipliers(data, {0, 1, 2}, 1.0);
  CHECK(result.status == CertificateStatus::FeasibleByRefinement);
  CHECK(result.multipliers.max_norm <= 1.0 + 1e-8);
  CHECK(result.multipliers.equality_residual <= 1e-8);
}

TEST_CASE("refinement returns the least-squares point when already feasible") {
  const Dataset data = dataset1d({0.0, 4.0});
  const CertificateResult result = refine_multipliers(data, {0, 1}, 2.0);
  CHECK(result.status == CertificateStatus::FeasibleByLeastSquares);
  CHECK(result.iterations_used == 0);
  CHECK(result.multipliers.z(0, 0) == doctest::Approx(-1.0));
}

TEST_CASE("refinement is inconclusive when the equality set forces infeasibility") {
  // Two points: the equality system pins z_12 uniquely outside the unit ball.
  const Dataset data = dataset1d({0.0, 4.0});
  const CertificateResult result = refine_multipliers(data, {0, 1}, 1.0, 500);
  CHECK(result.status == CertificateStatus::InfeasibleAtRefinementLimit);
  CHECK(result.iterations_used == 500);
}

TEST_CASE("refinement never worsens the least-squares max norm") {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Dataset data = testutil::random_dataset(rng, 8, 2);
    std::vector<int> cluster = {0, 1, 2, 3};
    const double lambda = unif(rng);
    const Multipliers ls = least_squares_multipliers(data, cluster, lambda);
    const CertificateResult refined = refine_multipliers(data, cluster, lambda, 300);
    CHECK(refined.multipliers.max_norm <= ls.max_norm + 1e-12);
  }
}

TEST_CASE("check_sufficient statuses") {
  const Dataset data2 = dataset1d({0.0, 4.0});
  CHECK(check_sufficient(data2, {0, 1}, 2.0).status ==
        CertificateStatus::FeasibleByLeastSquares);
  CHECK(check_sufficient(data2, {0}, 1.0).status ==
        CertificateStatus::FeasibleByLeastSquares);

  const Dataset data3 = dataset1d({0.0, 2.0, 4.0});
  CHECK(check_sufficient(data3, {0, 1, 2}, 1.0).status ==
        CertificateStatus::FeasibleByRefinement);
}

TEST_CASE("certify_partition over solver output") {
  const Dataset data = dataset1d({0.0, 4.0});
  SolverConfig cfg;
  cfg.lambda = 2.0;
  const SonSolution merged = solve(data, cfg);
  const auto merged_results = certify_partition(data, merged);
  REQUIRE(merged_results.size() == 1);
  CHECK(merged_results[0].feasible());

  cfg.lambda = 1.0;
  const SonSolution split = solve(data, cfg);
  const auto split_results = certify_partition(data, split);
  REQUIRE(split_results.size() == 2);
  CHECK(split_results[0].feasible());
  CHECK(split_results[1].feasible());
}

TEST_CASE("rescale_certificate") {
  const Dataset data = dataset1d({0.0, 4.0});
  Multipliers m = least_squares_multipliers(data, {0, 1}, 2.0);
  const Multipliers doubled = rescale_certificate(m, 4.0);
  CHECK(doubled.max_norm == doctest::Approx(0.5));
  CHECK(doubled.lambda == 4.0);
  Multipliers refreshed = doubled;
  refreshed.refresh_diagnostics(data);
  CHECK(refreshed.equality_residual <= 1e-12);

  const Multipliers same = rescale_certificate(m, 2.0);
  CHECK(same.z == m.z);

  Multipliers infeasible = least_squares_multipliers(data, {0, 1}, 1.0);
  const Multipliers rescued = rescale_certificate(infeasible, 2.0);
  CHECK(rescued.max_norm == doctest::Approx(1.0));
  CHECK(rescued.feasible());

  CHECK_THROWS_AS(rescale_certificate(m, 1.0), std::invalid_argument);
}

TEST_CASE("feasibility is monotone in lambda via rescaling") {
  std::mt19937 rng(47);
  std::uniform_real_distribution<double> unif(0.2, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset data = testutil::random_dataset(rng, 6, 2, 0.5);
    const double lambda = unif(rng);
    const CertificateResult base = check_sufficient(data, {0, 1, 2}, lambda, 2000);
    if (!base.feasible()) continue;
    const Multipliers scaled = rescale_certificate(base.multipliers, lambda * (1.0 + unif(rng)));
    Multipliers checked = scaled;
    checked.refresh_diagnostics(data);
    CHECK(checked.feasible(1e-6));
    // And check_sufficient agrees at the larger lambda.
    CHECK(check_sufficient(data, {0, 1, 2}, scaled.lambda, 2000).feasible());
  }
}

TEST_CASE("sufficiency consistency: feasible certificate implies co-clustering") {
  std::mt19937 rng(53);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int feasible_seen = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 8);
    const Dataset data = testutil::random_dataset(rng, n, 2, 0.4);
    std::vector<int> cluster;
    for (int i = 0; i < n && cluster.size() < 4; ++i) {
      if (rng() % 2) cluster.push_back(i);
    }
    if (cluster.size() < 2) cluster = {0, 1};
    // Bias lambda toward the least-squares feasibility threshold so both
    // outcomes occur.
    const Multipliers ls = least_squares_multipliers(data, cluster, 1.0);
    const double lambda = ls.max_norm * (0.7 + 0.8 * unif(rng));
    const CertificateResult cert = check_sufficient(data, cluster, lambda, 2000);
    if (!cert.feasible()) continue;
    ++feasible_seen;
    SolverConfig cfg;
    cfg.lambda = lambda;
    const SonSolution sol = solve(data, cfg);
    const int id = sol.partition.assignment[cluster.front()];
    for (int idx : cluster) CHECK(sol.partition.assignment[idx] == id);
  }
  CHECK(feasible_seen > 5);
}
