#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>

#include "sonclust/certificate.hpp"
#include "sonclust/clusterpath.hpp"
#include "sonclust/io.hpp"
#include "sonclust/mixture.hpp"
#include "sonclust/solver.hpp"

namespace {

using sonclust::io::json;

constexpr const char* kArtifactVersion = "1.0.0";

class Stopwatch {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json make_manifest(const std::string& command, const json& parameters,
                   const json& inputs, const json& outputs, double duration_ms) {
  return json{{"command", command},
              {"parameters", parameters},
              {"artifact_version", kArtifactVersion},
              {"inputs", inputs},
              {"outputs", outputs},
              {"duration_ms", duration_ms}};
}

void write_json(const std::string& path, const json& payload) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot write");
  out << payload.dump(2) << '\n';
}

struct SolverFlags {
  double rho = 1.0;
  double tol = 1e-8;
  int max_iterations = 100000;
  double cluster_delta = 0.0;

  void attach(CLI::App* app) {
    app->add_option("--rho", rho, "splitting penalty parameter");
    app->add_option("--tol", tol, "primal/dual stopping tolerance");
    app->add_option("--max-iterations", max_iterations, "iteration cap");
    app->add_option("--cluster-delta", cluster_delta,
                    "merge-detection distance (0 = auto, 1e-5 x diameter)");
  }

  sonclust::SolverConfig config(double lambda) const {
    sonclust::SolverConfig c;
    c.lambda = lambda;
    c.rho = rho;
    c.tol_primal = tol;
    c.tol_dual = tol;
    c.max_iterations = max_iterations;
    c.cluster_delta = cluster_delta;
    return c;
  }
};

int run_gen(const std::string& model_path, int n, std::uint64_t seed,
            const std::string& out_data, const std::string& out_labels) {
  Stopwatch watch;
  const auto model = sonclust::io::read_model_json(model_path);
  const auto sample = sonclust::sample_mixture(model, n, seed);
  sonclust::io::write_dataset_csv(out_data, sample.dataset);
  sonclust::io::write_labels_csv(out_labels, sample.labels);
  const json manifest = make_manifest(
      "gen", {{"n", n}, {"seed", seed}}, {{"model", model_path}},
      {{"dataset", out_data}, {"labels", out_labels}}, watch.elapsed_ms());
  write_json(out_data + ".manifest.json", manifest);
  return 0;
}

int run_solve(const std::string& data_path, bool header, double lambda,
              const SolverFlags& flags, const std::string& out_path) {
  Stopwatch watch;
  const auto dataset = sonclust::io::read_dataset_csv(data_path, header);
  const auto solution = sonclust::solve(dataset, flags.config(lambda));
  json payload = sonclust::io::solution_to_json(solution);
  payload["manifest"] = make_manifest(
      "solve",
      {{"lambda", lambda}, {"rho", flags.rho}, {"tol", flags.tol},
       {"max_iterations", flags.max_iterations}},
      {{"dataset", data_path}}, {{"solution", out_path}}, watch.elapsed_ms());
  write_json(out_path, payload);
  return solution.converged ? 0 : 1;
}

int run_certify(const std::string& data_path, bool header, double lambda,
                const std::vector<int>& cluster, const std::string& solution_path,
                const SolverFlags& flags, const std::string& out_path) {
  Stopwatch watch;
  const auto dataset = sonclust::io::read_dataset_csv(data_path, header);
  json results = json::array();
  bool any_infeasible = false;
  if (!cluster.empty()) {
    const auto result = sonclust::check_sufficient(dataset, cluster, lambda);
    any_infeasible = !result.feasible();
    results.push_back(sonclust::io::certificate_to_json(result));
  } else {
    std::ifstream in(solution_path);
    if (!in) throw sonclust::io::ParseError(solution_path + ": cannot open");
    json sol_json = json::parse(in);
    for (const auto& members : sol_json.at("partition")) {
      const auto result =
          sonclust::check_sufficient(dataset, members.get<std::vector<int>>(), lambda);
      any_infeasible = any_infeasible || !result.feasible();
      results.push_back(sonclust::io::certificate_to_json(result));
    }
  }
  json payload{{"schema_version", sonclust::io::kSchemaVersion},
               {"lambda", lambda},
               {"certificates", results}};
  payload["manifest"] = make_manifest(
      "certify", {{"lambda", lambda}, {"cluster", cluster}},
      {{"dataset", data_path}, {"solution", solution_path}}, {{"certificates", out_path}},
      watch.elapsed_ms());
  write_json(out_path, payload);
  return any_infeasible ? 1 : 0;
}

int run_path(const std::string& data_path, bool header, const std::string& grid_spec,
             bool refine_merges, bool strict, const SolverFlags& flags,
             const std::string& out_path, const std::string& tree_path) {
  Stopwatch watch;
  const auto dataset = sonclust::io::read_dataset_csv(data_path, header);
  const auto grid = sonclust::io::parse_lambda_grid(grid_spec);
  sonclust::PathOptions options;
  options.refine_merge_lambdas = refine_merges;
  const auto path = sonclust::compute_path(dataset, grid, flags.config(0.0), options);
  const auto violations = sonclust::check_agglomeration(path);

  json payload = sonclust::io::path_to_json(path);
  json vio = json::array();
  for (auto [a, b] : violations) vio.push_back({a, b});
  payload["agglomeration_violations"] = vio;
  payload["manifest"] = make_manifest(
      "path", {{"lambda_grid", grid_spec}, {"refine_merges", refine_merges}},
      {{"dataset", data_path}}, {{"path", out_path}, {"dendrogram", tree_path}},
      watch.elapsed_ms());
  write_json(out_path, payload);

  if (violations.empty()) {
    write_json(tree_path, sonclust::io::merge_tree_to_json(sonclust::merge_tree(path)));
  } else {
    std::cerr << "agglomeration violated at " << violations.size()
              << " grid step(s); no dendrogram written\n";
    if (strict) return 1;
  }
  return 0;
}

int run_bounds(const std::string& model_path, int n, double theta, double epsilon,
               const std::string& out_path) {
  Stopwatch watch;
  const auto model = sonclust::io::read_model_json(model_path);
  std::vector<double> lbs(model.k());
  for (int m = 0; m < model.k(); ++m) {
    lbs[m] = sonclust::lambda_lower_bound(model, m, theta, epsilon, n);
  }
  json payload{{"schema_version", sonclust::io::kSchemaVersion},
               {"lambda_lb", lbs},
               {"separation_bound", sonclust::separation_bound(model)}};
  if (model.k() >= 2) payload["lambda_ub"] = sonclust::lambda_upper_bound(model, n);
  payload["manifest"] =
      make_manifest("bounds", {{"n", n}, {"theta", theta}, {"epsilon", epsilon}},
                    {{"model", model_path}}, {{"bounds", out_path}}, watch.elapsed_ms());
  write_json(out_path, payload);
  return 0;
}

int run_experiment(const std::string& model_path, int n, double theta, double epsilon,
                   double explicit_lambda, bool has_explicit_lambda, int trials,
                   std::uint64_t seed, const SolverFlags& flags,
                   const std::string& out_path) {
  Stopwatch watch;
  const auto model = sonclust::io::read_model_json(model_path);
  const auto policy = has_explicit_lambda
                          ? sonclust::LambdaPolicy::explicit_value(explicit_lambda)
                          : sonclust::LambdaPolicy::midpoint();
  const auto reports = sonclust::run_recovery_experiment(model, n, theta, epsilon, policy,
                                                         trials, seed, flags.config(0.0));
  json arr = json::array();
  bool any_feasible = false;
  for (const auto& rep : reports) {
    any_feasible = any_feasible || rep.feasible_window;
    arr.push_back(sonclust::io::report_to_json(rep));
  }
  json payload{{"schema_version", sonclust::io::kSchemaVersion}, {"reports", arr}};
  payload["manifest"] = make_manifest(
      "experiment",
      {{"n", n}, {"theta", theta}, {"epsilon", epsilon}, {"trials", trials}, {"seed", seed}},
      {{"model", model_path}}, {{"reports", out_path}}, watch.elapsed_ms());
  write_json(out_path, payload);
  return any_feasible ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equal-weight sum-of-norms clustering toolkit"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "sample a Gaussian mixture into CSV");
  std::string gen_model, gen_out = "dataset.csv", gen_labels = "labels.csv";
  int gen_n = 0;
  std::uint64_t gen_seed = 0;
  gen->add_option("--model", gen_model, "model config JSON")->required();
  gen->add_option("--n", gen_n, "number of samples")->required();
  gen->add_option("--seed", gen_seed, "RNG seed")->required();
  gen->add_option("--out", gen_out, "output dataset CSV");
  gen->add_option("--labels-out", gen_labels, "output labels CSV");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "solve at a single lambda");
  std::string solve_data, solve_out = "solution.json";
  double solve_lambda = 0.0;
  bool solve_header = false;
  SolverFlags solve_flags;
  solve_cmd->add_option("data", solve_data, "dataset CSV")->required();
  solve_cmd->add_option("--lambda", solve_lambda, "fusion strength")->required();
  solve_cmd->add_flag("--header", solve_header, "dataset CSV has a header row");
  solve_cmd->add_option("--out", solve_out, "output solution JSON");
  solve_flags.attach(solve_cmd);

  // certify
  auto* certify = app.add_subcommand("certify", "check cluster certificates");
  std::string cert_data, cert_solution, cert_out = "certificates.json";
  double cert_lambda = 0.0;
  bool cert_header = false;
  std::vector<int> cert_cluster;
  SolverFlags cert_flags;
  certify->add_option("data", cert_data, "dataset CSV")->required();
  certify->add_option("--lambda", cert_lambda, "fusion strength")->required();
  auto* cluster_opt = certify->add_option("--cluster", cert_cluster, "candidate cluster indices");
  auto* from_sol_opt =
      certify->add_option("--from-solution", cert_solution, "solution JSON to certify");
  cluster_opt->excludes(from_sol_opt);
  certify->add_flag("--header", cert_header, "dataset CSV has a header row");
  certify->add_option("--out", cert_out, "output certificate JSON");
  cert_flags.attach(certify);

  // path
  auto* path_cmd = app.add_subcommand("path", "sweep a lambda grid");
  std::string path_data, path_grid, path_out = "path.json", path_tree = "dendrogram.json";
  bool path_header = false, path_refine = false, path_strict = false;
  SolverFlags path_flags;
  path_cmd->add_option("data", path_data, "dataset CSV")->required();
  path_cmd->add_option("--lambda-grid", path_grid, "start:stop:count:geometric|linear")
      ->required();
  path_cmd->add_flag("--header", path_header, "dataset CSV has a header row");
  path_cmd->add_flag("--refine-merges", path_refine, "bisect merge lambdas");
  path_cmd->add_flag("--strict", path_strict, "exit 1 on agglomeration violation");
  path_cmd->add_option("--out", path_out, "output path JSON");
  path_cmd->add_option("--tree-out", path_tree, "output dendrogram JSON");
  path_flags.attach(path_cmd);

  // bounds
  auto* bounds = app.add_subcommand("bounds", "recovery lambda bounds for a model");
  std::string bounds_model, bounds_out = "bounds.json";
  int bounds_n = 0;
  double bounds_theta = 0.0, bounds_eps = 0.0;
  bounds->add_option("--model", bounds_model, "model config JSON")->required();
  bounds->add_option("--n", bounds_n, "sample count")->required();
  bounds->add_option("--theta", bounds_theta, "V_m radius in standard deviations")->required();
  bounds->add_option("--epsilon", bounds_eps, "concentration slack")->required();
  bounds->add_option("--out", bounds_out, "output bounds JSON");

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "mixture recovery harness");
  std::string exp_model, exp_out = "reports.json";
  int exp_n = 0, exp_trials = 1;
  double exp_theta = 0.0, exp_eps = 0.0, exp_lambda = 0.0;
  std::uint64_t exp_seed = 0;
  SolverFlags exp_flags;
  exp_cmd->add_option("--model", exp_model, "model config JSON")->required();
  exp_cmd->add_option("--n", exp_n, "samples per trial")->required();
  exp_cmd->add_option("--theta", exp_theta, "V_m radius in standard deviations")->required();
  exp_cmd->add_option("--epsilon", exp_eps, "concentration slack")->required();
  auto* exp_lambda_opt =
      exp_cmd->add_option("--lambda", exp_lambda, "explicit lambda (default: midpoint of bounds)");
  exp_cmd->add_option("--trials", exp_trials, "number of trials")->required();
  exp_cmd->add_option("--seed", exp_seed, "base RNG seed")->required();
  exp_cmd->add_option("--out", exp_out, "output reports JSON");
  exp_flags.attach(exp_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return run_gen(gen_model, gen_n, gen_seed, gen_out, gen_labels);
    if (solve_cmd->parsed()) {
      return run_solve(solve_data, solve_header, solve_lambda, solve_flags, solve_out);
    }
    if (certify->parsed()) {
      if (cert_cluster.empty() && cert_solution.empty()) {
        std::cerr << "certify: need --cluster or --from-solution\n";
        return 2;
      }
      return run_certify(cert_data, cert_header, cert_lambda, cert_cluster, cert_solution,
                         cert_flags, cert_out);
    }
    if (path_cmd->parsed()) {
      return run_path(path_data, path_header, path_grid, path_refine, path_strict, path_flags,
                      path_out, path_tree);
    }
    if (bounds->parsed()) {
      return run_bounds(bounds_model, bounds_n, bounds_theta, bounds_eps, bounds_out);
    }
    if (exp_cmd->parsed()) {
      return run_experiment(exp_model, exp_n, exp_theta, exp_eps, exp_lambda,
                            exp_lambda_opt->count() > 0, exp_trials, exp_seed, exp_flags,
                            exp_out);
    }
  } catch (const sonclust::io::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
