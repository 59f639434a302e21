#include "sonclust/io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace sonclust::io {

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what) {
  throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

std::vector<double> split_numeric(const std::string& line, const std::string& path,
                                  int line_no) {
  std::vector<double> values;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      size_t pos = 0;
      values.push_back(std::stod(cell, &pos));
      while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
      if (pos != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      parse_fail(path, line_no, "not a number: '" + cell + "'");
    }
  }
  return values;
}

}  // namespace

Dataset read_dataset_csv(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && has_header) continue;
    if (line.empty()) continue;
    auto values = split_numeric(line, path, line_no);
    if (values.empty()) parse_fail(path, line_no, "empty row");
    if (!rows.empty() && values.size() != rows.front().size()) {
      parse_fail(path, line_no, "inconsistent column count");
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ParseError(path + ": no data rows");
  Dataset dataset;
  dataset.points.resize(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < rows[i].size(); ++j) {
      dataset.points(i, j) = rows[i][j];
    }
  }
  dataset.validate();
  return dataset;
}

void write_dataset_csv(const std::string& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot write");
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < dataset.n(); ++i) {
    for (Eigen::Index j = 0; j < dataset.dim(); ++j) {
      if (j) out << ',';
      out << dataset.points(i, j);
    }
    out << '\n';
  }
}

void write_labels_csv(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot write");
  for (int l : labels) out << l << '\n';
}

MixtureModel read_model_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!j.contains("means") || !j.contains("sigmas") || !j.contains("weights")) {
    throw ParseError(path + ": model config needs means, sigmas, weights");
  }
  MixtureModel model;
  const auto& means = j.at("means");
  if (!means.is_array() || means.empty() || !means[0].is_array()) {
    throw ParseError(path + ": means must be an array of vectors");
  }
  const size_t K = means.size();
  const size_t d = means[0].size();
  model.means.resize(K, d);
  for (size_t m = 0; m < K; ++m) {
    if (means[m].size() != d) throw ParseError(path + ": ragged means");
    for (size_t c = 0; c < d; ++c) model.means(m, c) = means[m][c].get<double>();
  }
  const auto& sigmas = j.at("sigmas");
  const auto& weights = j.at("weights");
  if (sigmas.size() != K || weights.size() != K) {
    throw ParseError(path + ": sigmas/weights length must match means");
  }
  model.sigmas.resize(K);
  model.weights.resize(K);
  for (size_t m = 0; m < K; ++m) {
    model.sigmas[m] = sigmas[m].get<double>();
    model.weights[m] = weights[m].get<double>();
  }
  model.validate();
  return model;
}

std::vector<double> parse_lambda_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.size() != 4) {
    throw std::invalid_argument("lambda grid spec must be start:stop:count:geometric|linear");
  }
  double start, stop;
  int count;
  try {
    start = std::stod(parts[0]);
    stop = std::stod(parts[1]);
    count = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw std::invalid_argument("lambda grid spec: bad numeric field in '" + spec + "'");
  }
  const std::string& kind = parts[3];
  if (count < 1 || start < 0 || stop <= start) {
    throw std::invalid_argument("lambda grid spec: need 0 <= start < stop and count >= 1");
  }
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = start;
  } else if (kind == "linear") {
    for (int i = 0; i < count; ++i) {
      grid[i] = start + (stop - start) * i / (count - 1);
    }
  } else if (kind == "geometric") {
    if (start <= 0) throw std::invalid_argument("geometric grid needs start > 0");
    const double ratio = std::pow(stop / start, 1.0 / (count - 1));
    for (int i = 0; i < count; ++i) {
      grid[i] = start * std::pow(ratio, i);
    }
    grid.back() = stop;
  } else {
    throw std::invalid_argument("lambda grid spec: kind must be geometric or linear");
  }
  return grid;
}

json partition_to_json(const Partition& partition) {
  return json(partition.clusters());
}

json solution_to_json(const SonSolution& solution) {
  std::vector<std::vector<double>> x(solution.x.rows());
  for (Eigen::Index i = 0; i < solution.x.rows(); ++i) {
    x[i].assign(solution.x.row(i).begin(), solution.x.row(i).end());
  }
  return json{{"schema_version", kSchemaVersion},
              {"lambda", solution.lambda},
              {"x", x},
              {"partition", partition_to_json(solution.partition)},
              {"iterations", solution.iterations},
              {"primal_residual", solution.primal_residual},
              {"dual_residual", solution.dual_residual},
              {"objective", solution.objective_value},
              {"converged", solution.converged}};
}

json certificate_to_json(const CertificateResult& result) {
  return json{{"schema_version", kSchemaVersion},
              {"cluster", result.multipliers.cluster},
              {"status", to_string(result.status)},
              {"lambda", result.multipliers.lambda},
              {"max_norm", result.multipliers.max_norm},
              {"equality_residual", result.multipliers.equality_residual},
              {"iterations_used", result.iterations_used},
              {"feasible", result.feasible()}};
}

json path_to_json(const ClusterPath& path) {
  json partitions = json::array();
  for (const auto& p : path.partitions) partitions.push_back(partition_to_json(p));
  json events = json::array();
  for (const auto& ev : path.merge_events) {
    events.push_back({{"lambda_index", ev.lambda_index},
                      {"merge_lambda", ev.merge_lambda},
                      {"children", ev.children},
                      {"parent", ev.parent}});
  }
  json meta = json::array();
  for (const auto& m : path.meta) {
    meta.push_back({{"primal_residual", m.primal_residual},
                    {"dual_residual", m.dual_residual},
                    {"iterations", m.iterations},
                    {"converged", m.converged}});
  }
  return json{{"schema_version", kSchemaVersion},
              {"lambdas", path.lambdas},
              {"partitions", partitions},
              {"merge_events", events},
              {"solutions_meta", meta}};
}

json merge_tree_to_json(const std::vector<MergeNode>& nodes) {
  json out = json::array();
  for (const auto& node : nodes) {
    out.push_back({{"lambda", node.lambda}, {"children", node.children}, {"parent", node.parent}});
  }
  return json{{"schema_version", kSchemaVersion}, {"nodes", out}};
}

json report_to_json(const RecoveryReport& report) {
  return json{{"trial_seed", report.trial_seed},
              {"v_sizes", report.v_sizes},
              {"coherent", report.coherent},
              {"distinct", report.distinct},
              {"lambda_used", report.lambda_used},
              {"lambda_lb", report.lambda_lb},
              {"lambda_ub", report.lambda_ub},
              {"feasible_window", report.feasible_window},
              {"recovered", report.recovered}};
}

}  // namespace sonclust::io
