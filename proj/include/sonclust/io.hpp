#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "sonclust/certificate.hpp"
#include "sonclust/clusterpath.hpp"
#include "sonclust/core.hpp"
#include "sonclust/mixture.hpp"

namespace sonclust::io {

using json = nlohmann::json;

constexpr int kSchemaVersion = 1;

/// Malformed input file; message carries the 1-based line number.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dataset CSV: one row per point, d numeric columns, no header unless
// has_header is set.
Dataset read_dataset_csv(const std::string& path, bool has_header = false);
void write_dataset_csv(const std::string& path, const Dataset& dataset);

void write_labels_csv(const std::string& path, const std::vector<int>& labels);

// Model config JSON: {"means": [[...],...], "sigmas": [...], "weights": [...]}.
MixtureModel read_model_json(const std::string& path);

// "start:stop:count:geometric|linear" -> strictly increasing grid.
std::vector<double> parse_lambda_grid(const std::string& spec);

json partition_to_json(const Partition& partition);
json solution_to_json(const SonSolution& solution);
json certificate_to_json(const CertificateResult& result);
json path_to_json(const ClusterPath& path);
json merge_tree_to_json(const std::vector<MergeNode>& nodes);
json report_to_json(const RecoveryReport& report);

}  // namespace sonclust::io
