#pragma once

#include "ampcg/estimation.hpp"
#include "ampcg/graph.hpp"
#include "ampcg/search.hpp"
#include "ampcg/sem.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace ampcg::io {

using nlohmann::json;

/// {"p": int, "labels": [...], "directed": [[j,k],...], "undirected": [[j,k],...]}
/// Unknown keys are rejected; so is any graph with a semidirected cycle.
json graph_to_json(const ChainGraph& g);
ChainGraph graph_from_json(const json& j);

ChainGraph read_graph(const std::filesystem::path& path);
void write_graph(const ChainGraph& g, const std::filesystem::path& path);

/// {"beta": [[...]], "sigma": [[...]], "graph": <graph>}
json parameters_to_json(const SemParameters& params);
SemParameters parameters_from_json(const json& j);

/// {"labels": [...], "cov": [[...]]}; "labels" is optional on input.
json covariance_to_json(const Eigen::MatrixXd& cov, const std::vector<std::string>& labels);
Eigen::MatrixXd covariance_from_json(const json& j, std::vector<std::string>* labels = nullptr);

/// Header row of labels, one sample per row.
Dataset read_dataset(const std::filesystem::path& path);
void write_dataset(const Dataset& data, const std::filesystem::path& path);

json fit_to_json(const FitResult& fit);
json identify_to_json(const IdentifyResult& result);

json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& j, const char* what);

json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace ampcg::io
