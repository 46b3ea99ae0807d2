#pragma once

#include "ampcg/execution.hpp"
#include "ampcg/search.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ampcg {

enum class Method { Identify, Greedy, TwoPhase };

Method parse_method(const std::string& name);
std::string method_name(Method m);

struct ExperimentConfig {
    std::size_t p = 5;
    std::vector<std::uint64_t> seeds;
    double edge_prob = 0.4;
    double undirected_frac = 0.3;
    double sigma2 = 1.0;
    /// Sample sizes; empty runs the population covariance only.
    std::vector<std::size_t> n_list;
    Method method = Method::Identify;
    /// Reports go here when set.
    std::optional<std::filesystem::path> output_dir;
    SearchConfig search;
};

/// Strict parse of {"p", "seeds", "edge_prob", "undirected_frac", "sigma2", "n_list", "method", "output_dir"}.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

struct ExperimentRow {
    std::uint64_t seed = 0;
    std::size_t n = 0;  // 0 = population
    std::string true_hash;
    std::string recovered_hash;
    bool exact_match = false;
    std::size_t shd = 0;
    double margin = 0.0;
    double runtime_ms = 0.0;
    std::string error;  // stage failure, empty on success
};

struct ExperimentReport {
    std::vector<ExperimentRow> rows;  // seed-major, then n in config order

    /// Fraction of exact matches among rows with the given n.
    double recovery_rate(std::size_t n) const;
    std::string to_csv(bool include_runtime = true) const;
    nlohmann::json to_json(const ExperimentConfig& cfg, bool include_runtime = true) const;
};

/// For each seed: random chain graph, faithful random parameters rescaled to
/// equal error variances, population covariance and/or samples, then the
/// configured method. Seeds run as independent OpenMP tasks in parallel mode.
ExperimentReport run_experiment(const ExperimentConfig& cfg, Execution exec = Execution::Parallel);

/// Truth for one seed, shared by the experiment and its tests.
struct Problem {
    ChainGraph graph;
    SemParameters params;  // already rescaled
    Eigen::MatrixXd cov;
};

Problem make_problem(const ExperimentConfig& cfg, std::uint64_t seed);

}  // namespace ampcg
