#include "ampcg/experiment.hpp"

#include "ampcg/errors.hpp"
#include "ampcg/io.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace ampcg {

Method parse_method(const std::string& name) {
    if (name == "identify") return Method::Identify;
    if (name == "greedy") return Method::Greedy;
    if (name == "two-phase") return Method::TwoPhase;
    throw InputError("unknown method '" + name + "' (expected identify, greedy or two-phase)");
}

std::string method_name(Method m) {
    switch (m) {
        case Method::Identify: return "identify";
        case Method::Greedy: return "greedy";
        case Method::TwoPhase: return "two-phase";
    }
    return "?";
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("experiment config must be a JSON object");
    ExperimentConfig cfg;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "p") cfg.p = value.get<std::size_t>();
            else if (key == "seeds") cfg.seeds = value.get<std::vector<std::uint64_t>>();
            else if (key == "edge_prob") cfg.edge_prob = value.get<double>();
            else if (key == "undirected_frac") cfg.undirected_frac = value.get<double>();
            else if (key == "sigma2") cfg.sigma2 = value.get<double>();
            else if (key == "n_list") cfg.n_list = value.get<std::vector<std::size_t>>();
            else if (key == "method") cfg.method = parse_method(value.get<std::string>());
            else if (key == "output_dir") cfg.output_dir = value.get<std::string>();
            else throw InputError("unknown field '" + key + "' in experiment config");
        } catch (const nlohmann::json::exception& e) {
            throw InputError("bad value for '" + key + "': " + e.what());
        }
    }
    return cfg;
}

Problem make_problem(const ExperimentConfig& cfg, std::uint64_t seed) {
    Problem problem;
    problem.graph = random_chain_graph(cfg.p, cfg.edge_prob, cfg.undirected_frac, seed);
    SemParameters raw = random_faithful_parameters(problem.graph, {}, seed);
    problem.params = rescale_equal_variances(raw, cfg.sigma2);
    problem.cov = implied_distribution(problem.params).cov;
    return problem;
}

namespace {

ExperimentRow run_one(const ExperimentConfig& cfg, const Problem& problem, std::uint64_t seed, std::size_t n) {
    const auto start = std::chrono::steady_clock::now();
    ExperimentRow row;
    row.seed = seed;
    row.n = n;
    row.true_hash = graph_hash(problem.graph);
    try {
        Observations obs = n == 0 ? Observations::from_population(problem.cov)
                                  : Observations::from_dataset(sample({Eigen::VectorXd::Zero(problem.cov.rows()), problem.cov},
                                                                      n, seed * 1000003ull + n));
        SearchConfig search = cfg.search;
        search.seed = seed;
        ChainGraph recovered;
        switch (cfg.method) {
            case Method::Identify: {
                IdentifyResult r = identify_in_class(problem.graph, obs, search, Execution::Serial);
                recovered = r.chosen;
                row.margin = r.margin;
                break;
            }
            case Method::TwoPhase: {
                SkeletonResult phase1 = skeleton_recovery(obs, obs.population() ? kPopulationCiTolerance : 0.01);
                IdentifyResult r = identify_in_class(phase1.representative, obs, search, Execution::Serial);
                recovered = r.chosen;
                row.margin = r.margin;
                break;
            }
            case Method::Greedy:
                recovered = greedy_search(obs, search, nullptr, Execution::Serial);
                row.margin = std::nan("");
                break;
        }
        row.recovered_hash = graph_hash(recovered);
        row.exact_match = recovered == problem.graph;
        row.shd = structural_hamming_distance(recovered, problem.graph);
    } catch (const Error& e) {
        row.error = e.code() + ": " + e.what();
    }
    row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return row;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream out;
    out.precision(12);
    out << v;
    return out.str();
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, Execution exec) {
    if (cfg.seeds.empty()) throw InputError("experiment needs at least one seed");
    if (!(cfg.sigma2 > 0.0)) throw InputError("sigma2 must be positive");
    if (cfg.p == 0) throw InputError("experiment needs p >= 1");

    const std::vector<std::size_t> sizes = cfg.n_list.empty() ? std::vector<std::size_t>{0} : cfg.n_list;
    std::vector<std::vector<ExperimentRow>> per_seed(cfg.seeds.size());
    auto run_seed = [&](std::size_t i) {
        const std::uint64_t seed = cfg.seeds[i];
        std::optional<Problem> problem;
        std::string failure;
        try {
            problem = make_problem(cfg, seed);
        } catch (const Error& e) {
            failure = e.code() + ": " + e.what();
        }
        for (std::size_t n : sizes) {
            if (problem) {
                per_seed[i].push_back(run_one(cfg, *problem, seed, n));
            } else {
                ExperimentRow row;
                row.seed = seed;
                row.n = n;
                row.error = failure;
                per_seed[i].push_back(row);
            }
        }
    };

    const auto count = static_cast<long>(cfg.seeds.size());
    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < count; ++i) run_seed(static_cast<std::size_t>(i));
    } else {
        for (long i = 0; i < count; ++i) run_seed(static_cast<std::size_t>(i));
    }

    ExperimentReport report;
    for (auto& rows : per_seed) report.rows.insert(report.rows.end(), rows.begin(), rows.end());

    if (cfg.output_dir) {
        io::write_text(*cfg.output_dir / "report.csv", report.to_csv());
        io::write_text(*cfg.output_dir / "report.json", report.to_json(cfg).dump(2) + "\n");
    }
    return report;
}

double ExperimentReport::recovery_rate(std::size_t n) const {
    std::size_t total = 0, hits = 0;
    for (const auto& row : rows) {
        if (row.n != n) continue;
        ++total;
        hits += row.exact_match ? 1 : 0;
    }
    return total == 0 ? std::nan("") : static_cast<double>(hits) / static_cast<double>(total);
}

std::string ExperimentReport::to_csv(bool include_runtime) const {
    std::ostringstream out;
    out << "seed,n,true_hash,recovered_hash,exact_match,shd,margin" << (include_runtime ? ",runtime_ms" : "") << ",error\n";
    for (const auto& r : rows) {
        out << r.seed << ',' << (r.n == 0 ? std::string("population") : std::to_string(r.n)) << ',' << r.true_hash << ','
            << r.recovered_hash << ',' << (r.exact_match ? "true" : "false") << ',' << r.shd << ',' << format_double(r.margin);
        if (include_runtime) out << ',' << format_double(r.runtime_ms);
        out << ',' << r.error << '\n';
    }
    return out.str();
}

nlohmann::json ExperimentReport::to_json(const ExperimentConfig& cfg, bool include_runtime) const {
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row = {{"seed", r.seed},
                              {"n", r.n},
                              {"true_hash", r.true_hash},
                              {"recovered_hash", r.recovered_hash},
                              {"exact_match", r.exact_match},
                              {"shd", r.shd},
                              {"margin", format_double(r.margin)},
                              {"error", r.error}};
        if (include_runtime) row["runtime_ms"] = r.runtime_ms;
        rows_json.push_back(std::move(row));
    }
    nlohmann::json rates = nlohmann::json::object();
    const std::vector<std::size_t> sizes = cfg.n_list.empty() ? std::vector<std::size_t>{0} : cfg.n_list;
    for (std::size_t n : sizes) rates[n == 0 ? "population" : std::to_string(n)] = recovery_rate(n);
    return {{"p", cfg.p},
            {"method", method_name(cfg.method)},
            {"edge_prob", cfg.edge_prob},
            {"undirected_frac", cfg.undirected_frac},
            {"sigma2", cfg.sigma2},
            {"rows", rows_json},
            {"recovery_rate", rates}};
}

}  // namespace ampcg
