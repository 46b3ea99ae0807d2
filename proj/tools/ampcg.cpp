// Command-line front end: generate, sep, fit, identify, learn, experiment, magnify.

#include "ampcg/errors.hpp"
#include "ampcg/experiment.hpp"
#include "ampcg/io.hpp"
#include "ampcg/separation.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

using namespace ampcg;
namespace fs = std::filesystem;

namespace {

enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kInput = 3,
    kStructure = 4,
    kCapacity = 5,
    kNumeric = 6,
    kRank = 7,
    kIo = 8,
    kInternal = 70,
};

int exit_code_for(const std::string& code) {
    if (code == "input") return kInput;
    if (code == "structure") return kStructure;
    if (code == "capacity") return kCapacity;
    if (code == "numeric") return kNumeric;
    if (code == "rank") return kRank;
    if (code == "io") return kIo;
    return kInternal;
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) std::cout << text;
    else io::write_text(out, text);
}

// A label, or failing that a 0-based index.
Node resolve(const ChainGraph& g, const std::string& name) {
    if (auto v = g.find(name)) return *v;
    if (!name.empty() && name.find_first_not_of("0123456789") == std::string::npos) {
        const Node v = std::stoul(name);
        if (v < g.size()) return v;
    }
    throw InputError("no node named '" + name + "'");
}

NodeSet resolve_all(const ChainGraph& g, const std::vector<std::string>& names) {
    NodeSet out;
    for (const auto& raw : names) {
        std::stringstream ss(raw);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) out.push_back(resolve(g, item));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct Input {
    std::string data;
    std::string population;
};

void add_input_options(CLI::App* cmd, Input& in) {
    auto* d = cmd->add_option("--data", in.data, "CSV dataset with a header of labels")->check(CLI::ExistingFile);
    auto* p = cmd->add_option("--population", in.population, "JSON covariance {\"labels\"?, \"cov\"}")->check(CLI::ExistingFile);
    d->excludes(p);
}

Observations load_observations(const Input& in, std::vector<std::string>* labels) {
    if (!in.data.empty()) {
        Dataset data = io::read_dataset(in.data);
        if (labels) *labels = data.labels;
        return Observations::from_dataset(data);
    }
    if (!in.population.empty()) return Observations::from_population(io::covariance_from_json(io::read_json(in.population), labels));
    throw InputError("one of --data or --population is required");
}

// Graph nodes bind to data columns by label.
void check_labels(const ChainGraph& g, const std::vector<std::string>& labels) {
    if (g.size() != labels.size())
        throw InputError("graph has " + std::to_string(g.size()) + " nodes but the data has " + std::to_string(labels.size()) + " columns");
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (g.labels()[i] != labels[i])
            throw InputError("graph node " + std::to_string(i) + " is '" + g.labels()[i] + "' but data column is '" + labels[i] + "'");
}

std::string join(const NodeSet& s, const ChainGraph& g) {
    std::string out;
    for (Node v : s) out += (out.empty() ? "" : " ") + g.labels()[v];
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AMP chain graphs: separation, Gaussian SEMs, fitting and structure identification"};
    app.require_subcommand(1);
    std::uint64_t seed = 0;
    bool serial = false;

    // generate
    auto* gen = app.add_subcommand("generate", "random chain graph, equal-variance parameters, covariance and optional samples");
    std::size_t gen_p = 5, gen_n = 0;
    double gen_edge = 0.4, gen_undirected = 0.3, gen_sigma2 = 1.0;
    std::string gen_out = ".";
    gen->add_option("--p", gen_p, "number of nodes")->check(CLI::PositiveNumber);
    gen->add_option("--edge-prob", gen_edge)->check(CLI::Range(0.0, 1.0));
    gen->add_option("--undirected-frac", gen_undirected)->check(CLI::Range(0.0, 1.0));
    gen->add_option("--sigma2", gen_sigma2, "common error variance")->check(CLI::PositiveNumber);
    gen->add_option("--n", gen_n, "samples to draw (0 = none)");
    gen->add_option("--out-dir", gen_out);
    gen->add_option("--seed", seed);

    // sep
    auto* sep = app.add_subcommand("sep", "decide A _||_ B | C, or list all singleton separations");
    std::string sep_graph;
    std::vector<std::string> sep_a, sep_b, sep_c;
    bool sep_enumerate = false;
    std::size_t sep_cap = kDefaultSeparationNodeCap;
    sep->add_option("--graph", sep_graph)->required()->check(CLI::ExistingFile);
    sep->add_option("--a", sep_a, "labels, comma separated");
    sep->add_option("--b", sep_b);
    sep->add_option("--c", sep_c);
    sep->add_flag("--enumerate", sep_enumerate, "CSV j,k,C,separated over all pairs and conditioning sets");
    sep->add_option("--max-nodes", sep_cap, "node cap for --enumerate");
    sep->add_option("--seed", seed);

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "maximum-likelihood SEM fit for a graph");
    std::string fit_graph, fit_out;
    Input fit_in;
    bool fit_equal = false;
    fit_cmd->add_option("--graph", fit_graph)->required()->check(CLI::ExistingFile);
    add_input_options(fit_cmd, fit_in);
    fit_cmd->add_flag("--equal-var", fit_equal, "constrain error variances to be equal");
    fit_cmd->add_option("--out", fit_out);
    fit_cmd->add_option("--seed", seed);

    // identify
    auto* id = app.add_subcommand("identify", "pick the equal-variance member of an equivalence class");
    std::string id_rep, id_out;
    Input id_in;
    id->add_option("--class-rep", id_rep)->required()->check(CLI::ExistingFile);
    add_input_options(id, id_in);
    id->add_option("--out", id_out);
    id->add_option("--seed", seed);
    id->add_flag("--serial", serial, "disable OpenMP");

    // learn
    auto* learn = app.add_subcommand("learn", "structure learning");
    std::string learn_method = "greedy", learn_out;
    Input learn_in;
    std::size_t learn_restarts = 5;
    double learn_alpha = -1.0;
    add_input_options(learn, learn_in);
    learn->add_option("--method", learn_method)->check(CLI::IsMember({"greedy", "two-phase"}));
    learn->add_option("--restarts", learn_restarts, "random restarts for greedy");
    learn->add_option("--alpha", learn_alpha, "CI threshold for two-phase (default 1e-8 population, 0.01 data)");
    learn->add_option("--out", learn_out);
    learn->add_option("--seed", seed);
    learn->add_flag("--serial", serial);

    // experiment
    auto* exp = app.add_subcommand("experiment", "recovery experiment over seeds");
    std::string exp_config, exp_out, exp_method = "identify";
    std::size_t exp_p = 5, exp_seed_count = 10;
    std::vector<std::size_t> exp_n;
    double exp_edge = 0.4, exp_undirected = 0.3, exp_sigma2 = 1.0;
    exp->add_option("--config", exp_config, "JSON config; flags are ignored when given")->check(CLI::ExistingFile);
    exp->add_option("--p", exp_p)->check(CLI::PositiveNumber);
    exp->add_option("--seeds", exp_seed_count, "run seeds seed .. seed+count-1");
    exp->add_option("--n", exp_n, "sample sizes (omit for population only)");
    exp->add_option("--edge-prob", exp_edge);
    exp->add_option("--undirected-frac", exp_undirected);
    exp->add_option("--sigma2", exp_sigma2);
    exp->add_option("--method", exp_method)->check(CLI::IsMember({"identify", "greedy", "two-phase"}));
    exp->add_option("--out-dir", exp_out);
    exp->add_option("--seed", seed, "first seed");
    exp->add_flag("--serial", serial);

    // magnify
    auto* mag = app.add_subcommand("magnify", "print the magnified graph with explicit error nodes");
    std::string mag_graph;
    mag->add_option("--graph", mag_graph)->required()->check(CLI::ExistingFile);
    mag->add_option("--seed", seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        return kUsage;
    }

    const Execution exec = serial ? Execution::Serial : Execution::Parallel;
    try {
        if (*gen) {
            ExperimentConfig cfg;
            cfg.p = gen_p;
            cfg.edge_prob = gen_edge;
            cfg.undirected_frac = gen_undirected;
            cfg.sigma2 = gen_sigma2;
            const Problem problem = make_problem(cfg, seed);
            const fs::path dir = gen_out;
            io::write_graph(problem.graph, dir / "graph.json");
            io::write_text(dir / "params.json", io::parameters_to_json(problem.params).dump(2) + "\n");
            io::write_text(dir / "population.json", io::covariance_to_json(problem.cov, problem.graph.labels()).dump(2) + "\n");
            if (gen_n > 0)
                io::write_dataset(sample({Eigen::VectorXd::Zero(problem.cov.rows()), problem.cov}, gen_n, seed,
                                         problem.graph.labels()),
                                  dir / "data.csv");
            std::cout << "graph: " << describe(problem.graph) << "\n";
        } else if (*sep) {
            const ChainGraph g = io::read_graph(sep_graph);
            if (sep_enumerate) {
                const auto seps = all_separations(g, sep_cap, exec);
                std::cout << "j,k,C,separated\n";
                for (Node j = 0; j < g.size(); ++j)
                    for (Node k = j + 1; k < g.size(); ++k) {
                        std::uint64_t rest = 0;
                        for (Node v = 0; v < g.size(); ++v)
                            if (v != j && v != k) rest |= std::uint64_t{1} << v;
                        // Every subset of `rest`, in increasing mask order.
                        for (std::uint64_t c = 0;; c = (c - rest) & rest) {
                            const bool s = std::binary_search(seps.begin(), seps.end(), PairSeparation{j, k, c});
                            std::cout << g.labels()[j] << ',' << g.labels()[k] << ',' << join(mask_to_set(c), g) << ','
                                      << (s ? "true" : "false") << '\n';
                            if (c == rest) break;
                        }
                    }
            } else {
                const SeparationQuery q{resolve_all(g, sep_a), resolve_all(g, sep_b), resolve_all(g, sep_c)};
                const bool s = separated(g, q);
                std::cout << "separated: " << (s ? "true" : "false") << "\n";
            }
        } else if (*fit_cmd) {
            std::vector<std::string> labels;
            const Observations obs = load_observations(fit_in, &labels);
            const ChainGraph g = io::read_graph(fit_graph);
            check_labels(g, labels);
            const FitResult result = fit(obs, g, fit_equal ? equal_variance_config() : FitConfig{});
            emit(io::fit_to_json(result).dump(2) + "\n", fit_out);
        } else if (*id) {
            std::vector<std::string> labels;
            const Observations obs = load_observations(id_in, &labels);
            const ChainGraph rep = io::read_graph(id_rep);
            check_labels(rep, labels);
            SearchConfig cfg;
            cfg.seed = seed;
            emit(io::identify_to_json(identify_in_class(rep, obs, cfg, exec)).dump(2) + "\n", id_out);
        } else if (*learn) {
            std::vector<std::string> labels;
            const Observations obs = load_observations(learn_in, &labels);
            SearchConfig cfg;
            cfg.seed = seed;
            cfg.restarts = learn_restarts;
            ChainGraph result;
            if (learn_method == "greedy") {
                result = greedy_search(obs, cfg, nullptr, exec);
            } else {
                const double alpha = learn_alpha >= 0.0 ? learn_alpha : (obs.population() ? kPopulationCiTolerance : 0.01);
                result = two_phase(obs, cfg, alpha).chosen;
            }
            result.set_labels(labels);
            emit(io::graph_to_json(result).dump(2) + "\n", learn_out);
        } else if (*exp) {
            ExperimentConfig cfg;
            if (!exp_config.empty()) {
                cfg = experiment_config_from_json(io::read_json(exp_config));
            } else {
                cfg.p = exp_p;
                for (std::size_t i = 0; i < exp_seed_count; ++i) cfg.seeds.push_back(seed + i);
                cfg.n_list = exp_n;
                cfg.edge_prob = exp_edge;
                cfg.undirected_frac = exp_undirected;
                cfg.sigma2 = exp_sigma2;
                cfg.method = parse_method(exp_method);
            }
            if (!exp_out.empty()) cfg.output_dir = fs::path(exp_out);
            const ExperimentReport report = run_experiment(cfg, exec);
            if (!cfg.output_dir) std::cout << report.to_csv();
            const std::vector<std::size_t> sizes = cfg.n_list.empty() ? std::vector<std::size_t>{0} : cfg.n_list;
            for (std::size_t n : sizes)
                std::cerr << "recovery_rate[" << (n == 0 ? std::string("population") : std::to_string(n))
                          << "] = " << report.recovery_rate(n) << "\n";
        } else if (*mag) {
            const MagnifiedGraph mg = magnify(io::read_graph(mag_graph));
            std::cout << io::graph_to_json(mg.graph).dump(2) << "\n";
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return kInternal;
    }
    return kOk;
}
