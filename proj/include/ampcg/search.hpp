#pragma once

#include "ampcg/estimation.hpp"
#include "ampcg/execution.hpp"
#include "ampcg/graph.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace ampcg {

enum class Operator { AddDirected, DeleteDirected, ReverseDirected, AddUndirected, DeleteUndirected, DirectedToUndirected, UndirectedToDirected };

const std::set<Operator>& all_operators();

struct SearchConfig {
    /// Random starts on top of the empty-graph start.
    std::size_t restarts = 5;
    std::size_t max_steps = 500;
    std::set<Operator> operators = all_operators();
    std::uint64_t seed = 0;
    FitConfig fit = equal_variance_config();
    /// Effective sample size for the score; 0 means "use obs.n, or 1e4 for population input".
    double n_eff = 0.0;
    std::size_t class_node_cap = kDefaultClassNodeCap;
};

/// How identify_in_class ranks class members.
enum class Criterion {
    Dispersion,  // smallest spread of unconstrained error variances (population input)
    Score,       // largest equal-variance penalized score (finite samples)
};

struct MemberFit {
    ChainGraph graph;
    double dispersion = 0.0;
    double score = 0.0;
    bool converged = false;
};

struct IdentifyResult {
    ChainGraph chosen;
    std::size_t class_size = 0;
    Criterion criterion = Criterion::Dispersion;
    std::vector<MemberFit> members;  // in class (encoding) order
    /// Gap between the best and the runner-up; +inf for singleton classes.
    double margin = std::numeric_limits<double>::infinity();
};

/// Fits every member of the equivalence class of `class_rep` and picks the
/// one whose errors are closest to equal variance. Ties go to fewer directed
/// edges, then to the smaller encoding.
IdentifyResult identify_in_class(const ChainGraph& class_rep, const Observations& obs, const SearchConfig& cfg = {},
                                 Execution exec = Execution::Parallel);

double effective_sample_size(const Observations& obs, const SearchConfig& cfg);

struct GreedyTrace {
    std::vector<double> scores;  // score after each accepted move, starting with the initial graph
};

/// Hill climbing over chain graphs guided by the penalized score. The first
/// climb starts from the empty graph, then `restarts` more from random chain
/// graphs; the best local optimum wins.
ChainGraph greedy_search(const Observations& obs, const SearchConfig& cfg = {}, std::vector<GreedyTrace>* traces = nullptr,
                         Execution exec = Execution::Parallel);

/// Every single-edge modification of g allowed by `ops` that is still a chain graph.
std::vector<ChainGraph> neighbourhood(const ChainGraph& g, const std::set<Operator>& ops);

struct SkeletonResult {
    ChainGraph representative;
    /// Separating set found for each non-adjacent pair (j < k).
    std::map<std::pair<Node, Node>, NodeSet> sepsets;
    /// False when the CI answers admit no chain graph; the representative is then best effort.
    bool consistent = true;
};

/// Adjacency search by vanishing partial correlations over all conditioning
/// sets, triplexes read off the separating sets, and a chain graph built
/// from that skeleton and triplex set. Population input uses |pcorr| < tol;
/// finite samples use a Fisher z test at level tol.
SkeletonResult skeleton_recovery(const Observations& obs, double tol = 1e-8);

/// Some chain graph with exactly this skeleton and triplex set, if one exists.
std::optional<ChainGraph> chain_graph_from_pattern(const ChainGraph& skeleton, const std::vector<Triplex>& triplex_set);

/// skeleton_recovery followed by identify_in_class.
IdentifyResult two_phase(const Observations& obs, const SearchConfig& cfg = {}, double tol = 1e-8);

}  // namespace ampcg
