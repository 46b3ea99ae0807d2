#include "ampcg/search.hpp"

#include "ampcg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

namespace ampcg {

const std::set<Operator>& all_operators() {
    static const std::set<Operator> ops{Operator::AddDirected,      Operator::DeleteDirected,
                                        Operator::ReverseDirected,  Operator::AddUndirected,
                                        Operator::DeleteUndirected, Operator::DirectedToUndirected,
                                        Operator::UndirectedToDirected};
    return ops;
}

double effective_sample_size(const Observations& obs, const SearchConfig& cfg) {
    if (cfg.n_eff > 0.0) return cfg.n_eff;
    return obs.population() ? 1e4 : static_cast<double>(obs.n);
}

namespace {

// Orders by the ranking value, then fewer directed edges, then encoding.
bool ranks_before(double a_value, const ChainGraph& a, double b_value, const ChainGraph& b) {
    if (a_value != b_value) return a_value < b_value;
    if (a.num_directed() != b.num_directed()) return a.num_directed() < b.num_directed();
    return a.encoding() < b.encoding();
}

template <typename Body>
void for_each_index(std::size_t n, Execution exec, Body&& body) {
    const auto count = static_cast<long>(n);
    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
    } else {
        for (long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
    }
}

double score_or_floor(const Observations& obs, const ChainGraph& g, const FitConfig& fit_cfg, double n_eff) {
    try {
        return penalized_score(obs, g, fit_cfg, n_eff);
    } catch (const NumericError&) {
        return -std::numeric_limits<double>::infinity();
    }
}

}  // namespace

IdentifyResult identify_in_class(const ChainGraph& class_rep, const Observations& obs, const SearchConfig& cfg,
                                 Execution exec) {
    const auto members = equivalence_class(class_rep, cfg.class_node_cap);
    const double n_eff = effective_sample_size(obs, cfg);
    const FitConfig unconstrained = [&] {
        FitConfig c = cfg.fit;
        c.equal_variance_penalty = 0.0;
        return c;
    }();
    const FitConfig constrained = equal_variance_config(cfg.fit);

    IdentifyResult result;
    result.class_size = members.size();
    result.criterion = obs.population() ? Criterion::Dispersion : Criterion::Score;
    result.members.resize(members.size());
    for_each_index(members.size(), exec, [&](std::size_t i) {
        MemberFit& row = result.members[i];
        row.graph = members[i];
        FitResult free_fit = fit(obs, members[i], unconstrained);
        row.dispersion = free_fit.dispersion;
        row.converged = free_fit.converged;
        if (result.criterion == Criterion::Score) {
            FitResult equal_fit = fit(obs, members[i], constrained);
            row.score = penalized_score(equal_fit, constrained, n_eff);
            row.converged = row.converged && equal_fit.converged;
        } else {
            row.score = penalized_score(free_fit, unconstrained, n_eff);
        }
    });

    // Lower is better for both keys once the score is negated.
    auto key = [&](const MemberFit& m) { return result.criterion == Criterion::Dispersion ? m.dispersion : -m.score; };
    std::vector<std::size_t> order(members.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ranks_before(key(result.members[a]), result.members[a].graph, key(result.members[b]),
                            result.members[b].graph);
    });
    result.chosen = result.members[order.front()].graph;
    if (order.size() > 1) result.margin = key(result.members[order[1]]) - key(result.members[order[0]]);
    return result;
}

std::vector<ChainGraph> neighbourhood(const ChainGraph& g, const std::set<Operator>& ops) {
    std::vector<ChainGraph> out;
    auto keep = [&out](ChainGraph h) {
        if (is_chain_graph(h)) out.push_back(std::move(h));
    };
    auto allowed = [&ops](Operator op) { return ops.count(op) > 0; };
    for (Node j = 0; j < g.size(); ++j) {
        for (Node k = j + 1; k < g.size(); ++k) {
            ChainGraph h = g;
            switch (g.mark(j, k)) {
                case Mark::None:
                    if (allowed(Operator::AddDirected)) {
                        h.add_directed(j, k), keep(h);
                        h = g, h.add_directed(k, j), keep(h);
                    }
                    if (allowed(Operator::AddUndirected)) h = g, h.add_undirected(j, k), keep(h);
                    break;
                case Mark::Out:
                case Mark::In: {
                    const bool forward = g.mark(j, k) == Mark::Out;
                    const Node from = forward ? j : k, to = forward ? k : j;
                    h.remove_edge(j, k);
                    if (allowed(Operator::DeleteDirected)) keep(h);
                    if (allowed(Operator::ReverseDirected)) {
                        ChainGraph r = h;
                        r.add_directed(to, from), keep(r);
                    }
                    if (allowed(Operator::DirectedToUndirected)) {
                        ChainGraph u = h;
                        u.add_undirected(j, k), keep(u);
                    }
                    break;
                }
                case Mark::Undirected:
                    h.remove_edge(j, k);
                    if (allowed(Operator::DeleteUndirected)) keep(h);
                    if (allowed(Operator::UndirectedToDirected)) {
                        ChainGraph a = h, b = h;
                        a.add_directed(j, k), keep(a);
                        b.add_directed(k, j), keep(b);
                    }
                    break;
            }
        }
    }
    return out;
}

namespace {

// Density and undirected share vary per restart so that dense, mostly
// undirected optima are reachable too.
ChainGraph restart_graph(std::size_t p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> density(0.2, 0.9), share(0.0, 1.0);
    const double edge_prob = density(rng);
    return random_chain_graph(p, edge_prob, share(rng), rng());
}

}  // namespace

ChainGraph greedy_search(const Observations& obs, const SearchConfig& cfg, std::vector<GreedyTrace>* traces,
                         Execution exec) {
    if (cfg.operators.empty()) throw InputError("greedy search needs at least one operator");
    const std::size_t p = static_cast<std::size_t>(obs.cov.rows());
    const double n_eff = effective_sample_size(obs, cfg);
    std::unordered_map<std::string, double> cache;
    auto cached_score = [&](const ChainGraph& g) {
        auto it = cache.find(g.encoding());
        if (it != cache.end()) return it->second;
        double s = score_or_floor(obs, g, cfg.fit, n_eff);
        cache.emplace(g.encoding(), s);
        return s;
    };

    std::optional<ChainGraph> best;
    double best_score = -std::numeric_limits<double>::infinity();
    if (traces) traces->clear();
    for (std::size_t r = 0; r <= cfg.restarts; ++r) {
        ChainGraph current = r == 0 ? ChainGraph(p) : restart_graph(p, cfg.seed + r);
        double current_score = cached_score(current);
        GreedyTrace trace{{current_score}};
        for (std::size_t step = 0; step < cfg.max_steps; ++step) {
            std::vector<ChainGraph> candidates = neighbourhood(current, cfg.operators);
            std::vector<double> scores(candidates.size());
            std::vector<bool> known(candidates.size());
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                auto it = cache.find(candidates[i].encoding());
                if ((known[i] = it != cache.end())) scores[i] = it->second;
            }
            for_each_index(candidates.size(), exec, [&](std::size_t i) {
                if (!known[i]) scores[i] = score_or_floor(obs, candidates[i], cfg.fit, n_eff);
            });
            std::size_t pick = candidates.size();
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                cache.emplace(candidates[i].encoding(), scores[i]);
                if (pick == candidates.size() || ranks_before(-scores[i], candidates[i], -scores[pick], candidates[pick]))
                    pick = i;
            }
            if (pick == candidates.size() || !(scores[pick] > current_score)) break;
            current = std::move(candidates[pick]);
            current_score = scores[pick];
            trace.scores.push_back(current_score);
        }
        if (traces) traces->push_back(std::move(trace));
        if (!best || ranks_before(-current_score, current, -best_score, *best)) {
            best = current;
            best_score = current_score;
        }
    }
    return *best;
}

IdentifyResult two_phase(const Observations& obs, const SearchConfig& cfg, double tol) {
    SkeletonResult phase1 = skeleton_recovery(obs, tol);
    return identify_in_class(phase1.representative, obs, cfg);
}

}  // namespace ampcg
