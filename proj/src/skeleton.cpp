#include "ampcg/errors.hpp"
#include "ampcg/search.hpp"
#include "ampcg/separation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace ampcg {

namespace {

bool independent(const Observations& obs, Node j, Node k, const NodeSet& cond, double tol) {
    const double r = partial_correlation(obs.cov, j, k, cond);
    if (obs.population()) return std::abs(r) < tol;
    const double dof = static_cast<double>(obs.n) - static_cast<double>(cond.size()) - 3.0;
    if (dof <= 0.0) return true;
    const double clipped = std::clamp(r, -1.0 + 1e-15, 1.0 - 1e-15);
    const double z = std::atanh(clipped) * std::sqrt(dof);
    const double p_value = std::erfc(std::abs(z) / std::sqrt(2.0));
    return p_value > tol;
}

struct PatternSearch {
    const ChainGraph& skeleton;
    std::vector<std::pair<Node, Node>> edges;
    std::vector<Triplex> wanted;
    ChainGraph partial;

    // Triples whose two edges are both placed must agree with `wanted`.
    bool consistent_around(Node a, Node b) const {
        for (Node center : {a, b}) {
            const Node other = center == a ? b : a;
            for (Node x : partial.adjacents(center)) {
                if (x == other || skeleton.adjacent(x, other)) continue;
                Triplex t{std::min(x, other), center, std::max(x, other)};
                const Mark m1 = partial.mark(t.left, center), m2 = partial.mark(t.right, center);
                const bool is = (m1 == Mark::Out && m2 == Mark::Out) || (m1 == Mark::Out && m2 == Mark::Undirected) ||
                                (m1 == Mark::Undirected && m2 == Mark::Out);
                if (is != std::binary_search(wanted.begin(), wanted.end(), t)) return false;
            }
        }
        return true;
    }

    bool assign(std::size_t i) {
        if (i == edges.size()) return true;
        auto [a, b] = edges[i];
        for (int choice = 0; choice < 3; ++choice) {
            if (choice == 0) partial.add_undirected(a, b);
            else if (choice == 1) partial.add_directed(a, b);
            else partial.add_directed(b, a);
            if (consistent_around(a, b) && is_chain_graph(partial) && assign(i + 1)) return true;
            partial.remove_edge(a, b);
        }
        return false;
    }
};

}  // namespace

std::optional<ChainGraph> chain_graph_from_pattern(const ChainGraph& skeleton, const std::vector<Triplex>& triplex_set) {
    PatternSearch search{skeleton, {}, triplex_set, ChainGraph(skeleton.size(), skeleton.labels())};
    std::sort(search.wanted.begin(), search.wanted.end());
    for (const Triplex& t : search.wanted) {
        const std::size_t p = skeleton.size();
        if (t.left >= p || t.center >= p || t.right >= p) throw InputError("triplex names a node outside the skeleton");
        // Only unshielded triples can be triplexes.
        if (!skeleton.adjacent(t.left, t.center) || !skeleton.adjacent(t.center, t.right) ||
            skeleton.adjacent(t.left, t.right) || t.left == t.right)
            return std::nullopt;
    }
    for (Node j = 0; j < skeleton.size(); ++j)
        for (Node k = j + 1; k < skeleton.size(); ++k)
            if (skeleton.adjacent(j, k)) search.edges.emplace_back(j, k);
    if (!search.assign(0)) return std::nullopt;
    return search.partial;
}

SkeletonResult skeleton_recovery(const Observations& obs, double tol) {
    const std::size_t p = static_cast<std::size_t>(obs.cov.rows());
    if (p > 16) throw CapacityError("skeleton_recovery searches all conditioning sets; capped at 16 nodes");

    SkeletonResult result;
    ChainGraph skeleton(p);
    for (Node j = 0; j < p; ++j) {
        for (Node k = j + 1; k < p; ++k) {
            NodeSet others;
            for (Node v = 0; v < p; ++v)
                if (v != j && v != k) others.push_back(v);
            const std::size_t m = others.size();
            std::vector<std::uint64_t> masks(std::size_t{1} << m);
            for (std::uint64_t c = 0; c < masks.size(); ++c) masks[c] = c;
            // Smallest conditioning sets first.
            std::stable_sort(masks.begin(), masks.end(),
                             [](std::uint64_t a, std::uint64_t b) { return std::popcount(a) < std::popcount(b); });
            std::optional<NodeSet> sepset;
            for (std::uint64_t c : masks) {
                NodeSet cond;
                for (std::size_t i = 0; i < m; ++i)
                    if ((c >> i) & 1) cond.push_back(others[i]);
                if (independent(obs, j, k, cond, tol)) {
                    sepset = std::move(cond);
                    break;
                }
            }
            if (sepset) result.sepsets[{j, k}] = std::move(*sepset);
            else skeleton.add_undirected(j, k);
        }
    }

    // A common neighbour outside the separating set is a triplex center.
    std::vector<Triplex> wanted;
    for (const auto& [pair, sep] : result.sepsets) {
        auto [j, l] = pair;
        for (Node k = 0; k < p; ++k) {
            if (!skeleton.adjacent(j, k) || !skeleton.adjacent(l, k)) continue;
            if (!std::binary_search(sep.begin(), sep.end(), k)) wanted.push_back({j, k, l});
        }
    }
    std::sort(wanted.begin(), wanted.end());

    if (auto g = chain_graph_from_pattern(skeleton, wanted)) {
        result.representative = std::move(*g);
    } else {
        result.consistent = false;
        result.representative = skeleton;
    }
    return result;
}

}  // namespace ampcg
