#include "ampcg/errors.hpp"
#include "ampcg/graph.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace ampcg {

namespace {

// Every graph one feasible merge or split away from g.
std::vector<ChainGraph> neighbours_in_class(const ChainGraph& g) {
    std::vector<ChainGraph> out;
    const auto blocks = chain_components(g);
    std::vector<std::size_t> block_of(g.size());
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (Node v : blocks[b]) block_of[v] = b;

    std::set<std::pair<std::size_t, std::size_t>> merge_pairs;
    for (auto [from, to] : g.directed_edges()) merge_pairs.emplace(block_of[from], block_of[to]);
    for (auto [u, l] : merge_pairs)
        if (auto h = feasible_merge(g, blocks[u], blocks[l])) out.push_back(std::move(*h));

    for (const NodeSet& block : blocks) {
        const std::size_t m = block.size();
        if (m < 2) continue;
        // Each ordered bipartition (upper, lower); the mask selects upper.
        for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << m); ++mask) {
            NodeSet upper, lower;
            for (std::size_t i = 0; i < m; ++i) ((mask >> i) & 1 ? upper : lower).push_back(block[i]);
            if (auto h = feasible_split(g, upper, lower)) out.push_back(std::move(*h));
        }
    }
    return out;
}

}  // namespace

std::vector<ChainGraph> equivalence_class(const ChainGraph& g, std::size_t max_nodes) {
    require_chain_graph(g);
    if (g.size() > max_nodes)
        throw CapacityError("equivalence class enumeration capped at " + std::to_string(max_nodes) +
                            " nodes, graph has " + std::to_string(g.size()));

    std::set<std::string> seen{g.encoding()};
    std::vector<ChainGraph> members{g};
    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
        ChainGraph current = members[queue.front()];
        queue.pop_front();
        for (ChainGraph& h : neighbours_in_class(current)) {
            if (!seen.insert(h.encoding()).second) continue;
            members.push_back(std::move(h));
            queue.push_back(members.size() - 1);
        }
    }
    std::sort(members.begin(), members.end(),
              [](const ChainGraph& a, const ChainGraph& b) { return a.encoding() < b.encoding(); });
    return members;
}

}  // namespace ampcg
