#include "ampcg/separation.hpp"

#include "ampcg/errors.hpp"

#include <algorithm>
#include <deque>

namespace ampcg {

namespace {

void validate(const ChainGraph& g, const SeparationQuery& q) {
    if (q.a.empty() || q.b.empty()) throw InputError("separation query needs non-empty A and B");
    std::vector<int> owner(g.size(), -1);
    auto claim = [&](const NodeSet& s, int tag) {
        for (Node v : s) {
            if (v >= g.size()) throw InputError("node index " + std::to_string(v) + " out of range");
            if (owner[v] != -1 && owner[v] != tag)
                throw InputError("query sets overlap at " + g.label(v));
            owner[v] = tag;
        }
    };
    claim(q.a, 0);
    claim(q.b, 1);
    claim(q.c, 2);
}

// Entry kind of `to` when the route steps from `from` to `to`.
Entry entry_at(Mark from_to) {
    switch (from_to) {
        case Mark::Out: return Entry::Toward;
        case Mark::In: return Entry::Away;
        default: return Entry::Undirected;
    }
}

std::size_t slot(Node v, Entry e) { return v * 4 + static_cast<std::size_t>(e); }

}  // namespace

bool separated(const ChainGraph& g, const SeparationQuery& q) {
    validate(g, q);
    const std::size_t p = g.size();
    std::vector<bool> in_b(p, false), in_c(p, false);
    for (Node v : q.b) in_b[v] = true;
    for (Node v : q.c) in_c[v] = true;

    std::vector<bool> visited(4 * p, false);
    std::deque<RouteState> queue;
    for (Node a : q.a) {
        visited[slot(a, Entry::Start)] = true;
        queue.push_back({a, Entry::Start});
    }
    while (!queue.empty()) {
        auto [k, in] = queue.front();
        queue.pop_front();
        for (Node m = 0; m < p; ++m) {
            Mark step = g.mark(k, m);
            if (step == Mark::None) continue;
            if (in != Entry::Start) {
                // The outgoing edge points at k when m -> k.
                bool out_toward = step == Mark::In;
                bool out_undirected = step == Mark::Undirected;
                bool triplex = (in == Entry::Toward && (out_toward || out_undirected)) ||
                               (in == Entry::Undirected && out_toward);
                if (triplex != in_c[k]) continue;
            }
            if (in_b[m]) return false;
            Entry next = entry_at(step);
            if (!visited[slot(m, next)]) {
                visited[slot(m, next)] = true;
                queue.push_back({m, next});
            }
        }
    }
    return true;
}

bool separated_magnified(const MagnifiedGraph& mg, const SeparationQuery& q) {
    auto check = [&](const NodeSet& s) {
        for (Node v : s)
            if (mg.is_error(v)) throw InputError("error nodes cannot be queried directly");
    };
    check(q.a);
    check(q.b);
    check(q.c);
    return separated(mg.graph, {q.a, q.b, determined_closure(mg, q.c)});
}

NodeSet mask_to_set(std::uint64_t mask) {
    NodeSet out;
    for (Node v = 0; mask != 0; ++v, mask >>= 1)
        if (mask & 1) out.push_back(v);
    return out;
}

std::vector<PairSeparation> all_separations(const ChainGraph& g, std::size_t max_nodes, Execution exec) {
    const std::size_t p = g.size();
    if (p > max_nodes || p > 62)
        throw CapacityError("all_separations capped at " + std::to_string(max_nodes) + " nodes, graph has " +
                            std::to_string(p));
    std::vector<std::pair<Node, Node>> pairs;
    for (Node j = 0; j < p; ++j)
        for (Node k = j + 1; k < p; ++k) pairs.emplace_back(j, k);

    std::vector<std::vector<PairSeparation>> per_pair(pairs.size());
    auto run_pair = [&](std::size_t i) {
        auto [j, k] = pairs[i];
        const std::uint64_t rest = ((std::uint64_t{1} << p) - 1) & ~(std::uint64_t{1} << j) & ~(std::uint64_t{1} << k);
        // Enumerate all submasks of `rest`, including the empty set.
        for (std::uint64_t c = rest;; c = (c - 1) & rest) {
            if (separated(g, {{j}, {k}, mask_to_set(c)})) per_pair[i].push_back({j, k, c});
            if (c == 0) break;
        }
    };

    const auto n = static_cast<long>(pairs.size());
    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < n; ++i) run_pair(static_cast<std::size_t>(i));
    } else {
        for (long i = 0; i < n; ++i) run_pair(static_cast<std::size_t>(i));
    }

    std::vector<PairSeparation> out;
    for (auto& chunk : per_pair) out.insert(out.end(), chunk.begin(), chunk.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace ampcg
