#include "ampcg/graph.hpp"

#include "ampcg/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <numeric>
#include <random>

namespace ampcg {

std::vector<std::string> default_labels(std::size_t p) {
    std::vector<std::string> labels;
    labels.reserve(p);
    for (std::size_t j = 0; j < p; ++j) labels.push_back("X" + std::to_string(j + 1));
    return labels;
}

ChainGraph::ChainGraph(std::size_t p) : ChainGraph(p, default_labels(p)) {}

ChainGraph::ChainGraph(std::size_t p, std::vector<std::string> labels)
    : m_p(p), m_marks(p * p, Mark::None) {
    set_labels(std::move(labels));
}

const std::string& ChainGraph::label(Node j) const {
    check_node(j);
    return m_labels[j];
}

void ChainGraph::set_labels(std::vector<std::string> labels) {
    if (labels.size() != m_p)
        throw InputError("expected " + std::to_string(m_p) + " labels, got " +
                         std::to_string(labels.size()));
    for (std::size_t j = 0; j < labels.size(); ++j)
        for (std::size_t k = j + 1; k < labels.size(); ++k)
            if (labels[j] == labels[k]) throw InputError("duplicate node label '" + labels[j] + "'");
    m_labels = std::move(labels);
}

std::optional<Node> ChainGraph::find(const std::string& label) const {
    auto it = std::find(m_labels.begin(), m_labels.end(), label);
    if (it == m_labels.end()) return std::nullopt;
    return static_cast<Node>(it - m_labels.begin());
}

void ChainGraph::check_node(Node j) const {
    if (j >= m_p)
        throw InputError("node index " + std::to_string(j) + " out of range [0, " +
                         std::to_string(m_p) + ")");
}

void ChainGraph::check_new_edge(Node a, Node b) const {
    check_node(a);
    check_node(b);
    if (a == b) throw StructureError("self-loop at " + m_labels[a]);
    if (m_marks[a * m_p + b] != Mark::None)
        throw StructureError("duplicate edge between " + m_labels[a] + " and " + m_labels[b]);
}

void ChainGraph::add_directed(Node from, Node to) {
    check_new_edge(from, to);
    m_marks[from * m_p + to] = Mark::Out;
    m_marks[to * m_p + from] = Mark::In;
}

void ChainGraph::add_undirected(Node a, Node b) {
    check_new_edge(a, b);
    m_marks[a * m_p + b] = Mark::Undirected;
    m_marks[b * m_p + a] = Mark::Undirected;
}

void ChainGraph::remove_edge(Node a, Node b) {
    check_node(a);
    check_node(b);
    m_marks[a * m_p + b] = Mark::None;
    m_marks[b * m_p + a] = Mark::None;
}

Mark ChainGraph::mark(Node j, Node k) const {
    check_node(j);
    check_node(k);
    return m_marks[j * m_p + k];
}

std::vector<std::pair<Node, Node>> ChainGraph::directed_edges() const {
    std::vector<std::pair<Node, Node>> out;
    for (Node j = 0; j < m_p; ++j)
        for (Node k = 0; k < m_p; ++k)
            if (m_marks[j * m_p + k] == Mark::Out) out.emplace_back(j, k);
    return out;
}

std::vector<std::pair<Node, Node>> ChainGraph::undirected_edges() const {
    std::vector<std::pair<Node, Node>> out;
    for (Node j = 0; j < m_p; ++j)
        for (Node k = j + 1; k < m_p; ++k)
            if (m_marks[j * m_p + k] == Mark::Undirected) out.emplace_back(j, k);
    return out;
}

std::size_t ChainGraph::num_directed() const {
    return static_cast<std::size_t>(std::count(m_marks.begin(), m_marks.end(), Mark::Out));
}

std::size_t ChainGraph::num_undirected() const {
    return static_cast<std::size_t>(std::count(m_marks.begin(), m_marks.end(), Mark::Undirected)) / 2;
}

namespace {

NodeSet collect(const std::vector<Mark>& marks, std::size_t p, Node j, auto&& pred) {
    NodeSet out;
    for (Node k = 0; k < p; ++k)
        if (pred(marks[j * p + k])) out.push_back(k);
    return out;
}

}  // namespace

NodeSet ChainGraph::parents(Node j) const {
    check_node(j);
    return collect(m_marks, m_p, j, [](Mark m) { return m == Mark::In; });
}

NodeSet ChainGraph::children(Node j) const {
    check_node(j);
    return collect(m_marks, m_p, j, [](Mark m) { return m == Mark::Out; });
}

NodeSet ChainGraph::neighbors(Node j) const {
    check_node(j);
    return collect(m_marks, m_p, j, [](Mark m) { return m == Mark::Undirected; });
}

NodeSet ChainGraph::adjacents(Node j) const {
    check_node(j);
    return collect(m_marks, m_p, j, [](Mark m) { return m != Mark::None; });
}

std::string ChainGraph::encoding() const {
    std::string s;
    s.reserve(m_p * (m_p - (m_p > 0 ? 1 : 0)) / 2);
    for (Node j = 0; j < m_p; ++j) {
        for (Node k = j + 1; k < m_p; ++k) {
            switch (m_marks[j * m_p + k]) {
                case Mark::None: s.push_back('.'); break;
                case Mark::Out: s.push_back('>'); break;
                case Mark::In: s.push_back('<'); break;
                case Mark::Undirected: s.push_back('-'); break;
            }
        }
    }
    return s;
}

std::optional<std::vector<Node>> find_semidirected_cycle(const ChainGraph& g) {
    const std::size_t p = g.size();
    for (auto [a, b] : g.directed_edges()) {
        // Walk forward from b along -> and - edges looking for a.
        std::vector<Node> pred(p, p);
        std::vector<bool> seen(p, false);
        std::deque<Node> queue{b};
        seen[b] = true;
        while (!queue.empty()) {
            Node v = queue.front();
            queue.pop_front();
            if (v == a) {
                // a -> b ~> a, rebuilt backwards from a.
                std::vector<Node> path;
                for (Node u = a; u != b; u = pred[u]) path.push_back(u);
                path.push_back(b);
                path.push_back(a);
                std::reverse(path.begin(), path.end());
                return path;
            }
            for (Node w = 0; w < p; ++w) {
                Mark m = g.mark(v, w);
                if (!seen[w] && (m == Mark::Out || m == Mark::Undirected)) {
                    seen[w] = true;
                    pred[w] = v;
                    queue.push_back(w);
                }
            }
        }
    }
    return std::nullopt;
}

bool is_chain_graph(const ChainGraph& g) { return !find_semidirected_cycle(g).has_value(); }

void require_chain_graph(const ChainGraph& g) {
    auto cycle = find_semidirected_cycle(g);
    if (!cycle) return;
    std::string text;
    for (std::size_t i = 0; i < cycle->size(); ++i) {
        if (i > 0) {
            Mark m = g.mark((*cycle)[i - 1], (*cycle)[i]);
            text += m == Mark::Out ? " -> " : " - ";
        }
        text += g.label((*cycle)[i]);
    }
    throw StructureError("semidirected cycle " + text);
}

NodeSet relatives(const ChainGraph& g, const NodeSet& s, Relation kind) {
    const std::size_t p = g.size();
    std::vector<bool> in_s(p, false);
    for (Node v : s) {
        if (v >= p) throw InputError("node index " + std::to_string(v) + " out of range");
        in_s[v] = true;
    }
    std::vector<bool> hit(p, false);
    switch (kind) {
        case Relation::Parents:
            for (Node v : s)
                for (Node u : g.parents(v)) hit[u] = true;
            break;
        case Relation::Adjacents:
            for (Node v : s)
                for (Node u : g.adjacents(v)) hit[u] = true;
            break;
        case Relation::Descendants:
        case Relation::NonDescendants: {
            std::deque<Node> queue;
            for (Node v : s)
                for (Node c : g.children(v))
                    if (!hit[c]) hit[c] = true, queue.push_back(c);
            while (!queue.empty()) {
                Node v = queue.front();
                queue.pop_front();
                for (Node c : g.children(v))
                    if (!hit[c]) hit[c] = true, queue.push_back(c);
            }
            if (kind == Relation::NonDescendants) hit.flip();
            break;
        }
    }
    NodeSet out;
    for (Node v = 0; v < p; ++v)
        if (hit[v]) out.push_back(v);
    return out;
}

std::vector<NodeSet> chain_components(const ChainGraph& g) {
    const std::size_t p = g.size();
    std::vector<bool> seen(p, false);
    std::vector<NodeSet> blocks;
    for (Node start = 0; start < p; ++start) {
        if (seen[start]) continue;
        NodeSet block;
        std::deque<Node> queue{start};
        seen[start] = true;
        while (!queue.empty()) {
            Node v = queue.front();
            queue.pop_front();
            block.push_back(v);
            for (Node w : g.neighbors(v))
                if (!seen[w]) seen[w] = true, queue.push_back(w);
        }
        std::sort(block.begin(), block.end());
        blocks.push_back(std::move(block));
    }
    return blocks;
}

std::vector<NodeSet> ordered_chain_components(const ChainGraph& g) {
    require_chain_graph(g);
    auto blocks = chain_components(g);
    const std::size_t nb = blocks.size();
    std::vector<std::size_t> block_of(g.size());
    for (std::size_t b = 0; b < nb; ++b)
        for (Node v : blocks[b]) block_of[v] = b;

    std::vector<std::vector<bool>> edge(nb, std::vector<bool>(nb, false));
    std::vector<std::size_t> indegree(nb, 0);
    for (auto [from, to] : g.directed_edges()) {
        auto bf = block_of[from], bt = block_of[to];
        if (!edge[bf][bt]) edge[bf][bt] = true, ++indegree[bt];
    }
    std::vector<NodeSet> ordered;
    std::vector<bool> done(nb, false);
    while (ordered.size() < nb) {
        // Smallest ready block first keeps the order deterministic.
        std::size_t next = nb;
        for (std::size_t b = 0; b < nb; ++b)
            if (!done[b] && indegree[b] == 0) { next = b; break; }
        done[next] = true;
        ordered.push_back(blocks[next]);
        for (std::size_t b = 0; b < nb; ++b)
            if (edge[next][b]) --indegree[b];
    }
    return ordered;
}

std::vector<Triplex> triplexes(const ChainGraph& g) {
    const std::size_t p = g.size();
    std::vector<Triplex> out;
    for (Node k = 0; k < p; ++k) {
        for (Node j = 0; j < p; ++j) {
            if (j == k) continue;
            Mark mj = g.mark(j, k);
            if (mj == Mark::None) continue;
            for (Node l = j + 1; l < p; ++l) {
                if (l == k || g.adjacent(j, l)) continue;
                Mark ml = g.mark(l, k);
                if (ml == Mark::None) continue;
                bool j_into = mj == Mark::Out, l_into = ml == Mark::Out;
                bool j_und = mj == Mark::Undirected, l_und = ml == Mark::Undirected;
                if ((j_into && l_into) || (j_into && l_und) || (j_und && l_into))
                    out.push_back({j, k, l});
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool markov_equivalent(const ChainGraph& g, const ChainGraph& h) {
    if (g.size() != h.size())
        throw InputError("node count mismatch: " + std::to_string(g.size()) + " vs " +
                         std::to_string(h.size()));
    for (Node j = 0; j < g.size(); ++j)
        for (Node k = j + 1; k < g.size(); ++k)
            if (g.adjacent(j, k) != h.adjacent(j, k)) return false;
    return triplexes(g) == triplexes(h);
}

namespace {

std::string error_label(const std::string& label) {
    bool numbered = label.size() > 1 && label[0] == 'X' &&
                    std::all_of(label.begin() + 1, label.end(), [](char c) { return c >= '0' && c <= '9'; });
    return numbered ? "N" + label.substr(1) : "N_" + label;
}

}  // namespace

MagnifiedGraph magnify(const ChainGraph& g) {
    require_chain_graph(g);
    const std::size_t p = g.size();
    std::vector<std::string> labels = g.labels();
    for (Node j = 0; j < p; ++j) labels.push_back(error_label(g.label(j)));

    MagnifiedGraph mg{ChainGraph(2 * p, std::move(labels)), p};
    for (auto [from, to] : g.directed_edges()) mg.graph.add_directed(from, to);
    for (Node j = 0; j < p; ++j) mg.graph.add_directed(mg.error_of(j), j);
    for (auto [a, b] : g.undirected_edges()) mg.graph.add_undirected(mg.error_of(a), mg.error_of(b));
    return mg;
}

NodeSet determined_closure(const MagnifiedGraph& mg, const NodeSet& c) {
    const std::size_t n = mg.graph.size();
    std::vector<bool> in(n, false);
    for (Node v : c) {
        if (v >= n) throw InputError("node index " + std::to_string(v) + " out of range");
        in[v] = true;
    }
    // Observed parents of each X_j (its error parent excluded).
    std::vector<NodeSet> observed_parents(mg.base_size);
    for (Node j = 0; j < mg.base_size; ++j)
        for (Node u : mg.graph.parents(j))
            if (!mg.is_error(u)) observed_parents[j].push_back(u);

    auto all_in = [&](const NodeSet& s) {
        return std::all_of(s.begin(), s.end(), [&](Node u) { return in[u]; });
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (Node j = 0; j < mg.base_size; ++j) {
            if (!all_in(observed_parents[j])) continue;
            Node e = mg.error_of(j);
            if (!in[j] && in[e]) in[j] = changed = true;
            if (!in[e] && in[j]) in[e] = changed = true;
        }
    }
    NodeSet out;
    for (Node v = 0; v < n; ++v)
        if (in[v]) out.push_back(v);
    return out;
}

namespace {

bool is_component(const std::vector<NodeSet>& blocks, const NodeSet& s) {
    NodeSet sorted = s;
    std::sort(sorted.begin(), sorted.end());
    return std::find(blocks.begin(), blocks.end(), sorted) != blocks.end();
}

}  // namespace

std::optional<ChainGraph> feasible_merge(const ChainGraph& g, const NodeSet& upper,
                                         const NodeSet& lower) {
    auto blocks = chain_components(g);
    if (!is_component(blocks, upper) || !is_component(blocks, lower) || upper == lower)
        throw InputError("merge operands must be two distinct chain components");

    ChainGraph h = g;
    bool any = false;
    for (Node u : upper) {
        for (Node l : lower) {
            Mark m = g.mark(u, l);
            if (m == Mark::None) continue;
            any = any || m == Mark::Out;
            h.remove_edge(u, l);
            h.add_undirected(u, l);
        }
    }
    if (!any) throw InputError("no directed edge from the upper to the lower component");
    if (!is_chain_graph(h) || !markov_equivalent(g, h)) return std::nullopt;
    return h;
}

std::optional<ChainGraph> feasible_split(const ChainGraph& g, const NodeSet& upper,
                                         const NodeSet& lower) {
    NodeSet whole = upper;
    whole.insert(whole.end(), lower.begin(), lower.end());
    std::sort(whole.begin(), whole.end());
    if (upper.empty() || lower.empty() || std::adjacent_find(whole.begin(), whole.end()) != whole.end() ||
        !is_component(chain_components(g), whole))
        throw InputError("split operands must partition one chain component");

    ChainGraph h = g;
    bool any = false;
    for (Node u : upper) {
        for (Node l : lower) {
            if (!g.has_undirected(u, l)) continue;
            any = true;
            h.remove_edge(u, l);
            h.add_directed(u, l);
        }
    }
    if (!any) return std::nullopt;
    if (!is_chain_graph(h) || !markov_equivalent(g, h)) return std::nullopt;
    return h;
}

ChainGraph random_chain_graph(std::size_t p, double edge_prob, double undirected_frac,
                              std::uint64_t seed) {
    if (p == 0) throw InputError("random_chain_graph needs p >= 1");
    if (!(edge_prob >= 0.0 && edge_prob <= 1.0) || !(undirected_frac >= 0.0 && undirected_frac <= 1.0))
        throw InputError("probabilities must lie in [0, 1]");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<Node> order(p);
    std::iota(order.begin(), order.end(), Node{0});
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::size_t> block(p, 0);
    for (std::size_t i = 1; i < p; ++i)
        block[i] = unit(rng) < undirected_frac ? block[i - 1] : block[i - 1] + 1;

    ChainGraph g(p);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t k = i + 1; k < p; ++k) {
            if (!(unit(rng) < edge_prob)) continue;
            if (block[i] == block[k])
                g.add_undirected(order[i], order[k]);
            else
                g.add_directed(order[i], order[k]);
        }
    }
    return g;
}

std::vector<ChainGraph> enumerate_chain_graphs(std::size_t p) {
    if (p > 5) throw CapacityError("enumerate_chain_graphs is capped at p <= 5");
    std::vector<std::pair<Node, Node>> pairs;
    for (Node j = 0; j < p; ++j)
        for (Node k = j + 1; k < p; ++k) pairs.emplace_back(j, k);

    std::vector<ChainGraph> out;
    std::size_t total = 1;
    for (std::size_t i = 0; i < pairs.size(); ++i) total *= 4;
    for (std::size_t code = 0; code < total; ++code) {
        ChainGraph g(p);
        std::size_t rest = code;
        for (auto [j, k] : pairs) {
            switch (rest % 4) {
                case 1: g.add_directed(j, k); break;
                case 2: g.add_directed(k, j); break;
                case 3: g.add_undirected(j, k); break;
                default: break;
            }
            rest /= 4;
        }
        if (is_chain_graph(g)) out.push_back(std::move(g));
    }
    return out;
}

std::size_t structural_hamming_distance(const ChainGraph& g, const ChainGraph& h) {
    if (g.size() != h.size()) throw InputError("node count mismatch");
    std::size_t d = 0;
    for (Node j = 0; j < g.size(); ++j)
        for (Node k = j + 1; k < g.size(); ++k)
            if (g.mark(j, k) != h.mark(j, k)) ++d;
    return d;
}

std::string graph_hash(const ChainGraph& g) {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&h](unsigned char c) {
        h ^= c;
        h *= 1099511628211ull;
    };
    for (char c : std::to_string(g.size())) mix(static_cast<unsigned char>(c));
    mix(':');
    for (char c : g.encoding()) mix(static_cast<unsigned char>(c));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string describe(const ChainGraph& g) {
    std::string out;
    auto append = [&out](const std::string& s) {
        if (!out.empty()) out += ", ";
        out += s;
    };
    for (auto [a, b] : g.directed_edges()) append(g.label(a) + " -> " + g.label(b));
    for (auto [a, b] : g.undirected_edges()) append(g.label(a) + " - " + g.label(b));
    return out.empty() ? "(no edges)" : out;
}

}  // namespace ampcg
