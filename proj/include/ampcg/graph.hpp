#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ampcg {

using Node = std::size_t;
/// Sorted, duplicate-free list of node indices.
using NodeSet = std::vector<Node>;

/// Edge mark between an ordered pair (j, k): `Out` means j -> k, `In` means j <- k.
enum class Mark : std::uint8_t { None, Out, In, Undirected };

std::vector<std::string> default_labels(std::size_t p);

/// Simple mixed graph over nodes 0..p-1 holding directed and undirected edges.
///
/// Construction enforces simplicity (no self-loops, one edge per pair). The
/// absence of semidirected cycles is a property checked by `is_chain_graph`,
/// so the same type also carries candidate graphs during search.
class ChainGraph {
public:
    ChainGraph() = default;
    explicit ChainGraph(std::size_t p);
    ChainGraph(std::size_t p, std::vector<std::string> labels);

    std::size_t size() const noexcept { return m_p; }

    const std::vector<std::string>& labels() const noexcept { return m_labels; }
    const std::string& label(Node j) const;
    void set_labels(std::vector<std::string> labels);
    /// Index of the node with the given label, or nullopt.
    std::optional<Node> find(const std::string& label) const;

    void add_directed(Node from, Node to);
    void add_undirected(Node a, Node b);
    void remove_edge(Node a, Node b);

    Mark mark(Node j, Node k) const;
    bool adjacent(Node j, Node k) const { return mark(j, k) != Mark::None; }
    bool has_directed(Node from, Node to) const { return mark(from, to) == Mark::Out; }
    bool has_undirected(Node a, Node b) const { return mark(a, b) == Mark::Undirected; }

    /// Directed edges as (from, to), in row-major order.
    std::vector<std::pair<Node, Node>> directed_edges() const;
    /// Undirected edges as (a, b) with a < b.
    std::vector<std::pair<Node, Node>> undirected_edges() const;
    std::size_t num_directed() const;
    std::size_t num_undirected() const;

    NodeSet parents(Node j) const;
    NodeSet children(Node j) const;
    /// Nodes joined to j by an undirected edge.
    NodeSet neighbors(Node j) const;
    NodeSet adjacents(Node j) const;

    /// One character per unordered pair j < k in row-major order:
    /// '.' none, '>' j -> k, '<' j <- k, '-' undirected. Labels are not encoded.
    std::string encoding() const;

    friend bool operator==(const ChainGraph& a, const ChainGraph& b) {
        return a.m_p == b.m_p && a.m_marks == b.m_marks;
    }

private:
    void check_node(Node j) const;
    void check_new_edge(Node a, Node b) const;

    std::size_t m_p = 0;
    std::vector<std::string> m_labels;
    std::vector<Mark> m_marks;  // p x p, row-major
};

/// Returns a semidirected cycle as a closed node sequence (first == last), if any.
std::optional<std::vector<Node>> find_semidirected_cycle(const ChainGraph& g);
bool is_chain_graph(const ChainGraph& g);
/// Throws StructureError naming an offending cycle when g is not a chain graph.
void require_chain_graph(const ChainGraph& g);

enum class Relation { Parents, Descendants, NonDescendants, Adjacents };

/// Pa, De (directed paths only), ND = X \ De, and Ad of a node set.
NodeSet relatives(const ChainGraph& g, const NodeSet& s, Relation kind);

/// Maximal undirected-connected blocks, each sorted, ordered by smallest member.
std::vector<NodeSet> chain_components(const ChainGraph& g);

/// Components in an order where every directed edge points from an earlier
/// block to a later one. Requires a chain graph.
std::vector<NodeSet> ordered_chain_components(const ChainGraph& g);

struct Triplex {
    Node left;    // always < right
    Node center;
    Node right;

    friend auto operator<=>(const Triplex&, const Triplex&) = default;
};

/// All triplexes in canonical form, sorted.
std::vector<Triplex> triplexes(const ChainGraph& g);

/// Same adjacencies and same triplexes.
bool markov_equivalent(const ChainGraph& g, const ChainGraph& h);

/// A chain graph with one explicit error node per original node.
/// Nodes 0..p-1 are the original X nodes; node p + j is the error N_j.
struct MagnifiedGraph {
    ChainGraph graph;
    std::size_t base_size = 0;

    Node error_of(Node j) const noexcept { return base_size + j; }
    bool is_error(Node v) const noexcept { return v >= base_size; }
};

MagnifiedGraph magnify(const ChainGraph& g);

/// Smallest superset of c closed under the two determination rules
/// X_j <- Pa(X_j) + N_j and N_j <- X_j + Pa(X_j).
NodeSet determined_closure(const MagnifiedGraph& mg, const NodeSet& c);

/// Drops the direction of every edge between components `upper` and `lower`.
/// Returns nullopt when the result is not a chain graph Markov equivalent to g.
std::optional<ChainGraph> feasible_merge(const ChainGraph& g, const NodeSet& upper,
                                         const NodeSet& lower);

/// Inverse of a merge: `upper` and `lower` partition one chain component and
/// every undirected edge between them becomes upper -> lower.
std::optional<ChainGraph> feasible_split(const ChainGraph& g, const NodeSet& upper,
                                         const NodeSet& lower);

inline constexpr std::size_t kDefaultClassNodeCap = 8;

/// Closure of g under feasible merges and splits, sorted by encoding.
std::vector<ChainGraph> equivalence_class(const ChainGraph& g,
                                          std::size_t max_nodes = kDefaultClassNodeCap);

/// Random chain graph: nodes are shuffled into an order and grouped into
/// consecutive blocks (a node joins the previous block with probability
/// `undirected_frac`). Each pair gets an edge with probability `edge_prob`;
/// within a block the edge is undirected, otherwise it points along the order.
ChainGraph random_chain_graph(std::size_t p, double edge_prob, double undirected_frac,
                              std::uint64_t seed);

/// Every chain graph over p labeled nodes. Capped at p <= 5.
std::vector<ChainGraph> enumerate_chain_graphs(std::size_t p);

/// Number of node pairs whose edge state differs.
std::size_t structural_hamming_distance(const ChainGraph& g, const ChainGraph& h);

/// 64-bit FNV-1a hash of (p, encoding) as 16 hex digits.
std::string graph_hash(const ChainGraph& g);

/// Human readable edge list, e.g. "X1 -> X2, X2 - X3".
std::string describe(const ChainGraph& g);

}  // namespace ampcg
