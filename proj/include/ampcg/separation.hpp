#pragma once

#include "ampcg/execution.hpp"
#include "ampcg/graph.hpp"

#include <cstdint>
#include <vector>

namespace ampcg {

/// A ⊥ B | C. The three sets must be pairwise disjoint and A, B non-empty.
struct SeparationQuery {
    NodeSet a;
    NodeSet b;
    NodeSet c;
};

/// How a route arrived at a node, seen from that node.
enum class Entry : std::uint8_t {
    Start,       // route endpoint, no incoming edge
    Toward,      // previous -> node
    Away,        // previous <- node
    Undirected,  // previous - node
};

struct RouteState {
    Node node;
    Entry entry;
};

/// Route-based AMP separation: true iff no C-open route joins A and B.
/// Reachability over (node, entry) states; at most 4p states are visited.
bool separated(const ChainGraph& g, const SeparationQuery& q);

/// Separation over the X nodes of a magnified graph, with the conditioning
/// set replaced by its determined closure.
bool separated_magnified(const MagnifiedGraph& mg, const SeparationQuery& q);

/// Literal route enumeration, test-only ground truth for `separated`.
///
/// Routes are extended one edge at a time and checked for C-openness as they
/// grow. A route never traverses the same edge in the same direction twice:
/// any C-open route that does can be spliced between the two traversals into
/// a shorter C-open route with the same endpoints. `max_len` bounds the number
/// of edges per route; pass 0 for the default 9p.
bool brute_force_separated(const ChainGraph& g, const SeparationQuery& q, std::size_t max_len = 0);

/// Singleton separation statement j ⊥ k | C with j < k and C a bitmask.
struct PairSeparation {
    Node j;
    Node k;
    std::uint64_t conditioning;

    friend auto operator<=>(const PairSeparation&, const PairSeparation&) = default;
};

inline constexpr std::size_t kDefaultSeparationNodeCap = 6;

/// Every separated singleton pair with every conditioning subset of the
/// remaining nodes, sorted. One OpenMP task per pair in parallel mode.
std::vector<PairSeparation> all_separations(const ChainGraph& g,
                                            std::size_t max_nodes = kDefaultSeparationNodeCap,
                                            Execution exec = Execution::Parallel);

/// Expands a bitmask into a NodeSet.
NodeSet mask_to_set(std::uint64_t mask);

}  // namespace ampcg
