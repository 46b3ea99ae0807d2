#include "ampcg/errors.hpp"
#include "ampcg/separation.hpp"

#include <set>

namespace ampcg {

namespace {

struct RouteSearch {
    const ChainGraph& g;
    std::vector<bool> in_b, in_c;
    std::size_t max_len;
    std::vector<Node> route;
    std::set<std::pair<Node, Node>> used;  // directed traversals already on the route

    // X_j -> X_k <- X_l, X_j -> X_k - X_l, or X_j - X_k <- X_l as a subroute.
    bool triplex_node(Node j, Node k, Node l) const {
        return (g.has_directed(j, k) && g.has_directed(l, k)) ||
               (g.has_directed(j, k) && g.has_undirected(k, l)) ||
               (g.has_undirected(j, k) && g.has_directed(l, k));
    }

    // C-open condition at the interior node k between j and l.
    bool open_at(Node j, Node k, Node l) const { return triplex_node(j, k, l) == in_c[k]; }

    bool extend() {
        if (route.size() > max_len) return false;
        const Node last = route.back();
        for (Node next : g.adjacents(last)) {
            if (used.count({last, next})) continue;
            if (route.size() >= 2 && !open_at(route[route.size() - 2], last, next)) continue;
            if (in_b[next]) return true;
            used.insert({last, next});
            route.push_back(next);
            bool found = extend();
            route.pop_back();
            used.erase({last, next});
            if (found) return true;
        }
        return false;
    }
};

}  // namespace

bool brute_force_separated(const ChainGraph& g, const SeparationQuery& q, std::size_t max_len) {
    const std::size_t p = g.size();
    if (q.a.empty() || q.b.empty()) throw InputError("separation query needs non-empty A and B");
    RouteSearch search{g, std::vector<bool>(p, false), std::vector<bool>(p, false),
                       max_len == 0 ? 9 * p : max_len, {}, {}};
    for (Node v : q.b) search.in_b.at(v) = true;
    for (Node v : q.c) search.in_c.at(v) = true;
    for (Node a : q.a) {
        search.route = {a};
        if (search.extend()) return false;
    }
    return true;
}

}  // namespace ampcg
