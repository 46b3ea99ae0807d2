#pragma once

// Independent reference computations used only by the test suites.

#include "ampcg/graph.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <vector>

namespace ampcg::oracle {

/// Six-node example used throughout the tests:
/// X1->X2, X1->X3, X1->X4, X2->X4, X3-X4, X3->X5, X4->X6, X5-X6.
inline ChainGraph six_node_example() {
    ChainGraph g(6);
    g.add_directed(0, 1);
    g.add_directed(0, 2);
    g.add_directed(0, 3);
    g.add_directed(1, 3);
    g.add_undirected(2, 3);
    g.add_directed(2, 4);
    g.add_directed(3, 5);
    g.add_undirected(4, 5);
    return g;
}

/// Descendants by enumerating every directed path (depth-first, no memo).
inline NodeSet descendants_by_paths(const ChainGraph& g, const NodeSet& s) {
    std::set<Node> hit;
    std::vector<Node> path;
    auto walk = [&](auto&& self, Node v) -> void {
        for (Node c : g.children(v)) {
            if (std::find(path.begin(), path.end(), c) != path.end()) continue;
            hit.insert(c);
            path.push_back(c);
            self(self, c);
            path.pop_back();
        }
    };
    for (Node v : s) {
        path = {v};
        walk(walk, v);
    }
    return {hit.begin(), hit.end()};
}

/// Every orientation of g's skeleton that is a chain graph with g's triplexes.
inline std::vector<ChainGraph> brute_force_class(const ChainGraph& g) {
    std::vector<std::pair<Node, Node>> edges;
    for (Node j = 0; j < g.size(); ++j)
        for (Node k = j + 1; k < g.size(); ++k)
            if (g.adjacent(j, k)) edges.emplace_back(j, k);
    const auto target = triplexes(g);
    std::size_t total = 1;
    for (std::size_t i = 0; i < edges.size(); ++i) total *= 3;
    std::vector<ChainGraph> out;
    for (std::size_t code = 0; code < total; ++code) {
        ChainGraph h(g.size(), g.labels());
        std::size_t rest = code;
        for (auto [j, k] : edges) {
            if (rest % 3 == 0) h.add_directed(j, k);
            else if (rest % 3 == 1) h.add_directed(k, j);
            else h.add_undirected(j, k);
            rest /= 3;
        }
        if (is_chain_graph(h) && triplexes(h) == target) out.push_back(std::move(h));
    }
    std::sort(out.begin(), out.end(), [](const ChainGraph& a, const ChainGraph& b) { return a.encoding() < b.encoding(); });
    return out;
}

/// Gaussian graphical model MLE by Newton's method on the free concentration
/// entries (diagonal plus pattern edges), maximising log det K - tr(S K).
inline Eigen::MatrixXd ggm_mle_newton(const Eigen::MatrixXd& s, const ChainGraph& pattern) {
    const auto p = s.rows();
    std::vector<std::pair<Eigen::Index, Eigen::Index>> free;
    for (Eigen::Index a = 0; a < p; ++a) free.emplace_back(a, a);
    for (auto [a, b] : pattern.undirected_edges()) free.emplace_back(a, b);
    const auto m = static_cast<Eigen::Index>(free.size());

    auto basis = [&](Eigen::Index e) {
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(p, p);
        auto [i, j] = free[e];
        b(i, j) = 1.0;
        b(j, i) = 1.0;
        return b;
    };
    auto objective = [&](const Eigen::MatrixXd& k) {
        Eigen::LLT<Eigen::MatrixXd> llt(k);
        if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
        double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
        return logdet - (s * k).trace();
    };

    Eigen::MatrixXd k = s.diagonal().cwiseInverse().asDiagonal();
    for (int iter = 0; iter < 200; ++iter) {
        Eigen::MatrixXd sigma = k.inverse();
        Eigen::VectorXd grad(m);
        Eigen::MatrixXd hess(m, m);
        std::vector<Eigen::MatrixXd> bases;
        for (Eigen::Index e = 0; e < m; ++e) bases.push_back(basis(e));
        for (Eigen::Index e = 0; e < m; ++e) {
            grad(e) = ((sigma - s) * bases[e]).trace();
            for (Eigen::Index f = 0; f < m; ++f) hess(e, f) = -(sigma * bases[e] * sigma * bases[f]).trace();
        }
        if (grad.lpNorm<Eigen::Infinity>() < 1e-14) break;
        Eigen::VectorXd step = hess.ldlt().solve(-grad);
        double t = 1.0, base = objective(k);
        for (int tries = 0; tries < 60; ++tries, t *= 0.5) {
            Eigen::MatrixXd trial = k;
            for (Eigen::Index e = 0; e < m; ++e) {
                auto [i, j] = free[e];
                trial(i, j) += t * step(e);
                if (i != j) trial(j, i) += t * step(e);
            }
            if (objective(trial) >= base - 1e-15) {
                k = trial;
                break;
            }
        }
    }
    return k.inverse();
}

/// Random symmetric positive-definite matrix.
template <typename Rng>
Eigen::MatrixXd random_spd(Eigen::Index p, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd a(p, p);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j) a(i, j) = normal(rng);
    Eigen::MatrixXd s = a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(p, p);
    return 0.5 * (s + s.transpose());
}

}  // namespace ampcg::oracle
