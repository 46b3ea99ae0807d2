#include "ampcg/errors.hpp"
#include "ampcg/estimation.hpp"

#include <algorithm>

namespace ampcg {

namespace {

void bron_kerbosch(const ChainGraph& g, NodeSet r, NodeSet p, NodeSet x, std::vector<NodeSet>& out) {
    if (p.empty() && x.empty()) {
        std::sort(r.begin(), r.end());
        out.push_back(std::move(r));
        return;
    }
    // Pivot on the candidate with most neighbours in p.
    Node pivot = p.empty() ? x.front() : p.front();
    std::size_t best = 0;
    for (const NodeSet* side : {&p, &x}) {
        for (Node u : *side) {
            std::size_t count = std::count_if(p.begin(), p.end(), [&](Node v) { return g.has_undirected(u, v); });
            if (count >= best) best = count, pivot = u;
        }
    }
    NodeSet candidates;
    for (Node v : p)
        if (!g.has_undirected(pivot, v)) candidates.push_back(v);
    for (Node v : candidates) {
        NodeSet r2 = r, p2, x2;
        r2.push_back(v);
        for (Node u : p)
            if (g.has_undirected(v, u)) p2.push_back(u);
        for (Node u : x)
            if (g.has_undirected(v, u)) x2.push_back(u);
        bron_kerbosch(g, std::move(r2), std::move(p2), std::move(x2), out);
        p.erase(std::find(p.begin(), p.end(), v));
        x.push_back(v);
    }
}

Eigen::MatrixXd block(const Eigen::MatrixXd& m, const NodeSet& idx) {
    Eigen::MatrixXd out(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b) out(a, b) = m(idx[a], idx[b]);
    return out;
}

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m, const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw NumericError(std::string(what) + " is not positive definite");
    Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
    return 0.5 * (inv + inv.transpose());
}

}  // namespace

std::vector<NodeSet> maximal_cliques(const ChainGraph& g) {
    NodeSet all(g.size());
    for (Node v = 0; v < g.size(); ++v) all[v] = v;
    std::vector<NodeSet> out;
    if (!all.empty()) bron_kerbosch(g, {}, all, {}, out);
    std::sort(out.begin(), out.end());
    return out;
}

IpfResult ipf(const Eigen::MatrixXd& s, const ChainGraph& pattern, const FitConfig& cfg) {
    const auto m = s.rows();
    if (s.cols() != m || static_cast<std::size_t>(m) != pattern.size())
        throw InputError("ipf: covariance and pattern sizes differ");
    spd_inverse(s, "ipf input covariance");

    const auto cliques = maximal_cliques(pattern);

    // Disjoint cliques make the MLE block-diagonal with the observed blocks.
    std::size_t covered = 0;
    for (const auto& c : cliques) covered += c.size();
    if (covered == static_cast<std::size_t>(m)) {
        IpfResult out{Eigen::MatrixXd::Zero(m, m), 0, true};
        for (const auto& c : cliques)
            for (Node a : c)
                for (Node b : c) out.cov(a, b) = s(a, b);
        return out;
    }

    std::vector<Eigen::MatrixXd> target_precision;
    for (const auto& c : cliques) target_precision.push_back(spd_inverse(block(s, c), "clique marginal"));

    Eigen::MatrixXd k = s.diagonal().cwiseInverse().asDiagonal();
    IpfResult out;
    for (out.iterations = 1; out.iterations <= cfg.max_ipf; ++out.iterations) {
        Eigen::MatrixXd previous = k;
        for (std::size_t i = 0; i < cliques.size(); ++i) {
            const NodeSet& c = cliques[i];
            Eigen::MatrixXd fitted = block(spd_inverse(k, "ipf iterate"), c);
            Eigen::MatrixXd delta = target_precision[i] - spd_inverse(fitted, "fitted clique marginal");
            for (std::size_t a = 0; a < c.size(); ++a)
                for (std::size_t b = 0; b < c.size(); ++b) k(c[a], c[b]) += delta(a, b);
        }
        if ((k - previous).norm() <= cfg.tol * std::max(1.0, k.norm())) {
            out.converged = true;
            break;
        }
    }
    out.iterations = std::min(out.iterations, cfg.max_ipf);
    out.cov = spd_inverse(k, "ipf estimate");
    return out;
}

}  // namespace ampcg
