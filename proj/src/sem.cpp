#include "ampcg/sem.hpp"

#include "ampcg/errors.hpp"
#include "ampcg/separation.hpp"

#include <cmath>
#include <random>

namespace ampcg {

namespace {

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, const NodeSet& rows, const NodeSet& cols) {
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
    return out;
}

}  // namespace

SemParameters random_parameters(const ChainGraph& g, CoefficientRange range, std::uint64_t seed) {
    require_chain_graph(g);
    if (!(range.low > 0.0) || !(range.high > range.low))
        throw InputError("coefficient range must satisfy 0 < low < high");

    const auto p = static_cast<Eigen::Index>(g.size());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> magnitude(range.low, range.high);
    std::bernoulli_distribution negative(0.5);
    std::uniform_real_distribution<double> slack(0.5, 1.5);
    auto draw = [&] { return negative(rng) ? -magnitude(rng) : magnitude(rng); };

    SemParameters params{g, Eigen::MatrixXd::Zero(p, p), Eigen::MatrixXd::Zero(p, p)};
    for (auto [from, to] : g.directed_edges()) params.beta(to, from) = draw();

    for (const NodeSet& block : chain_components(g)) {
        const auto m = static_cast<Eigen::Index>(block.size());
        Eigen::MatrixXd k = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index a = 0; a < m; ++a)
            for (Eigen::Index b = a + 1; b < m; ++b)
                if (g.has_undirected(block[a], block[b])) k(a, b) = k(b, a) = draw();
        // Strict diagonal dominance makes k positive definite.
        for (Eigen::Index a = 0; a < m; ++a) k(a, a) = k.row(a).cwiseAbs().sum() + slack(rng);
        Eigen::MatrixXd s = k.inverse();
        for (Eigen::Index a = 0; a < m; ++a)
            for (Eigen::Index b = 0; b < m; ++b) params.sigma(block[a], block[b]) = 0.5 * (s(a, b) + s(b, a));
    }
    return params;
}

void validate_parameters(const SemParameters& params, double tol) {
    const ChainGraph& g = params.graph;
    const auto p = static_cast<Eigen::Index>(g.size());
    if (params.beta.rows() != p || params.beta.cols() != p || params.sigma.rows() != p || params.sigma.cols() != p)
        throw InputError("parameter matrices must be " + std::to_string(p) + " x " + std::to_string(p));
    for (Node j = 0; j < g.size(); ++j)
        for (Node k = 0; k < g.size(); ++k)
            if (params.beta(j, k) != 0.0 && !g.has_directed(k, j))
                throw StructureError("beta(" + g.label(j) + ", " + g.label(k) + ") is nonzero without an edge");
    if (!params.sigma.isApprox(params.sigma.transpose(), 1e-12))
        throw StructureError("error covariance is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(params.sigma);
    if (llt.info() != Eigen::Success) throw NumericError("error covariance is not positive definite");
    Eigen::MatrixXd k = llt.solve(Eigen::MatrixXd::Identity(p, p));
    for (Node j = 0; j < g.size(); ++j)
        for (Node l = j + 1; l < g.size(); ++l)
            if (!g.has_undirected(j, l) && std::abs(k(j, l)) > tol * std::sqrt(k(j, j) * k(l, l)))
                throw StructureError("concentration entry (" + g.label(j) + ", " + g.label(l) +
                                     ") is nonzero without an undirected edge");
}

GaussianDistribution implied_distribution(const SemParameters& params) {
    const auto p = params.beta.rows();
    Eigen::MatrixXd i_minus_beta = Eigen::MatrixXd::Identity(p, p) - params.beta;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(i_minus_beta);
    if (!lu.isInvertible()) throw StructureError("I - beta is singular");
    Eigen::MatrixXd a = lu.inverse();
    Eigen::MatrixXd cov = a * params.sigma * a.transpose();
    cov = 0.5 * (cov + cov.transpose());
    return {Eigen::VectorXd::Zero(p), std::move(cov)};
}

SemParameters rescale_equal_variances(const SemParameters& params, double sigma2) {
    if (!(sigma2 > 0.0)) throw InputError("sigma2 must be positive");
    SemParameters out = params;
    const auto p = params.sigma.rows();
    Eigen::VectorXd d(p);
    for (Eigen::Index j = 0; j < p; ++j) d(j) = std::sqrt(sigma2 / params.sigma(j, j));
    out.sigma = d.asDiagonal() * params.sigma * d.asDiagonal();
    // Pin the diagonal: d_j^2 * sigma_jj may differ from sigma2 in the last bit.
    for (Eigen::Index j = 0; j < p; ++j) out.sigma(j, j) = sigma2;
    return out;
}

ConditionalGaussian condition(const GaussianDistribution& dist, const NodeSet& b,
                              const Eigen::VectorXd& b_values) {
    const auto p = static_cast<std::size_t>(dist.cov.rows());
    std::vector<bool> in_b(p, false);
    for (Node v : b) {
        if (v >= p) throw InputError("node index " + std::to_string(v) + " out of range");
        in_b[v] = true;
    }
    NodeSet a, bs;
    for (Node v = 0; v < p; ++v) (in_b[v] ? bs : a).push_back(v);
    if (a.empty() || bs.empty()) throw InputError("conditioning set must be a non-trivial partition side");
    if (static_cast<std::size_t>(b_values.size()) != bs.size())
        throw InputError("expected " + std::to_string(bs.size()) + " conditioning values");

    Eigen::MatrixXd s_aa = submatrix(dist.cov, a, a);
    Eigen::MatrixXd s_ab = submatrix(dist.cov, a, bs);
    Eigen::MatrixXd s_bb = submatrix(dist.cov, bs, bs);
    Eigen::LLT<Eigen::MatrixXd> llt(s_bb);
    if (llt.info() != Eigen::Success) throw NumericError("conditioning block is not positive definite");

    Eigen::VectorXd mu_a(a.size()), mu_b(bs.size());
    for (std::size_t i = 0; i < a.size(); ++i) mu_a(i) = dist.mean.size() ? dist.mean(a[i]) : 0.0;
    for (std::size_t i = 0; i < bs.size(); ++i) mu_b(i) = dist.mean.size() ? dist.mean(bs[i]) : 0.0;

    ConditionalGaussian out;
    out.nodes = a;
    out.dist.mean = mu_a + s_ab * llt.solve(b_values - mu_b);
    out.dist.cov = s_aa - s_ab * llt.solve(s_ab.transpose());
    out.dist.cov = 0.5 * (out.dist.cov + out.dist.cov.transpose());
    return out;
}

Dataset sample(const GaussianDistribution& dist, std::size_t n, std::uint64_t seed,
               std::vector<std::string> labels) {
    if (n == 0) throw InputError("sample size must be at least 1");
    const auto p = dist.cov.rows();
    Eigen::LLT<Eigen::MatrixXd> llt(dist.cov);
    if (llt.info() != Eigen::Success) throw NumericError("covariance is not positive definite; cannot factor");
    Eigen::MatrixXd lower = llt.matrixL();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd z(static_cast<Eigen::Index>(n), p);
    for (Eigen::Index i = 0; i < z.rows(); ++i)
        for (Eigen::Index j = 0; j < p; ++j) z(i, j) = normal(rng);

    Dataset data;
    data.labels = labels.empty() ? default_labels(static_cast<std::size_t>(p)) : std::move(labels);
    data.values = z * lower.transpose();
    if (dist.mean.size() == p) data.values.rowwise() += dist.mean.transpose();
    return data;
}

double partial_correlation(const Eigen::MatrixXd& cov, Node j, Node k, const NodeSet& l) {
    if (j == k) throw InputError("partial correlation needs two distinct nodes");
    NodeSet idx{j, k};
    for (Node v : l) {
        if (v == j || v == k) throw InputError("conditioning set overlaps the query pair");
        idx.push_back(v);
    }
    const auto p = static_cast<std::size_t>(cov.rows());
    for (Node v : idx)
        if (v >= p) throw InputError("node index " + std::to_string(v) + " out of range");

    Eigen::MatrixXd sub = submatrix(cov, idx, idx);
    Eigen::LLT<Eigen::MatrixXd> llt(sub);
    if (llt.info() != Eigen::Success) throw NumericError("covariance submatrix is singular");
    Eigen::MatrixXd precision = llt.solve(Eigen::MatrixXd::Identity(sub.rows(), sub.cols()));
    return -precision(0, 1) / std::sqrt(precision(0, 0) * precision(1, 1));
}

bool gaussian_ci(const Eigen::MatrixXd& cov, Node j, Node k, const NodeSet& l, double tol) {
    return std::abs(partial_correlation(cov, j, k, l)) < tol;
}

Eigen::MatrixXd empirical_covariance(const Dataset& data) {
    if (data.rows() == 0) throw InputError("dataset is empty");
    if (!data.values.allFinite()) throw InputError("dataset contains non-finite entries");
    Eigen::MatrixXd centred = data.values.rowwise() - data.values.colwise().mean();
    Eigen::MatrixXd s = centred.transpose() * centred / static_cast<double>(data.rows());
    return 0.5 * (s + s.transpose());
}

FaithfulnessReport check_faithfulness(const ChainGraph& g, const Eigen::MatrixXd& cov, double tol) {
    const std::size_t p = g.size();
    FaithfulnessReport report;
    for (Node j = 0; j < p; ++j) {
        for (Node k = j + 1; k < p; ++k) {
            std::uint64_t rest = 0;
            for (Node v = 0; v < p; ++v)
                if (v != j && v != k) rest |= std::uint64_t{1} << v;
            for (std::uint64_t c = rest;; c = (c - 1) & rest) {
                NodeSet cond = mask_to_set(c);
                bool sep = separated(g, {{j}, {k}, cond});
                bool ci = gaussian_ci(cov, j, k, cond, tol);
                if (sep && !ci) ++report.markov_violations;
                if (!sep && ci) ++report.faithfulness_violations;
                if (c == 0) break;
            }
        }
    }
    return report;
}

SemParameters random_faithful_parameters(const ChainGraph& g, CoefficientRange range, std::uint64_t seed,
                                         std::size_t max_attempts) {
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
        // Derived seeds keep attempt 0 identical to random_parameters(g, range, seed).
        SemParameters params = random_parameters(g, range, seed + attempt * 0x9E3779B97F4A7C15ull);
        if (check_faithfulness(g, implied_distribution(params).cov).ok()) return params;
    }
    throw NumericError("no faithful parameter draw after " + std::to_string(max_attempts) + " attempts");
}

}  // namespace ampcg
