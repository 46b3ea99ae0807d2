#include "ampcg/estimation.hpp"

#include "ampcg/errors.hpp"
#include "constrained_fit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ampcg {

Observations Observations::from_population(Eigen::MatrixXd cov) {
    if (cov.rows() != cov.cols() || cov.rows() == 0) throw InputError("covariance must be square and non-empty");
    return {std::move(cov), 0};
}

Observations Observations::from_dataset(const Dataset& data) { return {empirical_covariance(data), data.rows()}; }

namespace {

Eigen::MatrixXd take(const Eigen::MatrixXd& m, const NodeSet& rows, const NodeSet& cols) {
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
    return out;
}

double relative_change(const Eigen::MatrixXd& now, const Eigen::MatrixXd& before) {
    if (now.size() == 0) return 0.0;
    return (now - before).norm() / std::max(1.0, before.norm());
}

}  // namespace

ComponentFit fit_component(const Observations& obs, const ChainGraph& g, const NodeSet& component,
                           const FitConfig& cfg) {
    if (component.empty()) throw InputError("empty component");
    const NodeSet predictors = relatives(g, component, Relation::Parents);
    for (Node v : predictors)
        if (std::binary_search(component.begin(), component.end(), v))
            throw InputError("component is not a chain component (contains a directed edge)");
    if (!obs.population() && obs.n <= predictors.size())
        throw RankError("component has " + std::to_string(predictors.size()) + " predictors but only " +
                        std::to_string(obs.n) + " samples");

    const std::size_t m = component.size(), q = predictors.size();
    const Eigen::MatrixXd& s = obs.cov;

    // Position of each equation's regressors inside `predictors`.
    std::vector<std::vector<std::size_t>> regressors(m);
    std::vector<std::size_t> offset(m + 1, 0);
    for (std::size_t i = 0; i < m; ++i) {
        for (Node u : g.parents(component[i]))
            regressors[i].push_back(static_cast<std::size_t>(
                std::lower_bound(predictors.begin(), predictors.end(), u) - predictors.begin()));
        offset[i + 1] = offset[i] + regressors[i].size();
    }
    const std::size_t unknowns = offset[m];

    ChainGraph pattern(m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b)
            if (g.has_undirected(component[a], component[b])) pattern.add_undirected(a, b);

    NodeSet joint = component;
    joint.insert(joint.end(), predictors.begin(), predictors.end());
    const Eigen::MatrixXd s_joint = take(s, joint, joint);
    const auto mi = static_cast<Eigen::Index>(m), qi = static_cast<Eigen::Index>(q);
    const Eigen::MatrixXd s_pp = s_joint.bottomRightCorner(qi, qi);
    const Eigen::MatrixXd s_pc = s_joint.bottomLeftCorner(qi, mi);

    ComponentFit out{component, predictors, Eigen::MatrixXd::Zero(mi, qi), Eigen::MatrixXd::Identity(mi, mi)};
    const std::size_t rounds = cfg.estimator == Estimator::FeasibleGls ? 2 : cfg.max_outer;

    for (std::size_t round = 1; round <= rounds; ++round) {
        out.iterations = round;
        Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(mi, qi);
        if (unknowns > 0) {
            // GLS normal equations; round 1 uses identity weights (plain OLS).
            Eigen::MatrixXd w = Eigen::MatrixXd::Identity(mi, mi);
            if (round > 1) w = out.sigma.llt().solve(Eigen::MatrixXd::Identity(mi, mi));
            Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(unknowns, unknowns);
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknowns);
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t l = 0; l < m; ++l) {
                    const double wil = w(i, l);
                    if (wil == 0.0) continue;
                    for (std::size_t a = 0; a < regressors[i].size(); ++a) {
                        const auto ra = regressors[i][a];
                        for (std::size_t b = 0; b < regressors[l].size(); ++b)
                            lhs(offset[i] + a, offset[l] + b) += wil * s_pp(ra, regressors[l][b]);
                        rhs(offset[i] + a) += wil * s_pc(ra, l);
                    }
                }
            }
            Eigen::LDLT<Eigen::MatrixXd> ldlt(lhs);
            if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 0.0).all())
                throw NumericError("regression normal equations are singular");
            Eigen::VectorXd theta = ldlt.solve(rhs);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t a = 0; a < regressors[i].size(); ++a) beta(i, regressors[i][a]) = theta(offset[i] + a);
        }

        Eigen::MatrixXd lift(mi, mi + qi);
        lift << Eigen::MatrixXd::Identity(mi, mi), -beta;
        Eigen::MatrixXd residual = lift * s_joint * lift.transpose();
        residual = 0.5 * (residual + residual.transpose());
        IpfResult sigma = ipf(residual, pattern, cfg);

        const double change = relative_change(beta, out.beta) + relative_change(sigma.cov, out.sigma);
        out.beta = std::move(beta);
        out.sigma = std::move(sigma.cov);
        if (round > 1 && change < cfg.tol) {
            out.converged = sigma.converged;
            break;
        }
        if (round == rounds) out.converged = cfg.estimator == Estimator::FeasibleGls && sigma.converged;
    }
    return out;
}

double average_loglik(const SemParameters& params, const Eigen::MatrixXd& s) {
    const Eigen::MatrixXd model = implied_distribution(params).cov;
    Eigen::LLT<Eigen::MatrixXd> llt(model);
    if (llt.info() != Eigen::Success) throw NumericError("model covariance is not positive definite");
    const double p = static_cast<double>(model.rows());
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double trace = llt.solve(s).trace();
    return -0.5 * (p * std::log(2.0 * std::numbers::pi) + logdet + trace);
}

double dispersion(const Eigen::VectorXd& variances) {
    if (variances.size() == 0) return 0.0;
    const Eigen::ArrayXd logs = variances.array().log();
    return logs.maxCoeff() - logs.minCoeff();
}

double dispersion(const FitResult& result) { return dispersion(result.error_variances); }

FitResult fit(const Observations& obs, const ChainGraph& g, const FitConfig& cfg) {
    require_chain_graph(g);
    const auto p = static_cast<Eigen::Index>(g.size());
    if (obs.cov.rows() != p || obs.cov.cols() != p)
        throw InputError("covariance is " + std::to_string(obs.cov.rows()) + " x " + std::to_string(obs.cov.cols()) +
                         " but graph has " + std::to_string(p) + " nodes");

    FitResult result;
    result.params = {g, Eigen::MatrixXd::Zero(p, p), Eigen::MatrixXd::Zero(p, p)};
    result.converged = true;
    for (const NodeSet& component : chain_components(g)) {
        ComponentFit part = fit_component(obs, g, component, cfg);
        for (std::size_t i = 0; i < part.nodes.size(); ++i) {
            for (std::size_t a = 0; a < part.predictors.size(); ++a)
                result.params.beta(part.nodes[i], part.predictors[a]) = part.beta(i, a);
            for (std::size_t l = 0; l < part.nodes.size(); ++l)
                result.params.sigma(part.nodes[i], part.nodes[l]) = part.sigma(i, l);
        }
        result.iterations = std::max(result.iterations, part.iterations);
        result.converged = result.converged && part.converged;
    }

    if (cfg.equal_variance_penalty > 0.0) result = detail::refine_equal_variances(obs, std::move(result), cfg);

    result.loglik = average_loglik(result.params, obs.cov);
    result.error_variances = result.params.sigma.diagonal();
    result.dispersion = dispersion(result.error_variances);
    return result;
}

std::size_t parameter_count(const ChainGraph& g, const FitConfig& cfg) {
    const std::size_t variances = cfg.equal_variance_penalty > 0.0 ? 1 : g.size();
    return g.num_directed() + g.num_undirected() + variances;
}

double penalized_score(const FitResult& result, const FitConfig& cfg, double n_eff) {
    if (!(n_eff > 1.0)) throw InputError("effective sample size must exceed 1");
    const double k = static_cast<double>(parameter_count(result.params.graph, cfg));
    return n_eff * result.loglik - 0.5 * k * std::log(n_eff);
}

double penalized_score(const Observations& obs, const ChainGraph& g, const FitConfig& cfg, double n_eff) {
    return penalized_score(fit(obs, g, cfg), cfg, n_eff);
}

FitConfig equal_variance_config(FitConfig base) {
    if (!(base.equal_variance_penalty > 0.0)) base.equal_variance_penalty = 1.0;
    return base;
}

}  // namespace ampcg
