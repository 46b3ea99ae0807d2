#pragma once

#include "ampcg/graph.hpp"
#include "ampcg/sem.hpp"

#include <Eigen/Dense>

#include <cstddef>

namespace ampcg {

/// Second-moment summary every estimator works from. `n == 0` marks an
/// exact population covariance; otherwise `cov` is the ML sample covariance.
struct Observations {
    Eigen::MatrixXd cov;
    std::size_t n = 0;

    bool population() const noexcept { return n == 0; }

    static Observations from_population(Eigen::MatrixXd cov);
    static Observations from_dataset(const Dataset& data);
};

enum class Estimator {
    /// GLS and IPF alternated until the joint relative change drops below tol.
    Alternating,
    /// One OLS pass, IPF on its residuals, one GLS pass, IPF again.
    FeasibleGls,
};

struct FitConfig {
    std::size_t max_outer = 200;
    std::size_t max_ipf = 500;
    double tol = 1e-9;
    /// Initial weight of the equal-variance penalty; 0 fits the unconstrained model.
    double equal_variance_penalty = 0.0;
    /// Penalty multiplier applied after every penalty round.
    double penalty_schedule = 10.0;
    double penalty_cap = 1e6;
    Estimator estimator = Estimator::Alternating;
};

struct FitResult {
    SemParameters params;
    double loglik = 0.0;  // average per sample
    Eigen::VectorXd error_variances;
    std::size_t iterations = 0;
    bool converged = false;
    double dispersion = 0.0;
};

struct IpfResult {
    Eigen::MatrixXd cov;
    std::size_t iterations = 0;
    bool converged = false;
};

/// ML covariance of a Gaussian graphical model whose concentration matrix is
/// zero off `pattern` (an undirected graph over the rows of s).
IpfResult ipf(const Eigen::MatrixXd& s, const ChainGraph& pattern, const FitConfig& cfg = {});

/// Maximal cliques (including isolated nodes) of the undirected part of g.
std::vector<NodeSet> maximal_cliques(const ChainGraph& g);

struct ComponentFit {
    NodeSet nodes;
    NodeSet predictors;        // Pa(component), sorted
    Eigen::MatrixXd beta;      // |nodes| x |predictors|, zero where no edge
    Eigen::MatrixXd sigma;     // |nodes| x |nodes|
    std::size_t iterations = 0;
    bool converged = false;
};

/// Alternating GLS regression on the component's parents and IPF on the
/// residual covariance with the component's undirected pattern.
ComponentFit fit_component(const Observations& obs, const ChainGraph& g, const NodeSet& component,
                           const FitConfig& cfg = {});

/// Per-sample Gaussian log-likelihood of the SEM against the observed covariance.
double average_loglik(const SemParameters& params, const Eigen::MatrixXd& s);

/// ML fit of the SEM for g. With a positive equal_variance_penalty the
/// unconstrained fit is refined by penalty rounds that pull the log error
/// variances toward their mean.
FitResult fit(const Observations& obs, const ChainGraph& g, const FitConfig& cfg = {});

double dispersion(const FitResult& result);
/// max_j log v_j - min_j log v_j.
double dispersion(const Eigen::VectorXd& variances);

/// Free parameter count: edges plus one shared variance (equal-variance
/// model, when cfg.equal_variance_penalty > 0) or p variances.
std::size_t parameter_count(const ChainGraph& g, const FitConfig& cfg);

/// n_eff * loglik - (k / 2) log n_eff.
double penalized_score(const Observations& obs, const ChainGraph& g, const FitConfig& cfg, double n_eff);
double penalized_score(const FitResult& result, const FitConfig& cfg, double n_eff);

/// FitConfig with the equal-variance penalty switched on at its default start.
FitConfig equal_variance_config(FitConfig base = {});

}  // namespace ampcg
