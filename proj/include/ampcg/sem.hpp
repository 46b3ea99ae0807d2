#pragma once

#include "ampcg/graph.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace ampcg {

/// Linear SEM  X = beta X + N,  N ~ N(0, sigma).
/// beta(j, k) is the coefficient of parent X_k in the equation of X_j.
/// sigma is block-diagonal over chain components and its inverse is zero
/// between nodes of a component that share no undirected edge.
struct SemParameters {
    ChainGraph graph;
    Eigen::MatrixXd beta;
    Eigen::MatrixXd sigma;
};

struct GaussianDistribution {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

/// A Gaussian over a subset of the original nodes (the result of conditioning).
struct ConditionalGaussian {
    NodeSet nodes;
    GaussianDistribution dist;
};

struct Dataset {
    std::vector<std::string> labels;
    Eigen::MatrixXd values;  // n x p, column j binds to node j

    std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
};

/// Magnitude range for random coefficients; signs are drawn separately.
struct CoefficientRange {
    double low = 0.3;
    double high = 1.0;
};

/// Draws beta on parent positions and, per chain component, a diagonally
/// dominant concentration matrix with the component's undirected pattern;
/// sigma is its inverse.
SemParameters random_parameters(const ChainGraph& g, CoefficientRange range, std::uint64_t seed);

/// Throws StructureError when beta or the concentration pattern disagree with the graph.
void validate_parameters(const SemParameters& params, double tol = 1e-9);

/// N(0, (I - beta)^-1 sigma (I - beta)^-T).
GaussianDistribution implied_distribution(const SemParameters& params);

/// Rescales every error N_j to variance sigma2: sigma <- D sigma D, D = diag(sqrt(sigma2 / sigma_jj)).
SemParameters rescale_equal_variances(const SemParameters& params, double sigma2);

/// Distribution of X \ B given X_B = b_values.
ConditionalGaussian condition(const GaussianDistribution& dist, const NodeSet& b,
                              const Eigen::VectorXd& b_values);

/// n iid draws through the Cholesky factor of cov.
Dataset sample(const GaussianDistribution& dist, std::size_t n, std::uint64_t seed,
               std::vector<std::string> labels = {});

inline constexpr double kPopulationCiTolerance = 1e-8;

/// Partial correlation of j and k given L, from the precision of the {j,k} ∪ L submatrix.
double partial_correlation(const Eigen::MatrixXd& cov, Node j, Node k, const NodeSet& l);

/// True iff |partial correlation(j, k | L)| < tol.
bool gaussian_ci(const Eigen::MatrixXd& cov, Node j, Node k, const NodeSet& l,
                 double tol = kPopulationCiTolerance);

/// Maximum-likelihood covariance (divides by n) of centred data.
Eigen::MatrixXd empirical_covariance(const Dataset& data);

/// Singleton separations of the graph that the covariance fails to reproduce
/// (both directions: a separation without CI, or a CI without separation).
struct FaithfulnessReport {
    std::size_t markov_violations = 0;
    std::size_t faithfulness_violations = 0;
    bool ok() const { return markov_violations == 0 && faithfulness_violations == 0; }
};

FaithfulnessReport check_faithfulness(const ChainGraph& g, const Eigen::MatrixXd& cov,
                                      double tol = kPopulationCiTolerance);

/// random_parameters with detect-and-resample: draws with derived seeds until
/// the implied distribution is faithful to g (up to `max_attempts`).
SemParameters random_faithful_parameters(const ChainGraph& g, CoefficientRange range,
                                         std::uint64_t seed, std::size_t max_attempts = 20);

}  // namespace ampcg
