#include "constrained_fit.hpp"

#include "ampcg/errors.hpp"

#include <cmath>
#include <limits>

namespace ampcg::detail {

namespace {

class PenalizedObjective {
public:
    PenalizedObjective(const Eigen::MatrixXd& s, const ChainGraph& g)
        : m_s(s), m_directed(g.directed_edges()), m_undirected(g.undirected_edges()),
          m_p(static_cast<Eigen::Index>(g.size())) {}

    Eigen::Index size() const {
        return static_cast<Eigen::Index>(m_directed.size() + m_undirected.size()) + m_p;
    }

    void set_lambda(double lambda) { m_lambda = lambda; }

    Eigen::VectorXd pack(const Eigen::MatrixXd& beta, const Eigen::MatrixXd& k) const {
        Eigen::VectorXd theta(size());
        Eigen::Index i = 0;
        for (auto [from, to] : m_directed) theta(i++) = beta(to, from);
        for (Eigen::Index j = 0; j < m_p; ++j) theta(i++) = k(j, j);
        for (auto [a, b] : m_undirected) theta(i++) = k(a, b);
        return theta;
    }

    void unpack(const Eigen::VectorXd& theta, Eigen::MatrixXd& beta, Eigen::MatrixXd& k) const {
        beta.setZero(m_p, m_p);
        k.setZero(m_p, m_p);
        Eigen::Index i = 0;
        for (auto [from, to] : m_directed) beta(to, from) = theta(i++);
        for (Eigen::Index j = 0; j < m_p; ++j) k(j, j) = theta(i++);
        for (auto [a, b] : m_undirected) k(a, b) = k(b, a) = theta(i++);
    }

    /// Objective value; +inf outside the positive-definite cone.
    double operator()(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
        Eigen::MatrixXd beta, k;
        unpack(theta, beta, k);
        Eigen::LLT<Eigen::MatrixXd> llt(k);
        if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
        const double logdet_k = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
        Eigen::MatrixXd sigma = llt.solve(Eigen::MatrixXd::Identity(m_p, m_p));
        sigma = 0.5 * (sigma + sigma.transpose());

        const Eigen::MatrixXd lift = Eigen::MatrixXd::Identity(m_p, m_p) - beta;
        const Eigen::MatrixXd residual = lift * m_s * lift.transpose();
        const double loglik = 0.5 * (logdet_k - (k * residual).trace());

        const Eigen::ArrayXd logs = sigma.diagonal().array().log();
        const Eigen::ArrayXd centred = logs - logs.mean();
        const double penalty = m_lambda * centred.square().sum();

        // d(-loglik)/dK and d(penalty)/dK as symmetric matrices.
        Eigen::MatrixXd dk = -0.5 * (sigma - residual);
        const Eigen::VectorXd weight = (2.0 * m_lambda * centred / sigma.diagonal().array()).matrix();
        dk -= sigma * weight.asDiagonal() * sigma;
        const Eigen::MatrixXd dbeta = -(k * lift * m_s);

        grad.resize(size());
        Eigen::Index i = 0;
        for (auto [from, to] : m_directed) grad(i++) = dbeta(to, from);
        for (Eigen::Index j = 0; j < m_p; ++j) grad(i++) = dk(j, j);
        for (auto [a, b] : m_undirected) grad(i++) = 2.0 * dk(a, b);
        return -loglik + penalty;
    }

private:
    const Eigen::MatrixXd& m_s;
    std::vector<std::pair<Node, Node>> m_directed;
    std::vector<std::pair<Node, Node>> m_undirected;
    Eigen::Index m_p;
    double m_lambda = 0.0;
};

struct MinimizeOutcome {
    std::size_t iterations = 0;
    bool converged = false;
};

// BFGS on the inverse Hessian with Armijo backtracking; infeasible trial
// points (value +inf) shrink the step like any other rejection.
MinimizeOutcome bfgs(const PenalizedObjective& f, Eigen::VectorXd& x, std::size_t max_iter, double gtol) {
    const Eigen::Index n = x.size();
    Eigen::VectorXd g(n), g_new(n);
    double fx = f(x, g);
    if (!std::isfinite(fx)) throw NumericError("constrained fit started outside the feasible region");
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);

    MinimizeOutcome out;
    for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
        if (g.lpNorm<Eigen::Infinity>() < gtol) {
            out.converged = true;
            break;
        }
        Eigen::VectorXd dir = -h * g;
        double slope = g.dot(dir);
        if (!(slope < 0.0)) {
            h.setIdentity();
            dir = -g;
            slope = -g.squaredNorm();
        }
        double step = 1.0, f_new = 0.0;
        Eigen::VectorXd x_new;
        bool accepted = false;
        for (int tries = 0; tries < 80; ++tries, step *= 0.5) {
            x_new = x + step * dir;
            f_new = f(x_new, g_new);
            if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // No descent left at machine precision.
            out.converged = true;
            break;
        }
        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (out.iterations == 0 && sy > 0.0) h *= sy / y.squaredNorm();
        if (sy > 1e-14 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(n, n) - rho * s * y.transpose();
            h = left * h * left.transpose() + rho * s * s.transpose();
        }
        const double decrease = fx - f_new;
        x = std::move(x_new);
        g = g_new;
        fx = f_new;
        if (decrease <= 1e-16 * std::max(1.0, std::abs(fx)) && g.lpNorm<Eigen::Infinity>() < 1e3 * gtol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

}  // namespace

FitResult refine_equal_variances(const Observations& obs, FitResult start, const FitConfig& cfg) {
    const ChainGraph& g = start.params.graph;
    PenalizedObjective objective(obs.cov, g);
    const auto p = static_cast<Eigen::Index>(g.size());

    Eigen::LLT<Eigen::MatrixXd> llt(start.params.sigma);
    if (llt.info() != Eigen::Success) throw NumericError("unconstrained error covariance is not positive definite");
    Eigen::VectorXd theta = objective.pack(start.params.beta, llt.solve(Eigen::MatrixXd::Identity(p, p)));

    bool converged = start.converged;
    std::size_t iterations = start.iterations;
    const double schedule = std::max(cfg.penalty_schedule, 1.0 + 1e-12);
    for (double lambda = cfg.equal_variance_penalty;; lambda = std::min(lambda * schedule, cfg.penalty_cap)) {
        objective.set_lambda(lambda);
        MinimizeOutcome round = bfgs(objective, theta, 20 * cfg.max_outer, 1e-10 * std::max(1.0, lambda));
        iterations += round.iterations;
        converged = converged && round.converged;
        if (lambda >= cfg.penalty_cap) break;
    }

    Eigen::MatrixXd beta, k;
    objective.unpack(theta, beta, k);
    Eigen::MatrixXd sigma = k.llt().solve(Eigen::MatrixXd::Identity(p, p));
    start.params.beta = beta;
    start.params.sigma = 0.5 * (sigma + sigma.transpose());
    start.iterations = iterations;
    start.converged = converged;
    return start;
}

}  // namespace ampcg::detail
