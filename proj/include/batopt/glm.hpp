#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/LU>

#include "batopt/core.hpp"

namespace batopt {

enum class GlmFamily { geometric, bernoulli, poisson };

inline std::string_view to_string(GlmFamily family)
{
    switch (family) {
    case GlmFamily::geometric: return "geometric";
    case GlmFamily::bernoulli: return "bernoulli";
    case GlmFamily::poisson: return "poisson";
    }
    return "unknown";
}

inline GlmFamily glm_family_from(std::string_view name)
{
    if (name == "geometric") return GlmFamily::geometric;
    if (name == "bernoulli" || name == "logistic") return GlmFamily::bernoulli;
    if (name == "poisson") return GlmFamily::poisson;
    throw parameter_error("unknown GLM family '" + std::string(name) + "'");
}

/// Design matrix (leading column of ones) and response.
struct GlmDataset
{
    Matrix X;
    Vector y;

    Eigen::Index rows() const noexcept { return X.rows(); }
    Eigen::Index cols() const noexcept { return X.cols(); }

    void validate(GlmFamily family) const
    {
        require_dim(y.size(), X.rows(), "GlmDataset response");
        if (X.rows() < X.cols()) throw parameter_error("GlmDataset: fewer rows than coefficients");
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            if (!(y[i] >= 0.0) || y[i] != std::floor(y[i])) {
                throw parameter_error("GlmDataset: response " + std::to_string(i) +
                                      " is not a non-negative integer");
            }
            if (family == GlmFamily::bernoulli && y[i] > 1.0) {
                throw parameter_error("GlmDataset: Bernoulli response " + std::to_string(i) +
                                      " is not 0 or 1");
            }
        }
    }
};

class singular_information : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class divergence_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

/// log(1 + e^u) without overflow.
inline double softplus(double u)
{
    return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

inline double logistic(double u)
{
    if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
    const double e = std::exp(u);
    return e / (1.0 + e);
}

} // namespace detail

/// Geometric counts with pi_i = 1/(1 + exp(x'beta)):
/// -sum{ y log[e^u/(1+e^u)] - log[1+e^u] } = sum{ (y+1) softplus(u) - y u }.
inline double geometric_negloglik(const Vector& beta, const GlmDataset& data)
{
    require_dim(beta.size(), data.cols(), "geometric_negloglik");
    if (!beta.allFinite()) return infeasible;
    const Vector eta = data.X * beta;
    double nll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        nll += (data.y[i] + 1.0) * detail::softplus(eta[i]) - data.y[i] * eta[i];
    }
    return nll;
}

/// Logistic regression, -sum{ z u - log(1 + e^u) }.
inline double bernoulli_negloglik(const Vector& beta, const GlmDataset& data)
{
    require_dim(beta.size(), data.cols(), "bernoulli_negloglik");
    for (Eigen::Index i = 0; i < data.y.size(); ++i) {
        if (data.y[i] != 0.0 && data.y[i] != 1.0) {
            throw parameter_error("bernoulli_negloglik: response " + std::to_string(i) + " is not 0 or 1");
        }
    }
    if (!beta.allFinite()) return infeasible;
    const Vector eta = data.X * beta;
    double nll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) nll += detail::softplus(eta[i]) - data.y[i] * eta[i];
    return nll;
}

/// Poisson log link, -sum{ y u - e^u - log(y!) }.
inline double poisson_negloglik(const Vector& beta, const GlmDataset& data)
{
    require_dim(beta.size(), data.cols(), "poisson_negloglik");
    if (!beta.allFinite()) return infeasible;
    const Vector eta = data.X * beta;
    double nll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        nll += std::exp(eta[i]) - data.y[i] * eta[i] + std::lgamma(data.y[i] + 1.0);
    }
    return std::isfinite(nll) ? nll : infeasible;
}

inline double glm_negloglik(const Vector& beta, const GlmDataset& data, GlmFamily family)
{
    switch (family) {
    case GlmFamily::geometric: return geometric_negloglik(beta, data);
    case GlmFamily::bernoulli: return bernoulli_negloglik(beta, data);
    case GlmFamily::poisson: return poisson_negloglik(beta, data);
    }
    return infeasible;
}

/// Analytic gradient of the negative log-likelihood.
inline Vector glm_gradient(const Vector& beta, const GlmDataset& data, GlmFamily family)
{
    require_dim(beta.size(), data.cols(), "glm_gradient");
    const Vector eta = data.X * beta;
    Vector d(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        switch (family) {
        case GlmFamily::geometric: d[i] = (data.y[i] + 1.0) * detail::logistic(eta[i]) - data.y[i]; break;
        case GlmFamily::bernoulli: d[i] = detail::logistic(eta[i]) - data.y[i]; break;
        case GlmFamily::poisson: d[i] = std::exp(eta[i]) - data.y[i]; break;
        }
    }
    return data.X.transpose() * d;
}

/// Fisher weights: 1 - pi (geometric), pi (1 - pi) (Bernoulli), lambda (Poisson).
inline Vector glm_weights(const Vector& beta, const GlmDataset& data, GlmFamily family)
{
    const Vector eta = data.X * beta;
    Vector w(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        switch (family) {
        case GlmFamily::geometric: w[i] = detail::logistic(eta[i]); break;
        case GlmFamily::bernoulli: {
            const double p = detail::logistic(eta[i]);
            w[i] = p * (1.0 - p);
            break;
        }
        case GlmFamily::poisson: w[i] = std::exp(eta[i]); break;
        }
    }
    return w;
}

inline Matrix glm_information(const Vector& beta, const GlmDataset& data, GlmFamily family)
{
    require_dim(beta.size(), data.cols(), "glm_information");
    const Vector w = glm_weights(beta, data, family);
    return data.X.transpose() * w.asDiagonal() * data.X;
}

/// Inverse of a symmetric positive definite matrix; throws on rank deficiency.
inline Matrix invert_information(const Matrix& info)
{
    Eigen::LDLT<Matrix> ldlt(info);
    const double scale = info.diagonal().cwiseAbs().maxCoeff();
    const auto& D = ldlt.vectorD();
    if (ldlt.info() != Eigen::Success || !(scale > 0.0) || !(D.minCoeff() > 1e-12 * scale)) {
        int rank = 0;
        for (Eigen::Index i = 0; i < D.size(); ++i) rank += D[i] > 1e-12 * scale ? 1 : 0;
        throw singular_information("information matrix is rank deficient (numerical rank " +
                                   std::to_string(rank) + " of " + std::to_string(info.rows()) + ")");
    }
    Matrix cov = ldlt.solve(Matrix::Identity(info.rows(), info.cols()));
    return (cov + cov.transpose()) / 2.0;
}

/// (X' W X)^{-1} at beta_hat.
inline Matrix glm_covariance(const Vector& beta_hat, const GlmDataset& data, GlmFamily family)
{
    if (!beta_hat.allFinite()) throw parameter_error("glm_covariance: non-finite coefficients");
    return invert_information(glm_information(beta_hat, data, family));
}

inline Objective glm_objective(GlmDataset data, GlmFamily family, SearchSpace space)
{
    data.validate(family);
    require_dim(space.dim(), data.cols(), "glm_objective");
    return Objective{std::move(space),
                     [data = std::move(data), family](const Vector& beta) {
                         return glm_negloglik(beta, data, family);
                     },
                     std::string("glm-") + std::string(to_string(family))};
}

struct IrlsFit
{
    Vector coef;
    Matrix covariance;
    double nll = infeasible;
    int iterations = 0;
};

/// Fisher scoring to |delta|_inf < tol with step halving on NLL increase.
inline IrlsFit irls_fit(const GlmDataset& data, GlmFamily family, double tol = 1e-10, int max_iter = 100)
{
    data.validate(family);
    Vector beta = Vector::Zero(data.cols());
    const double mean_y = data.y.mean();
    const bool has_intercept = (data.X.col(0).array() == 1.0).all();
    if (has_intercept && mean_y > 0.0) {
        if (family == GlmFamily::bernoulli) {
            if (mean_y < 1.0) beta[0] = std::log(mean_y / (1.0 - mean_y));
        } else {
            beta[0] = std::log(mean_y);
        }
    }
    double nll = glm_negloglik(beta, data, family);
    for (int it = 1; it <= max_iter; ++it) {
        const Matrix info = glm_information(beta, data, family);
        const Vector score = -glm_gradient(beta, data, family);
        Eigen::LDLT<Matrix> ldlt(info);
        Vector step = ldlt.solve(score);
        if (ldlt.info() != Eigen::Success || !step.allFinite()) {
            throw divergence_error("IRLS: information matrix became singular");
        }
        Vector next = beta + step;
        double next_nll = glm_negloglik(next, data, family);
        for (int halving = 0; halving < 30 && !(next_nll <= nll + 1e-12 * std::abs(nll)); ++halving) {
            step /= 2.0;
            next = beta + step;
            next_nll = glm_negloglik(next, data, family);
        }
        beta = next;
        nll = next_nll;
        if (step.cwiseAbs().maxCoeff() < tol) {
            return {beta, glm_covariance(beta, data, family), nll, it};
        }
    }
    throw divergence_error("IRLS did not converge in " + std::to_string(max_iter) +
                           " iterations (separable or degenerate data?)");
}

/// Draws a GLM dataset: intercept plus k-1 standard normal covariates.
inline GlmDataset synthetic_glm(GlmFamily family, Eigen::Index n, const Vector& beta_true, RngStream rng)
{
    const Eigen::Index k = beta_true.size();
    GlmDataset data{Matrix(n, k), Vector(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        data.X(i, 0) = 1.0;
        for (Eigen::Index j = 1; j < k; ++j) data.X(i, j) = rng.normal();
        const double eta = data.X.row(i).dot(beta_true);
        switch (family) {
        case GlmFamily::geometric: {
            // failures before the first success with success probability 1/(1+e^eta)
            const double p = 1.0 / (1.0 + std::exp(eta));
            data.y[i] = std::floor(std::log1p(-rng.uniform()) / std::log1p(-p));
            break;
        }
        case GlmFamily::bernoulli: data.y[i] = rng.uniform() < detail::logistic(eta) ? 1.0 : 0.0; break;
        case GlmFamily::poisson:
            data.y[i] = static_cast<double>(std::poisson_distribution<long>(std::exp(eta))(rng));
            break;
        }
    }
    return data;
}

} // namespace batopt
