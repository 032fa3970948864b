#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "batopt/core.hpp"

namespace batopt {

/// Rows of (design vector, group size m, successes y). The design matrix
/// carries the intercept column explicitly.
struct GroupedBinomialDataset
{
    Matrix X;
    Vector m;
    Vector y;

    GroupedBinomialDataset() = default;

    GroupedBinomialDataset(Matrix design, Vector sizes, Vector successes)
        : X(std::move(design)), m(std::move(sizes)), y(std::move(successes))
    {
        validate();
    }

    Eigen::Index rows() const noexcept { return X.rows(); }
    Eigen::Index cols() const noexcept { return X.cols(); }

    void validate() const
    {
        require_dim(m.size(), X.rows(), "GroupedBinomialDataset group sizes");
        require_dim(y.size(), X.rows(), "GroupedBinomialDataset successes");
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            const bool integral = m[i] == std::floor(m[i]) && y[i] == std::floor(y[i]);
            if (!integral || m[i] < 1 || y[i] < 0 || y[i] > m[i]) {
                throw parameter_error("GroupedBinomialDataset: row " + std::to_string(i) +
                                      " needs integers 0 <= y <= m with m >= 1");
            }
        }
    }
};

/// One covariate with an intercept: rows (x, m, y).
inline GroupedBinomialDataset grouped_one_covariate(const std::vector<std::array<double, 3>>& rows)
{
    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix X(n, 2);
    Vector m(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = rows[static_cast<std::size_t>(i)][0];
        m[i] = rows[static_cast<std::size_t>(i)][1];
        y[i] = rows[static_cast<std::size_t>(i)][2];
    }
    return {std::move(X), std::move(m), std::move(y)};
}

// Three one-covariate log-binomial datasets whose constrained MLE lies on
// the boundary, at infinity, and in the interior of the admissible set.
inline GroupedBinomialDataset williamson_boundary()
{
    return grouped_one_covariate({{{-1, 18, 10}}, {{0, 27, 18}}, {{1, 5, 5}}});
}

inline GroupedBinomialDataset williamson_infinity()
{
    return grouped_one_covariate({{{-1, 17, 0}}, {{0, 21, 0}}, {{1, 12, 0}}});
}

inline GroupedBinomialDataset williamson_interior()
{
    return grouped_one_covariate({{{-1, 4, 2}}, {{0, 17, 14}}, {{1, 19, 2}}});
}

inline constexpr double default_penalty_weight = 1e4;

namespace detail {

// -[y u + (m - y) log(1 - e^u)] for u <= 0.
inline double grouped_row_nll(double u, double m, double y)
{
    const double failures = m - y;
    if (failures == 0.0) return -y * u;
    if (u >= 0.0) return infeasible;
    return -(y * u + failures * std::log(-std::expm1(u)));
}

} // namespace detail

/// Negative log-likelihood of the log-link binomial model plus a quadratic
/// hinge penalty on inadmissible linear predictors. Rows with u > 0 are
/// evaluated at u = 0; rows that cannot reach u = 0 (y < m) are infeasible.
inline double logbinomial_penalized_nll(const Vector& beta, const GroupedBinomialDataset& data,
                                        double penalty_weight = default_penalty_weight)
{
    require_dim(beta.size(), data.cols(), "logbinomial_penalized_nll");
    if (!(penalty_weight > 0.0)) {
        throw parameter_error("logbinomial_penalized_nll: penalty weight must be positive");
    }
    if (!beta.allFinite()) return infeasible;
    double nll = 0.0;
    double violation = 0.0;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        const double u = data.X.row(i).dot(beta);
        if (u > 0.0) violation += u * u;
        nll += detail::grouped_row_nll(std::min(u, 0.0), data.m[i], data.y[i]);
        if (nll == infeasible) return infeasible;
    }
    return nll + penalty_weight * violation;
}

/// Relative-risk regression p = exp(x'alpha) on grouped outcomes; same core
/// as the penalized log-binomial objective.
inline double relative_risk_negloglik(const Vector& alpha, const GroupedBinomialDataset& data,
                                      double penalty_weight = default_penalty_weight)
{
    return logbinomial_penalized_nll(alpha, data, penalty_weight);
}

/// Gradient of the unpenalized NLL; valid where every x'alpha < 0.
inline Vector relative_risk_gradient(const Vector& alpha, const GroupedBinomialDataset& data)
{
    require_dim(alpha.size(), data.cols(), "relative_risk_gradient");
    Vector grad = Vector::Zero(alpha.size());
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        const double u = data.X.row(i).dot(alpha);
        const double p = std::exp(u);
        // d/du of -(y u + (m-y) log(1-e^u)) = -y + (m-y) p/(1-p)
        const double d = -data.y[i] + (data.m[i] - data.y[i]) * p / -std::expm1(u);
        grad += d * data.X.row(i).transpose();
    }
    return grad;
}

/// Observed information of the unpenalized NLL; rows with y = m add nothing.
inline Matrix relative_risk_information(const Vector& alpha, const GroupedBinomialDataset& data)
{
    Matrix info = Matrix::Zero(alpha.size(), alpha.size());
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        const double failures = data.m[i] - data.y[i];
        if (failures == 0.0) continue;
        const double u = std::min(data.X.row(i).dot(alpha), 0.0);
        const double q = -std::expm1(u);
        const double w = failures * std::exp(u) / (q * q);
        info += w * data.X.row(i).transpose() * data.X.row(i);
    }
    return info;
}

/// Largest linear predictor over the data; admissible iff <= 0.
inline double max_linear_predictor(const Vector& beta, const GroupedBinomialDataset& data)
{
    return (data.X * beta).maxCoeff();
}

/// Shifts the intercept down so that every x'beta <= 0. Requires a leading
/// column of ones; returns beta unchanged otherwise.
inline Vector make_admissible(Vector beta, const GroupedBinomialDataset& data)
{
    const double worst = max_linear_predictor(beta, data);
    if (worst > 0.0 && (data.X.col(0).array() == 1.0).all()) beta[0] -= worst;
    return beta;
}

inline Objective logbinomial_objective(GroupedBinomialDataset data, SearchSpace space,
                                       double penalty_weight = default_penalty_weight,
                                       std::string name = "logbinomial")
{
    require_dim(space.dim(), data.cols(), "logbinomial_objective");
    return Objective{std::move(space),
                     [data = std::move(data), penalty_weight](const Vector& beta) {
                         return logbinomial_penalized_nll(beta, data, penalty_weight);
                     },
                     std::move(name)};
}

} // namespace batopt
