#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "batopt/core.hpp"
#include "batopt/glm.hpp"
#include "batopt/logbinomial.hpp"
#include "batopt/markov_renewal.hpp"
#include "batopt/registry.hpp"

namespace batopt {

struct OddsRatio
{
    double ratio = 1.0;
    double lower = 1.0;
    double upper = 1.0;
};

inline constexpr double wald_z95 = 1.96;

/// exp(coef) with the Wald interval exp(coef -/+ z se).
inline OddsRatio odds_ratio_ci(double coef, double se, double z = wald_z95)
{
    if (!(se >= 0.0)) throw parameter_error("odds_ratio_ci: standard error must be non-negative");
    return {std::exp(coef), std::exp(coef - z * se), std::exp(coef + z * se)};
}

/// A negative log-likelihood plus the pieces needed to report on its optimum.
struct LikelihoodModel
{
    Objective objective;
    /// Observed or expected information at a point; empty if unavailable.
    std::function<Matrix(const Vector&)> information;
    /// Maps the optimizer's best point onto the model's feasible set.
    std::function<Vector(const Vector&)> finalize;
    std::vector<std::string> coef_names;
};

inline std::vector<std::string> default_coef_names(Eigen::Index k, bool intercept)
{
    std::vector<std::string> names;
    for (Eigen::Index j = 0; j < k; ++j) {
        names.push_back(intercept && j == 0 ? "intercept" : "b" + std::to_string(intercept ? j : j + 1));
    }
    return names;
}

inline LikelihoodModel glm_model(const GlmDataset& data, GlmFamily family, SearchSpace space)
{
    auto shared = std::make_shared<const GlmDataset>(data);
    LikelihoodModel model{glm_objective(data, family, std::move(space)), {}, {}, {}};
    model.information = [shared, family](const Vector& beta) { return glm_information(beta, *shared, family); };
    model.coef_names = default_coef_names(data.cols(), true);
    return model;
}

inline LikelihoodModel logbinomial_model(const GroupedBinomialDataset& data, SearchSpace space,
                                         double penalty_weight = default_penalty_weight)
{
    auto shared = std::make_shared<const GroupedBinomialDataset>(data);
    LikelihoodModel model{logbinomial_objective(data, std::move(space), penalty_weight), {}, {}, {}};
    model.information = [shared](const Vector& beta) { return relative_risk_information(beta, *shared); };
    model.finalize = [shared](const Vector& beta) { return make_admissible(beta, *shared); };
    model.coef_names = default_coef_names(data.cols(), true);
    return model;
}

inline LikelihoodModel markov_renewal_model(const MultiStateDataset& data, SearchSpace space)
{
    auto lik = std::make_shared<const MarkovRenewalLikelihood>(data);
    require_dim(space.dim(), lik->dim(), "markov_renewal_model");
    LikelihoodModel model{
        Objective{std::move(space), [lik](const Vector& beta) { return lik->negloglik(beta); }, "markov-renewal"},
        [lik](const Vector& beta) { return lik->evaluate(beta).information; },
        {},
        default_coef_names(lik->dim(), false)};
    return model;
}

struct EstimateReport
{
    std::vector<std::string> names;
    Vector coef;
    Vector se;
    Matrix covariance;
    double nll = infeasible;
    Vector or_rr;
    Vector ci_lower;
    Vector ci_upper;
    bool covariance_ok = false;
    /// Some coefficient sits on the search box, e.g. an MLE at infinity.
    bool at_boundary = false;
    std::string note;
    RunResult run;
};

/// Fills covariance, standard errors and exponentiated estimates at `coef`.
inline void summarize(EstimateReport& report, const LikelihoodModel& model)
{
    const auto k = report.coef.size();
    report.se = Vector::Constant(k, std::numeric_limits<double>::quiet_NaN());
    report.ci_lower = report.se;
    report.ci_upper = report.se;
    report.or_rr = report.coef.array().exp();
    if (model.information) {
        try {
            report.covariance = invert_information(model.information(report.coef));
            report.se = report.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
            report.covariance_ok = true;
        } catch (const singular_information& e) {
            report.note = e.what();
        }
    }
    if (report.covariance_ok) {
        for (Eigen::Index j = 0; j < k; ++j) {
            const auto ci = odds_ratio_ci(report.coef[j], report.se[j]);
            report.ci_lower[j] = ci.lower;
            report.ci_upper[j] = ci.upper;
        }
    }
}

/// Minimizes the model's NLL with a registered optimizer and reports the
/// estimate, its covariance and the exponentiated coefficients with 95% CIs.
inline EstimateReport fit_model(const LikelihoodModel& model, const OptimizerRegistry& registry,
                                std::string_view optimizer, const OptionMap& options, std::uint64_t seed)
{
    EstimateReport report;
    report.run = registry.run(optimizer, model.objective, options, seed);
    report.names = model.coef_names;
    report.coef = model.finalize ? model.finalize(report.run.best_x) : report.run.best_x;
    report.nll = model.objective(report.coef);

    const auto& space = model.objective.space;
    const Vector tol = 1e-9 * space.width();
    for (Eigen::Index j = 0; j < report.coef.size(); ++j) {
        if (report.coef[j] <= space.lower()[j] + tol[j] || report.coef[j] >= space.upper()[j] - tol[j]) {
            report.at_boundary = true;
        }
    }
    if (!std::isfinite(report.nll)) {
        report.note = "optimizer found no finite objective value";
        report.se = Vector::Constant(report.coef.size(), std::numeric_limits<double>::quiet_NaN());
        report.or_rr = report.coef.array().exp();
        report.ci_lower = report.ci_upper = report.se;
        return report;
    }
    summarize(report, model);
    if (report.at_boundary && report.note.empty()) report.note = "estimate on the search-box boundary";
    return report;
}

} // namespace batopt
