#include <gtest/gtest.h>

#include <cmath>

#include "batopt/estimate.hpp"
#include "testing.hpp"

using namespace batopt;
using batopt::testing::symmetric_psd;

namespace {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

struct TableRow
{
    const char* name;
    double coef, se, ratio, lower, upper;
};

// Geometric model: coefficient/SE pairs and the expected OR (95% CI).
const TableRow geometric_rows[] = {
    {"post-reform", -0.138, 0.051, 0.87, 0.79, 0.96},
    {"bad health", 1.143, 0.074, 3.14, 2.71, 3.63},
    {"education 10.5-12", 0.113, 0.059, 1.12, 1.00, 1.26},
    {"education 7-10", 0.031, 0.071, 1.03, 0.90, 1.18},
    {"age 40-49", 0.048, 0.063, 1.05, 0.93, 1.19},
    {"age 50-60", 0.188, 0.072, 1.21, 1.05, 1.39},
    {"log income", 0.128, 0.070, 1.14, 0.99, 1.30},
};

OptionMap glm_preset() { return {{"n", 20}, {"iterations", 5000}, {"A0", 0.05}, {"r0", 0.1}}; }

} // namespace

TEST(OddsRatio, Examples)
{
    const auto a = odds_ratio_ci(-0.138, 0.051);
    EXPECT_EQ(round2(a.ratio), 0.87);
    EXPECT_EQ(round2(a.lower), 0.79);
    EXPECT_EQ(round2(a.upper), 0.96);
    const auto b = odds_ratio_ci(1.143, 0.074);
    EXPECT_EQ(round2(b.ratio), 3.14);
    EXPECT_EQ(round2(b.lower), 2.71);
    EXPECT_EQ(round2(b.upper), 3.63);
    const auto c = odds_ratio_ci(0.0, 0.0);
    EXPECT_EQ(c.ratio, 1.0);
    EXPECT_EQ(c.lower, 1.0);
    EXPECT_EQ(c.upper, 1.0);
    EXPECT_THROW(odds_ratio_ci(0.1, -0.1), parameter_error);
}

TEST(OddsRatio, GeometricTableRows)
{
    for (const auto& row : geometric_rows) {
        const auto ci = odds_ratio_ci(row.coef, row.se);
        EXPECT_LT(ci.lower, ci.ratio);
        EXPECT_LT(ci.ratio, ci.upper);
        EXPECT_EQ(round2(ci.ratio), row.ratio) << row.name;
        EXPECT_EQ(round2(ci.lower), row.lower) << row.name;
        if (std::string(row.name) == "education 7-10") {
            EXPECT_NEAR(ci.upper, 1.18549, 1e-5);
        } else {
            EXPECT_EQ(round2(ci.upper), row.upper) << row.name;
        }
    }
}

TEST(FitModel, PoissonAgreesWithIrls)
{
    const Vector truth{{0.5, -0.3, 0.2, 0.1}};
    const auto data = synthetic_glm(GlmFamily::poisson, 500, truth, RngStream(1, stream::simulation));
    const auto oracle = irls_fit(data, GlmFamily::poisson);
    const auto model = glm_model(data, GlmFamily::poisson, SearchSpace::cube(4, -10, 10));
    const auto report = fit_model(model, OptimizerRegistry::with_builtins(), "bat", glm_preset(), 0);
    EXPECT_LT((report.coef - oracle.coef).cwiseAbs().maxCoeff(), 1e-2);
    ASSERT_TRUE(report.covariance_ok);
    const Vector se = oracle.covariance.diagonal().cwiseSqrt();
    EXPECT_LT((report.se - se).cwiseAbs().maxCoeff(), 1e-2);
    EXPECT_TRUE(symmetric_psd(report.covariance));
    EXPECT_GE(report.nll, oracle.nll - 1e-9);
    for (Eigen::Index j = 0; j < 4; ++j) {
        EXPECT_LT(report.ci_lower[j], report.or_rr[j]);
        EXPECT_LT(report.or_rr[j], report.ci_upper[j]);
        EXPECT_DOUBLE_EQ(report.or_rr[j], std::exp(report.coef[j]));
    }
    EXPECT_EQ(report.names, (std::vector<std::string>{"intercept", "b1", "b2", "b3"}));
}

TEST(FitModel, WilliamsonBoundary)
{
    const auto data = williamson_boundary();
    const auto model = logbinomial_model(data, SearchSpace::cube(2, -10, 10));
    const auto report = fit_model(model, OptimizerRegistry::with_builtins(), "bat", {{"n", 100}}, 0);
    EXPECT_NEAR(report.coef[0], -0.34, 0.05);
    EXPECT_NEAR(report.coef[1], 0.34, 0.05);
    EXPECT_LE(max_linear_predictor(report.coef, data), 1e-8);
    EXPECT_LT(report.nll, 29.9);
    if (report.covariance_ok) EXPECT_TRUE(symmetric_psd(report.covariance));
}

TEST(FitModel, LogBinomialEstimatesAreAdmissible)
{
    const auto registry = OptimizerRegistry::with_builtins();
    for (const auto& data : {williamson_boundary(), williamson_infinity(), williamson_interior()}) {
        const auto model = logbinomial_model(data, SearchSpace::cube(2, -10, 10));
        for (const char* opt : {"bat", "pso", "hs"}) {
            for (std::uint64_t seed = 0; seed < 5; ++seed) {
                const auto report = fit_model(model, registry, opt, {{"iterations", 50}}, seed);
                EXPECT_LE(max_linear_predictor(report.coef, data), 1e-8) << opt << " seed " << seed;
            }
        }
    }
}

TEST(FitModel, DegenerateBernoulliReportsBoundary)
{
    GlmDataset data{Matrix::Ones(20, 1), Vector::Zero(20)};
    const auto model = glm_model(data, GlmFamily::bernoulli, SearchSpace::cube(1, -10, 10));
    EstimateReport report;
    ASSERT_NO_THROW(report = fit_model(model, OptimizerRegistry::with_builtins(), "bat", {{"n", 20}}, 0));
    EXPECT_TRUE(report.at_boundary);
    EXPECT_NEAR(report.coef[0], -10.0, 1e-9);
    EXPECT_FALSE(report.note.empty());
    EXPECT_THROW(irls_fit(data, GlmFamily::bernoulli), divergence_error);
}

TEST(FitModel, MarkovRenewalModel)
{
    const auto data = synthetic_two_state(50, 0.5, RngStream(0, stream::simulation));
    const auto model = markov_renewal_model(data, SearchSpace::cube(1, -5, 5));
    const auto report = fit_model(model, OptimizerRegistry::with_builtins(), "pso", {{"iterations", 200}}, 1);
    const auto at = MarkovRenewalLikelihood(data).evaluate(report.coef);
    EXPECT_LT(std::abs(at.gradient[0] / at.information(0, 0)), 1e-3);
    ASSERT_TRUE(report.covariance_ok);
    EXPECT_GT(report.se[0], 0.0);
    EXPECT_EQ(report.names, std::vector<std::string>{"b1"});
}
