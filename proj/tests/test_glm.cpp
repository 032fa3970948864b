#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "batopt/glm.hpp"
#include "testing.hpp"

using namespace batopt;
using batopt::testing::numeric_gradient;
using batopt::testing::relative_error;
using batopt::testing::symmetric_psd;

namespace {

GlmDataset intercept_only(std::vector<double> y)
{
    const auto n = static_cast<Eigen::Index>(y.size());
    return {Matrix::Ones(n, 1), Eigen::Map<Vector>(y.data(), n)};
}

const double ln2 = std::numbers::ln2;

} // namespace

TEST(GlmNll, GeometricHandValues)
{
    const Vector zero = Vector::Zero(1);
    EXPECT_NEAR(geometric_negloglik(zero, intercept_only({0})), ln2, 1e-15);
    EXPECT_NEAR(geometric_negloglik(zero, intercept_only({1})), 2 * ln2, 1e-15);
    EXPECT_NEAR(geometric_negloglik(zero, intercept_only({1})), 1.386294, 1e-6);
}

TEST(GlmNll, GeometricMatchesPrintedFormula)
{
    const auto data = synthetic_glm(GlmFamily::geometric, 40, Vector{{0.3, -0.4}}, RngStream(2, 3));
    const Vector beta{{0.1, 0.25}};
    double ll = 0.0;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        const double u = data.X.row(i).dot(beta);
        ll += data.y[i] * std::log(std::exp(u) / (1 + std::exp(u))) - std::log(1 + std::exp(u));
    }
    EXPECT_NEAR(geometric_negloglik(beta, data), -ll, 1e-10);
}

TEST(GlmNll, GeometricStableForLargePredictors)
{
    const auto data = intercept_only({3});
    const double nll = geometric_negloglik(Vector::Constant(1, 800.0), data);
    EXPECT_TRUE(std::isfinite(nll));
    EXPECT_NEAR(nll, 800.0, 1e-9);
}

TEST(GlmNll, BernoulliHandValues)
{
    const Vector zero = Vector::Zero(1);
    EXPECT_NEAR(bernoulli_negloglik(zero, intercept_only({1})), ln2, 1e-15);
    EXPECT_NEAR(bernoulli_negloglik(zero, intercept_only({0})), ln2, 1e-15);
    EXPECT_THROW(bernoulli_negloglik(zero, intercept_only({2})), parameter_error);
}

TEST(GlmNll, BernoulliSeparableHasNoFiniteMinimizer)
{
    GlmDataset data{Matrix{{1, -1}, {1, 1}}, Vector{{0, 1}}};
    double prev = infeasible;
    for (double s = 0; s < 40; s += 2) {
        const double nll = bernoulli_negloglik(Vector{{0, s}}, data);
        ASSERT_LT(nll, prev);
        ASSERT_GT(nll, 0.0);
        prev = nll;
    }
    EXPECT_THROW(irls_fit(data, GlmFamily::bernoulli), divergence_error);
}

TEST(GlmNll, PoissonHandValues)
{
    EXPECT_NEAR(poisson_negloglik(Vector::Zero(1), intercept_only({0})), 1.0, 1e-15);
    const double oracle = -(2 * ln2 - 2 - std::log(2.0));
    EXPECT_NEAR(poisson_negloglik(Vector::Constant(1, ln2), intercept_only({2})), oracle, 1e-14);
    EXPECT_NEAR(poisson_negloglik(Vector::Constant(1, ln2), intercept_only({2})), 1.306853, 1e-6);
}

TEST(GlmNll, PoissonLargeCountUsesLogGamma)
{
    const double nll = poisson_negloglik(Vector::Constant(1, std::log(500.0)), intercept_only({500}));
    EXPECT_TRUE(std::isfinite(nll));
    EXPECT_NEAR(nll, 500 - 500 * std::log(500.0) + std::lgamma(501.0), 1e-8);
}

TEST(GlmNll, NonFiniteBetaIsInfeasible)
{
    const Vector bad = Vector::Constant(1, std::numeric_limits<double>::quiet_NaN());
    for (auto family : {GlmFamily::geometric, GlmFamily::bernoulli, GlmFamily::poisson}) {
        EXPECT_EQ(glm_negloglik(bad, intercept_only({1}), family), infeasible);
    }
}

TEST(GlmNll, DimensionMismatch)
{
    EXPECT_THROW(poisson_negloglik(Vector::Zero(2), intercept_only({1})), dimension_error);
}

TEST(GlmGradient, MatchesFiniteDifferences)
{
    const Vector truth{{0.2, -0.4, 0.3, 0.1}};
    for (auto family : {GlmFamily::geometric, GlmFamily::bernoulli, GlmFamily::poisson}) {
        const auto data = synthetic_glm(family, 200, truth, RngStream(7, 3));
        RngStream rng(11, 1);
        for (int trial = 0; trial < 5; ++trial) {
            Vector beta(4);
            for (Eigen::Index j = 0; j < 4; ++j) beta[j] = rng.uniform(-0.8, 0.8);
            const auto f = [&](const Vector& b) { return glm_negloglik(b, data, family); };
            const Vector fd = numeric_gradient(f, beta);
            const Vector g = glm_gradient(beta, data, family);
            EXPECT_LT(relative_error(g, fd), 1e-6) << to_string(family);
        }
    }
}

TEST(GlmCovariance, InterceptOnlyClosedForms)
{
    for (int n : {1, 10, 250}) {
        const auto data = intercept_only(std::vector<double>(static_cast<std::size_t>(n), 1.0));
        const Matrix geo = glm_covariance(Vector::Zero(1), data, GlmFamily::geometric);
        EXPECT_NEAR(geo(0, 0), 2.0 / n, 1e-14);
        const Matrix poi = glm_covariance(Vector::Zero(1), data, GlmFamily::poisson);
        EXPECT_NEAR(poi(0, 0), 1.0 / n, 1e-14);
        const Matrix ber = glm_covariance(Vector::Zero(1), data, GlmFamily::bernoulli);
        EXPECT_NEAR(ber(0, 0), 4.0 / n, 1e-14);
    }
}

TEST(GlmCovariance, SymmetricPsd)
{
    const Vector truth{{0.2, -0.4, 0.3, 0.1}};
    for (auto family : {GlmFamily::geometric, GlmFamily::bernoulli, GlmFamily::poisson}) {
        const auto data = synthetic_glm(family, 300, truth, RngStream(1, 3));
        EXPECT_TRUE(symmetric_psd(glm_covariance(truth, data, family)));
    }
}

TEST(GlmCovariance, RankDeficientDesign)
{
    GlmDataset data{Matrix{{1, 2}, {1, 2}, {1, 2}}, Vector{{0, 1, 2}}};
    try {
        glm_covariance(Vector::Zero(2), data, GlmFamily::poisson);
        FAIL() << "expected singular_information";
    } catch (const singular_information& e) {
        EXPECT_NE(std::string(e.what()).find("rank 1 of 2"), std::string::npos) << e.what();
    }
}

TEST(Irls, InterceptOnlyClosedForms)
{
    const auto counts = intercept_only({0, 1, 3, 2, 4, 0, 1});
    const double mean = 11.0 / 7.0;
    EXPECT_NEAR(irls_fit(counts, GlmFamily::poisson).coef[0], std::log(mean), 1e-10);
    EXPECT_NEAR(irls_fit(counts, GlmFamily::geometric).coef[0], std::log(mean), 1e-10);
    const auto binary = intercept_only({1, 0, 0, 1, 1, 1, 0, 1});
    EXPECT_NEAR(irls_fit(binary, GlmFamily::bernoulli).coef[0], std::log(5.0 / 3.0), 1e-10);
}

TEST(Irls, StationaryAndOptimal)
{
    const Vector truth{{0.5, -0.3, 0.2, 0.1}};
    for (auto family : {GlmFamily::geometric, GlmFamily::bernoulli, GlmFamily::poisson}) {
        const auto data = synthetic_glm(family, 500, truth, RngStream(3, 3));
        const auto fit = irls_fit(data, family);
        EXPECT_LT(glm_gradient(fit.coef, data, family).cwiseAbs().maxCoeff(), 1e-6);
        RngStream rng(4, 1);
        for (int k = 0; k < 20; ++k) {
            Vector step(4);
            for (Eigen::Index j = 0; j < 4; ++j) step[j] = rng.uniform(-0.01, 0.01);
            EXPECT_GT(glm_negloglik(fit.coef + step, data, family), fit.nll);
        }
        EXPECT_TRUE(symmetric_psd(fit.covariance));
    }
}

TEST(Irls, GeometricRecoversTruth)
{
    const Vector truth{{0.2, -0.5, 0.3}};
    const auto data = synthetic_glm(GlmFamily::geometric, 500, truth, RngStream(0, 3));
    const auto fit = irls_fit(data, GlmFamily::geometric);
    for (Eigen::Index j = 0; j < 3; ++j) {
        EXPECT_LT(std::abs(fit.coef[j] - truth[j]), 3 * std::sqrt(fit.covariance(j, j))) << j;
    }
}

TEST(SyntheticGlm, DeterministicAndValid)
{
    const Vector truth{{0.2, -0.5, 0.3}};
    const auto a = synthetic_glm(GlmFamily::poisson, 100, truth, RngStream(5, 3));
    const auto b = synthetic_glm(GlmFamily::poisson, 100, truth, RngStream(5, 3));
    EXPECT_EQ(a.X, b.X);
    EXPECT_EQ(a.y, b.y);
    EXPECT_NO_THROW(a.validate(GlmFamily::poisson));
    EXPECT_TRUE((a.X.col(0).array() == 1.0).all());
}

TEST(GlmFamily, Names)
{
    EXPECT_EQ(glm_family_from("geometric"), GlmFamily::geometric);
    EXPECT_EQ(glm_family_from("logistic"), GlmFamily::bernoulli);
    EXPECT_EQ(glm_family_from("poisson"), GlmFamily::poisson);
    EXPECT_THROW(glm_family_from("gamma"), parameter_error);
}
