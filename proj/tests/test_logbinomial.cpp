#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "batopt/logbinomial.hpp"
#include "testing.hpp"

using namespace batopt;
using batopt::testing::numeric_gradient;
using batopt::testing::relative_error;

namespace {

// -sum[y u + (m - y) log(1 - e^u)], written out independently.
double direct_nll(const Vector& beta, const GroupedBinomialDataset& d)
{
    double ll = 0.0;
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        const double u = d.X.row(i).dot(beta);
        ll += d.y[i] * u;
        if (d.m[i] > d.y[i]) ll += (d.m[i] - d.y[i]) * std::log(1.0 - std::exp(u));
    }
    return -ll;
}

GroupedBinomialDataset single_group(double x, double m, double y)
{
    return {Matrix::Constant(1, 1, x), Vector::Constant(1, m), Vector::Constant(1, y)};
}

} // namespace

TEST(Williamson, DatasetsAsPrinted)
{
    const auto b = williamson_boundary();
    EXPECT_EQ(b.rows(), 3);
    EXPECT_EQ(b.m, (Vector{{18, 27, 5}}));
    EXPECT_EQ(b.y, (Vector{{10, 18, 5}}));
    EXPECT_EQ(b.X.col(1), (Vector{{-1, 0, 1}}));
    EXPECT_EQ(williamson_infinity().y, Vector::Zero(3));
    EXPECT_EQ(williamson_interior().m, (Vector{{4, 17, 19}}));
}

TEST(Williamson, NllAtReportedEstimates)
{
    EXPECT_NEAR(logbinomial_penalized_nll(Vector{{-0.34, 0.34}}, williamson_boundary()), 29.77, 0.01);
    EXPECT_NEAR(logbinomial_penalized_nll(Vector{{-10.0, 0.17}}, williamson_infinity()), 2.25e-3, 0.01e-3);
    EXPECT_NEAR(logbinomial_penalized_nll(Vector{{-0.70, -0.47}}, williamson_interior()), 24.14, 0.01);
}

TEST(LogBinomial, AgreesWithDirectFormulaWhenAdmissible)
{
    RngStream rng(1, 1);
    const auto data = williamson_interior();
    for (int k = 0; k < 50; ++k) {
        const Vector beta{{rng.uniform(-3.0, -1.01), rng.uniform(-1.0, 1.0)}};
        ASSERT_LT(max_linear_predictor(beta, data), 0.0);
        EXPECT_NEAR(logbinomial_penalized_nll(beta, data), direct_nll(beta, data), 1e-10);
    }
}

TEST(LogBinomial, SingleGroupClosedForm)
{
    const auto data = single_group(1.0, 2.0, 1.0);
    const double a_hat = -std::numbers::ln2;
    EXPECT_NEAR(logbinomial_penalized_nll(Vector::Constant(1, a_hat), data), 2 * std::numbers::ln2, 1e-14);
    EXPECT_NEAR(relative_risk_gradient(Vector::Constant(1, a_hat), data)[0], 0.0, 1e-12);
    for (double d : {-0.1, -0.01, 0.01, 0.1}) {
        EXPECT_GT(logbinomial_penalized_nll(Vector::Constant(1, a_hat + d), data), 2 * std::numbers::ln2);
    }
}

TEST(LogBinomial, BoundaryMleOfAllSuccessGroup)
{
    const auto data = single_group(1.0, 1.0, 1.0);
    EXPECT_DOUBLE_EQ(relative_risk_negloglik(Vector::Constant(1, -0.5), data), 0.5);
    EXPECT_DOUBLE_EQ(relative_risk_negloglik(Vector::Constant(1, 0.0), data), 0.0);
    EXPECT_GT(relative_risk_negloglik(Vector::Constant(1, 0.1), data), 0.0);
}

TEST(LogBinomial, NoSuccessesVanishesAtMinusInfinity)
{
    const auto data = williamson_infinity();
    double prev = infeasible;
    for (double b0 = -1; b0 >= -30; b0 -= 1) {
        const double nll = relative_risk_negloglik(Vector{{b0, 0.0}}, data);
        ASSERT_LT(nll, prev);
        prev = nll;
    }
    EXPECT_LT(prev, 1e-11);
}

TEST(LogBinomial, GuardAtZeroPredictor)
{
    // y < m at u = 0 has probability-one success: -log(0).
    EXPECT_EQ(logbinomial_penalized_nll(Vector::Constant(1, 0.0), single_group(1, 3, 1)), infeasible);
    EXPECT_EQ(logbinomial_penalized_nll(Vector::Constant(1, 0.5), single_group(1, 3, 1)), infeasible);
    const double w = 1e4;
    EXPECT_DOUBLE_EQ(logbinomial_penalized_nll(Vector::Constant(1, 0.5), single_group(1, 3, 3), w), w * 0.25);
}

TEST(LogBinomial, NeverNaN)
{
    RngStream rng(2, 1);
    for (const auto& data : {williamson_boundary(), williamson_infinity(), williamson_interior()}) {
        for (int k = 0; k < 2000; ++k) {
            const Vector beta{{rng.uniform(-10, 10), rng.uniform(-10, 10)}};
            const double v = logbinomial_penalized_nll(beta, data);
            ASSERT_FALSE(std::isnan(v));
            ASSERT_GE(v, 0.0);
        }
    }
}

TEST(LogBinomial, GradientAndInformationMatchFiniteDifferences)
{
    RngStream rng(3, 1);
    for (const auto& data : {williamson_boundary(), williamson_interior()}) {
        for (int k = 0; k < 10; ++k) {
            const Vector beta{{rng.uniform(-3.0, -1.2), rng.uniform(-1.0, 1.0)}};
            const auto f = [&](const Vector& b) { return relative_risk_negloglik(b, data); };
            EXPECT_LT(relative_error(relative_risk_gradient(beta, data), numeric_gradient(f, beta)), 1e-6);
            Matrix fd(2, 2);
            for (Eigen::Index j = 0; j < 2; ++j) {
                const auto gj = [&](const Vector& b) { return relative_risk_gradient(b, data)[j]; };
                fd.row(j) = numeric_gradient(gj, beta).transpose();
            }
            const Matrix info = relative_risk_information(beta, data);
            EXPECT_LT((info - fd).cwiseAbs().maxCoeff() / std::max(1.0, info.cwiseAbs().maxCoeff()), 1e-6);
        }
    }
}

TEST(LogBinomial, MakeAdmissible)
{
    const auto data = williamson_boundary();
    const Vector fixed = make_admissible(Vector{{-0.3, 0.4}}, data);
    EXPECT_LE(max_linear_predictor(fixed, data), 1e-15);
    EXPECT_DOUBLE_EQ(fixed[1], 0.4);
    const Vector inside{{-2.0, 0.1}};
    EXPECT_EQ(make_admissible(inside, data), inside);
}

TEST(LogBinomial, Validation)
{
    EXPECT_THROW(single_group(0, 3, 4), parameter_error);
    EXPECT_THROW(single_group(0, 0, 0), parameter_error);
    EXPECT_THROW(single_group(0, 3, 1.5), parameter_error);
    EXPECT_THROW(logbinomial_penalized_nll(Vector::Zero(2), williamson_boundary(), 0.0), parameter_error);
    EXPECT_THROW(logbinomial_penalized_nll(Vector::Zero(3), williamson_boundary()), dimension_error);
}
