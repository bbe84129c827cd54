#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "stochcap/estimator.hpp"
#include "stochcap/nelder_mead.hpp"
#include "stochcap/synthetic.hpp"

using namespace stochcap;

namespace {
constexpr double kLogOneMinusInvE = -0.45867514538708189102;  // ln(1 - e^-1), mpmath
constexpr double kTwoLogHalf = -1.3862943611198906188;        // 2 ln 0.5
}  // namespace

TEST(LogLikelihood, SingleBreakdownAtScale) {
    const CensoredHistogram h({150}, {1}, {1});
    EXPECT_NEAR(log_likelihood(h, WeibullCapacity(150, 6.5)), kLogOneMinusInvE, 1e-15);
}

TEST(LogLikelihood, SingleSurvivalAtScale) {
    const CensoredHistogram h({150}, {1}, {0});
    EXPECT_DOUBLE_EQ(log_likelihood(h, WeibullCapacity(150, 6.5)), -1.0);
}

TEST(LogLikelihood, TwoLevelsAddUp) {
    // levels must be distinct, so the pair is merged into one level with r = 2, b = 1
    const CensoredHistogram a({150}, {1}, {1});
    const CensoredHistogram b({150}, {1}, {0});
    const CensoredHistogram both({150}, {2}, {1});
    const WeibullCapacity d(150, 6.5);
    EXPECT_NEAR(log_likelihood(both, d), log_likelihood(a, d) + log_likelihood(b, d), 1e-15);
    EXPECT_NEAR(log_likelihood(both, d), -1.0 + kLogOneMinusInvE, 1e-15);
}

TEST(LogLikelihood, ZeroWeightLevelsContributeNothing) {
    const WeibullCapacity d(150, 6.5);
    const CensoredHistogram base({100, 150}, {10, 20}, {1, 12});
    const CensoredHistogram padded({1, 100, 150, 900}, {0, 10, 20, 0}, {0, 1, 12, 0});
    EXPECT_NEAR(log_likelihood(base, d), log_likelihood(padded, d), 1e-12);
}

TEST(PredictedBreakdowns, Arithmetic) {
    const WeibullCapacity d(150, 6.5);
    const double level = quantile(d, 0.05);
    EXPECT_NEAR(predicted_breakdowns(CensoredHistogram({level}, {100}, {3}), d), 5.0, 1e-12);
    EXPECT_LT(predicted_breakdowns(CensoredHistogram({level}, {100}, {3}), WeibullCapacity(1e12, 6.5)), 1e-60);
}

TEST(Fit, NonIdentifiable) {
    try {
        fit(CensoredHistogram({100, 120}, {5, 5}, {0, 0}));
        FAIL();
    } catch (const NonIdentifiable& e) {
        EXPECT_EQ(e.reason(), Identifiability::NoBreakdowns);
        EXPECT_STREQ(e.what(), "no breakdowns recorded");
    }
    try {
        fit(CensoredHistogram({100, 120}, {5, 5}, {5, 5}));
        FAIL();
    } catch (const NonIdentifiable& e) {
        EXPECT_EQ(e.reason(), Identifiability::NoSurvivals);
    }
}

TEST(Fit, SymmetricTwoPointRidge) {
    const CensoredHistogram h({150}, {2}, {1});
    const auto r = fit(h);
    EXPECT_NEAR(breakdown_probability(r.fitted, 150.0), 0.5, 1e-4);
    EXPECT_NEAR(r.log_likelihood, kTwoLogHalf, 1e-9);
    const double ridge_scale = 150.0 / std::pow(std::log(2.0), 1.0 / r.fitted.shape());
    EXPECT_NEAR(r.fitted.scale(), ridge_scale, 1e-4 * ridge_scale);
}

TEST(GridSearch, SingleCellAndValidation) {
    const CensoredHistogram h({150}, {2}, {1});
    const auto g = grid_search(h, {120, 120}, {4, 4}, 2, 2);
    EXPECT_EQ(g.dist, WeibullCapacity(120, 4));
    EXPECT_THROW(grid_search(h, {0, 10}, {1, 2}, 5, 5), DomainError);
    EXPECT_THROW(grid_search(h, {10, 5}, {1, 2}, 5, 5), DomainError);
    EXPECT_THROW(grid_search(h, {5, 10}, {1, 2}, 1, 5), DomainError);
}

TEST(GridSearch, RefinesTowardAnalyticOptimum) {
    const CensoredHistogram h({150}, {2}, {1});
    double prev = -1e300;
    for (std::size_t n : {5, 20, 80, 320}) {
        const auto g = grid_search(h, {140, 180}, {2, 10}, n, n);
        EXPECT_LE(g.log_likelihood, kTwoLogHalf + 1e-12);
        EXPECT_GE(g.log_likelihood, prev - 1e-12);
        prev = g.log_likelihood;
    }
    EXPECT_NEAR(prev, kTwoLogHalf, 1e-4);
}

namespace {

CensoredHistogram synthetic(std::uint64_t seed, double target) {
    const auto base = calibrate_base_profile({}).profile;
    const auto prof = rescale_profile(base, WeibullCapacity(150, 6.5), target);
    return generate_dataset(prof, WeibullCapacity(150, 6.5), seed).histogram();
}

}  // namespace

TEST(Fit, MatchesGridOracleOnGeneratedData) {
    const auto h = synthetic(11, 60);
    const auto r = fit(h);
    ASSERT_TRUE(r.converged);
    const auto g = grid_search(h, {0.8 * r.fitted.scale(), 1.2 * r.fitted.scale()},
                               {0.5 * r.fitted.shape(), 1.5 * r.fitted.shape()}, 120, 120);
    EXPECT_GE(r.log_likelihood, g.log_likelihood - 1e-6);
}

TEST(Fit, LocalMaximum) {
    const auto h = synthetic(12, 100);
    const auto r = fit(h);
    for (double ds : {-1e-3, 1e-3})
        for (double dg : {-1e-3, 0.0, 1e-3}) {
            const WeibullCapacity d(r.fitted.scale() * (1 + ds), r.fitted.shape() * (1 + dg));
            EXPECT_LE(log_likelihood(h, d), r.log_likelihood + 1e-9);
        }
}

TEST(Fit, ScaleEquivariance) {
    const auto h = synthetic(13, 80);
    const auto r = fit(h);
    for (double c : {0.1, 3.0}) {
        std::vector<double> levels(h.levels().begin(), h.levels().end());
        for (double& l : levels) l *= c;
        const CensoredHistogram hc(levels, {h.records().begin(), h.records().end()},
                                   {h.breakdowns().begin(), h.breakdowns().end()});
        const auto rc = fit(hc);
        EXPECT_NEAR(rc.fitted.scale() / (c * r.fitted.scale()), 1.0, 1e-5);
        EXPECT_NEAR(rc.fitted.shape() / r.fitted.shape(), 1.0, 1e-5);
    }
}

TEST(Fit, WeightHomogeneity) {
    const auto h = synthetic(14, 80);
    std::vector<double> rec(h.records().begin(), h.records().end());
    std::vector<std::int64_t> b(h.breakdowns().begin(), h.breakdowns().end());
    for (double& x : rec) x *= 3;
    for (auto& x : b) x *= 3;
    const auto r1 = fit(h);
    const auto r3 = fit(CensoredHistogram({h.levels().begin(), h.levels().end()}, rec, b));
    EXPECT_NEAR(r3.fitted.scale() / r1.fitted.scale(), 1.0, 1e-5);
    EXPECT_NEAR(r3.fitted.shape() / r1.fitted.shape(), 1.0, 1e-5);
    EXPECT_NEAR(r3.log_likelihood, 3 * r1.log_likelihood, 1e-6 * std::abs(r3.log_likelihood));
}

TEST(Fit, ConsistentOnLargeSample) {
    const auto r = fit(synthetic(15, 3000));
    EXPECT_NEAR(r.fitted.scale(), 150.0, 0.03 * 150.0);
    EXPECT_NEAR(r.fitted.shape(), 6.5, 0.08 * 6.5);
}

TEST(Fit, FixedShapeHoldsShape) {
    const auto h = synthetic(16, 80);
    FitOptions o;
    o.fixed_shape = 6.5;
    const auto r = fit(h, o);
    EXPECT_TRUE(r.fixed_shape.has_value());
    EXPECT_DOUBLE_EQ(r.fitted.shape(), 6.5);
    const auto g = grid_search(h, {0.9 * r.fitted.scale(), 1.1 * r.fitted.scale()}, {6.5, 6.5}, 2001, 2);
    EXPECT_GE(r.log_likelihood, g.log_likelihood - 1e-9);
    o.fixed_shape = -1.0;
    EXPECT_THROW(fit(h, o), DomainError);
}

TEST(Fit, DeterministicForSeed) {
    const auto h = synthetic(17, 40);
    FitOptions o;
    o.seed = 99;
    const auto a = fit(h, o), b = fit(h, o);
    EXPECT_EQ(a.fitted, b.fitted);
    EXPECT_EQ(a.iterations, b.iterations);
}

TEST(NelderMead, Rosenbrock) {
    auto f = [](const std::vector<double>& x) {
        return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
    };
    SimplexOptions o;
    o.x_tolerance = 1e-10;
    o.f_tolerance = 1e-20;
    o.max_iterations = 20000;
    const auto r = nelder_mead(f, {-1.2, 1.0}, o);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.x[0], 1.0, 1e-6);
    EXPECT_NEAR(r.x[1], 1.0, 1e-6);
}

TEST(NelderMead, ReportsIterationCap) {
    auto f = [](const std::vector<double>& x) { return x[0] * x[0] + x[1] * x[1]; };
    SimplexOptions o;
    o.max_iterations = 3;
    const auto r = nelder_mead(f, {5.0, 5.0}, o);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.iterations, 3u);
}
