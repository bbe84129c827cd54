#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "stochcap/synthetic.hpp"

using namespace stochcap;

namespace {

const WeibullCapacity kBase(150, 6.5);

// Σ r_j F(I_j) summed directly from the closed-form CDF.
double direct_expected_total(const IntensityProfile& p, const WeibullCapacity& d) {
    double s = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j)
        s += p.records()[j] * (1.0 - std::exp(-std::pow(p.levels()[j] / d.scale(), d.shape())));
    return s;
}

}  // namespace

TEST(ExpectedBreakdowns, Arithmetic) {
    const IntensityProfile p({100, 150}, {0, 200});
    const auto b = expected_breakdowns(p, kBase);
    EXPECT_EQ(b[0], 0.0);
    EXPECT_NEAR(b[1], 126.42411176571153568, 1e-12);
    EXPECT_LT(total_expected_breakdowns(p, WeibullCapacity(1e9, 6.5)), 1e-40);
}

TEST(CumulativeFrequency, PrefixSums) {
    const std::vector<double> levels{1, 2, 3, 4};
    const std::vector<std::int64_t> zeros{0, 0, 0, 0}, counts{0, 1, 2, 0};
    EXPECT_EQ(cumulative_frequency<std::int64_t>(levels, zeros, CfbFlavor::Empirical).values,
              (std::vector<double>{0, 0, 0, 0}));
    const auto c = cumulative_frequency<std::int64_t>(levels, counts, CfbFlavor::Empirical);
    EXPECT_EQ(c.values, (std::vector<double>{0, 1, 3, 3}));
    EXPECT_EQ(c.final_value(), 3.0);
    EXPECT_THROW(cumulative_frequency<std::int64_t>(std::vector<double>{1, 2}, counts, CfbFlavor::Empirical),
                 DomainError);
}

TEST(BernoulliRule, Threshold) {
    EXPECT_EQ(bernoulli_from_draw(0.39, 0.4), 1);
    EXPECT_EQ(bernoulli_from_draw(0.41, 0.4), 0);
    EXPECT_EQ(bernoulli_from_draw(0.4, 0.4), 1);
}

TEST(ComponentCount, Rule) {
    EXPECT_EQ(component_count(0.4), 1u);
    EXPECT_EQ(component_count(1.0), 2u);
    EXPECT_EQ(component_count(2.5), 5u);
    EXPECT_EQ(component_count(10.0), 20u);
    for (double b : {1.0, 1.3, 7.9, 55.5}) EXPECT_LT(b / component_count(b), 1.0);
}

TEST(SampleBreakdowns, ZeroExpectationNeverBreaks) {
    CounterRng rng(3);
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_breakdowns(0.0, 5.0, rng).count, 0);
    EXPECT_EQ(rng.counter(), 0u);
}

TEST(SampleBreakdowns, RejectsImpossibleExpectation) {
    CounterRng rng(3);
    EXPECT_THROW(sample_breakdowns(5.0, 5.0, rng), DomainError);
    EXPECT_THROW(sample_breakdowns(6.0, 5.0, rng), DomainError);
    EXPECT_THROW(sample_breakdowns(-1.0, 5.0, rng), DomainError);
}

TEST(SampleBreakdowns, MeanWithFourComponents) {
    CounterRng rng(derive_key({2024, 4}));
    const int n = 1'000'000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto d = sample_breakdowns(2.5, 100.0, rng, 4);
        ASSERT_LE(d.count, 4);
        sum += static_cast<double>(d.count);
    }
    EXPECT_NEAR(sum / n, 2.5, 0.01);
}

TEST(SampleBreakdowns, ClampsToCeilRecords) {
    // 1.2 expected of 1.3 records: n = 3 trials at p = 0.4 can exceed ceil(1.3) = 2
    CounterRng rng(9);
    int clamped = 0;
    for (int i = 0; i < 2000; ++i) {
        const auto d = sample_breakdowns(1.2, 1.3, rng);
        EXPECT_LE(d.count, 2);
        clamped += d.clamped;
    }
    EXPECT_GT(clamped, 0);
}

TEST(GenerateDataset, DegenerateDistributionGivesNoBreakdowns) {
    const auto p = calibrate_base_profile({}).profile;
    const WeibullCapacity far(1e6, 6.5);
    ASSERT_LT(total_expected_breakdowns(p, far), 1e-6);
    for (std::uint64_t s = 0; s < 20; ++s) EXPECT_EQ(generate_dataset(p, far, s).total_breakdowns(), 0);
}

TEST(GenerateDataset, Deterministic) {
    const auto p = calibrate_base_profile({}).profile;
    const auto a = generate_dataset(p, kBase, 77), b = generate_dataset(p, kBase, 77),
               c = generate_dataset(p, kBase, 78);
    EXPECT_EQ(a.breakdowns, b.breakdowns);
    EXPECT_NE(a.breakdowns, c.breakdowns);
    EXPECT_EQ(a.generator_seed, 77u);
}

TEST(GenerateDataset, TotalsFluctuateAroundExpectation) {
    const auto p = calibrate_base_profile({}).profile;
    double sum = 0.0;
    std::int64_t lo = 1 << 30, hi = 0;
    for (std::uint64_t s = 0; s < 15; ++s) {
        const auto t = generate_dataset(p, kBase, s).total_breakdowns();
        sum += static_cast<double>(t);
        lo = std::min(lo, t), hi = std::max(hi, t);
    }
    EXPECT_NEAR(sum / 15, 52.0, 3 * std::sqrt(52.0 / 15));
    EXPECT_LT(lo, 52);
    EXPECT_GT(hi, 52);
}

TEST(GenerateDataset, EmpiricalCfbEndsAtTotal) {
    const auto p = calibrate_base_profile({}).profile;
    const auto ds = generate_dataset(p, kBase, 5);
    const auto cfb = ds.empirical_cfb();
    for (std::size_t j = 1; j < cfb.values.size(); ++j) EXPECT_GE(cfb.values[j], cfb.values[j - 1]);
    EXPECT_EQ(cfb.final_value(), static_cast<double>(ds.total_breakdowns()));
    const auto th = theoretical_cfb(p, kBase);
    EXPECT_NEAR(th.final_value(), 52.0, 1e-4);
}

TEST(RescaleProfile, Identity) {
    const auto p = calibrate_base_profile({}).profile;
    const auto q = rescale_profile(p, kBase, total_expected_breakdowns(p, kBase));
    for (std::size_t j = 0; j < p.size(); ++j) EXPECT_NEAR(q.records()[j], p.records()[j], 1e-12 * p.records()[j] + 1e-300);
}

TEST(RescaleProfile, EightfoldAndQuarter) {
    const auto p = calibrate_base_profile({}).profile;
    const double b = total_expected_breakdowns(p, kBase);
    const auto eight = rescale_profile(p, kBase, 8 * b);
    EXPECT_NEAR(eight.total_records(), 59576.0, 1e-6);
    const auto quarter = rescale_profile(p, kBase, 13);
    EXPECT_NEAR(direct_expected_total(quarter, kBase), 13.0, 1e-9 * 13);
    for (std::size_t j = 0; j < p.size(); ++j)
        EXPECT_NEAR(quarter.records()[j], p.records()[j] * 13 / b, 1e-12 * p.records()[j] + 1e-300);
}

TEST(RescaleProfile, Composition) {
    const auto p = calibrate_base_profile({}).profile;
    const auto ab = scale_records(scale_records(p, 0.5), 3.0), direct = scale_records(p, 1.5);
    for (std::size_t j = 0; j < p.size(); ++j) EXPECT_NEAR(ab.records()[j], direct.records()[j], 1e-12 * direct.records()[j] + 1e-300);
    EXPECT_THROW(rescale_profile(IntensityProfile({1}, {5}), WeibullCapacity(1e300, 50), 5.0), DomainError);
    EXPECT_THROW(rescale_profile(p, kBase, 0.0), DomainError);
}

TEST(CalibrateBaseProfile, DefaultSpec) {
    const auto c = calibrate_base_profile({});
    EXPECT_NEAR(c.profile.total_records(), 7447.0, 1e-8);
    EXPECT_NEAR(direct_expected_total(c.profile, kBase), 52.0, 1e-4);
    EXPECT_NEAR(c.mode, quantile(kBase, BaseProfileSpec{}.mode_probability), 1e-12);
    EXPECT_EQ(c.profile.size(), 250u);
    EXPECT_EQ(c.profile.levels().front(), 1.0);
    EXPECT_EQ(c.profile.levels().back(), 250.0);
}

TEST(CalibrateBaseProfile, BisectionMatchesDirectEvaluation) {
    for (double target : {45.0, 52.0, 80.0}) {
        BaseProfileSpec s;
        s.target_expected_breakdowns = target;
        const auto c = calibrate_base_profile(s);
        EXPECT_NEAR(direct_expected_total(c.profile, kBase), target, 1e-6 * target);
    }
}

TEST(CalibrateBaseProfile, TailShrinksWithTarget) {
    BaseProfileSpec s;
    s.target_expected_breakdowns = 40;
    const double t40 = calibrate_base_profile(s).tail_parameter;
    s.target_expected_breakdowns = 60;
    EXPECT_LT(t40, calibrate_base_profile(s).tail_parameter);
}

TEST(CalibrateBaseProfile, Infeasible) {
    BaseProfileSpec s;
    s.target_expected_breakdowns = 8000;
    try {
        calibrate_base_profile(s);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("infeasible"), std::string::npos);
    }
    s.target_expected_breakdowns = 1.0;
    EXPECT_THROW(calibrate_base_profile(s), DomainError);
    s = {};
    s.level_min = 300;
    EXPECT_THROW(calibrate_base_profile(s), DomainError);
}
