#include <gtest/gtest.h>

#include <sstream>

#include "stochcap/csv.hpp"
#include "stochcap/study.hpp"

using namespace stochcap;

namespace {

StudyConfig small_config() {
    StudyConfig c;
    c.distributions = {{WeibullCapacity(150, 6.5), 1.0}, {WeibullCapacity(183, 7.5), 8.0}};
    c.target_breakdowns = {20, 60};
    c.replications = 3;
    c.master_seed = 5;
    return c;
}

}  // namespace

TEST(RunStatus, StringRoundTrip) {
    for (auto s : {RunStatus::Ok, RunStatus::NoBreakdowns, RunStatus::NoSurvivals, RunStatus::NonConverged})
        EXPECT_EQ(parse_run_status(to_string(s)), s);
    EXPECT_STREQ(to_string(RunStatus::NoBreakdowns), "no-breakdowns");
    EXPECT_THROW(parse_run_status("fine"), DomainError);
}

TEST(StudyConfig, Validation) {
    StudyConfig c;
    EXPECT_NO_THROW(c.validate());
    c.replications = 0;
    EXPECT_THROW(c.validate(), DomainError);
    c = {};
    c.target_breakdowns = {};
    EXPECT_THROW(c.validate(), DomainError);
    c = {};
    c.distributions[1].profile_scale = 0;
    EXPECT_THROW(c.validate(), DomainError);
}

TEST(RunStudy, SingleCell) {
    StudyConfig c;
    c.distributions = {{WeibullCapacity(150, 6.5), 1.0}};
    c.target_breakdowns = {52};
    c.replications = 1;
    const auto res = run_study(c);
    ASSERT_EQ(res.runs.size(), 1u);
    const auto& r = res.runs[0];
    EXPECT_EQ(r.status, RunStatus::Ok);
    EXPECT_NEAR(r.theoretical_breakdowns, 52.0, 1e-6);
    EXPECT_NEAR(r.total_records, 7447.0, 1e-6);
    EXPECT_EQ(r.seed, run_seed(c.master_seed, 0, 0, 0));
    EXPECT_GT(r.cdf.levels_compared, 0u);
}

TEST(RunStudy, OrderingProfilesAndDeterminism) {
    const auto c = small_config();
    const auto a = run_study(c, 1), b = run_study(c, 4);
    ASSERT_EQ(a.runs.size(), 12u);
    std::ostringstream sa, sb;
    write_runs_csv(sa, a);
    write_runs_csv(sb, b);
    EXPECT_EQ(sa.str(), sb.str());
    std::size_t i = 0;
    for (std::size_t d = 0; d < 2; ++d)
        for (std::size_t s = 0; s < 2; ++s)
            for (std::size_t r = 0; r < 3; ++r, ++i) {
                EXPECT_EQ(a.runs[i].distribution_index, d);
                EXPECT_EQ(a.runs[i].size_index, s);
                EXPECT_EQ(a.runs[i].replication, r);
                EXPECT_EQ(a.runs[i].target_breakdowns, c.target_breakdowns[s]);
                EXPECT_NEAR(a.runs[i].theoretical_breakdowns, c.target_breakdowns[s], 1e-9 * c.target_breakdowns[s]);
            }
    // the 8x distribution carries 8x the records of the base at the same expectation ratio
    EXPECT_GT(a.runs[6].total_records, a.runs[0].total_records);
    // records scale linearly with target inside one distribution
    EXPECT_NEAR(a.runs[3].total_records / a.runs[0].total_records, 3.0, 1e-9);
}

TEST(RunStudy, RegenerateMatchesRun) {
    const auto c = small_config();
    const auto res = run_study(c);
    const auto ds = regenerate_dataset(c, 1, 1, 2);
    const auto& r = res.runs[1 * 6 + 1 * 3 + 2];
    EXPECT_EQ(ds.generator_seed, r.seed);
    EXPECT_EQ(ds.total_breakdowns(), r.recorded_breakdowns);
    const auto again = evaluate_run(ds, c.distributions[1].dist, c.estimator);
    EXPECT_EQ(again.fitted_scale, r.fitted_scale);
    EXPECT_THROW(regenerate_dataset(c, 2, 0, 0), DomainError);
}

TEST(EvaluateRun, NonIdentifiableIsFlaggedNotThrown) {
    const IntensityProfile p({100, 110}, {5, 5});
    const PseudoEmpiricalDataset ds{p, {0, 0}, 3, 0};
    const auto r = evaluate_run(ds, WeibullCapacity(150, 6.5), {});
    EXPECT_EQ(r.status, RunStatus::NoBreakdowns);
    EXPECT_FALSE(r.identifiable());
    EXPECT_TRUE(std::isnan(r.fitted_scale));
    const PseudoEmpiricalDataset all{p, {5, 5}, 3, 0};
    EXPECT_EQ(evaluate_run(all, WeibullCapacity(150, 6.5), {}).status, RunStatus::NoSurvivals);
}

TEST(EvaluateRun, IterationCapIsReported) {
    const auto c = small_config();
    const auto ds = regenerate_dataset(c, 0, 0, 0);
    FitOptions o;
    o.max_iterations = 2;
    const auto r = evaluate_run(ds, c.distributions[0].dist, o);
    EXPECT_EQ(r.status, RunStatus::NonConverged);
    EXPECT_TRUE(r.identifiable());
    EXPECT_TRUE(std::isfinite(r.cdf.awre));
}

TEST(Summarize, CellsAndCorrelations) {
    const auto res = run_study(small_config());
    const auto s = summarize(res);
    ASSERT_EQ(s.cells.size(), 4u);
    EXPECT_EQ(s.cells[0].runs, 3u);
    EXPECT_EQ(s.cells[0].field("recorded_breakdowns").count, 3u);
    EXPECT_THROW(s.cells[0].field("nope"), DomainError);
    EXPECT_EQ(s.scatter.size() + s.non_identifiable_runs, 12u);
    EXPECT_TRUE(std::isfinite(s.spearman_log_breakdowns_vs_awre));
    EXPECT_THROW(summarize(StudyResults{}), DomainError);
}

TEST(Summarize, IdenticalRunsHaveZeroVariance) {
    const auto one = run_study(small_config()).runs[0];
    StudyResults res;
    for (int i = 0; i < 5; ++i) res.runs.push_back(one);
    const auto s = summarize(res);
    ASSERT_EQ(s.cells.size(), 1u);
    for (const auto& [name, stats] : s.cells[0].fields) {
        EXPECT_EQ(stats.sd, 0.0) << name;
        EXPECT_EQ(stats.min, stats.max) << name;
    }
}

TEST(RegressionObservations, FilterNonIdentifiable) {
    EXPECT_TRUE(to_regression_observations(StudyResults{}, ErrorResponse::CdfAwre).empty());
    auto res = run_study(small_config());
    res.runs[0].status = RunStatus::NoBreakdowns;
    const auto obs = to_regression_observations(res, ErrorResponse::CfbAwre);
    EXPECT_EQ(obs.size(), 11u);
    EXPECT_EQ(obs[0].response, res.runs[1].cfb.awre);
    EXPECT_EQ(obs[0].recorded_breakdowns, res.runs[1].recorded_breakdowns);
}
