#pragma once

// Monte Carlo reliability study: for every capacity distribution and target
// sample size, generate replicated pseudo-empirical datasets with a known
// truth, fit each one and score the fitted curves against the truth.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "estimator.hpp"
#include "metrics.hpp"
#include "regression.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "synthetic.hpp"

namespace stochcap {

struct DistributionSpec {
    WeibullCapacity dist;
    double profile_scale = 1.0;  // record multiplier applied to the base profile
};

struct StudyConfig {
    std::vector<DistributionSpec> distributions{
        {WeibullCapacity(150.0, 6.5), 1.0},
        {WeibullCapacity(160.0, 7.0), 2.0},
        {WeibullCapacity(183.0, 7.5), 8.0},
    };
    std::vector<double> target_breakdowns{13, 26, 52, 78, 104, 156, 208, 260};
    std::size_t replications = 15;
    std::uint64_t master_seed = 1;
    FitOptions estimator{};
    BaseProfileSpec base_profile{};

    void validate() const {
        if (distributions.empty()) throw DomainError("distributions: must not be empty");
        for (const auto& d : distributions)
            if (!(d.profile_scale > 0.0)) throw DomainError("distributions: profile_scale must be positive");
        if (target_breakdowns.empty()) throw DomainError("target_breakdowns: must not be empty");
        for (std::size_t i = 0; i < target_breakdowns.size(); ++i) {
            if (!(target_breakdowns[i] > 0.0)) throw DomainError("target_breakdowns: values must be positive");
            if (i > 0 && !(target_breakdowns[i] > target_breakdowns[i - 1]))
                throw DomainError("target_breakdowns: values must be strictly ascending");
        }
        if (replications < 1) throw DomainError("replications: must be at least 1");
    }
};

enum class RunStatus { Ok, NoBreakdowns, NoSurvivals, NonConverged };

inline const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Ok: return "ok";
        case RunStatus::NoBreakdowns: return "no-breakdowns";
        case RunStatus::NoSurvivals: return "no-survivals";
        case RunStatus::NonConverged: return "non-converged";
    }
    return "?";
}

inline RunStatus parse_run_status(const std::string& s) {
    if (s == "ok") return RunStatus::Ok;
    if (s == "no-breakdowns") return RunStatus::NoBreakdowns;
    if (s == "no-survivals") return RunStatus::NoSurvivals;
    if (s == "non-converged") return RunStatus::NonConverged;
    throw DomainError("unknown run status '" + s + "'");
}

struct RunRecord {
    std::size_t distribution_index = 0;
    std::size_t size_index = 0;
    double target_breakdowns = 0.0;
    std::size_t replication = 0;
    std::uint64_t seed = 0;
    double true_scale = 0.0;
    double true_shape = 0.0;
    double total_records = 0.0;
    double theoretical_breakdowns = 0.0;
    std::int64_t recorded_breakdowns = 0;
    RunStatus status = RunStatus::Ok;
    double fitted_scale = std::numeric_limits<double>::quiet_NaN();
    double fitted_shape = std::numeric_limits<double>::quiet_NaN();
    double log_likelihood = std::numeric_limits<double>::quiet_NaN();
    std::size_t iterations = 0;
    double predicted_breakdowns = std::numeric_limits<double>::quiet_NaN();
    MetricReport cdf{};
    MetricReport cfb{};
    MetricReport cfb_empirical{};
    std::size_t clamped_levels = 0;

    // Fitted and scored (converged or not); excludes non-identifiable runs.
    bool identifiable() const { return status == RunStatus::Ok || status == RunStatus::NonConverged; }
};

struct StudyResults {
    std::vector<RunRecord> runs;  // ordered by (distribution, size, replication)
};

inline std::uint64_t run_seed(std::uint64_t master, std::size_t dist, std::size_t size, std::size_t rep) {
    return derive_key({master, dist, size, rep});
}

// Per-(distribution, size) profiles: the calibrated base shape times the
// distribution's record multiplier, rescaled to the target expectation.
inline std::vector<std::vector<IntensityProfile>> study_profiles(const StudyConfig& config) {
    const IntensityProfile base = calibrate_base_profile(config.base_profile).profile;
    std::vector<std::vector<IntensityProfile>> out;
    for (const auto& d : config.distributions) {
        const IntensityProfile scaled = scale_records(base, d.profile_scale);
        std::vector<IntensityProfile> row;
        for (double target : config.target_breakdowns) row.push_back(rescale_profile(scaled, d.dist, target));
        out.push_back(std::move(row));
    }
    return out;
}

// Fits one dataset and scores it; never throws for non-identifiable data.
inline RunRecord evaluate_run(const PseudoEmpiricalDataset& ds, const WeibullCapacity& truth, FitOptions options) {
    RunRecord rec;
    rec.seed = ds.generator_seed;
    rec.true_scale = truth.scale();
    rec.true_shape = truth.shape();
    rec.total_records = ds.profile.total_records();
    rec.theoretical_breakdowns = total_expected_breakdowns(ds.profile, truth);
    rec.recorded_breakdowns = ds.total_breakdowns();
    rec.clamped_levels = ds.clamped_levels;

    const CensoredHistogram data = ds.histogram();
    options.seed = derive_key({ds.generator_seed, 0x666974ULL});
    std::optional<EstimateResult> est;
    try {
        est = fit(data, options);
    } catch (const NonIdentifiable& e) {
        rec.status = e.reason() == Identifiability::NoBreakdowns ? RunStatus::NoBreakdowns : RunStatus::NoSurvivals;
        return rec;
    }
    rec.status = est->converged ? RunStatus::Ok : RunStatus::NonConverged;
    rec.fitted_scale = est->fitted.scale();
    rec.fitted_shape = est->fitted.shape();
    rec.log_likelihood = est->log_likelihood;
    rec.iterations = est->iterations;
    rec.predicted_breakdowns = predicted_breakdowns(data, est->fitted);
    rec.cdf = evaluate(curve_pair_for_cdf(est->fitted, truth, ds.profile));
    rec.cfb = evaluate(curve_pair_for_cfb(est->fitted, truth, ds.profile, CfbFlavor::Theoretical));
    rec.cfb_empirical =
        evaluate(curve_pair_for_cfb(est->fitted, truth, ds.profile, CfbFlavor::Empirical, ds.breakdowns));
    return rec;
}

// Regenerates the dataset behind one run of a study.
inline PseudoEmpiricalDataset regenerate_dataset(const StudyConfig& config, std::size_t dist, std::size_t size,
                                                 std::size_t rep) {
    config.validate();
    if (dist >= config.distributions.size() || size >= config.target_breakdowns.size() || rep >= config.replications)
        throw DomainError("run index outside the study grid");
    const auto profiles = study_profiles(config);
    return generate_dataset(profiles[dist][size], config.distributions[dist].dist,
                            run_seed(config.master_seed, dist, size, rep));
}

// Executes every run on up to `jobs` threads. Output order and content do
// not depend on `jobs`.
inline StudyResults run_study(const StudyConfig& config, std::size_t jobs = 1) {
    config.validate();
    const auto profiles = study_profiles(config);
    const std::size_t nd = config.distributions.size(), ns = config.target_breakdowns.size(),
                      nr = config.replications;
    const std::size_t total = nd * ns * nr;

    StudyResults results;
    results.runs.resize(total);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::string error;

    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= total || failed.load()) return;
            const std::size_t d = k / (ns * nr), s = (k / nr) % ns, r = k % nr;
            try {
                const auto& dist = config.distributions[d].dist;
                const auto ds = generate_dataset(profiles[d][s], dist, run_seed(config.master_seed, d, s, r));
                RunRecord rec = evaluate_run(ds, dist, config.estimator);
                rec.distribution_index = d;
                rec.size_index = s;
                rec.target_breakdowns = config.target_breakdowns[s];
                rec.replication = r;
                results.runs[k] = rec;
            } catch (const std::exception& e) {
                std::lock_guard lock(error_mutex);
                if (!failed.exchange(true))
                    error = "run (distribution " + std::to_string(d) + ", size " + std::to_string(s) +
                            ", replication " + std::to_string(r) + ") failed: " + e.what();
            }
        }
    };

    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(total, 1));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < jobs; ++i) pool.emplace_back(worker);
    }
    if (failed) throw std::runtime_error(error);
    return results;
}

// Named scalar fields of a run, used for summaries and CSV columns.
struct RunField {
    const char* name;
    double (*get)(const RunRecord&);
};

inline const std::vector<RunField>& summary_fields() {
    static const std::vector<RunField> fields{
        {"total_records", [](const RunRecord& r) { return r.total_records; }},
        {"recorded_breakdowns", [](const RunRecord& r) { return static_cast<double>(r.recorded_breakdowns); }},
        {"fitted_scale", [](const RunRecord& r) { return r.fitted_scale; }},
        {"fitted_shape", [](const RunRecord& r) { return r.fitted_shape; }},
        {"predicted_breakdowns", [](const RunRecord& r) { return r.predicted_breakdowns; }},
        {"cdf_rmse", [](const RunRecord& r) { return r.cdf.rmse; }},
        {"cdf_are", [](const RunRecord& r) { return r.cdf.are; }},
        {"cdf_awre", [](const RunRecord& r) { return r.cdf.awre; }},
        {"cfb_rmse", [](const RunRecord& r) { return r.cfb.rmse; }},
        {"cfb_are", [](const RunRecord& r) { return r.cfb.are; }},
        {"cfb_awre", [](const RunRecord& r) { return r.cfb.awre; }},
        {"cfb_emp_rmse", [](const RunRecord& r) { return r.cfb_empirical.rmse; }},
        {"cfb_emp_are", [](const RunRecord& r) { return r.cfb_empirical.are; }},
        {"cfb_emp_awre", [](const RunRecord& r) { return r.cfb_empirical.awre; }},
    };
    return fields;
}

struct CellSummary {
    std::size_t distribution_index = 0;
    double target_breakdowns = 0.0;
    double theoretical_breakdowns = 0.0;
    std::size_t runs = 0;
    std::size_t identifiable_runs = 0;
    std::vector<std::pair<std::string, SummaryStats>> fields;

    const SummaryStats& field(const std::string& name) const {
        for (const auto& [n, s] : fields)
            if (n == name) return s;
        throw DomainError("no summary field '" + name + "'");
    }
};

struct ScatterPoint {
    std::int64_t recorded_breakdowns;
    double awre;
};

struct StudySummary {
    std::vector<CellSummary> cells;
    std::vector<ScatterPoint> scatter;  // identifiable runs: (breakdowns, CDF AWRE)
    double spearman_log_breakdowns_vs_awre = std::numeric_limits<double>::quiet_NaN();
    double pearson_cfb_vs_cdf_awre = std::numeric_limits<double>::quiet_NaN();
    std::size_t non_identifiable_runs = 0;
    std::size_t non_converged_runs = 0;
    std::size_t clamped_levels = 0;
};

inline StudySummary summarize(const StudyResults& results) {
    if (results.runs.empty()) throw DomainError("no runs to summarise");
    StudySummary out;

    std::vector<std::pair<std::size_t, double>> keys;
    for (const auto& r : results.runs) {
        const std::pair<std::size_t, double> key{r.distribution_index, r.target_breakdowns};
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    for (const auto& [d, target] : keys) {
        CellSummary cell;
        cell.distribution_index = d;
        cell.target_breakdowns = target;
        std::vector<const RunRecord*> members;
        for (const auto& r : results.runs)
            if (r.distribution_index == d && r.target_breakdowns == target) members.push_back(&r);
        cell.runs = members.size();
        cell.theoretical_breakdowns = members.front()->theoretical_breakdowns;
        for (const auto* r : members) cell.identifiable_runs += r->identifiable() ? 1 : 0;
        for (const auto& f : summary_fields()) {
            std::vector<double> v;
            for (const auto* r : members) {
                const bool raw_field = std::string(f.name) == "total_records" || std::string(f.name) == "recorded_breakdowns";
                if (raw_field || r->identifiable()) v.push_back(f.get(*r));
            }
            cell.fields.emplace_back(f.name, summarize_sample(v));
        }
        out.cells.push_back(std::move(cell));
    }

    std::vector<double> logb, awre_cdf, awre_cfb;
    for (const auto& r : results.runs) {
        out.clamped_levels += r.clamped_levels;
        if (!r.identifiable()) {
            ++out.non_identifiable_runs;
            continue;
        }
        if (r.status == RunStatus::NonConverged) ++out.non_converged_runs;
        out.scatter.push_back({r.recorded_breakdowns, r.cdf.awre});
        logb.push_back(std::log(static_cast<double>(r.recorded_breakdowns)));
        awre_cdf.push_back(r.cdf.awre);
        awre_cfb.push_back(r.cfb.awre);
    }
    if (logb.size() >= 2) {
        out.spearman_log_breakdowns_vs_awre = spearman(logb, awre_cdf);
        out.pearson_cfb_vs_cdf_awre = pearson(awre_cfb, awre_cdf);
    }
    return out;
}

enum class ErrorResponse { CdfAwre, CfbAwre };

inline std::vector<RegressionObservation> to_regression_observations(const StudyResults& results,
                                                                     ErrorResponse response) {
    std::vector<RegressionObservation> out;
    for (const auto& r : results.runs) {
        if (!r.identifiable()) continue;
        out.push_back({r.total_records, r.recorded_breakdowns,
                       response == ErrorResponse::CdfAwre ? r.cdf.awre : r.cfb.awre});
    }
    return out;
}

}  // namespace stochcap
