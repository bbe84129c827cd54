#pragma once

// Command implementations behind the `stochcap` executable. Each command
// takes parsed arguments plus output/error streams and returns an exit code,
// so the same code paths are exercised by the tests.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stochcap/csv.hpp"
#include "stochcap/estimator.hpp"
#include "stochcap/json_io.hpp"
#include "stochcap/metrics.hpp"
#include "stochcap/regression.hpp"
#include "stochcap/study.hpp"
#include "stochcap/svg_plot.hpp"
#include "stochcap/synthetic.hpp"

namespace stochcap::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsage = 2,
    kInvalidInput = 3,
    kNonIdentifiable = 4,
    kNonConverged = 5,
};

// Usage problem detected after flag parsing.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    if (s.empty()) out.emplace_back();
    return out;
}

inline std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

inline double parse_number(const std::string& s, const std::string& what) {
    const std::string t = strip(s);
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &pos);
    } catch (const std::exception&) {
        throw UsageError(what + ": '" + s + "' is not a number");
    }
    if (pos != t.size()) throw UsageError(what + ": '" + s + "' is not a number");
    return v;
}

// "scale,shape"
inline WeibullCapacity parse_distribution(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.size() != 2) throw UsageError("distribution must be given as 'scale,shape', got '" + s + "'");
    try {
        return WeibullCapacity(parse_number(parts[0], "scale"), parse_number(parts[1], "shape"));
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
}

// "total=7447,target=52[,min=..,max=..,step=..,spread=..,mode_p=..,trunc=..]"
inline BaseProfileSpec parse_calibration(const std::string& s, const WeibullCapacity& dist) {
    BaseProfileSpec spec;
    spec.dist = dist;
    bool have_total = false, have_target = false;
    for (const auto& item : split(s, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("calibration entry '" + item + "' is not key=value");
        const std::string key = strip(item.substr(0, eq));
        const double v = parse_number(item.substr(eq + 1), "calibration " + key);
        if (key == "total") spec.total_records = v, have_total = true;
        else if (key == "target") spec.target_expected_breakdowns = v, have_target = true;
        else if (key == "min") spec.level_min = v;
        else if (key == "max") spec.level_max = v;
        else if (key == "step") spec.level_step = v;
        else if (key == "spread") spec.relative_spread = v;
        else if (key == "mode_p") spec.mode_probability = v;
        else if (key == "trunc") spec.truncation_sd = v;
        else throw UsageError("unknown calibration key '" + key + "'");
    }
    if (!have_total || !have_target) throw UsageError("calibration needs both total= and target=");
    return spec;
}

inline std::vector<std::vector<Regressor>> parse_model_list(const std::string& s) {
    std::vector<std::vector<Regressor>> models;
    for (const auto& m : split(s, ';')) {
        std::vector<Regressor> vars;
        const std::string body = strip(m);
        if (!body.empty())
            for (const auto& v : split(body, ',')) {
                try {
                    vars.push_back(parse_regressor(strip(v)));
                } catch (const DomainError& e) {
                    throw UsageError(e.what());
                }
            }
        models.push_back(std::move(vars));
    }
    return models;
}

inline ProfileTable load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_profile_csv(in);
}

inline StudyResults load_results(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_runs_csv(in);
}

inline StudyConfig load_config(const std::optional<std::string>& path) {
    if (!path) return StudyConfig{};
    std::ifstream in(*path);
    if (!in) throw std::runtime_error("cannot open '" + *path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("config is not valid JSON: ") + e.what());
    }
    return study_config_from_json(j);
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
    std::string input;
    std::optional<double> fixed_shape;
    std::optional<std::string> truth;
    std::size_t multistart = 5;
    std::uint64_t seed = 0;
};

inline int cmd_estimate(const EstimateArgs& args, std::ostream& out, std::ostream& err) {
    try {
        std::optional<WeibullCapacity> truth;
        if (args.truth) truth = parse_distribution(*args.truth);
        const ProfileTable table = load_profile(args.input);
        if (!table.breakdowns) {
            err << "error: input has no breakdowns column\n";
            return kInvalidInput;
        }
        const CensoredHistogram data = table.histogram();

        FitOptions opt;
        opt.fixed_shape = args.fixed_shape;
        opt.multistart_count = args.multistart;
        opt.seed = args.seed;
        const EstimateResult est = fit(data, opt);

        nlohmann::json j;
        j["schema_version"] = json_schema_version;
        j["fitted"] = {{"scale", est.fitted.scale()}, {"shape", est.fitted.shape()}};
        j["log_likelihood"] = est.log_likelihood;
        j["converged"] = est.converged;
        j["iterations"] = est.iterations;
        j["fixed_shape"] = est.fixed_shape ? nlohmann::json(*est.fixed_shape) : nlohmann::json(nullptr);
        j["total_records"] = data.total_records();
        j["recorded_breakdowns"] = data.total_breakdowns();
        j["predicted_breakdowns"] = predicted_breakdowns(data, est.fitted);
        if (truth) {
            const IntensityProfile profile = data.profile();
            std::vector<std::int64_t> b(data.breakdowns().begin(), data.breakdowns().end());
            j["truth"] = {{"scale", truth->scale()}, {"shape", truth->shape()}};
            j["metrics"] = {
                {"cdf", to_json(evaluate(curve_pair_for_cdf(est.fitted, *truth, profile)))},
                {"cfb", to_json(evaluate(curve_pair_for_cfb(est.fitted, *truth, profile, CfbFlavor::Theoretical)))},
                {"cfb_empirical",
                 to_json(evaluate(curve_pair_for_cfb(est.fitted, *truth, profile, CfbFlavor::Empirical, b)))}};
        }
        out << std::setw(2) << j << '\n';
        if (!est.converged) {
            err << "warning: optimiser hit the iteration cap before converging\n";
            return kNonConverged;
        }
        return kSuccess;
    } catch (const NonIdentifiable& e) {
        err << "error: " << e.what() << '\n';
        return kNonIdentifiable;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }
}

// ------------------------------------------------------------------- synth

struct SynthArgs {
    std::optional<std::string> profile;
    std::optional<std::string> calibrate;
    std::string dist;
    std::uint64_t seed = 0;
    std::optional<double> target_breakdowns;
};

inline int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err) {
    try {
        if (args.profile.has_value() == args.calibrate.has_value())
            throw UsageError("give exactly one of --profile or --calibrate");
        const WeibullCapacity dist = parse_distribution(args.dist);
        IntensityProfile profile = args.profile ? load_profile(*args.profile).profile()
                                                : calibrate_base_profile(parse_calibration(*args.calibrate, dist)).profile;
        if (args.target_breakdowns) profile = rescale_profile(profile, dist, *args.target_breakdowns);
        const PseudoEmpiricalDataset ds = generate_dataset(profile, dist, args.seed);
        if (ds.clamped_levels) err << "note: " << ds.clamped_levels << " level(s) clamped to their record count\n";
        write_profile_csv(out, ds.profile, &ds.breakdowns);
        return kSuccess;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }
}

// ------------------------------------------------------------------- study

struct StudyArgs {
    std::optional<std::string> config;
    std::string out;
    std::optional<std::string> summary;
    std::size_t jobs = 1;
};

inline int cmd_study(const StudyArgs& args, std::ostream& err) {
    try {
        const StudyConfig config = load_config(args.config);
        const StudyResults results = run_study(config, args.jobs);
        {
            std::ofstream f(args.out);
            if (!f) throw std::runtime_error("cannot write '" + args.out + "'");
            write_runs_csv(f, results);
        }
        const StudySummary summary = summarize(results);
        if (args.summary) {
            std::ofstream f(*args.summary);
            if (!f) throw std::runtime_error("cannot write '" + *args.summary + "'");
            nlohmann::json j = to_json(summary);
            j["config"] = to_json(config);
            f << std::setw(2) << j << '\n';
        }
        err << results.runs.size() << " runs written to " << args.out << " (" << summary.non_identifiable_runs
            << " non-identifiable, " << summary.non_converged_runs << " non-converged)\n";
        return kSuccess;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }
}

// ----------------------------------------------------------------- regress

struct RegressArgs {
    std::string results;
    std::string response = "cdf-awre";
    std::string models = "x5;x3,x4;x3,x4,x5";
    std::optional<std::string> out;
};

inline ErrorResponse parse_response(const std::string& s) {
    if (s == "cdf-awre") return ErrorResponse::CdfAwre;
    if (s == "cfb-awre") return ErrorResponse::CfbAwre;
    throw UsageError("--response must be cdf-awre or cfb-awre");
}

inline void print_ranking(std::ostream& os, const ScreeningResult& sr) {
    auto row = [&](const ScreenedModel& m, const char* tag) {
        os << std::left << std::setw(12) << describe_subset(m.variables) << " R2=" << std::fixed << std::setprecision(4)
           << m.model.r_squared << "  n=" << m.model.n << "  " << tag;
        for (const auto& v : m.insignificant) os << ' ' << v;
        os << '\n';
        os.unsetf(std::ios::floatfield);
        for (std::size_t c = 0; c < m.model.columns.size(); ++c)
            os << "    " << std::left << std::setw(10) << m.model.columns[c] << " coef=" << std::setprecision(6)
               << m.model.coefficients[c] << "  p=" << std::setprecision(4) << m.model.p_values[c] << "  95%CI=["
               << std::setprecision(6) << m.model.ci_lower[c] << ", " << m.model.ci_upper[c] << "]\n";
    };
    os << "models passing p<0.05, by R2:\n";
    for (const auto& m : sr.ranked) row(m, "");
    if (!sr.flagged.empty()) {
        os << "models with insignificant regressors:\n";
        for (const auto& m : sr.flagged) row(m, "insignificant:");
    }
    for (const auto& [vars, why] : sr.failed) os << describe_subset(vars) << " failed: " << why << '\n';
}

inline int cmd_regress(const RegressArgs& args, std::ostream& out, std::ostream& err) {
    try {
        const ErrorResponse response = parse_response(args.response);
        const auto candidates = parse_model_list(args.models);
        const StudyResults results = load_results(args.results);
        const auto obs = to_regression_observations(results, response);
        const ScreeningResult sr = screen_models(obs, candidates);

        nlohmann::json j;
        j["schema_version"] = json_schema_version;
        j["response"] = args.response;
        j["observations"] = obs.size();
        auto entry = [](const ScreenedModel& m) {
            nlohmann::json e = to_json(m.model);
            e["model"] = describe_subset(m.variables);
            e["insignificant"] = m.insignificant;
            e["rejected_rows"] = m.rejected_rows;
            return e;
        };
        j["ranked"] = nlohmann::json::array();
        for (const auto& m : sr.ranked) j["ranked"].push_back(entry(m));
        j["flagged"] = nlohmann::json::array();
        for (const auto& m : sr.flagged) j["flagged"].push_back(entry(m));
        j["failed"] = nlohmann::json::array();
        for (const auto& [vars, why] : sr.failed) j["failed"].push_back({{"model", describe_subset(vars)}, {"error", why}});

        if (args.out) {
            std::ofstream f(*args.out);
            if (!f) throw std::runtime_error("cannot write '" + *args.out + "'");
            f << std::setw(2) << j << '\n';
            print_ranking(out, sr);
        } else {
            out << std::setw(2) << j << '\n';
            print_ranking(err, sr);
        }
        if (sr.ranked.empty() && sr.flagged.empty()) return kInvalidInput;
        return kSuccess;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }
}

// -------------------------------------------------------------------- plot

struct PlotArgs {
    std::string results;
    std::string out;
    std::string kind = "awre-vs-breakdowns";
    std::optional<std::string> points;   // companion CSV; defaults to <out>.csv
    std::optional<std::string> config;   // cfb-curves: study that produced the results
    std::size_t run = 0;                 // cfb-curves: row index into the results
};

inline std::string companion_path(const PlotArgs& args) {
    if (args.points) return *args.points;
    const auto dot = args.out.rfind('.');
    const auto slash = args.out.rfind('/');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) return args.out.substr(0, dot) + ".csv";
    return args.out + ".csv";
}

inline int cmd_plot(const PlotArgs& args, std::ostream& err) {
    try {
        if (args.kind != "awre-vs-breakdowns" && args.kind != "cfb-curves")
            throw UsageError("--kind must be awre-vs-breakdowns or cfb-curves");
        const StudyResults results = load_results(args.results);
        if (results.runs.empty()) throw std::runtime_error("no runs to plot");

        PlotSpec spec;
        std::ostringstream companion;
        if (args.kind == "awre-vs-breakdowns") {
            const auto obs = to_regression_observations(results, ErrorResponse::CdfAwre);
            if (obs.empty()) throw std::runtime_error("no runs to plot");
            const FittedModel model = ols_fit(build_design(obs, {Regressor::X5}));
            const double a = model.coefficients[0], b = model.coefficients[1];

            PlotSeries pts{"pseudo-empirical runs", "#1f77b4", SeriesKind::Points, {}};
            std::int64_t bmin = obs.front().recorded_breakdowns, bmax = bmin;
            companion << "recorded_breakdowns,cdf_awre,model_awre\n";
            for (const auto& o : obs) {
                pts.points.emplace_back(static_cast<double>(o.recorded_breakdowns), o.response);
                bmin = std::min(bmin, o.recorded_breakdowns);
                bmax = std::max(bmax, o.recorded_breakdowns);
                companion << o.recorded_breakdowns << ',' << format_double(o.response) << ','
                          << format_double(predict(model, o)) << '\n';
            }
            PlotSeries curve{"AWRE = " + detail::fmt_num(a, 4) + " + (" + detail::fmt_num(b, 4) + ") ln B", "#d62728",
                             SeriesKind::Line, {}};
            for (int i = 0; i <= 200; ++i) {
                const double x = std::exp(std::log(static_cast<double>(bmin)) +
                                          (std::log(static_cast<double>(bmax)) - std::log(static_cast<double>(bmin))) * i / 200.0);
                curve.points.emplace_back(x, a + b * std::log(x));
            }
            spec.title = "Capacity CDF AWRE vs recorded breakdowns (R2 = " + detail::fmt_num(model.r_squared, 4) + ")";
            spec.x_label = "recorded breakdowns";
            spec.y_label = "AWRE of capacity CDF";
            spec.series = {std::move(pts), std::move(curve)};
        } else {
            if (args.run >= results.runs.size()) throw UsageError("--run is outside the results");
            const RunRecord& rec = results.runs[args.run];
            if (!rec.identifiable()) throw std::runtime_error("selected run has no fitted model");
            const StudyConfig config = load_config(args.config);
            const PseudoEmpiricalDataset ds =
                regenerate_dataset(config, rec.distribution_index, rec.size_index, rec.replication);
            if (ds.generator_seed != rec.seed)
                throw std::runtime_error("config does not reproduce the selected run (seed mismatch)");
            const WeibullCapacity truth(rec.true_scale, rec.true_shape);
            const WeibullCapacity fitted(rec.fitted_scale, rec.fitted_shape);
            const CfbCurve theo = theoretical_cfb(ds.profile, truth);
            const CfbCurve emp = ds.empirical_cfb();
            const CfbCurve est = theoretical_cfb(ds.profile, fitted);

            PlotSeries s_theo{"theoretical CF_B", "#2ca02c", SeriesKind::Line, {}};
            PlotSeries s_emp{"pseudo-empirical CF_B", "#1f77b4", SeriesKind::Points, {}};
            PlotSeries s_est{"estimated CF_B", "#d62728", SeriesKind::Line, {}};
            companion << "intensity,records,theoretical_cfb,empirical_cfb,estimated_cfb,true_cdf,estimated_cdf\n";
            for (std::size_t k = 0; k < ds.profile.size(); ++k) {
                if (!(ds.profile.records()[k] > 0.0)) continue;
                const double level = ds.profile.levels()[k];
                s_theo.points.emplace_back(level, theo.values[k]);
                s_emp.points.emplace_back(level, emp.values[k]);
                s_est.points.emplace_back(level, est.values[k]);
                companion << format_double(level) << ',' << format_double(ds.profile.records()[k]) << ','
                          << format_double(theo.values[k]) << ',' << format_double(emp.values[k]) << ','
                          << format_double(est.values[k]) << ',' << format_double(breakdown_probability(truth, level))
                          << ',' << format_double(breakdown_probability(fitted, level)) << '\n';
            }
            spec.title = "CF_B, run " + std::to_string(args.run) + " (AWRE CDF " +
                         detail::fmt_num(100.0 * rec.cdf.awre, 4) + "%)";
            spec.x_label = "traffic-flow intensity";
            spec.y_label = "cumulative breakdowns";
            spec.series = {std::move(s_theo), std::move(s_emp), std::move(s_est)};
        }

        {
            std::ofstream f(args.out);
            if (!f) throw std::runtime_error("cannot write '" + args.out + "'");
            write_svg(f, spec);
        }
        const std::string cpath = companion_path(args);
        std::ofstream c(cpath);
        if (!c) throw std::runtime_error("cannot write '" + cpath + "'");
        c << companion.str();
        return kSuccess;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }
}

}  // namespace stochcap::cli
