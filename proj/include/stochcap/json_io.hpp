#pragma once

// JSON documents: study configuration, study summary, estimation results
// and fitted regression models. Every document carries `schema_version`.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "estimator.hpp"
#include "metrics.hpp"
#include "regression.hpp"
#include "study.hpp"

namespace stochcap {

inline constexpr int json_schema_version = 1;

namespace detail {

using nlohmann::json;

// NaN and infinities are not representable in JSON; they become null.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline void reject_unknown(const json& obj, const std::string& where, std::set<std::string> known) {
    if (!obj.is_object()) throw DomainError(where + ": expected an object");
    for (const auto& [key, _] : obj.items())
        if (!known.count(key)) throw DomainError(where + "." + key + ": unknown field");
}

inline double get_real(const json& obj, const std::string& where, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw DomainError(where + "." + key + ": expected a number");
    return v.get<double>();
}

inline std::uint64_t get_uint(const json& obj, const std::string& where, const std::string& key, std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_unsigned()) throw DomainError(where + "." + key + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
}

}  // namespace detail

inline StudyConfig study_config_from_json(const nlohmann::json& j) {
    using detail::get_real;
    using detail::get_uint;
    detail::reject_unknown(j, "config", {"schema_version", "distributions", "target_breakdowns", "replications",
                                         "master_seed", "estimator", "base_profile"});
    StudyConfig c;
    if (j.contains("schema_version") && get_uint(j, "config", "schema_version", 0) != json_schema_version)
        throw DomainError("config.schema_version: unsupported version");

    if (j.contains("distributions")) {
        const auto& arr = j.at("distributions");
        if (!arr.is_array()) throw DomainError("config.distributions: expected an array");
        c.distributions.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string where = "config.distributions[" + std::to_string(i) + "]";
            detail::reject_unknown(arr[i], where, {"scale", "shape", "profile_scale"});
            if (!arr[i].contains("scale") || !arr[i].contains("shape"))
                throw DomainError(where + ": scale and shape are required");
            try {
                c.distributions.push_back({WeibullCapacity(get_real(arr[i], where, "scale", 0.0),
                                                           get_real(arr[i], where, "shape", 0.0)),
                                           get_real(arr[i], where, "profile_scale", 1.0)});
            } catch (const DomainError& e) {
                throw DomainError(where + ": " + e.what());
            }
        }
    }
    if (j.contains("target_breakdowns")) {
        const auto& arr = j.at("target_breakdowns");
        if (!arr.is_array()) throw DomainError("config.target_breakdowns: expected an array");
        c.target_breakdowns.clear();
        for (const auto& v : arr) {
            if (!v.is_number()) throw DomainError("config.target_breakdowns: expected numbers");
            c.target_breakdowns.push_back(v.get<double>());
        }
    }
    c.replications = get_uint(j, "config", "replications", c.replications);
    c.master_seed = get_uint(j, "config", "master_seed", c.master_seed);

    if (j.contains("estimator")) {
        const auto& e = j.at("estimator");
        detail::reject_unknown(e, "config.estimator",
                               {"multistart_count", "tolerance", "max_iterations", "fixed_shape"});
        c.estimator.multistart_count = get_uint(e, "config.estimator", "multistart_count", c.estimator.multistart_count);
        c.estimator.tolerance = get_real(e, "config.estimator", "tolerance", c.estimator.tolerance);
        c.estimator.max_iterations = get_uint(e, "config.estimator", "max_iterations", c.estimator.max_iterations);
        if (e.contains("fixed_shape") && !e.at("fixed_shape").is_null())
            c.estimator.fixed_shape = get_real(e, "config.estimator", "fixed_shape", 0.0);
        if (c.estimator.multistart_count < 1) throw DomainError("config.estimator.multistart_count: must be >= 1");
        if (!(c.estimator.tolerance > 0.0)) throw DomainError("config.estimator.tolerance: must be positive");
        if (c.estimator.fixed_shape && !(*c.estimator.fixed_shape > 0.0))
            throw DomainError("config.estimator.fixed_shape: must be positive");
    }
    if (j.contains("base_profile")) {
        const auto& b = j.at("base_profile");
        const std::string w = "config.base_profile";
        detail::reject_unknown(b, w, {"level_min", "level_max", "level_step", "total_records", "scale", "shape",
                                      "target_expected_breakdowns", "relative_spread", "mode_probability",
                                      "truncation_sd"});
        auto& p = c.base_profile;
        p.level_min = get_real(b, w, "level_min", p.level_min);
        p.level_max = get_real(b, w, "level_max", p.level_max);
        p.level_step = get_real(b, w, "level_step", p.level_step);
        p.total_records = get_real(b, w, "total_records", p.total_records);
        try {
            p.dist = WeibullCapacity(get_real(b, w, "scale", p.dist.scale()), get_real(b, w, "shape", p.dist.shape()));
        } catch (const DomainError& e) {
            throw DomainError(w + ": " + e.what());
        }
        p.target_expected_breakdowns = get_real(b, w, "target_expected_breakdowns", p.target_expected_breakdowns);
        p.relative_spread = get_real(b, w, "relative_spread", p.relative_spread);
        p.mode_probability = get_real(b, w, "mode_probability", p.mode_probability);
        p.truncation_sd = get_real(b, w, "truncation_sd", p.truncation_sd);
    }
    try {
        c.validate();
    } catch (const DomainError& e) {
        throw DomainError(std::string("config.") + e.what());
    }
    return c;
}

inline nlohmann::json to_json(const StudyConfig& c) {
    nlohmann::json j;
    j["schema_version"] = json_schema_version;
    j["distributions"] = nlohmann::json::array();
    for (const auto& d : c.distributions)
        j["distributions"].push_back({{"scale", d.dist.scale()}, {"shape", d.dist.shape()}, {"profile_scale", d.profile_scale}});
    j["target_breakdowns"] = c.target_breakdowns;
    j["replications"] = c.replications;
    j["master_seed"] = c.master_seed;
    j["estimator"] = {{"multistart_count", c.estimator.multistart_count},
                      {"tolerance", c.estimator.tolerance},
                      {"max_iterations", c.estimator.max_iterations},
                      {"fixed_shape", c.estimator.fixed_shape ? nlohmann::json(*c.estimator.fixed_shape) : nlohmann::json(nullptr)}};
    const auto& p = c.base_profile;
    j["base_profile"] = {{"level_min", p.level_min},
                         {"level_max", p.level_max},
                         {"level_step", p.level_step},
                         {"total_records", p.total_records},
                         {"scale", p.dist.scale()},
                         {"shape", p.dist.shape()},
                         {"target_expected_breakdowns", p.target_expected_breakdowns},
                         {"relative_spread", p.relative_spread},
                         {"mode_probability", p.mode_probability},
                         {"truncation_sd", p.truncation_sd}};
    return j;
}

inline nlohmann::json to_json(const SummaryStats& s) {
    using detail::number;
    return {{"count", s.count}, {"mean", number(s.mean)}, {"sd", number(s.sd)}, {"min", number(s.min)},
            {"q1", number(s.q1)}, {"median", number(s.median)}, {"q3", number(s.q3)}, {"max", number(s.max)}};
}

inline nlohmann::json to_json(const MetricReport& m) {
    using detail::number;
    return {{"rmse", number(m.rmse)}, {"are", number(m.are)}, {"awre", number(m.awre)},
            {"levels_compared", m.levels_compared}};
}

inline nlohmann::json to_json(const StudySummary& s) {
    using detail::number;
    nlohmann::json j;
    j["schema_version"] = json_schema_version;
    j["non_identifiable_runs"] = s.non_identifiable_runs;
    j["non_converged_runs"] = s.non_converged_runs;
    j["clamped_levels"] = s.clamped_levels;
    j["spearman_log_breakdowns_vs_cdf_awre"] = number(s.spearman_log_breakdowns_vs_awre);
    j["pearson_cfb_awre_vs_cdf_awre"] = number(s.pearson_cfb_vs_cdf_awre);
    j["cells"] = nlohmann::json::array();
    for (const auto& c : s.cells) {
        nlohmann::json cell{{"distribution_index", c.distribution_index},
                            {"target_breakdowns", c.target_breakdowns},
                            {"theoretical_breakdowns", c.theoretical_breakdowns},
                            {"runs", c.runs},
                            {"identifiable_runs", c.identifiable_runs}};
        for (const auto& [name, stats] : c.fields) cell["fields"][name] = to_json(stats);
        j["cells"].push_back(std::move(cell));
    }
    return j;
}

inline nlohmann::json to_json(const FittedModel& m) {
    using detail::number;
    nlohmann::json j;
    j["variables"] = m.columns;
    auto arr = [](const std::vector<double>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (double x : v) a.push_back(number(x));
        return a;
    };
    j["coefficients"] = arr(m.coefficients);
    j["std_errors"] = arr(m.std_errors);
    j["t_values"] = arr(m.t_values);
    j["p_values"] = arr(m.p_values);
    j["ci95_lower"] = arr(m.ci_lower);
    j["ci95_upper"] = arr(m.ci_upper);
    j["r_squared"] = number(m.r_squared);
    j["sse"] = number(m.sse);
    j["n"] = m.n;
    j["df"] = m.df;
    return j;
}

}  // namespace stochcap
