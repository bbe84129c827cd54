#pragma once

// CSV carriers for profiles/datasets and study run records.
//
// Profile CSV: header `intensity,records` or `intensity,records,breakdowns`,
// one row per level in ascending intensity. Numbers are written in the
// shortest form that parses back to the identical double.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "errors.hpp"
#include "histogram.hpp"
#include "study.hpp"

namespace stochcap {

inline constexpr int run_csv_schema_version = 1;

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline double parse_real(std::string_view s, std::size_t line, std::size_t column) {
    if (s == "nan") return std::nan("");
    double v = 0.0;
    const auto* first = s.data();
    if (!s.empty() && s.front() == '+') ++first;
    const auto res = std::from_chars(first, s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError("expected a number, got '" + std::string(s) + "'", line, column);
    return v;
}

template <class Int>
Int parse_integer(std::string_view s, std::size_t line, std::size_t column) {
    Int v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError("expected an integer, got '" + std::string(s) + "'", line, column);
    return v;
}

}  // namespace detail

// Parsed profile CSV; `breakdowns` present iff the column was.
struct ProfileTable {
    std::vector<double> levels;
    std::vector<double> records;
    std::optional<std::vector<std::int64_t>> breakdowns;

    IntensityProfile profile() const { return IntensityProfile(levels, records); }

    CensoredHistogram histogram() const {
        if (!breakdowns) throw DomainError("input has no breakdowns column");
        return CensoredHistogram(levels, records, *breakdowns);
    }
};

inline ProfileTable read_profile_csv(std::istream& in) {
    ProfileTable t;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    std::size_t ncols = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto f = detail::split_fields(line);
        if (!have_header) {
            if (f.size() < 2 || f.size() > 3 || f[0] != "intensity" || f[1] != "records" ||
                (f.size() == 3 && f[2] != "breakdowns"))
                throw ParseError("header must be 'intensity,records[,breakdowns]'", lineno);
            ncols = f.size();
            if (ncols == 3) t.breakdowns.emplace();
            have_header = true;
            continue;
        }
        if (f.size() != ncols)
            throw ParseError("expected " + std::to_string(ncols) + " fields, got " + std::to_string(f.size()), lineno);
        const double level = detail::parse_real(f[0], lineno, 1);
        if (!(level > 0.0) || !std::isfinite(level)) throw ParseError("intensity must be positive", lineno, 1);
        if (!t.levels.empty() && !(level > t.levels.back()))
            throw ParseError("intensity must be strictly ascending", lineno, 1);
        const double rec = detail::parse_real(f[1], lineno, 2);
        if (!(rec >= 0.0) || !std::isfinite(rec)) throw ParseError("records must be finite and >= 0", lineno, 2);
        t.levels.push_back(level);
        t.records.push_back(rec);
        if (ncols == 3) {
            const auto b = detail::parse_integer<std::int64_t>(f[2], lineno, 3);
            if (b < 0) throw ParseError("breakdowns must be >= 0", lineno, 3);
            if (static_cast<double>(b) > std::ceil(rec)) throw ParseError("breakdowns exceed records", lineno, 3);
            t.breakdowns->push_back(b);
        }
    }
    if (!have_header) throw ParseError("missing header", lineno == 0 ? 1 : lineno);
    if (t.levels.empty()) throw ParseError("no data rows", lineno);
    double total = 0.0;
    for (double r : t.records) total += r;
    if (!(total > 0.0)) throw ParseError("total records must be positive", lineno);
    return t;
}

inline void write_profile_csv(std::ostream& out, const IntensityProfile& profile,
                              const std::vector<std::int64_t>* breakdowns = nullptr) {
    out << (breakdowns ? "intensity,records,breakdowns\n" : "intensity,records\n");
    for (std::size_t j = 0; j < profile.size(); ++j) {
        out << format_double(profile.levels()[j]) << ',' << format_double(profile.records()[j]);
        if (breakdowns) out << ',' << (*breakdowns)[j];
        out << '\n';
    }
}

// Run-record CSV. Column order is part of the schema.
inline const std::vector<std::string>& run_csv_columns() {
    static const std::vector<std::string> cols{
        "schema_version", "distribution_index", "size_index", "target_breakdowns", "replication", "seed",
        "true_scale", "true_shape", "total_records", "theoretical_breakdowns", "recorded_breakdowns", "status",
        "fitted_scale", "fitted_shape", "log_likelihood", "iterations", "predicted_breakdowns",
        "cdf_rmse", "cdf_are", "cdf_awre", "cdf_levels",
        "cfb_rmse", "cfb_are", "cfb_awre", "cfb_levels",
        "cfb_emp_rmse", "cfb_emp_are", "cfb_emp_awre", "cfb_emp_levels",
        "clamped_levels"};
    return cols;
}

inline void write_runs_csv(std::ostream& out, const StudyResults& results) {
    const auto& cols = run_csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    auto metric = [&](const MetricReport& m) {
        out << ',' << format_double(m.rmse) << ',' << format_double(m.are) << ',' << format_double(m.awre) << ','
            << m.levels_compared;
    };
    for (const auto& r : results.runs) {
        out << run_csv_schema_version << ',' << r.distribution_index << ',' << r.size_index << ','
            << format_double(r.target_breakdowns) << ',' << r.replication << ',' << r.seed << ','
            << format_double(r.true_scale) << ',' << format_double(r.true_shape) << ','
            << format_double(r.total_records) << ',' << format_double(r.theoretical_breakdowns) << ','
            << r.recorded_breakdowns << ',' << to_string(r.status) << ',' << format_double(r.fitted_scale) << ','
            << format_double(r.fitted_shape) << ',' << format_double(r.log_likelihood) << ',' << r.iterations << ','
            << format_double(r.predicted_breakdowns);
        metric(r.cdf);
        metric(r.cfb);
        metric(r.cfb_empirical);
        out << ',' << r.clamped_levels << '\n';
    }
}

inline StudyResults read_runs_csv(std::istream& in) {
    const auto& cols = run_csv_columns();
    StudyResults res;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto f = detail::split_fields(line);
        if (!have_header) {
            if (f.size() != cols.size()) throw ParseError("unexpected run CSV header", lineno);
            for (std::size_t i = 0; i < cols.size(); ++i)
                if (f[i] != cols[i]) throw ParseError("expected column '" + cols[i] + "'", lineno, i + 1);
            have_header = true;
            continue;
        }
        if (f.size() != cols.size())
            throw ParseError("expected " + std::to_string(cols.size()) + " fields, got " + std::to_string(f.size()), lineno);
        std::size_t c = 0;
        auto real = [&] { ++c; return detail::parse_real(f[c - 1], lineno, c); };
        auto size = [&] { ++c; return detail::parse_integer<std::size_t>(f[c - 1], lineno, c); };
        auto i64 = [&] { ++c; return detail::parse_integer<std::int64_t>(f[c - 1], lineno, c); };
        auto u64 = [&] { ++c; return detail::parse_integer<std::uint64_t>(f[c - 1], lineno, c); };

        const auto version = size();
        if (version != static_cast<std::size_t>(run_csv_schema_version))
            throw ParseError("unsupported schema_version " + std::to_string(version), lineno, 1);
        RunRecord r;
        r.distribution_index = size();
        r.size_index = size();
        r.target_breakdowns = real();
        r.replication = size();
        r.seed = u64();
        r.true_scale = real();
        r.true_shape = real();
        r.total_records = real();
        r.theoretical_breakdowns = real();
        r.recorded_breakdowns = i64();
        ++c;
        try {
            r.status = parse_run_status(std::string(f[c - 1]));
        } catch (const DomainError& e) {
            throw ParseError(e.what(), lineno, c);
        }
        r.fitted_scale = real();
        r.fitted_shape = real();
        r.log_likelihood = real();
        r.iterations = size();
        r.predicted_breakdowns = real();
        for (MetricReport* m : {&r.cdf, &r.cfb, &r.cfb_empirical}) {
            m->rmse = real();
            m->are = real();
            m->awre = real();
            m->levels_compared = size();
        }
        r.clamped_levels = size();
        res.runs.push_back(r);
    }
    if (!have_header) throw ParseError("missing header", 1);
    return res;
}

}  // namespace stochcap
