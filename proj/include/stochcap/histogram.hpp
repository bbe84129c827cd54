#pragma once

// Per-level record data. Observations sharing an intensity level are grouped:
// level j carries r_j records (possibly fractional after rescaling) of which
// b_j were immediately followed by a breakdown.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace stochcap {

namespace detail {

inline void check_levels(std::span<const double> levels) {
    for (std::size_t j = 0; j < levels.size(); ++j) {
        if (!(levels[j] > 0.0) || !std::isfinite(levels[j]))
            throw DomainError("intensity level " + std::to_string(j) + " must be positive and finite");
        if (j > 0 && !(levels[j] > levels[j - 1]))
            throw DomainError("intensity levels must be strictly increasing (level " + std::to_string(j) + ")");
    }
}

inline void check_records(std::span<const double> records) {
    double total = 0.0;
    for (std::size_t j = 0; j < records.size(); ++j) {
        if (!(records[j] >= 0.0) || !std::isfinite(records[j]))
            throw DomainError("record weight at level " + std::to_string(j) + " must be finite and >= 0");
        total += records[j];
    }
    if (!(total > 0.0)) throw DomainError("total record weight must be positive");
}

}  // namespace detail

// Demand histogram: records per intensity level.
class IntensityProfile {
public:
    IntensityProfile(std::vector<double> levels, std::vector<double> records)
        : levels_(std::move(levels)), records_(std::move(records)) {
        if (levels_.empty()) throw DomainError("profile has no levels");
        if (levels_.size() != records_.size())
            throw DomainError("profile levels and records differ in length");
        detail::check_levels(levels_);
        detail::check_records(records_);
    }

    std::span<const double> levels() const noexcept { return levels_; }
    std::span<const double> records() const noexcept { return records_; }
    std::size_t size() const noexcept { return levels_.size(); }

    double total_records() const noexcept {
        return std::accumulate(records_.begin(), records_.end(), 0.0);
    }

    friend bool operator==(const IntensityProfile&, const IntensityProfile&) = default;

private:
    std::vector<double> levels_;
    std::vector<double> records_;
};

// Profile plus realised breakdown counts; input to the estimator.
class CensoredHistogram {
public:
    CensoredHistogram(std::vector<double> levels, std::vector<double> records,
                      std::vector<std::int64_t> breakdowns)
        : levels_(std::move(levels)), records_(std::move(records)), breakdowns_(std::move(breakdowns)) {
        if (levels_.empty()) throw DomainError("histogram has no levels");
        if (levels_.size() != records_.size() || levels_.size() != breakdowns_.size())
            throw DomainError("histogram sequences differ in length");
        detail::check_levels(levels_);
        detail::check_records(records_);
        for (std::size_t j = 0; j < breakdowns_.size(); ++j) {
            if (breakdowns_[j] < 0)
                throw DomainError("breakdown count at level " + std::to_string(j) + " is negative");
            if (static_cast<double>(breakdowns_[j]) > std::ceil(records_[j]))
                throw DomainError("breakdown count at level " + std::to_string(j) + " exceeds its records");
        }
    }

    CensoredHistogram(const IntensityProfile& profile, std::vector<std::int64_t> breakdowns)
        : CensoredHistogram({profile.levels().begin(), profile.levels().end()},
                            {profile.records().begin(), profile.records().end()}, std::move(breakdowns)) {}

    std::span<const double> levels() const noexcept { return levels_; }
    std::span<const double> records() const noexcept { return records_; }
    std::span<const std::int64_t> breakdowns() const noexcept { return breakdowns_; }
    std::size_t size() const noexcept { return levels_.size(); }

    IntensityProfile profile() const { return IntensityProfile(levels_, records_); }

    double total_records() const noexcept {
        return std::accumulate(records_.begin(), records_.end(), 0.0);
    }

    std::int64_t total_breakdowns() const noexcept {
        return std::accumulate(breakdowns_.begin(), breakdowns_.end(), std::int64_t{0});
    }

    // Weight of the survival term at level j. Clamped at zero: a fractional
    // record weight may sit below a realised breakdown count.
    double censored_weight(std::size_t j) const noexcept {
        const double w = records_[j] - static_cast<double>(breakdowns_[j]);
        return w > 0.0 ? w : 0.0;
    }

    friend bool operator==(const CensoredHistogram&, const CensoredHistogram&) = default;

private:
    std::vector<double> levels_;
    std::vector<double> records_;
    std::vector<std::int64_t> breakdowns_;
};

}  // namespace stochcap
