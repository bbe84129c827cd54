#pragma once

// Pseudo-empirical breakdown data. Expected breakdowns per level follow
// from the true capacity CDF and the demand histogram; realised counts are
// drawn as sums of Bernoulli trials so that their expectation matches.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "histogram.hpp"
#include "rng.hpp"
#include "weibull.hpp"

namespace stochcap {

// b̄_j = r_j * F(I_j)
inline std::vector<double> expected_breakdowns(const IntensityProfile& profile, const WeibullCapacity& dist) {
    std::vector<double> out(profile.size());
    for (std::size_t j = 0; j < profile.size(); ++j)
        out[j] = profile.records()[j] * breakdown_probability(dist, profile.levels()[j]);
    return out;
}

inline double total_expected_breakdowns(const IntensityProfile& profile, const WeibullCapacity& dist) {
    const auto b = expected_breakdowns(profile, dist);
    return std::accumulate(b.begin(), b.end(), 0.0);
}

enum class CfbFlavor { Theoretical, Empirical };

// Cumulative frequency of breakdowns over ascending intensity levels.
struct CfbCurve {
    std::vector<double> levels;
    std::vector<double> values;
    CfbFlavor flavor = CfbFlavor::Empirical;

    double final_value() const { return values.empty() ? 0.0 : values.back(); }
};

template <class T>
CfbCurve cumulative_frequency(std::span<const double> levels, std::span<const T> counts, CfbFlavor flavor) {
    if (levels.size() != counts.size()) throw DomainError("CF_B counts do not align with levels");
    CfbCurve curve{{levels.begin(), levels.end()}, std::vector<double>(counts.size()), flavor};
    double cum = 0.0;
    for (std::size_t j = 0; j < counts.size(); ++j) {
        cum += static_cast<double>(counts[j]);
        curve.values[j] = cum;
    }
    return curve;
}

inline CfbCurve theoretical_cfb(const IntensityProfile& profile, const WeibullCapacity& dist) {
    const auto b = expected_breakdowns(profile, dist);
    return cumulative_frequency<double>(profile.levels(), b, CfbFlavor::Theoretical);
}

// Number of Bernoulli components used when b̄ >= 1: enough that each
// component probability b̄/n is below 1 with headroom to realise more than
// the expected count.
inline std::size_t component_count(double expected) {
    if (expected < 1.0) return 1;
    return static_cast<std::size_t>(std::max(std::ceil(expected) + 1.0, std::ceil(2.0 * expected)));
}

// Threshold rule: success iff draw <= p.
constexpr int bernoulli_from_draw(double draw, double p) noexcept { return draw <= p ? 1 : 0; }

struct BreakdownDraw {
    std::int64_t count = 0;
    bool clamped = false;
};

// Realised breakdowns at one level: a sum of n Bernoulli(b̄/n) trials,
// clamped to ceil(records). `components` overrides the default count.
template <class Rng>
BreakdownDraw sample_breakdowns(double expected, double records, Rng& rng,
                                std::optional<std::size_t> components = std::nullopt) {
    if (!(expected >= 0.0) || !std::isfinite(expected))
        throw DomainError("expected breakdowns must be finite and >= 0");
    if (expected > 0.0 && !(expected < records))
        throw DomainError("expected breakdowns " + std::to_string(expected) + " must be below records " +
                          std::to_string(records));
    if (expected == 0.0) return {};

    const std::size_t n = components.value_or(component_count(expected));
    if (n == 0) throw DomainError("component count must be positive");
    const double p = expected / static_cast<double>(n);
    if (!(p <= 1.0)) throw DomainError("component probability exceeds 1");

    std::int64_t hits = 0;
    for (std::size_t k = 0; k < n; ++k) hits += bernoulli_from_draw(rng.uniform(), p);

    const auto cap = static_cast<std::int64_t>(std::ceil(records));
    if (hits > cap) return {cap, true};
    return {hits, false};
}

struct PseudoEmpiricalDataset {
    IntensityProfile profile;
    std::vector<std::int64_t> breakdowns;
    std::uint64_t generator_seed = 0;
    std::size_t clamped_levels = 0;

    CensoredHistogram histogram() const { return CensoredHistogram(profile, breakdowns); }

    std::int64_t total_breakdowns() const {
        return std::accumulate(breakdowns.begin(), breakdowns.end(), std::int64_t{0});
    }

    CfbCurve empirical_cfb() const {
        return cumulative_frequency<std::int64_t>(profile.levels(), breakdowns, CfbFlavor::Empirical);
    }
};

// Level j draws from the substream keyed by (seed, j), so the result does
// not depend on evaluation order.
inline PseudoEmpiricalDataset generate_dataset(const IntensityProfile& profile, const WeibullCapacity& dist,
                                               std::uint64_t seed) {
    const auto expected = expected_breakdowns(profile, dist);
    const CounterRng root(derive_key({seed, 0x73796e7468ULL}));
    PseudoEmpiricalDataset ds{profile, std::vector<std::int64_t>(profile.size()), seed, 0};
    for (std::size_t j = 0; j < profile.size(); ++j) {
        CounterRng rng = root.substream(j);
        const BreakdownDraw d = sample_breakdowns(expected[j], profile.records()[j], rng);
        ds.breakdowns[j] = d.count;
        ds.clamped_levels += d.clamped ? 1 : 0;
    }
    return ds;
}

inline IntensityProfile scale_records(const IntensityProfile& profile, double factor) {
    if (!(factor > 0.0) || !std::isfinite(factor)) throw DomainError("record scale factor must be positive");
    std::vector<double> r(profile.records().begin(), profile.records().end());
    for (double& x : r) x *= factor;
    return IntensityProfile({profile.levels().begin(), profile.levels().end()}, std::move(r));
}

// Multiplies every record weight so that the expected breakdown total under
// `dist` equals `target`. Weights stay fractional.
inline IntensityProfile rescale_profile(const IntensityProfile& profile, const WeibullCapacity& dist,
                                        double target) {
    if (!(target > 0.0) || !std::isfinite(target)) throw DomainError("target expected breakdowns must be positive");
    const double current = total_expected_breakdowns(profile, dist);
    if (!(current > 0.0)) throw DomainError("profile has zero expected breakdowns under this distribution");
    return scale_records(profile, target / current);
}

// Parameters of the synthetic demand histogram used in place of field data.
struct BaseProfileSpec {
    double level_min = 1.0;
    double level_max = 250.0;
    double level_step = 1.0;
    double total_records = 7447.0;
    WeibullCapacity dist{150.0, 6.5};
    double target_expected_breakdowns = 52.0;
    double relative_spread = 0.4;  // left-side sd as a fraction of the mode
    double mode_probability = 0.005;
    double truncation_sd = 3.0;    // support half-width in left-side sds
};

struct CalibratedProfile {
    IntensityProfile profile;
    double tail_parameter;
    double mode;
};

namespace detail {

inline std::vector<double> level_grid(const BaseProfileSpec& spec) {
    if (!(spec.level_min > 0.0)) throw DomainError("level_min must be positive");
    if (!(spec.level_min < spec.level_max)) throw DomainError("level_min must be below level_max");
    if (!(spec.level_step > 0.0)) throw DomainError("level_step must be positive");
    std::vector<double> levels;
    const auto n = static_cast<std::size_t>(std::floor((spec.level_max - spec.level_min) / spec.level_step + 1e-9));
    levels.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) levels.push_back(spec.level_min + static_cast<double>(i) * spec.level_step);
    return levels;
}

// Split-normal weights: sd `left` below the mode, `left * tail` above it,
// zero outside mode +/- truncation * left, normalised to `total`.
inline std::vector<double> split_normal_records(std::span<const double> levels, double mode, double left,
                                                double tail, double truncation, double total) {
    const double right = left * tail;
    std::vector<double> w(levels.size());
    for (std::size_t j = 0; j < levels.size(); ++j) {
        if (std::abs(levels[j] - mode) > truncation * left) continue;
        const double z = (levels[j] - mode) / (levels[j] <= mode ? left : right);
        w[j] = std::exp(-0.5 * z * z);
    }
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    if (!(sum > 0.0)) throw DomainError("profile grid holds no mass around the mode");
    for (double& x : w) x *= total / sum;
    return w;
}

}  // namespace detail

// Unimodal demand histogram peaking near the `mode_probability` quantile of
// the capacity distribution, with the right-tail width found by bisection so
// the expected breakdown total hits the target.
inline CalibratedProfile calibrate_base_profile(const BaseProfileSpec& spec) {
    if (!(spec.total_records > 0.0)) throw DomainError("total_records must be positive");
    if (!(spec.target_expected_breakdowns > 0.0)) throw DomainError("target expected breakdowns must be positive");
    if (!(spec.relative_spread > 0.0)) throw DomainError("relative_spread must be positive");
    if (!(spec.truncation_sd > 0.0)) throw DomainError("truncation_sd must be positive");

    const auto levels = detail::level_grid(spec);
    const double bound = spec.total_records * breakdown_probability(spec.dist, levels.back());
    if (!(spec.target_expected_breakdowns < bound))
        throw DomainError("infeasible calibration: target " + std::to_string(spec.target_expected_breakdowns) +
                          " must be below total_records * F(level_max) = " + std::to_string(bound));

    const double mode = std::clamp(quantile(spec.dist, spec.mode_probability), levels.front(), levels.back());
    const double left = spec.relative_spread * mode;
    auto expected_total = [&](double tail) {
        const auto r = detail::split_normal_records(levels, mode, left, tail, spec.truncation_sd, spec.total_records);
        double s = 0.0;
        for (std::size_t j = 0; j < levels.size(); ++j) s += r[j] * breakdown_probability(spec.dist, levels[j]);
        return s;
    };

    // Bisection on ln(tail); the expected total increases with the tail width.
    double lo = std::log(1e-8), hi = std::log(1e4);
    const double target = spec.target_expected_breakdowns;
    const double at_lo = expected_total(std::exp(lo)), at_hi = expected_total(std::exp(hi));
    if (target < at_lo)
        throw DomainError("infeasible calibration: target below the minimum reachable expected total " +
                          std::to_string(at_lo));
    if (target > at_hi)
        throw DomainError("infeasible calibration: target above the maximum reachable expected total " +
                          std::to_string(at_hi));
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (expected_total(std::exp(mid)) < target ? lo : hi) = mid;
    }
    const double tail = std::exp(0.5 * (lo + hi));
    auto records = detail::split_normal_records(levels, mode, left, tail, spec.truncation_sd, spec.total_records);
    return {IntensityProfile(levels, std::move(records)), tail, mode};
}

}  // namespace stochcap
