#pragma once

// Corrected maximum-likelihood estimation of the Weibull capacity
// distribution from censored per-level records. Every record contributes
// either ln F(I) (followed by a breakdown) or ln(1 - F(I)) (censored).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "histogram.hpp"
#include "nelder_mead.hpp"
#include "rng.hpp"
#include "weibull.hpp"

namespace stochcap {

// sum_j [ b_j ln F(I_j) + (r_j - b_j) ln(1 - F(I_j)) ]
inline double log_likelihood(const CensoredHistogram& data, const WeibullCapacity& dist) {
    double ll = 0.0;
    for (std::size_t j = 0; j < data.size(); ++j) {
        const double b = static_cast<double>(data.breakdowns()[j]);
        const double s = data.censored_weight(j);
        if (b > 0.0) ll += b * log_breakdown_probability(dist, data.levels()[j]);
        if (s > 0.0) ll += s * log_survival(dist, data.levels()[j]);
    }
    return ll;
}

// Expected breakdown count implied by `dist` on the histogram's records.
inline double predicted_breakdowns(const CensoredHistogram& data, const WeibullCapacity& dist) {
    double total = 0.0;
    for (std::size_t j = 0; j < data.size(); ++j)
        total += data.records()[j] * breakdown_probability(dist, data.levels()[j]);
    return total;
}

struct FitOptions {
    std::optional<double> fixed_shape;
    std::size_t multistart_count = 5;
    double tolerance = 1e-8;  // simplex diameter in (ln scale, ln shape)
    double f_tolerance = 1e-10;
    std::size_t max_iterations = 10'000;
    std::uint64_t seed = 0;   // multistart jitter
};

struct EstimateResult {
    WeibullCapacity fitted;
    double log_likelihood;
    bool converged;
    std::size_t iterations;
    std::optional<double> fixed_shape;
};

namespace detail {

inline constexpr double default_start_shape = 6.0;

// Intensity at which the cumulative breakdown count first exceeds 63% of
// its total; 1 - e^{-1} of the mass lies below the Weibull scale.
inline double start_scale(const CensoredHistogram& data) {
    const double total = static_cast<double>(data.total_breakdowns());
    double cum = 0.0;
    for (std::size_t j = 0; j < data.size(); ++j) {
        cum += static_cast<double>(data.breakdowns()[j]);
        if (cum > 0.63 * total) return data.levels()[j];
    }
    return data.levels().back();
}

inline void check_identifiable(const CensoredHistogram& data) {
    if (data.total_breakdowns() == 0) throw NonIdentifiable(Identifiability::NoBreakdowns);
    double censored = 0.0;
    for (std::size_t j = 0; j < data.size(); ++j) censored += data.censored_weight(j);
    if (!(censored > 0.0)) throw NonIdentifiable(Identifiability::NoSurvivals);
}

}  // namespace detail

// Maximises the log-likelihood over (ln scale, ln shape) with multi-start
// Nelder-Mead. Each start is re-launched from its optimum until the
// likelihood stops improving, which guards against simplex collapse.
inline EstimateResult fit(const CensoredHistogram& data, const FitOptions& options = {}) {
    detail::check_identifiable(data);
    if (options.fixed_shape && !(*options.fixed_shape > 0.0))
        throw DomainError("fixed shape must be positive");

    const bool fixed = options.fixed_shape.has_value();
    const double fixed_log_shape = fixed ? std::log(*options.fixed_shape) : 0.0;

    auto to_dist = [&](const std::vector<double>& x) {
        return WeibullCapacity(std::exp(x[0]), fixed ? std::exp(fixed_log_shape) : std::exp(x[1]));
    };
    auto objective = [&](const std::vector<double>& x) {
        if (!std::isfinite(x[0]) || std::abs(x[0]) > 700.0) return std::numeric_limits<double>::infinity();
        if (!fixed && (!std::isfinite(x[1]) || std::abs(x[1]) > 20.0)) return std::numeric_limits<double>::infinity();
        return -log_likelihood(data, to_dist(x));
    };

    SimplexOptions sopt;
    sopt.x_tolerance = options.tolerance;
    sopt.f_tolerance = options.f_tolerance;
    sopt.max_iterations = options.max_iterations;

    const double scale0 = detail::start_scale(data);
    const double shape0 = fixed ? *options.fixed_shape : detail::default_start_shape;
    CounterRng rng(derive_key({options.seed, 0x6d6c65ULL}));

    std::optional<SimplexResult> best;
    const std::size_t starts = options.multistart_count == 0 ? 1 : options.multistart_count;
    for (std::size_t s = 0; s < starts; ++s) {
        double scale = scale0, shape = shape0;
        if (s > 0) {
            scale *= 0.7 + 0.6 * rng.uniform();
            shape *= 0.7 + 0.6 * rng.uniform();
        }
        std::vector<double> x0{std::log(scale)};
        if (!fixed) x0.push_back(std::log(shape));

        SimplexResult run = nelder_mead(objective, x0, sopt);
        std::size_t iterations = run.iterations;
        for (int restart = 0; restart < 10 && run.converged; ++restart) {
            SimplexResult again = nelder_mead(objective, run.x, sopt);
            iterations += again.iterations;
            const double gain = run.value - again.value;
            if (again.value <= run.value) run = std::move(again);
            if (!(gain > options.f_tolerance)) break;
        }
        run.iterations = iterations;
        if (!best || run.value < best->value) best = std::move(run);
    }

    return EstimateResult{to_dist(best->x), -best->value,
                          best->converged && std::isfinite(best->value),
                          best->iterations, options.fixed_shape};
}

struct ParameterRange {
    double lo;
    double hi;
};

struct GridBest {
    WeibullCapacity dist;
    double log_likelihood;
};

// Exhaustive evaluation over a linear grid; the reference the optimiser is
// checked against.
inline GridBest grid_search(const CensoredHistogram& data, ParameterRange scale, ParameterRange shape,
                            std::size_t scale_steps, std::size_t shape_steps) {
    auto check = [](ParameterRange r, const char* name) {
        if (!(r.lo > 0.0) || !(r.hi >= r.lo) || !std::isfinite(r.hi))
            throw DomainError(std::string("invalid ") + name + " range");
    };
    check(scale, "scale");
    check(shape, "shape");
    if (scale_steps < 2 || shape_steps < 2) throw DomainError("grid needs at least 2 steps per axis");

    auto at = [](ParameterRange r, std::size_t i, std::size_t n) {
        return r.lo + (r.hi - r.lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    };

    GridBest best{WeibullCapacity(scale.lo, shape.lo), -std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < scale_steps; ++i) {
        for (std::size_t k = 0; k < shape_steps; ++k) {
            const WeibullCapacity d(at(scale, i, scale_steps), at(shape, k, shape_steps));
            const double ll = log_likelihood(data, d);
            if (ll > best.log_likelihood) best = {d, ll};
        }
    }
    return best;
}

}  // namespace stochcap
