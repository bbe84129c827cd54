#pragma once

// Curve error metrics: RMSE, average relative error (ARE) and the
// breakdown-weighted relative error (AWRE). Relative errors are fractions.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "estimator.hpp"
#include "synthetic.hpp"

namespace stochcap {

// Estimated and reference curves over the compared levels, with the
// expected-breakdown weights of the true distribution.
struct CurvePair {
    std::vector<double> levels;
    std::vector<double> estimated;
    std::vector<double> truth;
    std::vector<double> weights;

    void validate() const {
        const std::size_t n = levels.size();
        if (n == 0) throw DomainError("curve pair has no compared levels");
        if (estimated.size() != n || truth.size() != n || weights.size() != n)
            throw DomainError("curve pair sequences differ in length");
        double wsum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(truth[i] > 0.0)) throw DomainError("reference value must be positive at compared levels");
            if (!(weights[i] >= 0.0)) throw DomainError("weights must be non-negative");
            wsum += weights[i];
        }
        if (!(wsum > 0.0)) throw DomainError("weights must have a positive sum");
    }
};

struct MetricReport {
    double rmse = 0.0;
    double are = 0.0;
    double awre = 0.0;
    std::size_t levels_compared = 0;
};

inline double rmse(const CurvePair& pair) {
    pair.validate();
    double ss = 0.0;
    for (std::size_t i = 0; i < pair.levels.size(); ++i) {
        const double d = pair.estimated[i] - pair.truth[i];
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(pair.levels.size()));
}

inline double are(const CurvePair& pair) {
    pair.validate();
    double s = 0.0;
    for (std::size_t i = 0; i < pair.levels.size(); ++i)
        s += std::abs(pair.estimated[i] - pair.truth[i]) / pair.truth[i];
    return s / static_cast<double>(pair.levels.size());
}

// Absolute relative errors, weighted by expected breakdowns.
inline double awre(const CurvePair& pair) {
    pair.validate();
    double s = 0.0, wsum = 0.0;
    for (std::size_t i = 0; i < pair.levels.size(); ++i) {
        s += pair.weights[i] * std::abs(pair.estimated[i] - pair.truth[i]) / pair.truth[i];
        wsum += pair.weights[i];
    }
    return s / wsum;
}

inline MetricReport evaluate(const CurvePair& pair) {
    return {rmse(pair), are(pair), awre(pair), pair.levels.size()};
}

// Capacity CDF of the fit against the true CDF, over levels with records
// and a representable true probability.
inline CurvePair curve_pair_for_cdf(const WeibullCapacity& fitted, const WeibullCapacity& truth,
                                    const IntensityProfile& profile) {
    CurvePair pair;
    for (std::size_t j = 0; j < profile.size(); ++j) {
        const double r = profile.records()[j];
        const double level = profile.levels()[j];
        const double f_true = breakdown_probability(truth, level);
        if (!(r > 0.0) || !(f_true > 0.0)) continue;
        pair.levels.push_back(level);
        pair.estimated.push_back(breakdown_probability(fitted, level));
        pair.truth.push_back(f_true);
        pair.weights.push_back(r * f_true);
    }
    return pair;
}

// CF_B implied by the fit, against either the theoretical CF_B of the true
// distribution or the realised (empirical) CF_B of the dataset.
inline CurvePair curve_pair_for_cfb(const WeibullCapacity& fitted, const WeibullCapacity& truth,
                                    const IntensityProfile& profile, CfbFlavor flavor,
                                    std::span<const std::int64_t> realised = {}) {
    const auto expected_true = expected_breakdowns(profile, truth);
    const CfbCurve estimated = theoretical_cfb(profile, fitted);
    CfbCurve reference;
    if (flavor == CfbFlavor::Theoretical) {
        reference = cumulative_frequency<double>(profile.levels(), expected_true, CfbFlavor::Theoretical);
    } else {
        if (realised.size() != profile.size()) throw DomainError("empirical CF_B needs realised counts per level");
        reference = cumulative_frequency<std::int64_t>(profile.levels(), realised, CfbFlavor::Empirical);
    }

    CurvePair pair;
    for (std::size_t j = 0; j < profile.size(); ++j) {
        if (!(reference.values[j] > 0.0)) continue;
        pair.levels.push_back(profile.levels()[j]);
        pair.estimated.push_back(estimated.values[j]);
        pair.truth.push_back(reference.values[j]);
        pair.weights.push_back(expected_true[j]);
    }
    return pair;
}

}  // namespace stochcap
