#pragma once

// Weibull capacity distribution. Breakdown at intensity I happens when I
// exceeds the current capacity, so the capacity CDF is the breakdown
// probability:  F(I) = 1 - exp(-(I/scale)^shape).

#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace stochcap {

// Intensity is vehicles per aggregation interval; never converted.
class WeibullCapacity {
public:
    WeibullCapacity(double scale, double shape) : scale_(scale), shape_(shape) {
        if (!(scale > 0.0) || !std::isfinite(scale))
            throw DomainError("Weibull scale must be positive and finite, got " + std::to_string(scale));
        if (!(shape > 0.0) || !std::isfinite(shape))
            throw DomainError("Weibull shape must be positive and finite, got " + std::to_string(shape));
    }

    double scale() const noexcept { return scale_; }
    double shape() const noexcept { return shape_; }

    friend bool operator==(const WeibullCapacity&, const WeibullCapacity&) = default;

private:
    double scale_;
    double shape_;
};

namespace detail {

inline void check_intensity(double intensity) {
    if (!(intensity > 0.0) || std::isnan(intensity))
        throw DomainError("intensity must be positive, got " + std::to_string(intensity));
}

// ln t where t = (I/scale)^shape. Stays finite where t itself underflows.
inline double log_exponent(const WeibullCapacity& dist, double intensity) {
    return dist.shape() * std::log(intensity / dist.scale());
}

// ln(1 - exp(-t)) given ln t, accurate over the whole range of t.
inline double log1mexp_from_log(double log_t) {
    constexpr double ln2 = 0.69314718055994530942;
    if (log_t < -30.0) {
        // 1 - e^{-t} = t (1 - t/2 + ...); the correction is below 1e-13 here.
        const double t = std::exp(log_t);
        return log_t - 0.5 * t;
    }
    const double t = std::exp(log_t);
    if (t <= ln2) return std::log(-std::expm1(-t));
    return std::log1p(-std::exp(-t));
}

}  // namespace detail

// F(I) = 1 - exp(-(I/scale)^shape)
inline double breakdown_probability(const WeibullCapacity& dist, double intensity) {
    detail::check_intensity(intensity);
    const double log_t = detail::log_exponent(dist, intensity);
    if (log_t > 709.0) return 1.0;
    return -std::expm1(-std::exp(log_t));
}

// ln(1 - F(I)) = -(I/scale)^shape, evaluated without cancellation.
inline double log_survival(const WeibullCapacity& dist, double intensity) {
    detail::check_intensity(intensity);
    return -std::pow(intensity / dist.scale(), dist.shape());
}

// ln F(I). Finite for every positive intensity even when F(I) underflows.
inline double log_breakdown_probability(const WeibullCapacity& dist, double intensity) {
    detail::check_intensity(intensity);
    return detail::log1mexp_from_log(detail::log_exponent(dist, intensity));
}

// Intensity at which the breakdown probability equals p, for p in (0, 1).
inline double quantile(const WeibullCapacity& dist, double p) {
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("quantile probability must lie in (0, 1), got " + std::to_string(p));
    return dist.scale() * std::pow(-std::log1p(-p), 1.0 / dist.shape());
}

}  // namespace stochcap
