#pragma once

// Derivative-free downhill simplex minimiser (Nelder & Mead 1965) with the
// standard reflection/expansion/contraction/shrink coefficients.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

namespace stochcap {

struct SimplexOptions {
    double initial_step = 0.1;       // edge length of the starting simplex
    double x_tolerance = 1e-8;       // max vertex distance from best (inf-norm)
    double f_tolerance = 1e-10;      // spread of function values over vertices
    std::size_t max_iterations = 10'000;
};

struct SimplexResult {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
    std::size_t iterations = 0;
    bool converged = false;
};

template <class Objective>
SimplexResult nelder_mead(Objective&& f, std::vector<double> start, const SimplexOptions& opt = {}) {
    const std::size_t n = start.size();
    constexpr double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

    auto eval = [&](const std::vector<double>& x) {
        const double v = f(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    std::vector<std::vector<double>> pts(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += opt.initial_step;
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);

    SimplexResult res;
    for (;;) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

        double diameter = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                diameter = std::max(diameter, std::abs(pts[i][k] - pts[best][k]));
        const double spread = vals[worst] - vals[best];
        if (std::isfinite(vals[best]) && (diameter < opt.x_tolerance || spread < opt.f_tolerance)) {
            res.converged = true;
            break;
        }
        if (res.iterations >= opt.max_iterations) break;
        ++res.iterations;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / static_cast<double>(n);
        }

        for (std::size_t k = 0; k < n; ++k) trial[k] = centroid[k] + alpha * (centroid[k] - pts[worst][k]);
        const double f_reflect = eval(trial);

        if (f_reflect < vals[best]) {
            for (std::size_t k = 0; k < n; ++k) trial2[k] = centroid[k] + gamma * (trial[k] - centroid[k]);
            const double f_expand = eval(trial2);
            if (f_expand < f_reflect) {
                pts[worst] = trial2;
                vals[worst] = f_expand;
            } else {
                pts[worst] = trial;
                vals[worst] = f_reflect;
            }
            continue;
        }
        if (f_reflect < vals[second]) {
            pts[worst] = trial;
            vals[worst] = f_reflect;
            continue;
        }

        // Contraction, outside if the reflection improved on the worst point.
        const bool outside = f_reflect < vals[worst];
        const std::vector<double>& anchor = outside ? trial : pts[worst];
        for (std::size_t k = 0; k < n; ++k) trial2[k] = centroid[k] + rho * (anchor[k] - centroid[k]);
        const double f_contract = eval(trial2);
        if (f_contract < (outside ? f_reflect : vals[worst])) {
            pts[worst] = trial2;
            vals[worst] = f_contract;
            continue;
        }

        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t k = 0; k < n; ++k) pts[i][k] = pts[best][k] + sigma * (pts[i][k] - pts[best][k]);
            vals[i] = eval(pts[i]);
        }
    }

    const std::size_t best =
        static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
    res.x = pts[best];
    res.value = vals[best];
    return res;
}

}  // namespace stochcap
