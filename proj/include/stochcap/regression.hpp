#pragma once

// Ordinary least squares for estimation-error models. Candidate regressors
// are derived from each dataset's record total and breakdown count:
//   x1 = total records        x4 = ln x1
//   x2 = recorded breakdowns  x5 = ln x2
//   x3 = x1 / x2              x6 = ln x3

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "special_functions.hpp"

namespace stochcap {

struct RegressionObservation {
    double total_records = 0.0;
    std::int64_t recorded_breakdowns = 0;
    double response = 0.0;
};

enum class Regressor { X1 = 1, X2, X3, X4, X5, X6 };

inline std::string regressor_name(Regressor v) { return "x" + std::to_string(static_cast<int>(v)); }

inline Regressor parse_regressor(const std::string& name) {
    if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '6')
        return static_cast<Regressor>(name[1] - '0');
    throw DomainError("unknown regressor '" + name + "' (expected x1..x6)");
}

// True when the regressor is undefined for zero recorded breakdowns.
inline bool needs_breakdowns(Regressor v) {
    return v == Regressor::X3 || v == Regressor::X5 || v == Regressor::X6;
}

inline double regressor_value(Regressor v, const RegressionObservation& o) {
    const double x1 = o.total_records;
    const double x2 = static_cast<double>(o.recorded_breakdowns);
    switch (v) {
        case Regressor::X1: return x1;
        case Regressor::X2: return x2;
        case Regressor::X3: return x1 / x2;
        case Regressor::X4: return std::log(x1);
        case Regressor::X5: return std::log(x2);
        case Regressor::X6: return std::log(x1 / x2);
    }
    return 0.0;
}

struct Design {
    std::vector<std::string> columns;  // "intercept" first
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::vector<std::size_t> rejected_rows;  // indices into the observations
};

inline Design build_design(const std::vector<RegressionObservation>& obs, const std::vector<Regressor>& vars) {
    const bool need_b = std::any_of(vars.begin(), vars.end(), needs_breakdowns);
    Design d;
    d.columns.push_back("intercept");
    for (Regressor v : vars) d.columns.push_back(regressor_name(v));

    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (!(obs[i].total_records > 0.0)) throw DomainError("observation " + std::to_string(i) + " has no records");
        if (need_b && obs[i].recorded_breakdowns <= 0) {
            d.rejected_rows.push_back(i);
            continue;
        }
        kept.push_back(i);
    }

    d.x.resize(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(vars.size() + 1));
    d.y.resize(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t r = 0; r < kept.size(); ++r) {
        const auto& o = obs[kept[r]];
        const auto row = static_cast<Eigen::Index>(r);
        d.x(row, 0) = 1.0;
        for (std::size_t c = 0; c < vars.size(); ++c) d.x(row, static_cast<Eigen::Index>(c + 1)) = regressor_value(vars[c], o);
        d.y(row) = o.response;
    }
    return d;
}

struct FittedModel {
    std::vector<std::string> columns;
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    std::vector<double> t_values;
    std::vector<double> p_values;
    std::vector<double> ci_lower;
    std::vector<double> ci_upper;
    std::vector<double> fitted;
    std::vector<double> residuals;
    double r_squared = 0.0;
    double sse = 0.0;
    std::size_t n = 0;
    std::size_t df = 0;
};

// Least squares via column-pivoted Householder QR; the normal equations are
// never formed. Rank deficiency reports the columns spanning the null space.
inline FittedModel ols_fit(const Design& design) {
    const Eigen::MatrixXd& x = design.x;
    const Eigen::VectorXd& y = design.y;
    const auto n = static_cast<std::size_t>(x.rows());
    const auto p = static_cast<std::size_t>(x.cols());
    if (n <= p) throw DomainError("need more observations (" + std::to_string(n) + ") than columns (" + std::to_string(p) + ")");

    // Column scaling keeps the rank threshold meaningful when regressors
    // differ by orders of magnitude (x1 ~ 1e5 next to ln terms ~ 1).
    Eigen::VectorXd norms = x.colwise().norm().transpose();
    for (Eigen::Index c = 0; c < norms.size(); ++c)
        if (norms(c) == 0.0) norms(c) = 1.0;
    const Eigen::MatrixXd xs = x * norms.cwiseInverse().asDiagonal();

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
    qr.setThreshold(1e-10);
    if (static_cast<std::size_t>(qr.rank()) < p) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(xs);
        lu.setThreshold(1e-10);
        const Eigen::MatrixXd kernel = lu.kernel();
        std::vector<std::string> names;
        for (Eigen::Index c = 0; c < kernel.rows(); ++c)
            if (kernel.row(c).cwiseAbs().maxCoeff() > 1e-8) names.push_back(design.columns[static_cast<std::size_t>(c)]);
        if (names.empty()) names = design.columns;
        throw SingularDesign(std::move(names));
    }

    const Eigen::VectorXd beta_s = qr.solve(y);
    const Eigen::VectorXd beta = beta_s.cwiseQuotient(norms);
    const Eigen::VectorXd fitted = x * beta;
    const Eigen::VectorXd resid = y - fitted;

    FittedModel m;
    m.columns = design.columns;
    m.n = n;
    m.df = n - p;
    m.sse = resid.squaredNorm();
    const double sst = (y.array() - y.mean()).matrix().squaredNorm();
    m.r_squared = sst > 0.0 ? 1.0 - m.sse / sst : (m.sse == 0.0 ? 1.0 : 0.0);
    const double sigma2 = m.sse / static_cast<double>(m.df);

    // (X'X)^{-1} = D^{-1} P R^{-1} R^{-T} P' D^{-1}
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p))
                                  .template triangularView<Eigen::Upper>();
    const Eigen::MatrixXd rinv = r.template triangularView<Eigen::Upper>().solve(
        Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)));
    const Eigen::MatrixXd perm = qr.colsPermutation();
    const Eigen::MatrixXd cov_s = perm * (rinv * rinv.transpose()) * perm.transpose();

    const double tcrit = student_t_quantile(0.975, static_cast<double>(m.df));
    for (std::size_t c = 0; c < p; ++c) {
        const auto ci = static_cast<Eigen::Index>(c);
        const double b = beta(ci);
        const double se = std::sqrt(sigma2 * cov_s(ci, ci)) / norms(ci);
        const double t = se > 0.0 ? b / se : (b == 0.0 ? 0.0 : std::copysign(INFINITY, b));
        m.coefficients.push_back(b);
        m.std_errors.push_back(se);
        m.t_values.push_back(t);
        m.p_values.push_back(std::isnan(t) ? 1.0 : student_t_two_sided_p(t, static_cast<double>(m.df)));
        m.ci_lower.push_back(b - tcrit * se);
        m.ci_upper.push_back(b + tcrit * se);
    }
    m.fitted.assign(fitted.data(), fitted.data() + fitted.size());
    m.residuals.assign(resid.data(), resid.data() + resid.size());
    return m;
}

inline double predict(const FittedModel& model, const RegressionObservation& o) {
    double y = 0.0;
    for (std::size_t c = 0; c < model.columns.size(); ++c) {
        if (model.columns[c] == "intercept") {
            y += model.coefficients[c];
            continue;
        }
        const Regressor v = parse_regressor(model.columns[c]);
        if (needs_breakdowns(v) && o.recorded_breakdowns <= 0)
            throw DomainError(model.columns[c] + " is undefined without recorded breakdowns");
        y += model.coefficients[c] * regressor_value(v, o);
    }
    return y;
}

struct ScreenedModel {
    std::vector<Regressor> variables;
    FittedModel model;
    std::vector<std::string> insignificant;  // p >= alpha
    std::size_t rejected_rows = 0;
};

struct ScreeningResult {
    std::vector<ScreenedModel> ranked;   // all regressors significant, R² descending
    std::vector<ScreenedModel> flagged;  // at least one insignificant regressor, R² descending
    std::vector<std::pair<std::vector<Regressor>, std::string>> failed;  // singular or ill-posed
};

inline std::string describe_subset(const std::vector<Regressor>& vars) {
    if (vars.empty()) return "{}";
    std::string s = "{";
    for (std::size_t i = 0; i < vars.size(); ++i) s += (i ? "," : "") + regressor_name(vars[i]);
    return s + "}";
}

// Ranks candidates by R² among models whose every regressor has p < alpha.
inline ScreeningResult screen_models(const std::vector<RegressionObservation>& obs,
                                     const std::vector<std::vector<Regressor>>& candidates, double alpha = 0.05) {
    ScreeningResult out;
    for (const auto& vars : candidates) {
        try {
            const Design d = build_design(obs, vars);
            ScreenedModel sm{vars, ols_fit(d), {}, d.rejected_rows.size()};
            for (std::size_t c = 1; c < sm.model.columns.size(); ++c)
                if (!(sm.model.p_values[c] < alpha)) sm.insignificant.push_back(sm.model.columns[c]);
            (sm.insignificant.empty() ? out.ranked : out.flagged).push_back(std::move(sm));
        } catch (const std::exception& e) {
            out.failed.emplace_back(vars, e.what());
        }
    }
    auto by_r2 = [](const ScreenedModel& a, const ScreenedModel& b) { return a.model.r_squared > b.model.r_squared; };
    std::stable_sort(out.ranked.begin(), out.ranked.end(), by_r2);
    std::stable_sort(out.flagged.begin(), out.flagged.end(), by_r2);
    return out;
}

}  // namespace stochcap
