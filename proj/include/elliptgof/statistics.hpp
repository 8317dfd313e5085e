#pragma once

// Radial-directional correlation statistics: standardization, the
// coordinatewise log-radius/direction correlations, the sum and max
// statistics with their normal and Gumbel p-values, and the Cauchy
// combination.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "elliptgof/error.hpp"
#include "elliptgof/linalg.hpp"
#include "elliptgof/robust.hpp"

namespace elliptgof {

struct StandardizedSample {
    Vector radii;
    Vector log_radii;
    Matrix directions;  // n x p, unit rows

    Eigen::Index n() const noexcept { return radii.size(); }
    Eigen::Index p() const noexcept { return directions.cols(); }
};

struct CorrelationVector {
    Vector g;
    Eigen::Index n = 0;
};

struct TopCoordinate {
    Eigen::Index index = 0;  // 0-based column of the analyzed matrix
    double n_g2 = 0.0;
};

struct TestReport {
    double t_sum = 0.0;
    double t_max = 0.0;
    double p_sum = 1.0;
    double p_max = 1.0;
    double t_cau = 0.0;
    double p_cau = 1.0;
    std::vector<TopCoordinate> top_coords;
};

inline constexpr double kPValueClamp = 1e-15;
inline constexpr std::size_t kTopCoordinates = 10;

/// 1 - Phi(z), evaluated directly in the upper tail.
inline double normal_upper_tail(double z) {
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

/// Gumbel-type null limit of the max statistic: exp(-pi^{-1/2} e^{-x/2}).
inline double gumbel_cdf(double x) {
    return std::exp(-std::numbers::inv_sqrtpi * std::exp(-0.5 * x));
}

/// 1 - F_G(x) without cancellation.
inline double gumbel_upper_tail(double x) {
    return -std::expm1(-std::numbers::inv_sqrtpi * std::exp(-0.5 * x));
}

inline StandardizedSample standardize(const DataMatrix& x, const Vector& mu, const SymMatrix& sigma_inv_sqrt) {
    if (mu.size() != x.cols() || sigma_inv_sqrt.dim() != x.cols()) {
        throw Error(ErrorKind::InvalidDimension, "standardize: location/shape dimension differs from data");
    }
    const Eigen::Index n = x.rows();
    StandardizedSample out;
    out.directions = (x.rowwise() - mu.transpose()) * sigma_inv_sqrt.matrix();
    out.radii.resize(n);
    out.log_radii.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = out.directions.row(i).norm();
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw Error(ErrorKind::ZeroRadius, "standardized observation has zero radius", i);
        }
        out.radii(i) = r;
        out.log_radii(i) = std::log(r);
        out.directions.row(i) /= r;
    }
    return out;
}

/// Pearson correlation of the log-radius with each direction coordinate,
/// using 1/n variance denominators.
inline CorrelationVector correlation_vector(const Vector& log_radii, const Matrix& directions) {
    const Eigen::Index n = log_radii.size();
    const Eigen::Index p = directions.cols();
    if (n < 3 || directions.rows() != n) {
        throw Error(ErrorKind::InvalidDimension, "correlation_vector requires n >= 3 matching rows");
    }
    const double nd = static_cast<double>(n);
    const Vector lc = log_radii.array() - log_radii.mean();
    const double sd_l = std::sqrt(lc.squaredNorm() / nd);
    if (!(sd_l > 0.0)) {
        throw Error(ErrorKind::DegenerateRadius, "log-radius has zero variance");
    }
    const Eigen::RowVectorXd ubar = directions.colwise().mean();
    CorrelationVector out;
    out.n = n;
    out.g.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const auto uc = directions.col(j).array() - ubar(j);
        const double sd_u = std::sqrt(uc.square().sum() / nd);
        if (!(sd_u > 0.0)) {
            throw Error(ErrorKind::DegenerateCoordinate, "direction coordinate has zero variance", j);
        }
        out.g(j) = (lc.array() * uc).sum() / nd / (sd_l * sd_u);
    }
    return out;
}

inline CorrelationVector correlation_vector(const StandardizedSample& s) {
    return correlation_vector(s.log_radii, s.directions);
}

inline double t_sum(const CorrelationVector& g) {
    return static_cast<double>(g.n) * g.g.squaredNorm();
}

inline double t_max(const CorrelationVector& g, Eigen::Index p) {
    if (p < 3) {
        throw Error(ErrorKind::InvalidDimension, "t_max requires p >= 3");
    }
    const double lp = std::log(static_cast<double>(p));
    const double gmax = g.g.size() > 0 ? g.g.cwiseAbs().maxCoeff() : 0.0;
    return static_cast<double>(g.n) * gmax * gmax - 2.0 * lp + std::log(lp);
}

/// Analytic (p_sum, p_max).
inline std::pair<double, double> p_values(double t_sum_value, double t_max_value, Eigen::Index p) {
    if (p < 3) {
        throw Error(ErrorKind::InvalidDimension, "p_values requires p >= 3");
    }
    const double pd = static_cast<double>(p);
    return {normal_upper_tail((t_sum_value - pd) / std::sqrt(2.0 * pd)), gumbel_upper_tail(t_max_value)};
}

/// Cauchy combination of two p-values: (t_cau, p_cau).
inline std::pair<double, double> cauchy_combine(double p_sum, double p_max) {
    auto clamp = [](double v) { return std::clamp(v, kPValueClamp, 1.0 - kPValueClamp); };
    const double pi = std::numbers::pi;
    const double t = 0.5 * std::tan(pi * (0.5 - clamp(p_sum))) + 0.5 * std::tan(pi * (0.5 - clamp(p_max)));
    // 1/2 - atan(t)/pi, written as atan(1/t)/pi for t > 0 to keep relative
    // accuracy in the upper tail.
    const double p = t > 0.0 ? std::atan(1.0 / t) / pi : 0.5 - std::atan(t) / pi;
    return {t, std::clamp(p, 0.0, 1.0)};
}

inline std::vector<TopCoordinate> top_coordinates(const CorrelationVector& g, std::size_t limit = kTopCoordinates) {
    std::vector<TopCoordinate> all(static_cast<std::size_t>(g.g.size()));
    const double nd = static_cast<double>(g.n);
    for (Eigen::Index j = 0; j < g.g.size(); ++j) {
        all[static_cast<std::size_t>(j)] = {j, nd * g.g(j) * g.g(j)};
    }
    const std::size_t keep = std::min(limit, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(),
                      [](const TopCoordinate& a, const TopCoordinate& b) {
                          return a.n_g2 > b.n_g2 || (a.n_g2 == b.n_g2 && a.index < b.index);
                      });
    all.resize(keep);
    return all;
}

/// Statistics, analytic p-values and the Cauchy combination for a
/// standardized sample.
inline TestReport report_from_sample(const StandardizedSample& s) {
    const Eigen::Index p = s.p();
    if (s.n() < 3 || p < 3) {
        throw Error(ErrorKind::InvalidDimension, "test requires n >= 3 and p >= 3");
    }
    const CorrelationVector g = correlation_vector(s);
    TestReport r;
    r.t_sum = t_sum(g);
    r.t_max = t_max(g, p);
    std::tie(r.p_sum, r.p_max) = p_values(r.t_sum, r.t_max, p);
    std::tie(r.t_cau, r.p_cau) = cauchy_combine(r.p_sum, r.p_max);
    r.top_coords = top_coordinates(g);
    return r;
}

/// Known location and shape.
struct OracleMode {
    Vector mu;
    SymMatrix sigma;
};

/// HR plug-in location and shape.
struct HrMode {
    HrConfig config;
};

using TestMode = std::variant<OracleMode, HrMode>;

struct TestRun {
    TestReport report;
    StandardizedSample sample;
    std::optional<HrEstimate> hr;
};

inline TestRun run_test_detailed(const DataMatrix& x, const TestMode& mode) {
    if (x.rows() < 3 || x.cols() < 3) {
        throw Error(ErrorKind::InvalidDimension, "run_test requires n >= 3 and p >= 3");
    }
    TestRun out;
    if (const auto* oracle = std::get_if<OracleMode>(&mode)) {
        out.sample = standardize(x, oracle->mu, matrix_power(oracle->sigma, -0.5));
    } else {
        HrEstimate fit = hr_fit(x, std::get<HrMode>(mode).config);
        out.sample = standardize(x, fit.mu_hat, matrix_power(fit.sigma_eig, -0.5));
        out.hr = std::move(fit);
    }
    out.report = report_from_sample(out.sample);
    return out;
}

inline TestReport run_test(const DataMatrix& x, const TestMode& mode) {
    return run_test_detailed(x, mode).report;
}

}  // namespace elliptgof
