#pragma once

// Robust location/shape estimation: spatial median, spatial-sign covariance,
// a sign-based graphical lasso initializer and the banded HR iteration.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "elliptgof/error.hpp"
#include "elliptgof/linalg.hpp"

namespace elliptgof {

struct HrConfig {
    double lambda = 0.08;  // graphical-lasso penalty
    Eigen::Index band_h = 3;
    double ridge = 1e-4;
    double tol = 1e-4;
    int max_iter = 30;
    double weiszfeld_tol = 1e-10;  // relative to the data scale
    int weiszfeld_max_iter = 2000;
    double glasso_tol = 1e-6;
    int glasso_max_iter = 500;
    double pd_floor = 1e-8;

    void validate() const {
        if (!(lambda >= 0.0) || band_h < 0 || !(ridge > 0.0) || !(tol > 0.0) ||
            !(weiszfeld_tol > 0.0) || !(glasso_tol > 0.0) || !(pd_floor > 0.0) ||
            max_iter < 1 || weiszfeld_max_iter < 1 || glasso_max_iter < 1) {
            throw Error(ErrorKind::InvalidArgument, "HrConfig: tolerances must be positive and caps >= 1");
        }
    }
};

struct HrEstimate {
    Vector mu_hat;
    SymMatrix sigma_hat;
    int iterations = 0;
    bool converged = false;
    double final_step = 0.0;
    /// Decomposition of sigma_hat, kept so callers need not refactor it.
    SpectralDecomposition sigma_eig;
};

namespace detail {

inline double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    double m = *mid;
    if (v.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(v.begin(), mid));
    }
    return m;
}

/// Rows closer to `center` than this are treated as coinciding with it.
inline double coincidence_threshold(const DataMatrix& x, const Vector& center) {
    std::vector<double> norms(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        norms[static_cast<std::size_t>(i)] = (x.row(i).transpose() - center).norm();
    }
    return 1e-12 * median_of(std::move(norms));
}

inline double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

}  // namespace detail

/// Sum of Euclidean distances from m to the rows of x.
inline double spatial_median_objective(const DataMatrix& x, const Vector& m) {
    return (x.rowwise() - m.transpose()).rowwise().norm().sum();
}

/// Weiszfeld iteration with the Vardi-Zhang modification for iterates that
/// land on a data point. Starts from the coordinatewise mean. `tol` is
/// relative to the mean distance of the rows from the starting point.
inline Vector spatial_median(const DataMatrix& x, double tol = 1e-10, int max_iter = 2000) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (n < 2 || p < 1) {
        throw Error(ErrorKind::InvalidDimension, "spatial_median requires n >= 2 and p >= 1");
    }
    if (!x.allFinite()) {
        throw Error(ErrorKind::NonFinite, "spatial_median: data has NaN or Inf entries");
    }
    Vector m = x.colwise().mean().transpose();
    const double scale = (x.rowwise() - m.transpose()).rowwise().norm().mean();
    if (!(scale > 0.0)) {
        throw Error(ErrorKind::AllRowsDegenerate, "spatial_median: all rows are identical");
    }
    const double coincide = 1e-12 * scale;
    const double step_tol = tol * scale;

    for (int iter = 0; iter < max_iter; ++iter) {
        Vector weighted = Vector::Zero(p);
        Vector sign_sum = Vector::Zero(p);
        double weight_total = 0.0;
        int multiplicity = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const Vector diff = x.row(i).transpose() - m;
            const double d = diff.norm();
            if (d <= coincide) {
                ++multiplicity;
                continue;
            }
            weighted += x.row(i).transpose() / d;
            sign_sum += diff / d;
            weight_total += 1.0 / d;
        }
        if (weight_total == 0.0) {
            throw Error(ErrorKind::AllRowsDegenerate, "spatial_median: all rows coincide with the iterate");
        }
        const Vector t_tilde = weighted / weight_total;
        Vector next;
        if (multiplicity == 0) {
            next = t_tilde;
        } else {
            const double r = sign_sum.norm();
            if (r <= static_cast<double>(multiplicity)) {
                return m;  // data point satisfies the optimality condition
            }
            const double ratio = static_cast<double>(multiplicity) / r;
            next = (1.0 - ratio) * t_tilde + ratio * m;
        }
        const double step = (next - m).norm();
        m = std::move(next);
        if (step <= step_tol) {
            return m;
        }
    }
    throw DidNotConverge("spatial_median: Weiszfeld iteration cap reached", m);
}

/// (1/n) sum U(x_i - center) U(x_i - center)^T. Rows that coincide with
/// the center are dropped from the average (n counts only retained rows).
inline SymMatrix sign_covariance(const DataMatrix& x, const Vector& center) {
    const Eigen::Index p = x.cols();
    if (center.size() != p) {
        throw Error(ErrorKind::InvalidDimension, "sign_covariance: center length differs from column count");
    }
    const double coincide = detail::coincidence_threshold(x, center);
    Matrix signs(x.rows(), p);
    Eigen::Index kept = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const Vector diff = x.row(i).transpose() - center;
        const double d = diff.norm();
        if (d <= coincide || d == 0.0) continue;
        signs.row(kept++) = (diff / d).transpose();
    }
    if (kept == 0) {
        throw Error(ErrorKind::AllRowsDegenerate, "sign_covariance: every row equals the center");
    }
    const auto used = signs.topRows(kept);
    return SymMatrix(used.transpose() * used / static_cast<double>(kept));
}

struct GlassoResult {
    SymMatrix precision;
    SymMatrix covariance;  // inverse of precision
    int sweeps = 0;
    double kkt_residual = 0.0;
};

/// Largest violation of the stationarity conditions of
///   tr(Omega S) - log det Omega + lambda * sum_{j,k} |Omega_jk|
/// at (omega, omega^{-1}).
inline double glasso_kkt_residual(const Matrix& s, const Matrix& omega, const Matrix& omega_inv, double lambda) {
    double worst = 0.0;
    const Eigen::Index p = s.rows();
    for (Eigen::Index k = 0; k < p; ++k) {
        for (Eigen::Index j = 0; j < p; ++j) {
            const double grad = s(j, k) - omega_inv(j, k);
            double r;
            if (omega(j, k) > 0.0) {
                r = std::abs(grad + lambda);
            } else if (omega(j, k) < 0.0) {
                r = std::abs(grad - lambda);
            } else {
                r = std::max(0.0, std::abs(grad) - lambda);
            }
            worst = std::max(worst, r);
        }
    }
    return worst;
}

/// Blockwise coordinate descent for the graphical lasso on a covariance-type
/// matrix `s`, penalizing every entry including the diagonal. Stops once the
/// KKT residual is at most `tol`.
inline GlassoResult solve_glasso(const SymMatrix& s, double lambda, double tol = 1e-6, int max_iter = 500) {
    detail::require_finite(s.matrix(), "graphical_lasso");
    if (!(lambda >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "graphical_lasso: lambda must be nonnegative");
    }
    const Eigen::Index p = s.dim();
    const Matrix& S = s.matrix();
    for (Eigen::Index j = 0; j < p; ++j) {
        if (!(S(j, j) + lambda > 0.0)) {
            throw Error(ErrorKind::NonPD, "graphical_lasso: diagonal of S + lambda I is nonpositive", j);
        }
    }

    // W is the running covariance estimate; column j of B holds the lasso
    // coefficients of column j (with B(j, j) = 0).
    Matrix W = S;
    W.diagonal().array() += lambda;
    Matrix B = Matrix::Zero(p, p);
    double inner_tol = std::min(1e-4, tol) * 1e-2;
    Matrix last_inv;
    double last_kkt = 0.0;

    auto assemble_precision = [&]() {
        Matrix omega(p, p);
        for (Eigen::Index j = 0; j < p; ++j) {
            const double quad = W.col(j).dot(B.col(j));  // w12^T beta (B(j,j) = 0)
            const double omega_jj = 1.0 / (W(j, j) - quad);
            omega.col(j) = -omega_jj * B.col(j);
            omega(j, j) = omega_jj;
        }
        return Matrix(0.5 * (omega + omega.transpose()));
    };

    for (int sweep = 1; sweep <= max_iter; ++sweep) {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            auto beta = B.col(j);
            Vector wb = W * beta;  // ignores column j since beta(j) = 0
            for (int pass = 0; pass < 10000; ++pass) {
                double delta_max = 0.0;
                for (Eigen::Index k = 0; k < p; ++k) {
                    if (k == j) continue;
                    const double old = beta(k);
                    const double z = S(k, j) - (wb(k) - W(k, k) * old);
                    const double updated = detail::soft_threshold(z, lambda) / W(k, k);
                    if (updated != old) {
                        wb.noalias() += W.col(k) * (updated - old);
                        beta(k) = updated;
                        delta_max = std::max(delta_max, std::abs(updated - old) * W(k, k));
                    }
                }
                if (delta_max <= inner_tol) break;
            }
            for (Eigen::Index k = 0; k < p; ++k) {
                if (k == j) continue;
                max_change = std::max(max_change, std::abs(W(k, j) - wb(k)));
                W(k, j) = wb(k);
                W(j, k) = wb(k);
            }
        }
        if (max_change <= tol || sweep == max_iter) {
            const Matrix omega = assemble_precision();
            Eigen::LDLT<Matrix> ldlt(omega);
            if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
                last_inv = ldlt.solve(Matrix::Identity(p, p));
                last_kkt = glasso_kkt_residual(S, omega, last_inv, lambda);
                if (last_kkt <= tol) {
                    return GlassoResult{SymMatrix(omega), SymMatrix(last_inv), sweep, last_kkt};
                }
            }
            inner_tol = std::max(inner_tol * 1e-2, 1e-15);
        }
    }
    throw Error(ErrorKind::DidNotConverge,
                "graphical_lasso: KKT residual " + std::to_string(last_kkt) + " above tolerance after " +
                    std::to_string(max_iter) + " sweeps");
}

/// Sign-covariance graphical lasso: solves the problem with S = p * s and
/// returns the precision matrix.
inline SymMatrix graphical_lasso(const SymMatrix& s, double lambda, double tol = 1e-6, int max_iter = 500) {
    const double p = static_cast<double>(s.dim());
    for (Eigen::Index j = 0; j < s.dim(); ++j) {
        if (s(j, j) < 0.0) {
            throw Error(ErrorKind::NonPD, "graphical_lasso: negative diagonal entry", j);
        }
    }
    return solve_glasso(SymMatrix(p * s.matrix()), lambda, tol, max_iter).precision;
}

namespace detail {

/// Trace-normalizes a decomposition in place (eigenvalues scaled to sum p).
inline SpectralDecomposition trace_normalized(SpectralDecomposition eig) {
    const double tr = eig.eigenvalues.sum();
    if (!(tr > 0.0)) {
        throw Error(ErrorKind::NonPositiveTrace, "shape update has nonpositive trace");
    }
    eig.eigenvalues *= static_cast<double>(eig.eigenvalues.size()) / tr;
    return eig;
}

}  // namespace detail

/// High-dimensional HR plug-in estimate of location and trace-p shape.
///
/// Spatial median -> sign covariance -> graphical lasso precision ->
/// inverted, trace-normalized initial shape; then the HR fixed-point loop
/// with banded sign-covariance shape updates, ridge, PD projection and
/// trace normalization until the location/shape step is at most cfg.tol
/// or cfg.max_iter updates have been made.
inline HrEstimate hr_fit(const DataMatrix& x, const HrConfig& cfg = {}) {
    cfg.validate();
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (n < 2 || p < 1) {
        throw Error(ErrorKind::InvalidDimension, "hr_fit requires n >= 2 and p >= 1");
    }
    const double pd = static_cast<double>(p);
    const double nd = static_cast<double>(n);

    Vector mu = spatial_median(x, cfg.weiszfeld_tol, cfg.weiszfeld_max_iter);
    const SymMatrix s0 = sign_covariance(x, mu);
    const GlassoResult init = solve_glasso(SymMatrix(pd * s0.matrix()), cfg.lambda, cfg.glasso_tol, cfg.glasso_max_iter);

    SpectralDecomposition eig = detail::trace_normalized(sym_eig(init.covariance));
    Matrix sigma = eig.reconstruct();

    HrEstimate out;
    Matrix centered(n, p);
    Matrix dirs(n, p);
    for (int t = 0; t < cfg.max_iter; ++t) {
        const Matrix root = matrix_power(eig, 0.5).matrix();
        const Matrix inv_root = matrix_power(eig, -0.5).matrix();

        centered = x.rowwise() - mu.transpose();
        const Matrix eps = centered * inv_root;  // inv_root is symmetric
        double inv_norm_sum = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double r = eps.row(i).norm();
            if (!(r > 0.0)) {
                throw Error(ErrorKind::DegenerateResidual, "zero standardized residual in HR iteration", i);
            }
            dirs.row(i) = eps.row(i) / r;
            inv_norm_sum += 1.0 / r;
        }
        const Vector mean_dir = dirs.colwise().mean().transpose();
        const Vector mu_next = mu + root * mean_dir / (inv_norm_sum / nd);

        const SymMatrix s_eps(dirs.transpose() * dirs / nd);
        Matrix tilde = pd * root * band(s_eps, cfg.band_h).matrix() * root;
        tilde.diagonal().array() += cfg.ridge;
        SpectralDecomposition next_eig = detail::trace_normalized(pd_project_spectrum(SymMatrix(tilde), cfg.pd_floor));
        Matrix sigma_next = next_eig.reconstruct();
        sigma_next = 0.5 * (sigma_next + sigma_next.transpose());

        const double loc_step = (mu_next - mu).norm();
        const double shape_step = (sigma_next - sigma).norm() / std::max(1.0, sigma.norm());
        out.final_step = std::max(loc_step, shape_step);
        out.iterations = t + 1;

        mu = mu_next;
        sigma = std::move(sigma_next);
        eig = std::move(next_eig);
        if (out.final_step <= cfg.tol) {
            out.converged = true;
            break;
        }
    }
    out.mu_hat = std::move(mu);
    out.sigma_hat = SymMatrix(sigma);
    out.sigma_eig = std::move(eig);
    return out;
}

}  // namespace elliptgof
