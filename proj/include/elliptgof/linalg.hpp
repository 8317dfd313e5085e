#pragma once

// Dense symmetric linear algebra used by the estimators and generators.
// Every matrix function goes through a full symmetric eigendecomposition.

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "elliptgof/error.hpp"

namespace elliptgof {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// n x p observation matrix, one observation per row.
using DataMatrix = Eigen::MatrixXd;

/// Square symmetric matrix. Construction symmetrizes the input as
/// (M + M^T) / 2, so entries(j, k) == entries(k, j) holds exactly.
class SymMatrix {
public:
    SymMatrix() = default;

    explicit SymMatrix(const Matrix& m) {
        if (m.rows() != m.cols() || m.rows() < 1) {
            throw Error(ErrorKind::InvalidDimension, "SymMatrix requires a nonempty square matrix");
        }
        entries_ = 0.5 * (m + m.transpose());
    }

    static SymMatrix identity(Eigen::Index p) { return SymMatrix(Matrix::Identity(p, p)); }

    static SymMatrix diagonal(const Vector& d) { return SymMatrix(Matrix(d.asDiagonal())); }

    Eigen::Index dim() const noexcept { return entries_.rows(); }
    const Matrix& matrix() const noexcept { return entries_; }
    double operator()(Eigen::Index j, Eigen::Index k) const { return entries_(j, k); }
    double trace() const { return entries_.trace(); }

private:
    Matrix entries_;
};

/// Eigenvalues sorted nonincreasing; eigenvectors stored as columns.
struct SpectralDecomposition {
    Vector eigenvalues;
    Matrix eigenvectors;

    /// V diag(f(lambda)) V^T.
    template <class F>
    Matrix apply(F&& f) const {
        Vector mapped = eigenvalues.unaryExpr(std::forward<F>(f));
        return eigenvectors * mapped.asDiagonal() * eigenvectors.transpose();
    }

    Matrix reconstruct() const { return apply([](double v) { return v; }); }
};

namespace detail {

inline void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) {
        throw Error(ErrorKind::NonFinite, std::string(what) + ": matrix has NaN or Inf entries");
    }
}

}  // namespace detail

inline SpectralDecomposition sym_eig(const SymMatrix& m) {
    detail::require_finite(m.matrix(), "sym_eig");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m.matrix());
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::ConvergenceFailure, "symmetric eigensolver failed");
    }
    // Eigen returns ascending order.
    SpectralDecomposition out;
    out.eigenvalues = solver.eigenvalues().reverse();
    out.eigenvectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

/// Relative threshold below which an eigenvalue counts as zero for
/// negative powers.
inline double eig_floor(const SpectralDecomposition& eig) {
    return 1e-10 * std::max(eig.eigenvalues(0), 0.0);
}

/// m^exponent for exponent in {1/2, -1/2, -1}, computed from an existing
/// decomposition of m.
inline SymMatrix matrix_power(const SpectralDecomposition& eig, double exponent) {
    if (exponent != 0.5 && exponent != -0.5 && exponent != -1.0) {
        throw Error(ErrorKind::InvalidArgument, "matrix_power supports exponents 1/2, -1/2 and -1");
    }
    const double smallest = eig.eigenvalues(eig.eigenvalues.size() - 1);
    if (exponent < 0.0) {
        if (!(eig.eigenvalues(0) > 0.0) || smallest <= eig_floor(eig)) {
            throw Error(ErrorKind::SingularMatrix, "eigenvalue below singularity floor in negative power");
        }
    } else if (smallest < 0.0) {
        if (smallest < -eig_floor(eig)) {
            throw Error(ErrorKind::InvalidArgument, "square root of a matrix with a negative eigenvalue");
        }
    }
    if (exponent == 0.5) {
        return SymMatrix(eig.apply([](double v) { return std::sqrt(std::max(v, 0.0)); }));
    }
    if (exponent == -0.5) {
        return SymMatrix(eig.apply([](double v) { return 1.0 / std::sqrt(v); }));
    }
    return SymMatrix(eig.apply([](double v) { return 1.0 / v; }));
}

inline SymMatrix matrix_power(const SymMatrix& m, double exponent) {
    return matrix_power(sym_eig(m), exponent);
}

/// Replaces every eigenvalue below `floor` by `floor`; the rest and the
/// eigenvectors are untouched.
inline SpectralDecomposition pd_project_spectrum(const SymMatrix& m, double floor) {
    SpectralDecomposition eig = sym_eig(m);
    eig.eigenvalues = eig.eigenvalues.cwiseMax(floor);
    return eig;
}

inline SymMatrix pd_project(const SymMatrix& m, double floor) {
    if (!(floor > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "pd_project floor must be positive");
    }
    detail::require_finite(m.matrix(), "pd_project");
    SpectralDecomposition eig = sym_eig(m);
    if (eig.eigenvalues.minCoeff() > floor) {
        return m;
    }
    eig.eigenvalues = eig.eigenvalues.cwiseMax(floor);
    return SymMatrix(eig.reconstruct());
}

/// Zeroes entries more than h positions off the diagonal.
inline SymMatrix band(const SymMatrix& m, Eigen::Index h) {
    if (h < 0) {
        throw Error(ErrorKind::InvalidArgument, "bandwidth must be nonnegative");
    }
    Matrix out = m.matrix();
    const Eigen::Index p = m.dim();
    for (Eigen::Index k = 0; k < p; ++k) {
        for (Eigen::Index j = 0; j < p; ++j) {
            if ((j > k ? j - k : k - j) > h) {
                out(j, k) = 0.0;
            }
        }
    }
    return SymMatrix(out);
}

/// p * m / tr(m), so the result has trace p.
inline SymMatrix trace_normalize(const SymMatrix& m) {
    const double tr = m.trace();
    if (!(tr > 0.0) || !std::isfinite(tr)) {
        throw Error(ErrorKind::NonPositiveTrace, "trace must be positive and finite");
    }
    return SymMatrix(static_cast<double>(m.dim()) / tr * m.matrix());
}

}  // namespace elliptgof
