#pragma once

// Elliptical null designs and radial-directional alternatives for
// simulation: radial laws, shape structures and the data generator.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "elliptgof/calibration.hpp"
#include "elliptgof/error.hpp"
#include "elliptgof/linalg.hpp"

namespace elliptgof {

namespace law {

struct Gaussian {};
struct StudentT {
    double nu = 10.0;
};
struct MixtureNormal {
    double p1 = 0.9;
    double s1 = 1.0;
    double p2 = 0.1;
    double s2 = 3.0;
};
struct Kotz {
    double beta = 2.0;
};
struct BoundedBeta {};

}  // namespace law

using RadialLaw = std::variant<law::Gaussian, law::StudentT, law::MixtureNormal, law::Kotz, law::BoundedBeta>;

namespace shape {

struct Identity {};
struct AR {
    double rho = 0.3;
};
struct SparsePrecision {
    double off_diagonal = 0.3;
};

}  // namespace shape

using ShapeStructure = std::variant<shape::Identity, shape::AR, shape::SparsePrecision>;

enum class ActiveSet { Sparse, Frac20, All };

struct AlternativeSpec {
    ActiveSet active_set = ActiveSet::Sparse;
    double delta = 0.0;
};

namespace detail {

inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace detail

inline void validate(const RadialLaw& l) {
    std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, law::StudentT>) {
                if (!(v.nu > 0.0)) throw Error(ErrorKind::InvalidArgument, "Student t degrees of freedom must be positive");
            } else if constexpr (std::is_same_v<T, law::Kotz>) {
                if (!(v.beta > 0.0)) throw Error(ErrorKind::InvalidArgument, "Kotz beta must be positive");
            } else if constexpr (std::is_same_v<T, law::MixtureNormal>) {
                if (v.p1 < 0.0 || v.p2 < 0.0 || std::abs(v.p1 + v.p2 - 1.0) > 1e-12 || !(v.s1 > 0.0) || !(v.s2 > 0.0)) {
                    throw Error(ErrorKind::InvalidArgument, "mixture probabilities must sum to 1 with positive scales");
                }
            }
        },
        l);
}

/// Short stable identifier used in tables and on the command line.
inline std::string law_name(const RadialLaw& l) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, law::Gaussian>) return "gaussian";
            else if constexpr (std::is_same_v<T, law::StudentT>) return "t" + detail::format_real(v.nu);
            else if constexpr (std::is_same_v<T, law::MixtureNormal>) {
                const law::MixtureNormal def;
                if (v.p1 == def.p1 && v.s1 == def.s1 && v.p2 == def.p2 && v.s2 == def.s2) return "mixture";
                return "mixture(" + detail::format_real(v.p1) + ":" + detail::format_real(v.s1) + "," +
                       detail::format_real(v.p2) + ":" + detail::format_real(v.s2) + ")";
            } else if constexpr (std::is_same_v<T, law::Kotz>) return "kotz" + detail::format_real(v.beta);
            else return "bounded";
        },
        l);
}

inline std::string shape_name(const ShapeStructure& s) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, shape::Identity>) return "identity";
            else if constexpr (std::is_same_v<T, shape::AR>) return "ar" + detail::format_real(v.rho);
            else {
                if (v.off_diagonal == shape::SparsePrecision{}.off_diagonal) return "sp";
                return "sp" + detail::format_real(v.off_diagonal);
            }
        },
        s);
}

inline std::string active_set_name(ActiveSet a) {
    switch (a) {
        case ActiveSet::Sparse: return "sp";
        case ActiveSet::Frac20: return "frac20";
        case ActiveSet::All: return "all";
    }
    return "sp";
}

inline double parse_number(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (...) {
    }
    throw Error(ErrorKind::InvalidArgument, "cannot parse " + what + " from '" + text + "'");
}

/// Inverse of law_name (default mixture only): gaussian, t<nu>, mixture,
/// kotz<beta>, bounded.
inline RadialLaw parse_law(const std::string& name) {
    if (name == "gaussian" || name == "normal") return law::Gaussian{};
    if (name == "mixture") return law::MixtureNormal{};
    if (name == "bounded") return law::BoundedBeta{};
    if (name.rfind("kotz", 0) == 0) {
        return law::Kotz{name.size() == 4 ? 2.0 : parse_number(name.substr(4), "Kotz beta")};
    }
    if (name.size() > 1 && name[0] == 't') return law::StudentT{parse_number(name.substr(1), "t degrees of freedom")};
    throw Error(ErrorKind::InvalidArgument, "unknown radial law '" + name + "'");
}

inline ShapeStructure parse_shape(const std::string& name) {
    if (name == "identity" || name == "I") return shape::Identity{};
    if (name == "sp") return shape::SparsePrecision{};
    if (name == "ar") return shape::AR{};
    if (name.rfind("ar", 0) == 0) return shape::AR{parse_number(name.substr(2), "AR coefficient")};
    if (name.rfind("sp", 0) == 0) return shape::SparsePrecision{parse_number(name.substr(2), "sparse precision off-diagonal")};
    throw Error(ErrorKind::InvalidArgument, "unknown shape structure '" + name + "'");
}

inline ActiveSet parse_active_set(const std::string& name) {
    if (name == "sp" || name == "sparse") return ActiveSet::Sparse;
    if (name == "frac20" || name == "0.2") return ActiveSet::Frac20;
    if (name == "all") return ActiveSet::All;
    throw Error(ErrorKind::InvalidArgument, "unknown active set '" + name + "'");
}

/// 0-based indices of the active coordinates.
inline std::vector<Eigen::Index> resolve_active_set(ActiveSet a, Eigen::Index p) {
    Eigen::Index size = 1;
    if (a == ActiveSet::Frac20) size = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::floor(0.2 * static_cast<double>(p))));
    if (a == ActiveSet::All) size = p;
    std::vector<Eigen::Index> out(static_cast<std::size_t>(size));
    for (Eigen::Index j = 0; j < size; ++j) out[static_cast<std::size_t>(j)] = j;
    return out;
}

/// Scale c with E[(c (2G)^{1/(2 beta)})^2] = p for G ~ Gamma(p/(2 beta), 1).
inline double kotz_scale(Eigen::Index p, double beta) {
    const double a = static_cast<double>(p) / (2.0 * beta);
    const double log_raw_second_moment = std::log(2.0) / beta + std::lgamma(a + 1.0 / beta) - std::lgamma(a);
    return std::exp(0.5 * (std::log(static_cast<double>(p)) - log_raw_second_moment));
}

template <class Urbg>
double sample_radius(const RadialLaw& l, Eigen::Index p, Urbg& rng) {
    if (p < 1) throw Error(ErrorKind::InvalidDimension, "sample_radius requires p >= 1");
    const double pd = static_cast<double>(p);
    auto gaussian_norm = [&]() {
        std::chi_squared_distribution<double> chi2(pd);
        return std::sqrt(chi2(rng));
    };
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, law::Gaussian>) {
                return gaussian_norm();
            } else if constexpr (std::is_same_v<T, law::StudentT>) {
                const double z = gaussian_norm();
                std::chi_squared_distribution<double> g(v.nu);
                return z * std::sqrt(v.nu / g(rng));
            } else if constexpr (std::is_same_v<T, law::MixtureNormal>) {
                std::uniform_real_distribution<double> u(0.0, 1.0);
                const double scale = u(rng) < v.p1 ? v.s1 : v.s2;
                return scale * gaussian_norm();
            } else if constexpr (std::is_same_v<T, law::Kotz>) {
                std::gamma_distribution<double> g(pd / (2.0 * v.beta), 1.0);
                return kotz_scale(p, v.beta) * std::pow(2.0 * g(rng), 1.0 / (2.0 * v.beta));
            } else {
                std::gamma_distribution<double> g(pd / 2.0, 1.0);
                const double a = g(rng);
                const double b = g(rng);
                return std::sqrt(2.0 * pd * a / (a + b));
            }
        },
        l);
}

/// Tridiagonal precision with unit diagonal.
inline SymMatrix sparse_precision(Eigen::Index p, double off_diagonal = 0.3) {
    Matrix omega = Matrix::Identity(p, p);
    for (Eigen::Index j = 0; j + 1 < p; ++j) {
        omega(j, j + 1) = off_diagonal;
        omega(j + 1, j) = off_diagonal;
    }
    return SymMatrix(omega);
}

/// Trace-p shape matrix for a structure.
inline SymMatrix make_shape(const ShapeStructure& s, Eigen::Index p) {
    if (p < 1) throw Error(ErrorKind::InvalidDimension, "make_shape requires p >= 1");
    return std::visit(
        [p](const auto& v) -> SymMatrix {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, shape::Identity>) {
                return SymMatrix::identity(p);
            } else if constexpr (std::is_same_v<T, shape::AR>) {
                if (!(std::abs(v.rho) < 1.0)) throw Error(ErrorKind::InvalidArgument, "AR coefficient must lie in (-1, 1)");
                Matrix m(p, p);
                for (Eigen::Index j = 0; j < p; ++j)
                    for (Eigen::Index k = 0; k < p; ++k) m(j, k) = std::pow(v.rho, static_cast<double>(j > k ? j - k : k - j));
                return trace_normalize(SymMatrix(m));
            } else {
                const SymMatrix omega = sparse_precision(p, v.off_diagonal);
                Eigen::LLT<Matrix> llt(omega.matrix());
                if (llt.info() != Eigen::Success) throw Error(ErrorKind::NonPD, "sparse precision matrix is not positive definite");
                return trace_normalize(SymMatrix(llt.solve(Matrix::Identity(p, p))));
            }
        },
        s);
}

/// Everything needed to draw rows of one design repeatedly.
struct DesignSampler {
    Eigen::Index p = 0;
    RadialLaw law;
    AlternativeSpec alt;
    Vector mu;
    Matrix sigma_root;
    std::vector<Eigen::Index> active;

    DesignSampler(Eigen::Index p_, RadialLaw law_, const ShapeStructure& shape_, AlternativeSpec alt_, Vector mu_ = {})
        : p(p_), law(std::move(law_)), alt(alt_), mu(mu_.size() == 0 ? Vector::Zero(p_) : std::move(mu_)) {
        validate(law);
        if (!(alt.delta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "signal strength delta must be nonnegative");
        if (mu.size() != p) throw Error(ErrorKind::InvalidDimension, "location length differs from p");
        sigma_root = matrix_power(make_shape(shape_, p), 0.5).matrix();
        active = resolve_active_set(alt.active_set, p);
    }

    /// Draws U0 then R0 from the stream, so the same seed yields the same
    /// baseline regardless of delta.
    template <class Urbg>
    DataMatrix draw(Eigen::Index n, Urbg& rng) const {
        Matrix y(n, p);
        const double inv_sqrt_a = 1.0 / std::sqrt(static_cast<double>(active.size()));
        for (Eigen::Index i = 0; i < n; ++i) {
            const Vector u = sample_uniform_sphere(p, rng);
            double r = sample_radius(law, p, rng);
            if (alt.delta != 0.0) {
                double s = 0.0;
                for (Eigen::Index j : active) s += u(j);
                r *= std::exp(alt.delta * s * inv_sqrt_a);
            }
            y.row(i) = r * u.transpose();
        }
        DataMatrix x = y * sigma_root;  // sigma_root is symmetric
        x.rowwise() += mu.transpose();
        return x;
    }
};

template <class Urbg>
DataMatrix generate(Eigen::Index n, Eigen::Index p, const RadialLaw& l, const ShapeStructure& s,
                    const AlternativeSpec& alt, const Vector& mu, Urbg& rng) {
    if (n < 1) throw Error(ErrorKind::InvalidDimension, "generate requires n >= 1");
    return DesignSampler(p, l, s, alt, mu).draw(n, rng);
}

}  // namespace elliptgof
