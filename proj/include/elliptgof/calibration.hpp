#pragma once

// Finite-sample calibration of the radial-directional statistics: the
// radius/direction bootstrap with mean-variance corrected p-values and a
// log-radius permutation check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "elliptgof/error.hpp"
#include "elliptgof/parallel.hpp"
#include "elliptgof/rng.hpp"
#include "elliptgof/statistics.hpp"

namespace elliptgof {

inline constexpr int kDefaultBootstrapReplicates = 200;
inline constexpr int kDefaultPermutations = 499;

/// Mean and standard deviation of the Gumbel law F_G.
inline double gumbel_mean() { return 2.0 * std::numbers::egamma - std::log(std::numbers::pi); }
inline double gumbel_sd() { return std::sqrt(2.0 * std::numbers::pi * std::numbers::pi / 3.0); }

struct BootstrapResult {
    int b = 0;
    double mean_sum = 0.0;
    double sd_sum = 0.0;
    double mean_max = 0.0;
    double sd_max = 0.0;
    double p_sum_boot = 1.0;
    double p_max_boot = 1.0;
    double p_cau_boot = 1.0;
};

struct PermutationResult {
    int b_pi = 0;
    double p_sum_perm = 1.0;
    double p_max_perm = 1.0;
    double p_cau_perm = 1.0;
};

/// Uniform direction on the unit sphere by Gaussian normalization.
template <class Urbg>
Vector sample_uniform_sphere(Eigen::Index p, Urbg& rng) {
    if (p < 1) {
        throw Error(ErrorKind::InvalidDimension, "sample_uniform_sphere requires p >= 1");
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector z(p);
    for (;;) {
        for (Eigen::Index j = 0; j < p; ++j) z(j) = normal(rng);
        const double norm = z.norm();
        if (norm > 0.0) return z / norm;
    }
}

/// Mean-variance corrected (p_sum, p_max) given bootstrap moments.
inline std::pair<double, double> bootstrap_corrected_pvalues(double t_sum_obs, double t_max_obs, double mean_sum,
                                                             double sd_sum, double mean_max, double sd_max) {
    if (!(sd_sum > 0.0) || !(sd_max > 0.0)) {
        throw Error(ErrorKind::DegenerateBootstrap, "bootstrap replicate statistics have zero spread");
    }
    const double p_sum = normal_upper_tail((t_sum_obs - mean_sum) / sd_sum);
    const double p_max = gumbel_upper_tail(gumbel_mean() + gumbel_sd() / sd_max * (t_max_obs - mean_max));
    return {p_sum, p_max};
}

namespace detail {

inline std::pair<double, double> mean_and_sd(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0))};
}

}  // namespace detail

/// One bootstrap replicate: n radii resampled from `sorted_radii` and n
/// independent uniform directions. Returns (T*_sum, T*_max).
template <class Urbg>
std::pair<double, double> bootstrap_replicate(const Vector& sorted_radii, Eigen::Index p, Urbg& rng) {
    const Eigen::Index n = sorted_radii.size();
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector log_r(n);
    Matrix w(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        log_r(i) = std::log(sorted_radii(pick(rng)));
        for (;;) {
            for (Eigen::Index j = 0; j < p; ++j) w(i, j) = normal(rng);
            const double norm = w.row(i).norm();
            if (norm > 0.0) {
                w.row(i) /= norm;
                break;
            }
        }
    }
    const CorrelationVector g = correlation_vector(log_r, w);
    return {t_sum(g), t_max(g, p)};
}

/// Radial-directional bootstrap: each replicate uses its own stream derived
/// from (seed, replicate index), so results do not depend on `threads`.
inline BootstrapResult bootstrap_calibrate(const StandardizedSample& s, const TestReport& observed,
                                           int b = kDefaultBootstrapReplicates, std::uint64_t seed = 0,
                                           int threads = 1) {
    const Eigen::Index n = s.n();
    const Eigen::Index p = s.p();
    if (b < 2) throw Error(ErrorKind::InvalidArgument, "bootstrap requires b >= 2");
    if (n < 3 || p < 3) throw Error(ErrorKind::InvalidDimension, "bootstrap requires n >= 3 and p >= 3");

    // Sorting makes the empirical distribution independent of row order.
    Vector sorted = s.radii;
    std::sort(sorted.begin(), sorted.end());

    std::vector<double> sums(static_cast<std::size_t>(b));
    std::vector<double> maxes(static_cast<std::size_t>(b));
    parallel_for(static_cast<std::size_t>(b), threads, [&](std::size_t r) {
        Rng rng = make_rng({seed, 0x626f6f74ULL, r});
        try {
            std::tie(sums[r], maxes[r]) = bootstrap_replicate(sorted, p, rng);
        } catch (const Error& e) {
            throw Error(ErrorKind::DegenerateBootstrap, std::string("bootstrap replicate failed: ") + e.what());
        }
    });

    BootstrapResult out;
    out.b = b;
    std::tie(out.mean_sum, out.sd_sum) = detail::mean_and_sd(sums);
    std::tie(out.mean_max, out.sd_max) = detail::mean_and_sd(maxes);
    std::tie(out.p_sum_boot, out.p_max_boot) = bootstrap_corrected_pvalues(
        observed.t_sum, observed.t_max, out.mean_sum, out.sd_sum, out.mean_max, out.sd_max);
    out.p_cau_boot = cauchy_combine(out.p_sum_boot, out.p_max_boot).second;
    return out;
}

/// (T_sum, T_max) with the log-radii reordered by `perm` against fixed
/// directions.
inline std::pair<double, double> permuted_statistics(const StandardizedSample& s, const std::vector<Eigen::Index>& perm) {
    Vector log_r(s.n());
    for (Eigen::Index i = 0; i < s.n(); ++i) log_r(i) = s.log_radii(perm[static_cast<std::size_t>(i)]);
    const CorrelationVector g = correlation_vector(log_r, s.directions);
    return {t_sum(g), t_max(g, s.p())};
}

/// Permutation check: permutes the log-radii against fixed directions and
/// reports add-one p-values (1 + #{T* >= T_obs}) / (b_pi + 1).
inline PermutationResult permutation_check(const StandardizedSample& s, const TestReport& observed,
                                           int b_pi = kDefaultPermutations, std::uint64_t seed = 0,
                                           int threads = 1) {
    if (b_pi < 1) throw Error(ErrorKind::InvalidArgument, "permutation check requires b_pi >= 1");
    const Eigen::Index n = s.n();
    std::vector<char> sum_hit(static_cast<std::size_t>(b_pi));
    std::vector<char> max_hit(static_cast<std::size_t>(b_pi));
    parallel_for(static_cast<std::size_t>(b_pi), threads, [&](std::size_t r) {
        Rng rng = make_rng({seed, 0x7065726dULL, r});
        std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
        for (Eigen::Index i = n - 1; i > 0; --i) {
            std::uniform_int_distribution<Eigen::Index> pick(0, i);
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick(rng))]);
        }
        const auto [ts, tm] = permuted_statistics(s, perm);
        sum_hit[r] = ts >= observed.t_sum;
        max_hit[r] = tm >= observed.t_max;
    });
    const double denom = static_cast<double>(b_pi) + 1.0;
    PermutationResult out;
    out.b_pi = b_pi;
    out.p_sum_perm = (1.0 + static_cast<double>(std::count(sum_hit.begin(), sum_hit.end(), 1))) / denom;
    out.p_max_perm = (1.0 + static_cast<double>(std::count(max_hit.begin(), max_hit.end(), 1))) / denom;
    out.p_cau_perm = cauchy_combine(out.p_sum_perm, out.p_max_perm).second;
    return out;
}

}  // namespace elliptgof
