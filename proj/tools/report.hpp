#pragma once

// Rendering of CLI analysis reports (text and versioned JSON).

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "elliptgof/elliptgof.hpp"

namespace elliptgof::cli {

inline constexpr int kReportSchema = 1;

struct AnalysisReport {
    std::string source;
    Eigen::Index n = 0;
    Eigen::Index p = 0;
    std::string mode;
    double alpha = 0.05;
    TestReport test;
    /// Original 1-based dataset column for each analyzed column.
    std::vector<Eigen::Index> columns;
    std::vector<std::string> labels;  // parallel to columns; may be empty
    std::optional<HrEstimate> hr;
    std::optional<BootstrapResult> bootstrap;
    std::optional<PermutationResult> permutation;
    std::vector<std::size_t> rejected_rows;

    /// Combined p-value the decision uses: bootstrap-corrected when present.
    double decision_p_value() const { return bootstrap ? bootstrap->p_cau_boot : test.p_cau; }
    bool reject() const { return decision_p_value() <= alpha; }
};

inline nlohmann::json to_json(const AnalysisReport& r) {
    using nlohmann::json;
    json top = json::array();
    for (const TopCoordinate& c : r.test.top_coords) {
        json entry{{"index", c.index}, {"column", r.columns.at(static_cast<std::size_t>(c.index))}, {"n_g2", c.n_g2}};
        if (!r.labels.empty()) entry["label"] = r.labels.at(static_cast<std::size_t>(c.index));
        top.push_back(std::move(entry));
    }
    json j{
        {"schema", kReportSchema},
        {"source", r.source},
        {"n", r.n},
        {"p", r.p},
        {"mode", r.mode},
        {"alpha", r.alpha},
        {"t_sum", r.test.t_sum},
        {"t_max", r.test.t_max},
        {"p_sum", r.test.p_sum},
        {"p_max", r.test.p_max},
        {"t_cau", r.test.t_cau},
        {"p_cau", r.test.p_cau},
        {"top_coords", std::move(top)},
        {"decision_p_value", r.decision_p_value()},
        {"reject", r.reject()},
        {"rejected_rows", r.rejected_rows},
    };
    if (r.hr) {
        j["hr"] = {{"iterations", r.hr->iterations}, {"converged", r.hr->converged}, {"final_step", r.hr->final_step}};
    }
    if (r.bootstrap) {
        const BootstrapResult& b = *r.bootstrap;
        j["bootstrap"] = {{"b", b.b},
                          {"mean_sum", b.mean_sum},
                          {"sd_sum", b.sd_sum},
                          {"mean_max", b.mean_max},
                          {"sd_max", b.sd_max},
                          {"p_sum", b.p_sum_boot},
                          {"p_max", b.p_max_boot},
                          {"p_cau", b.p_cau_boot}};
    }
    if (r.permutation) {
        const PermutationResult& q = *r.permutation;
        j["permutation"] = {{"b", q.b_pi}, {"p_sum", q.p_sum_perm}, {"p_max", q.p_max_perm}, {"p_cau", q.p_cau_perm}};
    }
    return j;
}

namespace detail {

inline std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

}  // namespace detail

inline std::string to_text(const AnalysisReport& r) {
    using detail::num;
    std::ostringstream out;
    out << "source: " << r.source << "\n";
    out << "n = " << r.n << ", p = " << r.p << ", mode = " << r.mode << "\n";
    if (!r.rejected_rows.empty()) out << "rows dropped for missing values: " << r.rejected_rows.size() << "\n";
    if (r.hr) {
        out << "HR fit: " << r.hr->iterations << " iterations, " << (r.hr->converged ? "converged" : "not converged")
            << ", final step " << num(r.hr->final_step) << "\n";
    }
    out << "\n";
    out << "T_sum = " << num(r.test.t_sum) << "    P_sum = " << num(r.test.p_sum) << "\n";
    out << "T_max = " << num(r.test.t_max) << "    P_max = " << num(r.test.p_max) << "\n";
    out << "T_cau = " << num(r.test.t_cau) << "    P_cau = " << num(r.test.p_cau) << "\n";
    if (r.bootstrap) {
        const BootstrapResult& b = *r.bootstrap;
        out << "\nbootstrap (B = " << b.b << "): P_sum = " << num(b.p_sum_boot) << ", P_max = " << num(b.p_max_boot)
            << ", P_cau = " << num(b.p_cau_boot) << "\n";
        out << "  mean/sd T_sum* = " << num(b.mean_sum) << " / " << num(b.sd_sum) << ", mean/sd T_max* = "
            << num(b.mean_max) << " / " << num(b.sd_max) << "\n";
    }
    if (r.permutation) {
        const PermutationResult& q = *r.permutation;
        out << "permutation (B = " << q.b_pi << "): P_sum = " << num(q.p_sum_perm) << ", P_max = " << num(q.p_max_perm)
            << ", P_cau = " << num(q.p_cau_perm) << "\n";
    }
    out << "\ntop coordinates (column, n*g^2):\n";
    for (const TopCoordinate& c : r.test.top_coords) {
        const auto k = static_cast<std::size_t>(c.index);
        out << "  " << r.columns.at(k);
        if (!r.labels.empty()) out << " [" << r.labels.at(k) << "]";
        out << "  " << num(c.n_g2) << "\n";
    }
    out << "\ndecision at alpha = " << num(r.alpha) << ": " << (r.reject() ? "reject" : "do not reject")
        << " (p = " << num(r.decision_p_value()) << ")\n";
    return out.str();
}

}  // namespace elliptgof::cli
