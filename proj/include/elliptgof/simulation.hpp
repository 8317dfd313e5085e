#pragma once

// Monte Carlo harness: replicated size/power cells, grids of cells and
// table output.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "elliptgof/calibration.hpp"
#include "elliptgof/datagen.hpp"
#include "elliptgof/error.hpp"
#include "elliptgof/parallel.hpp"
#include "elliptgof/rng.hpp"
#include "elliptgof/statistics.hpp"

namespace elliptgof {

enum class StandardizationMode { Oracle, Hr };

struct SimDesign {
    Eigen::Index n = 200;
    Eigen::Index p = 50;
    RadialLaw law = law::Gaussian{};
    ShapeStructure shape = shape::Identity{};
    AlternativeSpec alt{};
    int reps = 500;
    double alpha = 0.05;
    StandardizationMode mode = StandardizationMode::Hr;
    HrConfig hr{};
    int bootstrap_b = 0;  // 0 = analytic calibration
    std::uint64_t seed = 20240601;

    void validate() const {
        if (reps < 1) throw Error(ErrorKind::InvalidArgument, "reps must be >= 1");
        if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
        if (n < 3 || p < 3) throw Error(ErrorKind::InvalidDimension, "simulation requires n >= 3 and p >= 3");
        if (bootstrap_b == 1 || bootstrap_b < 0) throw Error(ErrorKind::InvalidArgument, "bootstrap B must be 0 or >= 2");
        elliptgof::validate(law);
        if (mode == StandardizationMode::Hr) hr.validate();
    }

    /// Identifier of the data stream: depends only on (n, p, law, shape),
    /// so cells differing in delta, active set, mode or calibration share
    /// baseline draws.
    std::uint64_t stream_id() const {
        std::ostringstream key;
        key << n << '|' << p << '|' << law_name(law) << '|' << shape_name(shape);
        return hash_string(key.str());
    }
};

inline std::string mode_name(StandardizationMode m) { return m == StandardizationMode::Oracle ? "oracle" : "hr"; }

inline std::string calibration_name(int bootstrap_b) {
    return bootstrap_b > 0 ? "bootstrap" + std::to_string(bootstrap_b) : "analytic";
}

struct CellResult {
    SimDesign design;
    double reject_sum = 0.0;
    double reject_max = 0.0;
    double reject_cau = 0.0;
    double se_sum = 0.0;
    double se_max = 0.0;
    double se_cau = 0.0;
    int failures = 0;
    /// Per-replication combined p-values in replication order (NaN for
    /// failed replications).
    std::vector<double> p_cau;
};

/// The three p-values one replication thresholds at alpha.
struct ReplicationOutcome {
    double p_sum = 1.0;
    double p_max = 1.0;
    double p_cau = 1.0;
    double t_sum = 0.0;
    double t_max = 0.0;
};

inline ReplicationOutcome run_replication(const SimDesign& design, const DesignSampler& sampler,
                                          const SymMatrix& true_shape, int r) {
    const std::uint64_t stream = derive_seed({design.seed, design.stream_id(), static_cast<std::uint64_t>(r)});
    Rng rng(stream);
    const DataMatrix x = sampler.draw(design.n, rng);
    TestMode mode = design.mode == StandardizationMode::Oracle ? TestMode{OracleMode{sampler.mu, true_shape}}
                                                                : TestMode{HrMode{design.hr}};
    const TestRun run = run_test_detailed(x, mode);
    ReplicationOutcome out{run.report.p_sum, run.report.p_max, run.report.p_cau, run.report.t_sum, run.report.t_max};
    if (design.bootstrap_b > 0) {
        const BootstrapResult boot = bootstrap_calibrate(run.sample, run.report, design.bootstrap_b, mix64(stream));
        out.p_sum = boot.p_sum_boot;
        out.p_max = boot.p_max_boot;
        out.p_cau = boot.p_cau_boot;
    }
    return out;
}

/// Per-replication outcomes (nullopt for failures) in replication order.
inline std::vector<std::optional<ReplicationOutcome>> run_replications(const SimDesign& design, int parallelism = 1) {
    design.validate();
    const DesignSampler sampler(design.p, design.law, design.shape, design.alt);
    const SymMatrix true_shape = make_shape(design.shape, design.p);
    std::vector<std::optional<ReplicationOutcome>> outcomes(static_cast<std::size_t>(design.reps));
    parallel_for(outcomes.size(), parallelism, [&](std::size_t r) {
        try {
            outcomes[r] = run_replication(design, sampler, true_shape, static_cast<int>(r));
        } catch (const Error&) {
            outcomes[r].reset();
        }
    });
    return outcomes;
}

inline double binomial_se(double rate, int count) {
    return count > 0 ? std::sqrt(rate * (1.0 - rate) / static_cast<double>(count)) : 0.0;
}

/// Runs design.reps replications and aggregates rejection rates at alpha.
/// Failed replications are excluded; more than 1% failures is an error.
inline CellResult run_cell(const SimDesign& design, int parallelism = 1) {
    const auto outcomes = run_replications(design, parallelism);
    CellResult out;
    out.design = design;
    int ok = 0;
    int rs = 0, rm = 0, rc = 0;
    out.p_cau.reserve(outcomes.size());
    for (const auto& o : outcomes) {
        if (!o) {
            ++out.failures;
            out.p_cau.push_back(std::nan(""));
            continue;
        }
        ++ok;
        rs += o->p_sum <= design.alpha;
        rm += o->p_max <= design.alpha;
        rc += o->p_cau <= design.alpha;
        out.p_cau.push_back(o->p_cau);
    }
    if (static_cast<double>(out.failures) > 0.01 * static_cast<double>(design.reps)) {
        throw Error(ErrorKind::TooManyFailures, std::to_string(out.failures) + " of " + std::to_string(design.reps) +
                                                    " replications failed");
    }
    if (ok > 0) {
        out.reject_sum = static_cast<double>(rs) / ok;
        out.reject_max = static_cast<double>(rm) / ok;
        out.reject_cau = static_cast<double>(rc) / ok;
    }
    out.se_sum = binomial_se(out.reject_sum, ok);
    out.se_max = binomial_se(out.reject_max, ok);
    out.se_cau = binomial_se(out.reject_cau, ok);
    return out;
}

struct CellOutcome {
    std::optional<CellResult> result;
    std::string error;  // empty on success
};

/// Runs every cell in input order; a failing cell is reported in its slot
/// and does not stop the rest.
inline std::vector<CellOutcome> run_grid(const std::vector<SimDesign>& designs, int parallelism = 1) {
    if (designs.empty()) throw Error(ErrorKind::InvalidArgument, "run_grid requires at least one design");
    std::vector<CellOutcome> out(designs.size());
    for (std::size_t c = 0; c < designs.size(); ++c) {
        try {
            out[c].result = run_cell(designs[c], parallelism);
        } catch (const std::exception& e) {
            out[c].error = e.what();
        }
    }
    return out;
}

enum class TableFormat { Csv, Markdown };

inline constexpr const char* kCsvHeader =
    "n,p,law,shape,active_set,delta,mode,calibration,reps,alpha,reject_sum,reject_max,reject_cau,se_sum,se_max,se_cau,"
    "failures";

namespace detail {

inline std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

inline std::string active_label(const AlternativeSpec& alt) {
    return alt.delta == 0.0 ? "none" : active_set_name(alt.active_set);
}

}  // namespace detail

inline std::string emit_table(const std::vector<CellResult>& results, TableFormat format) {
    std::ostringstream out;
    if (format == TableFormat::Csv) {
        out << kCsvHeader << '\n';
        for (const CellResult& c : results) {
            const SimDesign& d = c.design;
            out << d.n << ',' << d.p << ',' << law_name(d.law) << ',' << shape_name(d.shape) << ','
                << detail::active_label(d.alt) << ',' << detail::fmt("%g", d.alt.delta) << ',' << mode_name(d.mode) << ','
                << calibration_name(d.bootstrap_b) << ',' << d.reps << ',' << detail::fmt("%g", d.alpha) << ','
                << detail::fmt("%.6f", c.reject_sum) << ',' << detail::fmt("%.6f", c.reject_max) << ','
                << detail::fmt("%.6f", c.reject_cau) << ',' << detail::fmt("%.6f", c.se_sum) << ','
                << detail::fmt("%.6f", c.se_max) << ',' << detail::fmt("%.6f", c.se_cau) << ',' << c.failures << '\n';
        }
        return out.str();
    }
    out << "| law | shape | p | active set | delta | mode | S (%) | M (%) | C (%) |\n";
    out << "|---|---|---:|---|---:|---|---:|---:|---:|\n";
    for (const CellResult& c : results) {
        const SimDesign& d = c.design;
        out << "| " << law_name(d.law) << " | " << shape_name(d.shape) << " | " << d.p << " | "
            << detail::active_label(d.alt) << " | " << detail::fmt("%g", d.alt.delta) << " | " << mode_name(d.mode)
            << " | " << detail::fmt("%.1f", 100.0 * c.reject_sum) << " | " << detail::fmt("%.1f", 100.0 * c.reject_max)
            << " | " << detail::fmt("%.1f", 100.0 * c.reject_cau) << " |\n";
    }
    return out.str();
}

/// One parsed data row of the CSV table (string columns kept verbatim).
struct TableRow {
    Eigen::Index n = 0;
    Eigen::Index p = 0;
    std::string law, shape, active_set, mode, calibration;
    double delta = 0.0, alpha = 0.0;
    int reps = 0, failures = 0;
    double reject_sum = 0.0, reject_max = 0.0, reject_cau = 0.0;
    double se_sum = 0.0, se_max = 0.0, se_cau = 0.0;
};

inline std::vector<TableRow> parse_table_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw Error(ErrorKind::ParseError, "simulation CSV header mismatch");
    }
    std::vector<TableRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 17) throw Error(ErrorKind::RaggedRows, "simulation CSV row has wrong field count", line_no);
        TableRow r;
        try {
            r.n = std::stol(f[0]);
            r.p = std::stol(f[1]);
            r.law = f[2];
            r.shape = f[3];
            r.active_set = f[4];
            r.delta = std::stod(f[5]);
            r.mode = f[6];
            r.calibration = f[7];
            r.reps = std::stoi(f[8]);
            r.alpha = std::stod(f[9]);
            r.reject_sum = std::stod(f[10]);
            r.reject_max = std::stod(f[11]);
            r.reject_cau = std::stod(f[12]);
            r.se_sum = std::stod(f[13]);
            r.se_max = std::stod(f[14]);
            r.se_cau = std::stod(f[15]);
            r.failures = std::stoi(f[16]);
        } catch (const std::exception&) {
            throw Error(ErrorKind::ParseError, "malformed simulation CSV row", line_no);
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace elliptgof
