// elliptgof: command-line front end.
//
//   elliptgof test      analyze a CSV (window, HR or oracle standardization,
//                       bootstrap and permutation calibration)
//   elliptgof simulate  Monte Carlo size/power tables
//   elliptgof generate  write a synthetic elliptical (or alternative) sample

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "elliptgof/elliptgof.hpp"
#include "report.hpp"

namespace {

using namespace elliptgof;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

/// "a:b" -> inclusive 1-based range.
WindowSpec parse_window(const std::string& text, bool standardize) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw Error(ErrorKind::InvalidArgument, "--window expects a:b");
    const auto a = static_cast<Eigen::Index>(parse_number(text.substr(0, colon), "window start"));
    const auto b = static_cast<Eigen::Index>(parse_number(text.substr(colon + 1), "window end"));
    return WindowSpec::range(a, b, standardize);
}

/// "1,4,7-9" -> explicit 1-based list.
WindowSpec parse_columns(const std::string& text, bool standardize) {
    WindowSpec w;
    w.standardize = standardize;
    for (const std::string& item : split_list(text)) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) {
            w.columns.push_back(static_cast<Eigen::Index>(parse_number(item, "column")));
        } else {
            const auto a = static_cast<Eigen::Index>(parse_number(item.substr(0, dash), "column"));
            const auto b = static_cast<Eigen::Index>(parse_number(item.substr(dash + 1), "column"));
            for (Eigen::Index j = a; j <= b; ++j) w.columns.push_back(j);
        }
    }
    if (w.columns.empty()) throw Error(ErrorKind::InvalidArgument, "--columns selects nothing");
    return w;
}

/// A first line containing any non-numeric, non-missing token is a header.
bool sniff_header(const std::string& path, char delimiter) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        for (const std::string& cell : detail::split(line, delimiter)) {
            if (detail::is_missing_token(cell)) continue;
            try {
                std::size_t used = 0;
                std::stod(cell, &used);
                if (used != cell.size()) return true;
            } catch (const std::exception&) {
                return true;
            }
        }
        return false;
    }
    return false;
}

struct TestOptions {
    std::string input;
    std::string header = "auto";
    std::string delimiter = ",";
    std::string window;
    std::string columns;
    Eigen::Index top_variance = 0;
    bool no_standardize = false;
    std::string mode = "hr";
    std::string mu_file;
    std::string sigma_file;
    HrConfig hr;
    int bootstrap = kDefaultBootstrapReplicates;
    int permutation = kDefaultPermutations;
    std::uint64_t seed = 1;
    double alpha = 0.05;
    std::string format = "text";
    bool exit_on_reject = false;
    int threads = 0;
};

Vector load_vector(const std::string& path, Eigen::Index p) {
    const Dataset d = load_csv(path, sniff_header(path, ','));
    if (d.values.size() != p || (d.values.rows() != 1 && d.values.cols() != 1)) {
        throw Error(ErrorKind::InvalidDimension, "--mu-file must hold " + std::to_string(p) + " values");
    }
    return Eigen::Map<const Vector>(d.values.data(), p);
}

int run_test_command(const TestOptions& o) {
    if (o.delimiter.size() != 1) throw Error(ErrorKind::InvalidArgument, "--delimiter must be one character");
    const char delim = o.delimiter[0];
    const bool has_header = o.header == "yes" || (o.header == "auto" && sniff_header(o.input, delim));
    const Dataset data = load_csv(o.input, has_header, delim);
    const bool standardize = !o.no_standardize;

    int selectors = !o.window.empty() + !o.columns.empty() + (o.top_variance > 0);
    if (selectors > 1) throw Error(ErrorKind::InvalidArgument, "use only one of --window, --columns, --top-variance");
    WindowSpec window = WindowSpec::all(data.values.cols(), standardize);
    if (!o.window.empty()) window = parse_window(o.window, standardize);
    if (!o.columns.empty()) window = parse_columns(o.columns, standardize);
    if (o.top_variance > 0) {
        window.columns = top_variance_columns(data, o.top_variance);
        window.standardize = standardize;
    }
    const DataMatrix x = extract_window(data, window);

    TestMode mode;
    if (o.mode == "hr") {
        mode = HrMode{o.hr};
    } else if (o.mode == "oracle") {
        if (o.sigma_file.empty()) throw Error(ErrorKind::InvalidArgument, "--mode oracle requires --sigma-file");
        const Eigen::Index p = x.cols();
        const Vector mu = o.mu_file.empty() ? Vector::Zero(p) : load_vector(o.mu_file, p);
        const Dataset sigma = load_csv(o.sigma_file, sniff_header(o.sigma_file, ','));
        if (sigma.values.rows() != p || sigma.values.cols() != p) {
            throw Error(ErrorKind::InvalidDimension, "--sigma-file must be " + std::to_string(p) + " x " + std::to_string(p));
        }
        mode = OracleMode{mu, SymMatrix(sigma.values)};
    } else {
        throw Error(ErrorKind::InvalidArgument, "--mode must be hr or oracle");
    }

    const int threads = resolve_parallelism(o.threads);
    TestRun run = run_test_detailed(x, mode);

    cli::AnalysisReport report;
    report.source = data.source;
    report.n = x.rows();
    report.p = x.cols();
    report.mode = o.mode;
    report.alpha = o.alpha;
    report.columns = window.columns;
    if (!data.column_labels.empty()) {
        for (Eigen::Index j : window.columns) report.labels.push_back(data.column_labels.at(static_cast<std::size_t>(j - 1)));
    }
    report.rejected_rows = data.rejected_rows;
    report.hr = run.hr;
    report.test = run.report;
    if (o.bootstrap > 0) {
        report.bootstrap = bootstrap_calibrate(run.sample, run.report, o.bootstrap, derive_seed({o.seed, 1}), threads);
    }
    if (o.permutation > 0) {
        report.permutation = permutation_check(run.sample, run.report, o.permutation, derive_seed({o.seed, 2}), threads);
    }

    if (o.format == "json") {
        std::cout << cli::to_json(report).dump(2) << "\n";
    } else {
        std::cout << cli::to_text(report);
    }
    if (!data.rejected_rows.empty()) {
        std::cerr << "warning: dropped " << data.rejected_rows.size() << " row(s) with missing or non-finite values (lines";
        for (std::size_t r : data.rejected_rows) std::cerr << ' ' << r;
        std::cerr << ")\n";
    }
    return o.exit_on_reject && report.reject() ? 2 : 0;
}

struct SimulateOptions {
    std::string preset;
    std::string laws = "gaussian";
    std::string shapes = "identity";
    std::string dims = "50";
    std::string active = "sp";
    std::string deltas = "0";
    Eigen::Index n = 200;
    int reps = 500;
    double alpha = 0.05;
    std::string mode = "hr";
    int bootstrap = 0;
    std::uint64_t seed = 20240601;
    std::string format = "csv";
    std::string output;
    int threads = 0;
};

std::vector<SimDesign> build_grid(const SimulateOptions& o) {
    SimulateOptions g = o;
    if (o.preset == "table1-gaussian-p50") {
        g.laws = "gaussian";
        g.shapes = "identity";
        g.dims = "50";
        g.deltas = "0";
    } else if (o.preset == "size-p50") {
        g.laws = "gaussian,kotz2,bounded,mixture,t10";
        g.shapes = "identity,ar0.3,sp";
        g.dims = "50";
        g.deltas = "0";
    } else if (o.preset == "power-gaussian-p100") {
        g.laws = "gaussian";
        g.shapes = "identity";
        g.dims = "100";
        g.active = "sp,frac20,all";
        g.deltas = "0.5,1,2,3";
    } else if (!o.preset.empty()) {
        throw Error(ErrorKind::InvalidArgument, "unknown preset '" + o.preset + "'");
    }
    std::vector<SimDesign> grid;
    for (const std::string& p : split_list(g.dims)) {
        for (const std::string& l : split_list(g.laws)) {
            for (const std::string& s : split_list(g.shapes)) {
                const auto actives = split_list(g.active);
                for (std::size_t ai = 0; ai < actives.size(); ++ai) {
                    const std::string& a = actives[ai];
                    for (const std::string& d : split_list(g.deltas)) {
                        // null cells do not depend on the active set
                        if (parse_number(d, "delta") == 0.0 && ai > 0) continue;
                        SimDesign design;
                        design.n = g.n;
                        design.p = static_cast<Eigen::Index>(parse_number(p, "dimension"));
                        design.law = parse_law(l);
                        design.shape = parse_shape(s);
                        design.alt = {parse_active_set(a), parse_number(d, "delta")};
                        design.reps = g.reps;
                        design.alpha = g.alpha;
                        if (g.mode != "hr" && g.mode != "oracle") throw Error(ErrorKind::InvalidArgument, "--mode must be hr or oracle");
                        design.mode = g.mode == "oracle" ? StandardizationMode::Oracle : StandardizationMode::Hr;
                        design.bootstrap_b = g.bootstrap;
                        design.seed = g.seed;
                        design.validate();
                        grid.push_back(design);
                    }
                }
            }
        }
    }
    return grid;
}

int run_simulate_command(const SimulateOptions& o) {
    const std::vector<SimDesign> grid = build_grid(o);
    const auto outcomes = run_grid(grid, resolve_parallelism(o.threads));
    std::vector<CellResult> results;
    int errors = 0;
    for (std::size_t c = 0; c < outcomes.size(); ++c) {
        if (outcomes[c].result) {
            results.push_back(*outcomes[c].result);
        } else {
            ++errors;
            std::cerr << "error: cell " << c << " (" << law_name(grid[c].law) << ", " << shape_name(grid[c].shape)
                      << ", p = " << grid[c].p << "): " << outcomes[c].error << "\n";
        }
    }
    const std::string table = emit_table(results, o.format == "markdown" ? TableFormat::Markdown : TableFormat::Csv);
    if (o.output.empty()) {
        std::cout << table;
    } else {
        std::ofstream out(o.output);
        if (!out) throw Error(ErrorKind::Io, "cannot write '" + o.output + "'");
        out << table;
    }
    return errors == 0 ? 0 : 1;
}

struct GenerateOptions {
    Eigen::Index n = 200;
    Eigen::Index p = 100;
    std::string law = "gaussian";
    std::string shape = "identity";
    std::string active = "sp";
    double delta = 0.0;
    std::uint64_t seed = 1;
    std::string output;
    bool header = true;
};

int run_generate_command(const GenerateOptions& o) {
    Rng rng(derive_seed({o.seed}));
    const DataMatrix x =
        generate(o.n, o.p, parse_law(o.law), parse_shape(o.shape), {parse_active_set(o.active), o.delta}, Vector::Zero(o.p), rng);
    std::ofstream file;
    if (!o.output.empty()) {
        file.open(o.output);
        if (!file) throw Error(ErrorKind::Io, "cannot write '" + o.output + "'");
    }
    std::ostream& out = o.output.empty() ? std::cout : file;
    char buf[32];
    if (o.header) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) out << (j ? "," : "") << "x" << (j + 1);
        out << "\n";
    }
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.10g", x(i, j));
            out << (j ? "," : "") << buf;
        }
        out << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radial-directional goodness-of-fit tests for high-dimensional elliptical models"};
    app.require_subcommand(1);

    TestOptions t;
    auto* test = app.add_subcommand("test", "Test a CSV data matrix (rows = observations) for ellipticity");
    test->add_option("--input,-i", t.input, "Input CSV file")->required();
    test->add_option("--header", t.header, "Header row: auto, yes or no")->check(CLI::IsMember({"auto", "yes", "no"}));
    test->add_option("--delimiter", t.delimiter, "Field delimiter");
    test->add_option("--window", t.window, "Inclusive 1-based column range a:b");
    test->add_option("--columns", t.columns, "Explicit 1-based columns, e.g. 1,4,7-9");
    test->add_option("--top-variance", t.top_variance, "Keep the K columns with largest raw variance");
    test->add_flag("--no-standardize", t.no_standardize, "Skip window-local column standardization");
    test->add_option("--mode", t.mode, "Standardization: hr or oracle")->check(CLI::IsMember({"hr", "oracle"}));
    test->add_option("--mu-file", t.mu_file, "Known location (oracle mode; default zero)");
    test->add_option("--sigma-file", t.sigma_file, "Known p x p shape matrix (oracle mode)");
    test->add_option("--lambda", t.hr.lambda, "Graphical-lasso penalty");
    test->add_option("--band", t.hr.band_h, "HR shape bandwidth h");
    test->add_option("--ridge", t.hr.ridge, "HR ridge constant");
    test->add_option("--hr-tol", t.hr.tol, "HR stopping tolerance");
    test->add_option("--hr-max-iter", t.hr.max_iter, "Maximum HR iterations");
    test->add_option("--bootstrap", t.bootstrap, "Bootstrap replicates (0 disables)")->check(CLI::NonNegativeNumber);
    test->add_option("--permutation", t.permutation, "Permutation replicates (0 disables)")->check(CLI::NonNegativeNumber);
    test->add_option("--seed", t.seed, "Seed for bootstrap and permutation streams");
    test->add_option("--alpha", t.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
    test->add_option("--format", t.format, "Output format: text or json")->check(CLI::IsMember({"text", "json"}));
    test->add_flag("--exit-on-reject", t.exit_on_reject, "Exit with status 2 when the test rejects");
    test->add_option("--threads", t.threads, "Worker threads (capped by ELLIPTGOF_THREADS)");

    SimulateOptions s;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo size/power grid");
    sim->add_option("--preset", s.preset, "table1-gaussian-p50, size-p50 or power-gaussian-p100");
    sim->add_option("--law", s.laws, "Comma list: gaussian, t<nu>, mixture, kotz<beta>, bounded");
    sim->add_option("--shape", s.shapes, "Comma list: identity, ar<rho>, sp");
    sim->add_option("--p", s.dims, "Comma list of dimensions");
    sim->add_option("--active", s.active, "Comma list of active sets: sp, frac20, all");
    sim->add_option("--delta", s.deltas, "Comma list of signal strengths");
    sim->add_option("--n", s.n, "Sample size");
    sim->add_option("--reps", s.reps, "Replications per cell");
    sim->add_option("--alpha", s.alpha, "Significance level");
    sim->add_option("--mode", s.mode, "hr or oracle")->check(CLI::IsMember({"hr", "oracle"}));
    sim->add_option("--bootstrap", s.bootstrap, "Bootstrap replicates per replication (0 = analytic)");
    sim->add_option("--seed", s.seed, "Base seed");
    sim->add_option("--format", s.format, "csv or markdown")->check(CLI::IsMember({"csv", "markdown"}));
    sim->add_option("--output,-o", s.output, "Write the table to a file");
    sim->add_option("--threads", s.threads, "Worker threads (capped by ELLIPTGOF_THREADS)");

    GenerateOptions g;
    auto* gen = app.add_subcommand("generate", "Write a synthetic sample as CSV");
    gen->add_option("--n", g.n, "Sample size");
    gen->add_option("--p", g.p, "Dimension");
    gen->add_option("--law", g.law, "Radial law");
    gen->add_option("--shape", g.shape, "Shape structure");
    gen->add_option("--active", g.active, "Active set for the alternative");
    gen->add_option("--delta", g.delta, "Signal strength (0 = elliptical null)");
    gen->add_option("--seed", g.seed, "Seed");
    gen->add_option("--output,-o", g.output, "Output file (default stdout)");
    gen->add_flag("!--no-header", g.header, "Omit the header row");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*test) return run_test_command(t);
        if (*sim) return run_simulate_command(s);
        if (*gen) return run_generate_command(g);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
