#pragma once

// CSV ingestion and window extraction for real-data analyses.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "elliptgof/error.hpp"
#include "elliptgof/linalg.hpp"

namespace elliptgof {

struct Dataset {
    DataMatrix values;
    std::vector<std::string> column_labels;  // empty when the file has no header
    std::string source;
    /// 1-based file line numbers of rows dropped for missing or non-finite
    /// entries.
    std::vector<std::size_t> rejected_rows;
};

/// Columns to analyze, 1-based; optional per-window standardization.
struct WindowSpec {
    std::vector<Eigen::Index> columns;
    bool standardize = true;

    static WindowSpec range(Eigen::Index first, Eigen::Index last, bool standardize = true) {
        if (first < 1 || last < first) throw Error(ErrorKind::InvalidArgument, "window range must satisfy 1 <= a <= b");
        WindowSpec w;
        w.standardize = standardize;
        for (Eigen::Index j = first; j <= last; ++j) w.columns.push_back(j);
        return w;
    }

    static WindowSpec all(Eigen::Index p, bool standardize = true) { return range(1, p, standardize); }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    std::string out = s.substr(b, e - b);
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
    return out;
}

inline std::vector<std::string> split(const std::string& line, char delimiter) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, delimiter)) out.push_back(trim(cell));
    if (!line.empty() && line.back() == delimiter) out.emplace_back();
    return out;
}

inline bool is_missing_token(const std::string& s) {
    std::string lower;
    for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return lower.empty() || lower == "na" || lower == "nan" || lower == "null" || lower == "inf" || lower == "+inf" ||
           lower == "-inf" || lower == "infinity" || lower == "-infinity";
}

/// Parses a numeric cell; nullopt marks a missing or non-finite entry.
inline std::optional<double> parse_cell(const std::string& s, std::size_t line, std::size_t column) {
    if (is_missing_token(s)) return std::nullopt;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || used == 0) {
        throw Error(ErrorKind::ParseError,
                    "non-numeric value '" + s + "' at row " + std::to_string(line) + ", column " + std::to_string(column),
                    static_cast<std::ptrdiff_t>(line));
    }
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace detail

inline Dataset parse_csv(std::istream& in, bool has_header, char delimiter = ',', const std::string& source = "") {
    Dataset d;
    d.source = source;
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    std::size_t line_no = 0;
    bool header_pending = has_header;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> cells = detail::split(line, delimiter);
        if (header_pending) {
            d.column_labels = cells;
            width = cells.size();
            header_pending = false;
            continue;
        }
        if (width == 0) width = cells.size();
        if (cells.size() != width) {
            throw Error(ErrorKind::RaggedRows,
                        "row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) + " fields, expected " +
                            std::to_string(width),
                        static_cast<std::ptrdiff_t>(line_no));
        }
        std::vector<double> values(width);
        bool complete = true;
        for (std::size_t j = 0; j < width; ++j) {
            const auto v = detail::parse_cell(cells[j], line_no, j + 1);
            if (!v) {
                complete = false;
            } else {
                values[j] = *v;
            }
        }
        if (complete) {
            rows.push_back(std::move(values));
        } else {
            d.rejected_rows.push_back(line_no);
        }
    }
    if (rows.empty()) {
        throw Error(ErrorKind::EmptyFile, source.empty() ? "no data rows" : source + ": no data rows");
    }
    d.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < width; ++j)
            d.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return d;
}

inline Dataset load_csv(const std::string& path, bool has_header, char delimiter = ',') {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
    return parse_csv(in, has_header, delimiter, path);
}

/// Sample standard deviation with the 1/(n-1) denominator.
inline double column_sd(const Eigen::Ref<const Vector>& column) {
    const double n = static_cast<double>(column.size());
    if (n < 2.0) return 0.0;
    return std::sqrt((column.array() - column.mean()).square().sum() / (n - 1.0));
}

/// Selected columns, each centered and scaled by its own mean and sample sd
/// when w.standardize is set.
inline DataMatrix extract_window(const Dataset& d, const WindowSpec& w) {
    const Eigen::Index p = d.values.cols();
    if (w.columns.empty()) throw Error(ErrorKind::InvalidArgument, "window selects no columns");
    DataMatrix out(d.values.rows(), static_cast<Eigen::Index>(w.columns.size()));
    for (std::size_t k = 0; k < w.columns.size(); ++k) {
        const Eigen::Index j = w.columns[k];
        if (j < 1 || j > p) {
            throw Error(ErrorKind::InvalidArgument,
                        "window column " + std::to_string(j) + " outside [1, " + std::to_string(p) + "]", j);
        }
        out.col(static_cast<Eigen::Index>(k)) = d.values.col(j - 1);
    }
    if (w.standardize) {
        for (Eigen::Index k = 0; k < out.cols(); ++k) {
            const double sd = column_sd(out.col(k));
            if (!(sd > 0.0)) {
                throw Error(ErrorKind::ConstantColumn,
                            "column " + std::to_string(w.columns[static_cast<std::size_t>(k)]) + " is constant",
                            w.columns[static_cast<std::size_t>(k)]);
            }
            out.col(k) = (out.col(k).array() - out.col(k).mean()) / sd;
        }
    }
    return out;
}

/// 1-based indices of the k columns with largest raw sample variance
/// (ties to the lower index), returned in ascending column order. Constant
/// columns are never selected.
inline std::vector<Eigen::Index> top_variance_columns(const Dataset& d, Eigen::Index k) {
    const Eigen::Index p = d.values.cols();
    std::vector<std::pair<double, Eigen::Index>> ranked;
    for (Eigen::Index j = 0; j < p; ++j) {
        const double sd = column_sd(d.values.col(j));
        if (sd > 0.0) ranked.emplace_back(sd * sd, j + 1);
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "top-variance K must be >= 1");
    ranked.resize(std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(k)));
    std::vector<Eigen::Index> cols;
    for (const auto& r : ranked) cols.push_back(r.second);
    std::sort(cols.begin(), cols.end());
    return cols;
}

}  // namespace elliptgof
