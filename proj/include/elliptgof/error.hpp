#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace elliptgof {

enum class ErrorKind {
    NonFinite,
    ConvergenceFailure,
    SingularMatrix,
    NonPositiveTrace,
    InvalidArgument,
    DidNotConverge,
    AllRowsDegenerate,
    NonPD,
    DegenerateResidual,
    ZeroRadius,
    DegenerateRadius,
    DegenerateCoordinate,
    InvalidDimension,
    DegenerateBootstrap,
    TooManyFailures,
    ParseError,
    RaggedRows,
    EmptyFile,
    ConstantColumn,
    Io,
};

inline const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorKind::SingularMatrix: return "SingularMatrix";
        case ErrorKind::NonPositiveTrace: return "NonPositiveTrace";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::DidNotConverge: return "DidNotConverge";
        case ErrorKind::AllRowsDegenerate: return "AllRowsDegenerate";
        case ErrorKind::NonPD: return "NonPD";
        case ErrorKind::DegenerateResidual: return "DegenerateResidual";
        case ErrorKind::ZeroRadius: return "ZeroRadius";
        case ErrorKind::DegenerateRadius: return "DegenerateRadius";
        case ErrorKind::DegenerateCoordinate: return "DegenerateCoordinate";
        case ErrorKind::InvalidDimension: return "InvalidDimension";
        case ErrorKind::DegenerateBootstrap: return "DegenerateBootstrap";
        case ErrorKind::TooManyFailures: return "TooManyFailures";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::RaggedRows: return "RaggedRows";
        case ErrorKind::EmptyFile: return "EmptyFile";
        case ErrorKind::ConstantColumn: return "ConstantColumn";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

/// Base exception for every failure raised by the library. `kind()` is the
/// stable machine-readable category; `index()` carries an offending row,
/// column or coordinate when one applies (otherwise -1).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::ptrdiff_t index = -1)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message),
          kind_(kind),
          index_(index) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::ptrdiff_t index() const noexcept { return index_; }

private:
    ErrorKind kind_;
    std::ptrdiff_t index_;
};

/// Raised by iterative solvers that hit their iteration cap. The best
/// iterate found so far travels with the exception.
class DidNotConverge : public Error {
public:
    DidNotConverge(const std::string& message, Eigen::VectorXd best)
        : Error(ErrorKind::DidNotConverge, message), best_(std::move(best)) {}

    const Eigen::VectorXd& best() const noexcept { return best_; }

private:
    Eigen::VectorXd best_;
};

}  // namespace elliptgof
