#ifndef PROPFLOW_ERRORS_HPP
#define PROPFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace propflow {

enum class ErrorKind {
    CyclicGraph,
    UnreachableSink,
    UnknownNodeReference,
    NegativeValue,
    CapacityOverflow,
    UnderflowRisk,
    DependenceViolated,
    ExponentOverflow,
    NonTermination,
    UndefinedRatio,
    SizeLimit,
    ParseError,
    InvalidArgument,
};

inline const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::CyclicGraph: return "CyclicGraph";
        case ErrorKind::UnreachableSink: return "UnreachableSink";
        case ErrorKind::UnknownNodeReference: return "UnknownNodeReference";
        case ErrorKind::NegativeValue: return "NegativeValue";
        case ErrorKind::CapacityOverflow: return "CapacityOverflow";
        case ErrorKind::UnderflowRisk: return "UnderflowRisk";
        case ErrorKind::DependenceViolated: return "DependenceViolated";
        case ErrorKind::ExponentOverflow: return "ExponentOverflow";
        case ErrorKind::NonTermination: return "NonTermination";
        case ErrorKind::UndefinedRatio: return "UndefinedRatio";
        case ErrorKind::SizeLimit: return "SizeLimit";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + detail), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace propflow

#endif
