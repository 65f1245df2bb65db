#ifndef ENDCYCLE_ERROR_HPP
#define ENDCYCLE_ERROR_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace endcycle {

enum class ErrorKind {
    ParseError,
    LoopEdge,
    UnknownVertexClass,
    BadOffset,
    UnknownVertex,
    UnknownEdge,
    NotARay,
    GraphMismatch,
    NotThin,
    NotRepresentable,
    InfiniteCut,
    NotInCycleSpace,
    NotAdmissible,
    InfiniteBoundarySupport,
    NonzeroBoundary,
    NotACycle,
    BadDimension,
    NotAdmissiblePair,
    Unsupported,
    Internal,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::LoopEdge: return "LoopEdge";
        case ErrorKind::UnknownVertexClass: return "UnknownVertexClass";
        case ErrorKind::BadOffset: return "BadOffset";
        case ErrorKind::UnknownVertex: return "UnknownVertex";
        case ErrorKind::UnknownEdge: return "UnknownEdge";
        case ErrorKind::NotARay: return "NotARay";
        case ErrorKind::GraphMismatch: return "GraphMismatch";
        case ErrorKind::NotThin: return "NotThin";
        case ErrorKind::NotRepresentable: return "NotRepresentable";
        case ErrorKind::InfiniteCut: return "InfiniteCut";
        case ErrorKind::NotInCycleSpace: return "NotInCycleSpace";
        case ErrorKind::NotAdmissible: return "NotAdmissible";
        case ErrorKind::InfiniteBoundarySupport: return "InfiniteBoundarySupport";
        case ErrorKind::NonzeroBoundary: return "NonzeroBoundary";
        case ErrorKind::NotACycle: return "NotACycle";
        case ErrorKind::BadDimension: return "BadDimension";
        case ErrorKind::NotAdmissiblePair: return "NotAdmissiblePair";
        case ErrorKind::Unsupported: return "Unsupported";
        case ErrorKind::Internal: return "Internal";
    }
    return "Unknown";
}

/// Every library failure is reported through this exception type; `kind()`
/// distinguishes the cases callers are expected to branch on.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Text-format failure with a 1-based source position.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : Error(ErrorKind::ParseError,
                "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace endcycle

#endif
