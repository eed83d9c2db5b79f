#ifndef FLSA_ERROR_HPP
#define FLSA_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

/**
 * @file error.hpp
 * @brief Error type shared by every module.
 */

namespace flsa {

/**
 * Failure classes raised by the library. The CLI maps `category()` onto
 * its exit codes, so each kind belongs to either the input or numerical bucket.
 */
enum class ErrorKind {
    // Input / usage problems.
    InvalidArgument,
    DimensionMismatch,
    AllDocumentsEmpty,
    EmptyTest,
    IoFailure,
    Parse,
    // Numerical problems.
    ZeroRow,
    ZeroMass,
    ZeroColumn,
    EmptyTopic,
    EmptyCluster,
    DegenerateInput,
    ConvergenceFailure,
    UndefinedIndex,
};

enum class ErrorCategory { Input, Numerical };

inline constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::AllDocumentsEmpty: return "AllDocumentsEmpty";
    case ErrorKind::EmptyTest: return "EmptyTest";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::ZeroRow: return "ZeroRow";
    case ErrorKind::ZeroMass: return "ZeroMass";
    case ErrorKind::ZeroColumn: return "ZeroColumn";
    case ErrorKind::EmptyTopic: return "EmptyTopic";
    case ErrorKind::EmptyCluster: return "EmptyCluster";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::UndefinedIndex: return "UndefinedIndex";
    }
    return "Unknown";
}

inline constexpr ErrorCategory category_of(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::AllDocumentsEmpty:
    case ErrorKind::EmptyTest:
    case ErrorKind::IoFailure:
    case ErrorKind::Parse:
        return ErrorCategory::Input;
    default:
        return ErrorCategory::Numerical;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    ErrorCategory category() const noexcept { return category_of(kind_); }

    /// Prefix the message with the pipeline step that raised it.
    Error with_step(std::string_view step) const {
        return Error(kind_, std::string(step) + ": " + detail());
    }

    std::string detail() const {
        std::string what_ = what();
        auto prefix = std::string(to_string(kind_)) + ": ";
        return what_.rfind(prefix, 0) == 0 ? what_.substr(prefix.size()) : what_;
    }

private:
    ErrorKind kind_;
};

namespace detail {

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) {
        throw Error(kind, message);
    }
}

} // namespace detail

} // namespace flsa

#endif
