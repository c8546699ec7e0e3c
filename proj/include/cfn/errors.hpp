#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cfn {

enum class ErrorCode {
    // grammar
    SyntaxError,
    UnknownIdentifier,
    NonRationalExponent,
    NestedLog,
    DivisionByLog,
    PowerOfLog,
    // fragment / domain
    NonPositiveArgument,
    NonPositiveLogArgument,
    NegativeLeading,
    NonPositiveLeading,
    NonConstantLeading,
    NonRationalRadicand,
    NonInvertibleLeading,
    ExactZero,
    PointOutsideDomain,
    DomainViolationAtPoint,
    RamificationCap,
    FactorizationLimit,
    InvalidArgument,
    // budgets
    LeadingTermUndecided,
};

enum class ErrorClass { Grammar, Domain, Undecided };

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
        case ErrorCode::NonRationalExponent: return "NonRationalExponent";
        case ErrorCode::NestedLog: return "NestedLog";
        case ErrorCode::DivisionByLog: return "DivisionByLog";
        case ErrorCode::PowerOfLog: return "PowerOfLog";
        case ErrorCode::NonPositiveArgument: return "NonPositiveArgument";
        case ErrorCode::NonPositiveLogArgument: return "NonPositiveLogArgument";
        case ErrorCode::NegativeLeading: return "NegativeLeading";
        case ErrorCode::NonPositiveLeading: return "NonPositiveLeading";
        case ErrorCode::NonConstantLeading: return "NonConstantLeading";
        case ErrorCode::NonRationalRadicand: return "NonRationalRadicand";
        case ErrorCode::NonInvertibleLeading: return "NonInvertibleLeading";
        case ErrorCode::ExactZero: return "ExactZero";
        case ErrorCode::PointOutsideDomain: return "PointOutsideDomain";
        case ErrorCode::DomainViolationAtPoint: return "DomainViolationAtPoint";
        case ErrorCode::RamificationCap: return "RamificationCap";
        case ErrorCode::FactorizationLimit: return "FactorizationLimit";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::LeadingTermUndecided: return "LeadingTermUndecided";
    }
    return "Unknown";
}

constexpr ErrorClass classify(ErrorCode code) {
    switch (code) {
        case ErrorCode::SyntaxError:
        case ErrorCode::UnknownIdentifier:
        case ErrorCode::NonRationalExponent:
        case ErrorCode::NestedLog:
        case ErrorCode::DivisionByLog:
        case ErrorCode::PowerOfLog:
            return ErrorClass::Grammar;
        case ErrorCode::LeadingTermUndecided:
        case ErrorCode::FactorizationLimit:
            return ErrorClass::Undecided;
        default:
            return ErrorClass::Domain;
    }
}

/// Half-open byte range into the source text, with the 1-based line:column of its start.
struct SourceSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t line = 1;
    std::size_t column = 1;
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::optional<SourceSpan> span = std::nullopt)
        : std::runtime_error(format(code, message, span)), code_(code), span_(span), detail_(message) {}

    ErrorCode code() const noexcept { return code_; }
    const std::optional<SourceSpan>& span() const noexcept { return span_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    static std::string format(ErrorCode code, const std::string& message, const std::optional<SourceSpan>& span) {
        std::string out(to_string(code));
        if (span) {
            out += " at " + std::to_string(span->line) + ":" + std::to_string(span->column);
        }
        if (!message.empty()) {
            out += ": " + message;
        }
        return out;
    }

    ErrorCode code_;
    std::optional<SourceSpan> span_;
    std::string detail_;
};

}  // namespace cfn
