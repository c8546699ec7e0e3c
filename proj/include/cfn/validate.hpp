#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cfn/errors.hpp"
#include "cfn/expr.hpp"
#include "cfn/interval.hpp"
#include "cfn/numeric.hpp"
#include "cfn/parser.hpp"
#include "cfn/prepare.hpp"

namespace cfn {

struct ValidationIssue {
    ErrorCode code;
    std::string subject;  // the offending subexpression, printed
    std::string message;
};

struct ValidationReport {
    enum class Status { Valid, Invalid, Undecided };
    Status status = Status::Valid;
    std::vector<ValidationIssue> failures;
    std::vector<ValidationIssue> undecided;
    /// Largest tried delta = 2^-j such that sampled points of (0, delta) pass
    /// the same checks numerically.
    std::optional<Rational> delta;

    bool valid() const { return status == Status::Valid; }
};

inline std::string to_string(ValidationReport::Status s) {
    switch (s) {
        case ValidationReport::Status::Valid: return "valid";
        case ValidationReport::Status::Invalid: return "invalid";
        case ValidationReport::Status::Undecided: return "undecided";
    }
    return "?";
}

namespace detail {

enum class CheckKind { LogArgument, FractionalBase, Divisor };

struct PositivityCheck {
    CheckKind kind;
    SubExpr subject;
};

inline void collect_checks(const SubExpr& e, std::vector<PositivityCheck>& out) {
    switch (e.kind()) {
        case SubKind::Rational:
        case SubKind::Var: return;
        case SubKind::Div:
            out.push_back({CheckKind::Divisor, e.rhs()});
            collect_checks(e.lhs(), out);
            collect_checks(e.rhs(), out);
            return;
        case SubKind::Pow:
            if (!is_integer(e.exponent())) {
                out.push_back({CheckKind::FractionalBase, e.base()});
            } else if (e.exponent() < 0) {
                out.push_back({CheckKind::Divisor, e.base()});
            }
            collect_checks(e.base(), out);
            return;
        default:
            collect_checks(e.lhs(), out);
            collect_checks(e.rhs(), out);
            return;
    }
}

inline std::vector<PositivityCheck> collect_checks(const CExpr& e) {
    std::vector<PositivityCheck> out;
    for (const auto& t : e.terms()) {
        collect_checks(t.factor, out);
        for (const auto& g : t.logs) {
            out.push_back({CheckKind::LogArgument, g});
            collect_checks(g, out);
        }
    }
    return out;
}

inline bool passes_at(const std::vector<PositivityCheck>& checks, const CExpr& e, const Rational& y) {
    try {
        const Interval yy = Interval::point(y, 64);
        for (const auto& c : checks) {
            const Interval v = eval_interval(c.subject, yy);
            if (c.kind == detail::CheckKind::Divisor ? v.contains_zero() : !v.strictly_positive()) {
                return false;
            }
        }
        eval_interval(e, yy);
    } catch (const Error&) {
        return false;
    }
    return true;
}

}  // namespace detail

/// Checks that every log argument and every base of a non-integer power has
/// a positive leading term at 0+, that divisors are not identically zero, and
/// that the whole expression prepares. Then picks delta numerically.
inline ValidationReport validate(const CExpr& e, std::size_t zero_budget = kDefaultZeroBudget) {
    ValidationReport rep;
    Preparer prep(zero_budget);
    const auto checks = detail::collect_checks(e);
    auto record = [&](const Error& err, const SubExpr* subject) {
        ValidationIssue issue{err.code(), subject ? print_canonical(*subject) : print_canonical(e), err.detail()};
        if (classify(err.code()) == ErrorClass::Undecided) {
            rep.undecided.push_back(std::move(issue));
        } else {
            rep.failures.push_back(std::move(issue));
        }
    };
    for (const auto& c : checks) {
        try {
            const auto lead = prep.series(c.subject).leading_term(zero_budget);
            if (std::holds_alternative<Undecided>(lead)) {
                throw Error(ErrorCode::LeadingTermUndecided,
                            "no nonzero term within " + std::to_string(zero_budget) + " grid positions");
            }
            if (std::holds_alternative<ExactZero>(lead)) {
                throw Error(c.kind == detail::CheckKind::LogArgument ? ErrorCode::NonPositiveLogArgument : ErrorCode::ExactZero,
                            "identically zero");
            }
            const Constant& coeff = std::get<SeriesTerm>(lead).coefficient;
            if (c.kind != detail::CheckKind::Divisor && coeff.sign(kDefaultSignPrecision) != Sign::Positive) {
                throw Error(c.kind == detail::CheckKind::LogArgument ? ErrorCode::NonPositiveLogArgument
                                                              : ErrorCode::NegativeLeading,
                            "leading coefficient " + coeff.str() + " is not positive");
            }
        } catch (const Error& err) {
            record(err, &c.subject);
        }
    }
    if (rep.failures.empty() && rep.undecided.empty()) {
        try {
            prep.prepare(e);
        } catch (const Error& err) {
            record(err, nullptr);
        }
    }
    if (!rep.failures.empty()) {
        rep.status = ValidationReport::Status::Invalid;
        return rep;
    }
    if (!rep.undecided.empty()) {
        rep.status = ValidationReport::Status::Undecided;
        return rep;
    }
    for (unsigned j = 0; j <= 40; ++j) {
        const Rational delta(Integer(1), pow(Integer(2), j));
        bool ok = true;
        for (int k = 1; k <= 8 && ok; ++k) {
            ok = detail::passes_at(checks, e, delta * Rational(k, 8) * Rational(63, 64));
        }
        Rational y = delta;
        for (int i = 1; i <= 6 && ok; ++i) {
            y /= 10;
            ok = detail::passes_at(checks, e, y);
        }
        if (ok) {
            rep.delta = delta;
            break;
        }
    }
    return rep;
}

}  // namespace cfn
