#pragma once

#include <chrono>
#include <optional>
#include <set>
#include <string>

#include "cfn/asymptotics.hpp"
#include "cfn/expr.hpp"
#include "cfn/grid.hpp"
#include "cfn/prepare.hpp"

namespace cfn {

inline GridSeries derivative_prepared(const GridSeries& g) { return g.derivative(); }

/// e(t0) exactly, as the right limit of e(t0 + y).
inline LimitResult value_at(const CExpr& e, const Rational& t0, std::size_t zero_budget = kDefaultZeroBudget) {
    return limit_of_expr(shift(e, t0), zero_budget);
}

/// lim_{y -> 0+} (e(t0 + y) - e(t0)) / y with e(t0) obtained exactly.
inline LimitResult difference_quotient_derivative(const CExpr& e, const Rational& t0,
                                                  std::size_t zero_budget = kDefaultZeroBudget) {
    const LimitResult v = value_at(e, t0, zero_budget);
    if (v.is_undecided()) {
        return LimitResult::undecided("value at " + to_string(t0) + ": " + v.reason());
    }
    if (!v.is_finite()) {
        throw Error(ErrorCode::PointOutsideDomain, "expression is unbounded at " + to_string(t0));
    }
    const CExpr inv_y = CExpr::from_sub(sub_div(sub_rational(Rational(1)), sub_var()));
    const CExpr quotient = (shift(e, t0) - constant_to_cexpr(v.value())) * inv_y;
    return limit_of_expr(quotient, zero_budget);
}

struct ClosureReport {
    enum class Status { Match, Mismatch, Undecided };
    Status status = Status::Match;
    std::size_t checked_terms = 0;
    // first difference, when status is Mismatch
    Rational p;
    long l = 0;
    Constant symbolic;
    Constant termwise;
    std::string reason;
    double elapsed_ms = 0;
};

inline std::string to_string(ClosureReport::Status s) {
    switch (s) {
        case ClosureReport::Status::Match: return "match";
        case ClosureReport::Status::Mismatch: return "mismatch";
        case ClosureReport::Status::Undecided: return "undecided";
    }
    return "?";
}

/// Compares prepare(derivative_symbolic(e)) with derivative_prepared(prepare(e))
/// position by position on the common grid, exactly, until K nonzero terms
/// have been compared or both sides are exhausted. Unless both sides have
/// finite support, a run of `zero_budget` consecutive all-zero positions
/// stops the scan as Undecided.
inline ClosureReport closure_check(const CExpr& e, std::size_t K = 12, std::size_t zero_budget = kDefaultZeroBudget) {
    const auto t0 = std::chrono::steady_clock::now();
    ClosureReport rep;
    auto finish = [&]() -> ClosureReport {
        rep.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        return rep;
    };
    try {
        Preparer prep(zero_budget);
        const GridSeries symbolic = prep.prepare(derivative_symbolic(e));
        const GridSeries termwise = derivative_prepared(prep.prepare(e));
        if (symbolic.empty() && termwise.empty()) {
            return finish();
        }
        const std::int64_t d = detail::checked_lcm(symbolic.ramification(), termwise.ramification());
        const Rational step(1, d);
        Rational p = std::min(symbolic.order_bound(), termwise.order_bound());
        // an empty side has order bound 0, which must not cut the scan short
        if (symbolic.empty()) {
            p = termwise.order_bound();
        } else if (termwise.empty()) {
            p = symbolic.order_bound();
        }
        const auto end_a = symbolic.support_end();
        const auto end_b = termwise.support_end();
        std::set<long> ls = symbolic.l_values();
        for (long l : termwise.l_values()) {
            ls.insert(l);
        }
        std::size_t zero_run = 0;
        while (rep.checked_terms < K) {
            const bool past_a = symbolic.empty() || (end_a && p >= *end_a);
            const bool past_b = termwise.empty() || (end_b && p >= *end_b);
            if (past_a && past_b) {
                break;
            }
            bool any = false;
            for (auto it = ls.rbegin(); it != ls.rend(); ++it) {
                const Constant a = symbolic.coefficient(p, *it);
                const Constant b = termwise.coefficient(p, *it);
                if (a.is_zero() && b.is_zero()) {
                    continue;
                }
                any = true;
                ++rep.checked_terms;
                if (!(a == b)) {
                    rep.status = ClosureReport::Status::Mismatch;
                    rep.p = p;
                    rep.l = *it;
                    rep.symbolic = a;
                    rep.termwise = b;
                    return finish();
                }
            }
            zero_run = any ? 0 : zero_run + 1;
            if (zero_run > 0 && zero_run >= zero_budget && !(end_a && end_b)) {
                rep.status = ClosureReport::Status::Undecided;
                rep.reason = std::to_string(zero_budget) + " consecutive zero positions after " +
                             std::to_string(rep.checked_terms) + " matching terms";
                return finish();
            }
            p += step;
        }
    } catch (const Error& err) {
        if (classify(err.code()) != ErrorClass::Undecided) {
            throw;
        }
        rep.status = ClosureReport::Status::Undecided;
        rep.reason = err.what();
    }
    return finish();
}

}  // namespace cfn
