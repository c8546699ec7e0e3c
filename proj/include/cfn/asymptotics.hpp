#pragma once

#include <string>
#include <utility>

#include "cfn/constant.hpp"
#include "cfn/errors.hpp"
#include "cfn/expr.hpp"
#include "cfn/grid.hpp"
#include "cfn/prepare.hpp"

namespace cfn {

inline constexpr unsigned kDefaultSignPrecision = 2048;

/// y^p1 ell^l1 grows strictly faster than y^p2 ell^l2 as y -> 0+.
inline bool dominance_less(const std::pair<Rational, long>& a, const std::pair<Rational, long>& b) {
    if (a.first != b.first) {
        return a.first < b.first;
    }
    return a.second > b.second;
}

class LimitResult {
public:
    enum class Kind { Finite, PlusInfinity, MinusInfinity, Undecided };

    static LimitResult finite(Constant c) { return LimitResult(Kind::Finite, std::move(c), {}); }
    static LimitResult plus_infinity() { return LimitResult(Kind::PlusInfinity, {}, {}); }
    static LimitResult minus_infinity() { return LimitResult(Kind::MinusInfinity, {}, {}); }
    static LimitResult undecided(std::string reason) { return LimitResult(Kind::Undecided, {}, std::move(reason)); }

    Kind kind() const noexcept { return kind_; }
    bool is_finite() const noexcept { return kind_ == Kind::Finite; }
    bool is_undecided() const noexcept { return kind_ == Kind::Undecided; }
    /// The limit value; zero unless finite.
    const Constant& value() const noexcept { return value_; }
    const std::string& reason() const noexcept { return reason_; }

    std::string str() const {
        switch (kind_) {
            case Kind::Finite: return value_.str();
            case Kind::PlusInfinity: return "+inf";
            case Kind::MinusInfinity: return "-inf";
            case Kind::Undecided: return "undecided (" + reason_ + ")";
        }
        return "?";
    }

    friend bool operator==(const LimitResult& a, const LimitResult& b) {
        return a.kind_ == b.kind_ && a.value_ == b.value_ && (a.kind_ != Kind::Undecided || a.reason_ == b.reason_);
    }

private:
    LimitResult(Kind k, Constant v, std::string r) : kind_(k), value_(std::move(v)), reason_(std::move(r)) {}

    Kind kind_;
    Constant value_;
    std::string reason_;
};

/// Right limit at 0 of a grid series. Terms with p > 0 tend to 0; among the
/// finitely many positions with p <= 0 the dominant nonzero (p, l) decides.
inline LimitResult limit_at_zero(const GridSeries& g, unsigned sign_precision = kDefaultSignPrecision) {
    if (g.empty()) {
        return LimitResult::finite(Constant{});
    }
    const Rational step(1, g.ramification());
    const auto end = g.support_end();
    for (Rational p = g.order_bound(); p <= 0 && (!end || p < *end); p += step) {
        const auto terms = g.terms_at(p);
        if (terms.empty()) {
            continue;
        }
        const GridTerm& lead = terms.front();  // largest l at the smallest p
        if (lead.p == 0 && lead.l == 0) {
            return LimitResult::finite(lead.c);
        }
        switch (lead.c.sign(sign_precision)) {
            case Sign::Positive: return LimitResult::plus_infinity();
            case Sign::Negative: return LimitResult::minus_infinity();
            default:
                return LimitResult::undecided("sign of dominant coefficient " + lead.c.str() + " at (p, l) = (" +
                                              to_string(lead.p) + ", " + std::to_string(lead.l) +
                                              ") not decided within " + std::to_string(sign_precision) + " bits");
        }
    }
    return LimitResult::finite(Constant{});
}

/// prepare_constructible followed by limit_at_zero; a leading term that
/// cannot be found within the budget yields Undecided.
inline LimitResult limit_of_expr(const CExpr& e, std::size_t zero_budget = kDefaultZeroBudget,
                                 unsigned sign_precision = kDefaultSignPrecision) {
    try {
        Preparer prep(zero_budget);
        return limit_at_zero(prep.prepare(e), sign_precision);
    } catch (const Error& err) {
        if (classify(err.code()) == ErrorClass::Undecided) {
            return LimitResult::undecided(err.what());
        }
        throw;
    }
}

}  // namespace cfn
