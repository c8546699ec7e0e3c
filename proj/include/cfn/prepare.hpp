#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cfn/constant.hpp"
#include "cfn/errors.hpp"
#include "cfn/expr.hpp"
#include "cfn/grid.hpp"
#include "cfn/series.hpp"

namespace cfn {

inline constexpr std::size_t kDefaultZeroBudget = 64;

/// e = a * y^p * u with u a unit, or the distinguished zero form.
struct PreparedSub {
    bool zero = false;
    Constant a;
    Rational p;
    Unit u;
};

/// Evaluates log-free expressions into Puiseux series and constructible
/// expressions into grid series. Structurally equal subexpressions share one
/// series. A Preparer is not meant to be shared between threads; the series
/// it hands out are.
class Preparer {
public:
    explicit Preparer(std::size_t zero_budget = kDefaultZeroBudget) : budget_(zero_budget) {}

    std::size_t zero_budget() const noexcept { return budget_; }

    const PuiseuxSeries& series(const SubExpr& e) {
        if (auto it = memo_.find(e); it != memo_.end()) {
            return it->second;
        }
        PuiseuxSeries s = build(e);
        return memo_.emplace(e, std::move(s)).first->second;
    }

    PreparedSub prepare_sub(const SubExpr& e) {
        const PuiseuxSeries& s = series(e);
        auto idx = s.leading_index(budget_);
        if (std::holds_alternative<Undecided>(idx)) {
            throw Error(ErrorCode::LeadingTermUndecided, undecided_message());
        }
        if (std::holds_alternative<ExactZero>(idx)) {
            return PreparedSub{true, Constant{}, Rational(0), Unit::one()};
        }
        const std::size_t k = std::get<std::size_t>(idx);
        const Rational p = s.exponent_at(k);
        const Constant& c = s.coefficient_at(k);
        const Rational inv = Rational(1) / c.rational();
        return PreparedSub{false, c, p, Unit::from_series(s.tail_from(p).scaled(Constant(inv), -p), budget_)};
    }

    /// log g = log c - p * ell + log u for g = c y^p u.
    GridSeries log_grid(const SubExpr& g) {
        const PuiseuxSeries& s = series(g);
        auto idx = s.leading_index(budget_);
        if (std::holds_alternative<Undecided>(idx)) {
            throw Error(ErrorCode::LeadingTermUndecided, "log argument: " + undecided_message());
        }
        if (std::holds_alternative<ExactZero>(idx)) {
            throw Error(ErrorCode::NonPositiveLogArgument, "log argument is identically zero");
        }
        const std::size_t k = std::get<std::size_t>(idx);
        const Rational p = s.exponent_at(k);
        const Constant& c = s.coefficient_at(k);
        if (c.is_rational() && c.rational() < 0) {
            throw Error(ErrorCode::NonPositiveLogArgument,
                        "log argument has negative leading term " + c.str() + "*y^" + to_string(p));
        }
        auto [log_c, log_u] = log_unit(s.tail_from(p).scaled(Constant(1), -p), budget_);
        GridSeries out = GridSeries::constant(log_c);
        if (p != 0) {
            out = out + GridSeries::constant(Constant(-p), 1);
        }
        return out + GridSeries::from_series(log_u);
    }

    GridSeries prepare(const CExpr& e) {
        GridSeries out;
        for (const auto& t : e.terms()) {
            GridSeries term = GridSeries::from_series(series(t.factor));
            for (const auto& g : t.logs) {
                term = term * log_grid(g);
            }
            out = out + term;
        }
        return out;
    }

private:
    std::string undecided_message() const {
        return "no nonzero term within " + std::to_string(budget_) + " grid positions";
    }

    // num / den with den a polynomial in y^(1/d), or absent for 1. Keeping
    // rational operations as one fraction lets finite results stay finite.
    struct Fraction {
        PuiseuxSeries num;
        std::optional<PuiseuxSeries> den;
    };

    static bool known_zero(const PuiseuxSeries& s) { return s.exhausted() && s.finite_terms().empty(); }

    static PuiseuxSeries times(const PuiseuxSeries& a, const std::optional<PuiseuxSeries>& b) {
        return b ? a * *b : a;
    }

    static std::optional<PuiseuxSeries> times(const std::optional<PuiseuxSeries>& a,
                                              const std::optional<PuiseuxSeries>& b) {
        if (!a) {
            return b;
        }
        return times(*a, b);
    }

    const Fraction& fraction(const SubExpr& e) {
        if (auto it = fractions_.find(e); it != fractions_.end()) {
            return it->second;
        }
        Fraction f = build_fraction(e);
        return fractions_.emplace(e, std::move(f)).first->second;
    }

    Fraction build_fraction(const SubExpr& e) {
        switch (e.kind()) {
            case SubKind::Rational: return {PuiseuxSeries::constant(Constant(e.value())), std::nullopt};
            case SubKind::Var: return {PuiseuxSeries::variable(), std::nullopt};
            case SubKind::Add:
            case SubKind::Sub: {
                const Fraction& x = fraction(e.lhs());
                const Fraction& z = fraction(e.rhs());
                const bool minus = e.kind() == SubKind::Sub;
                if ((!x.den && !z.den) || (x.den && z.den && x.den->node() == z.den->node())) {
                    return {minus ? x.num - z.num : x.num + z.num, x.den};
                }
                const PuiseuxSeries a = times(x.num, z.den);
                const PuiseuxSeries b = times(z.num, x.den);
                return {minus ? a - b : a + b, times(x.den, z.den)};
            }
            case SubKind::Mul: {
                const Fraction& x = fraction(e.lhs());
                const Fraction& z = fraction(e.rhs());
                return {x.num * z.num, times(x.den, z.den)};
            }
            case SubKind::Div: {
                const Fraction& x = fraction(e.lhs());
                const Fraction& z = fraction(e.rhs());
                if (known_zero(z.num)) {
                    throw Error(ErrorCode::ExactZero, "division by an expression that is identically zero");
                }
                return {times(x.num, z.den), times(x.den, z.num)};
            }
            case SubKind::Pow: {
                const Rational& q = e.exponent();
                if (is_integer(q) && abs(q) <= 16) {
                    const Fraction& x = fraction(e.base());
                    const Rational k = abs(q);
                    auto raise = [&](const std::optional<PuiseuxSeries>& s) -> std::optional<PuiseuxSeries> {
                        if (!s) {
                            return std::nullopt;
                        }
                        return power(*s, k, budget_);
                    };
                    if (q > 0) {
                        return {power(x.num, k, budget_), raise(x.den)};
                    }
                    if (known_zero(x.num)) {
                        throw Error(ErrorCode::ExactZero, "negative power of an expression that is identically zero");
                    }
                    return {x.den ? power(*x.den, k, budget_) : PuiseuxSeries::constant(Constant(1)),
                            power(x.num, k, budget_)};
                }
                return {power(series(e.base()), q, budget_), std::nullopt};
            }
        }
        throw Error(ErrorCode::InvalidArgument, "unknown expression node");
    }

    PuiseuxSeries build(const SubExpr& e) {
        const Fraction& f = fraction(e);
        if (!f.den) {
            return f.num;
        }
        if (auto q = exact_quotient(f.num, *f.den)) {
            return *q;
        }
        if (f.den->exhausted()) {
            const auto terms = f.den->finite_terms();
            if (terms.size() == 1) {
                const Rational c = terms.front().coefficient.rational();
                return f.num.scaled(Constant(Rational(1) / c), -terms.front().exponent);
            }
        }
        return f.num * inverse(*f.den, budget_);
    }

    std::size_t budget_;
    std::unordered_map<SubExpr, PuiseuxSeries, SubExprHash> memo_;
    std::unordered_map<SubExpr, Fraction, SubExprHash> fractions_;
};

inline PreparedSub prepare_sub(const SubExpr& e, std::size_t zero_budget = kDefaultZeroBudget) {
    Preparer p(zero_budget);
    return p.prepare_sub(e);
}

inline GridSeries prepare_constructible(const CExpr& e, std::size_t zero_budget = kDefaultZeroBudget) {
    Preparer p(zero_budget);
    return p.prepare(e);
}

// ---------------------------------------------------------------------------

/// a * u * y^p * ell^l.
struct PreparedTerm {
    Constant a;
    Rational p;
    long l = 0;
    Unit u;
};

struct PreparedForm {
    std::vector<PreparedTerm> terms;
};

/// Emits every grid term with p <= 0 (or p below `cutoff` when given) on its
/// own with u = 1, then bundles the remaining tail per power of ell as
/// a * y^p * u. A tail whose leading coefficient involves log atoms is split
/// by monomial so that each unit keeps leading coefficient 1.
inline PreparedForm to_prepared_form(const GridSeries& g, std::optional<Rational> cutoff = std::nullopt,
                                     std::size_t zero_budget = kDefaultZeroBudget) {
    if (cutoff && *cutoff <= 0) {
        throw Error(ErrorCode::InvalidArgument, "cutoff must be positive");
    }
    PreparedForm out;
    if (g.empty()) {
        return out;
    }
    const std::int64_t d = g.ramification();
    const Rational step(1, d);
    auto explicit_part = [&](const Rational& p) { return cutoff ? p < *cutoff : p <= 0; };
    const auto end = g.support_end();
    Rational p = g.order_bound();
    for (; explicit_part(p) && (!end || p < *end); p += step) {
        for (auto& t : g.terms_at(p)) {
            out.terms.push_back({std::move(t.c), t.p, t.l, Unit::one()});
        }
    }
    if (end && p >= *end) {
        return out;
    }

    const GridSeries tail = g.tail_from(p);
    std::vector<PreparedTerm> bundled;
    auto bundle = [&](const PuiseuxSeries& s, const Monomial& m, long l, bool split_allowed) -> bool {
        auto idx = s.leading_index(zero_budget);
        if (std::holds_alternative<Undecided>(idx)) {
            throw Error(ErrorCode::LeadingTermUndecided,
                        "tail at ell^" + std::to_string(l) + ": no nonzero term within " +
                            std::to_string(zero_budget) + " grid positions");
        }
        if (std::holds_alternative<ExactZero>(idx)) {
            return true;
        }
        const std::size_t k = std::get<std::size_t>(idx);
        const Rational q = s.exponent_at(k);
        const Constant& c = s.coefficient_at(k);
        if (!c.is_rational()) {
            if (split_allowed) {
                return false;
            }
            throw Error(ErrorCode::NonConstantLeading, "tail leading coefficient " + c.str());
        }
        const Rational inv = Rational(1) / c.rational();
        Unit u = Unit::from_series(s.tail_from(q).scaled(Constant(inv), -q), zero_budget);
        bundled.push_back({Constant::monomial(m, Rational(1)) * c, q, l, std::move(u)});
        return true;
    };
    for (long l : tail.l_values()) {
        if (bundle(tail.component_sum(l), Monomial{}, l, true)) {
            continue;
        }
        for (const auto& [k, s] : tail.components()) {
            if (k.first == l) {
                bundle(s, k.second, l, false);
            }
        }
    }
    std::stable_sort(bundled.begin(), bundled.end(), [](const PreparedTerm& x, const PreparedTerm& y) {
        return x.p != y.p ? x.p < y.p : x.l > y.l;
    });
    for (auto& t : bundled) {
        out.terms.push_back(std::move(t));
    }
    return out;
}

struct FormCheck {
    bool units_or_positive = true;  // every term has u = 1 or p > 0
    bool distinct_nonpositive = true;  // (p, l) pairwise distinct among p <= 0
    std::string detail;
    bool ok() const { return units_or_positive && distinct_nonpositive; }
};

inline FormCheck check_prepared_form(const PreparedForm& f) {
    FormCheck out;
    std::vector<std::pair<Rational, long>> seen;
    for (const auto& t : f.terms) {
        if (!(t.u.is_one() || t.p > 0)) {
            out.units_or_positive = false;
            out.detail += "non-trivial unit at p = " + to_string(t.p) + "; ";
        }
        if (t.p <= 0) {
            std::pair<Rational, long> key{t.p, t.l};
            if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
                out.distinct_nonpositive = false;
                out.detail += "repeated (p, l) = (" + to_string(t.p) + ", " + std::to_string(t.l) + "); ";
            }
            seen.push_back(std::move(key));
        }
    }
    return out;
}

}  // namespace cfn
