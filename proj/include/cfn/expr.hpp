#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cfn/constant.hpp"
#include "cfn/errors.hpp"
#include "cfn/rational.hpp"

namespace cfn {

enum class SubKind { Rational, Var, Add, Sub, Mul, Div, Pow };

class SubExpr;

namespace detail {

struct SubNode {
    SubKind kind;
    Rational value;  // literal for Rational, exponent for Pow
    std::shared_ptr<const SubNode> lhs;
    std::shared_ptr<const SubNode> rhs;
    std::size_t hash = 0;
    std::size_t size = 1;
};

inline std::size_t hash_mix(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

inline std::size_t hash_rational(const Rational& r) {
    return hash_mix(std::hash<std::string>{}(numer(r).str()), std::hash<std::string>{}(denom(r).str()));
}

}  // namespace detail

/// Log-free expression in y: rationals, y, + - * / and rational powers.
/// Immutable and shared; equality is structural.
class SubExpr {
public:
    SubExpr() : SubExpr(make(SubKind::Rational, Rational(0), nullptr, nullptr)) {}

    SubKind kind() const noexcept { return node_->kind; }
    bool is_rational() const noexcept { return node_->kind == SubKind::Rational; }
    bool is_var() const noexcept { return node_->kind == SubKind::Var; }
    /// Literal value (Rational) or exponent (Pow).
    const Rational& value() const noexcept { return node_->value; }
    const Rational& exponent() const noexcept { return node_->value; }
    SubExpr lhs() const { return SubExpr(node_->lhs); }
    SubExpr rhs() const { return SubExpr(node_->rhs); }
    SubExpr base() const { return SubExpr(node_->lhs); }
    std::size_t hash() const noexcept { return node_->hash; }
    std::size_t size() const noexcept { return node_->size; }

    bool is_rational(const Rational& r) const { return is_rational() && value() == r; }

    friend bool operator==(const SubExpr& a, const SubExpr& b) { return equal(a.node_.get(), b.node_.get()); }

    // Raw constructors; prefer the folding helpers below.
    static SubExpr raw_rational(const Rational& r) { return SubExpr(make(SubKind::Rational, r, nullptr, nullptr)); }
    static SubExpr raw_var() { return SubExpr(make(SubKind::Var, Rational(0), nullptr, nullptr)); }
    static SubExpr raw_binary(SubKind k, const SubExpr& a, const SubExpr& b) {
        return SubExpr(make(k, Rational(0), a.node_, b.node_));
    }
    static SubExpr raw_pow(const SubExpr& base, const Rational& q) { return SubExpr(make(SubKind::Pow, q, base.node_, nullptr)); }

private:
    using NodePtr = std::shared_ptr<const detail::SubNode>;
    explicit SubExpr(NodePtr n) : node_(std::move(n)) {}

    static NodePtr make(SubKind k, const Rational& v, NodePtr l, NodePtr r) {
        auto n = std::make_shared<detail::SubNode>();
        n->kind = k;
        n->value = v;
        std::size_t h = static_cast<std::size_t>(k) * 1315423911u;
        if (k == SubKind::Rational || k == SubKind::Pow) {
            h = detail::hash_mix(h, detail::hash_rational(v));
        }
        if (l) {
            h = detail::hash_mix(h, l->hash);
            n->size += l->size;
        }
        if (r) {
            h = detail::hash_mix(h, r->hash);
            n->size += r->size;
        }
        n->hash = h;
        n->lhs = std::move(l);
        n->rhs = std::move(r);
        return n;
    }

    static bool equal(const detail::SubNode* a, const detail::SubNode* b) {
        if (a == b) {
            return true;
        }
        if (a == nullptr || b == nullptr || a->hash != b->hash || a->kind != b->kind || a->size != b->size) {
            return false;
        }
        if ((a->kind == SubKind::Rational || a->kind == SubKind::Pow) && a->value != b->value) {
            return false;
        }
        return equal(a->lhs.get(), b->lhs.get()) && equal(a->rhs.get(), b->rhs.get());
    }

    NodePtr node_;
};

struct SubExprHash {
    std::size_t operator()(const SubExpr& e) const noexcept { return e.hash(); }
};

// ---------------------------------------------------------------------------
// Folding constructors. They keep a canonical shape so that printing and
// re-parsing reproduces the same tree: rationals sit on the left of products,
// negative rational summands turn into subtraction, and literal arithmetic is
// evaluated.

inline SubExpr sub_mul(const SubExpr& a, const SubExpr& b);

inline SubExpr sub_rational(const Rational& r) { return SubExpr::raw_rational(r); }
inline SubExpr sub_var() { return SubExpr::raw_var(); }

/// Rational coefficient r of a term r*X (or the literal itself), else nullopt.
inline std::optional<Rational> leading_rational_factor(const SubExpr& e) {
    if (e.is_rational()) {
        return e.value();
    }
    if (e.kind() == SubKind::Mul && e.lhs().is_rational()) {
        return e.lhs().value();
    }
    return std::nullopt;
}

/// True for literals < 0 and products r*X with r < 0.
inline bool looks_negative(const SubExpr& e) {
    auto r = leading_rational_factor(e);
    return r && *r < 0;
}

inline SubExpr sub_neg(const SubExpr& a) { return sub_mul(sub_rational(Rational(-1)), a); }

inline SubExpr sub_add(const SubExpr& a, const SubExpr& b);

inline SubExpr sub_sub(const SubExpr& a, const SubExpr& b) {
    if (a == b) {
        return sub_rational(Rational(0));
    }
    if (a.is_rational() && b.is_rational()) {
        return sub_rational(a.value() - b.value());
    }
    if (b.is_rational(Rational(0))) {
        return a;
    }
    if (a.is_rational(Rational(0))) {
        return sub_neg(b);
    }
    if (looks_negative(b)) {
        return sub_add(a, sub_neg(b));
    }
    return SubExpr::raw_binary(SubKind::Sub, a, b);
}

inline SubExpr sub_add(const SubExpr& a, const SubExpr& b) {
    if (a.is_rational() && b.is_rational()) {
        return sub_rational(a.value() + b.value());
    }
    if (a.is_rational(Rational(0))) {
        return b;
    }
    if (b.is_rational(Rational(0))) {
        return a;
    }
    if (looks_negative(b)) {
        return sub_sub(a, sub_neg(b));
    }
    if (a.is_rational() && b.kind() == SubKind::Add && b.lhs().is_rational()) {
        return sub_add(sub_rational(a.value() + b.lhs().value()), b.rhs());
    }
    return SubExpr::raw_binary(SubKind::Add, a, b);
}

inline SubExpr sub_mul(const SubExpr& a, const SubExpr& b) {
    if (a.is_rational() && b.is_rational()) {
        return sub_rational(a.value() * b.value());
    }
    if (b.is_rational()) {
        return sub_mul(b, a);
    }
    if (a.is_rational()) {
        if (a.value() == 0) {
            return sub_rational(Rational(0));
        }
        if (a.value() == 1) {
            return b;
        }
        if (b.kind() == SubKind::Mul && b.lhs().is_rational()) {
            return sub_mul(sub_rational(a.value() * b.lhs().value()), b.rhs());
        }
    }
    return SubExpr::raw_binary(SubKind::Mul, a, b);
}

inline SubExpr sub_div(const SubExpr& a, const SubExpr& b) {
    if (b.is_rational()) {
        if (b.value() == 0) {
            throw Error(ErrorCode::ExactZero, "division by zero");
        }
        return sub_mul(sub_rational(Rational(1) / b.value()), a);
    }
    if (a.is_rational(Rational(0))) {
        return a;
    }
    // rational factors of the numerator move in front: r*(X/Y)
    if (a.is_rational() && a.value() != 1) {
        return sub_mul(a, sub_div(sub_rational(Rational(1)), b));
    }
    if (a.kind() == SubKind::Mul && a.lhs().is_rational()) {
        return sub_mul(a.lhs(), sub_div(a.rhs(), b));
    }
    if (a == b) {
        return sub_rational(Rational(1));
    }
    return SubExpr::raw_binary(SubKind::Div, a, b);
}

inline SubExpr sub_pow(const SubExpr& base, const Rational& q) {
    if (q == 0) {
        return sub_rational(Rational(1));
    }
    if (q == 1) {
        return base;
    }
    if (base.is_rational()) {
        if (base.value() == 0 && q < 0) {
            throw Error(ErrorCode::ExactZero, "negative power of zero");
        }
        if (auto v = exact_pow(base.value(), q)) {
            return sub_rational(*v);
        }
    }
    return SubExpr::raw_pow(base, q);
}

/// Rebuilds `e` bottom-up through the folding constructors, replacing y by `var`.
inline SubExpr substitute(const SubExpr& e, const SubExpr& var) {
    switch (e.kind()) {
        case SubKind::Rational: return e;
        case SubKind::Var: return var;
        case SubKind::Add: return sub_add(substitute(e.lhs(), var), substitute(e.rhs(), var));
        case SubKind::Sub: return sub_sub(substitute(e.lhs(), var), substitute(e.rhs(), var));
        case SubKind::Mul: return sub_mul(substitute(e.lhs(), var), substitute(e.rhs(), var));
        case SubKind::Div: return sub_div(substitute(e.lhs(), var), substitute(e.rhs(), var));
        case SubKind::Pow: return sub_pow(substitute(e.base(), var), e.exponent());
    }
    return e;
}

/// d/dy of a log-free expression.
inline SubExpr sub_derivative(const SubExpr& e) {
    switch (e.kind()) {
        case SubKind::Rational: return sub_rational(Rational(0));
        case SubKind::Var: return sub_rational(Rational(1));
        case SubKind::Add: return sub_add(sub_derivative(e.lhs()), sub_derivative(e.rhs()));
        case SubKind::Sub: return sub_sub(sub_derivative(e.lhs()), sub_derivative(e.rhs()));
        case SubKind::Mul: {
            const SubExpr a = e.lhs();
            const SubExpr b = e.rhs();
            return sub_add(sub_mul(sub_derivative(a), b), sub_mul(a, sub_derivative(b)));
        }
        case SubKind::Div: {
            const SubExpr a = e.lhs();
            const SubExpr b = e.rhs();
            const SubExpr num = sub_sub(sub_mul(sub_derivative(a), b), sub_mul(a, sub_derivative(b)));
            return sub_div(num, sub_pow(b, Rational(2)));
        }
        case SubKind::Pow: {
            const SubExpr g = e.base();
            const Rational& q = e.exponent();
            return sub_mul(sub_mul(sub_rational(q), sub_pow(g, q - 1)), sub_derivative(g));
        }
    }
    return sub_rational(Rational(0));
}

// ---------------------------------------------------------------------------

/// factor * log(logs[0]) * log(logs[1]) * ...
struct CTerm {
    SubExpr factor;
    std::vector<SubExpr> logs;
    friend bool operator==(const CTerm&, const CTerm&) = default;
};

/// Constructible expression: a finite sum of CTerms. The empty sum is 0.
class CExpr {
public:
    CExpr() = default;
    explicit CExpr(std::vector<CTerm> terms) : terms_(std::move(terms)) { canonicalize(); }
    static CExpr from_sub(const SubExpr& f) { return CExpr({CTerm{f, {}}}); }

    const std::vector<CTerm>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    std::size_t log_factor_count() const {
        std::size_t n = 0;
        for (const auto& t : terms_) {
            n = std::max(n, t.logs.size());
        }
        return n;
    }

    friend bool operator==(const CExpr&, const CExpr&) = default;

private:
    // Drops zero terms and merges a leading run of log-free terms into one
    // factor, which is how the parser reads such a run back.
    void canonicalize() {
        std::vector<CTerm> kept;
        kept.reserve(terms_.size());
        for (auto& t : terms_) {
            if (!t.factor.is_rational(Rational(0))) {
                kept.push_back(std::move(t));
            }
        }
        while (kept.size() >= 2 && kept[0].logs.empty() && kept[1].logs.empty()) {
            SubExpr merged = sub_add(kept[0].factor, kept[1].factor);
            kept.erase(kept.begin());
            if (merged.is_rational(Rational(0))) {
                kept.erase(kept.begin());
            } else {
                kept[0].factor = merged;
            }
        }
        terms_ = std::move(kept);
    }

    std::vector<CTerm> terms_;
};

/// Symbolic d/dy with the product rule across the factor and each log, and
/// d log g = g'/g folded into the factor.
inline CExpr derivative_symbolic(const CExpr& e) {
    std::vector<CTerm> out;
    for (const auto& t : e.terms()) {
        SubExpr df = sub_derivative(t.factor);
        if (!df.is_rational(Rational(0))) {
            out.push_back({df, t.logs});
        }
        for (std::size_t j = 0; j < t.logs.size(); ++j) {
            const SubExpr& g = t.logs[j];
            SubExpr dg = sub_derivative(g);
            if (dg.is_rational(Rational(0))) {
                continue;
            }
            std::vector<SubExpr> rest;
            for (std::size_t i = 0; i < t.logs.size(); ++i) {
                if (i != j) {
                    rest.push_back(t.logs[i]);
                }
            }
            out.push_back({sub_div(sub_mul(t.factor, dg), g), std::move(rest)});
        }
    }
    return CExpr(std::move(out));
}

/// Replaces y by (t0 + y).
inline CExpr shift(const CExpr& e, const Rational& t0) {
    if (t0 <= 0) {
        throw Error(ErrorCode::PointOutsideDomain, "shift point " + to_string(t0) + " is not in (0, oo)");
    }
    const SubExpr var = sub_add(sub_rational(t0), sub_var());
    std::vector<CTerm> out;
    out.reserve(e.terms().size());
    for (const auto& t : e.terms()) {
        CTerm s{substitute(t.factor, var), {}};
        for (const auto& g : t.logs) {
            s.logs.push_back(substitute(g, var));
        }
        out.push_back(std::move(s));
    }
    return CExpr(std::move(out));
}

/// r * log(q1) * log(q2) * ... for each monomial of c.
inline CExpr constant_to_cexpr(const Constant& c) {
    std::vector<CTerm> out;
    for (const auto& [m, r] : c.terms()) {
        CTerm t{sub_rational(r), {}};
        for (const auto& p : m.primes()) {
            t.logs.push_back(sub_rational(Rational(p)));
        }
        out.push_back(std::move(t));
    }
    return CExpr(std::move(out));
}

inline CExpr operator+(const CExpr& a, const CExpr& b) {
    std::vector<CTerm> t = a.terms();
    t.insert(t.end(), b.terms().begin(), b.terms().end());
    return CExpr(std::move(t));
}

inline CExpr operator-(const CExpr& a) {
    std::vector<CTerm> t = a.terms();
    for (auto& x : t) {
        x.factor = sub_neg(x.factor);
    }
    return CExpr(std::move(t));
}

inline CExpr operator-(const CExpr& a, const CExpr& b) { return a + (-b); }

inline CExpr operator*(const CExpr& a, const CExpr& b) {
    std::vector<CTerm> out;
    for (const auto& x : a.terms()) {
        for (const auto& z : b.terms()) {
            CTerm t{sub_mul(x.factor, z.factor), x.logs};
            t.logs.insert(t.logs.end(), z.logs.begin(), z.logs.end());
            out.push_back(std::move(t));
        }
    }
    return CExpr(std::move(out));
}

}  // namespace cfn
