#pragma once

#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cfn/errors.hpp"
#include "cfn/expr.hpp"
#include "cfn/rational.hpp"

namespace cfn {

enum class RawKind { Number, Var, Add, Sub, Mul, Div, Neg, Pow, Log };

/// Parser output: free arithmetic over y, numbers and log, every node spanned.
struct RawNode {
    RawKind kind;
    Rational value;  // literal for Number, folded exponent for Pow
    std::vector<std::shared_ptr<const RawNode>> children;
    SourceSpan span;
};

using RawExpr = std::shared_ptr<const RawNode>;

inline constexpr std::size_t kMaxNesting = 1024;
inline constexpr std::size_t kMaxLiteralDigits = 4096;

namespace detail {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    std::string_view text;
    SourceSpan span;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            const std::size_t start = pos_;
            const std::size_t line = line_;
            const std::size_t col = col_;
            auto make = [&](Tok k) {
                return Token{k, src_.substr(start, pos_ - start), SourceSpan{start, pos_, line, col}};
            };
            if (pos_ >= src_.size()) {
                out.push_back(make(Tok::End));
                return out;
            }
            const char c = src_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                lex_number(start, line, col);
                out.push_back(make(Tok::Number));
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                    advance();
                }
                out.push_back(make(Tok::Ident));
                continue;
            }
            Tok k;
            switch (c) {
                case '+': k = Tok::Plus; break;
                case '-': k = Tok::Minus; break;
                case '*': k = Tok::Star; break;
                case '/': k = Tok::Slash; break;
                case '^': k = Tok::Caret; break;
                case '(': k = Tok::LParen; break;
                case ')': k = Tok::RParen; break;
                default: {
                    advance();
                    std::string shown = std::isprint(static_cast<unsigned char>(c))
                                            ? std::string(1, c)
                                            : "\\x" + hex_byte(static_cast<unsigned char>(c));
                    throw Error(ErrorCode::SyntaxError, "unexpected character '" + shown + "'",
                                SourceSpan{start, pos_, line, col});
                }
            }
            advance();
            out.push_back(make(k));
        }
    }

private:
    static std::string hex_byte(unsigned char c) {
        const char* digits = "0123456789abcdef";
        return {digits[c >> 4], digits[c & 15]};
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
            advance();
        }
    }

    void lex_number(std::size_t start, std::size_t line, std::size_t col) {
        std::size_t digits = 0;
        bool dot = false;
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                ++digits;
            } else if (c == '.' && !dot) {
                dot = true;
            } else {
                break;
            }
            advance();
        }
        const SourceSpan span{start, pos_, line, col};
        if (digits == 0) {
            throw Error(ErrorCode::SyntaxError, "malformed number", span);
        }
        if (digits > kMaxLiteralDigits) {
            throw Error(ErrorCode::SyntaxError, "numeric literal too long", span);
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    RawExpr parse_all() {
        RawExpr e = expr();
        if (peek().kind != Tok::End) {
            throw Error(ErrorCode::SyntaxError, "unexpected '" + std::string(peek().text) + "'", peek().span);
        }
        return e;
    }

private:
    struct DepthGuard {
        explicit DepthGuard(Parser& p) : p_(p) {
            if (++p_.depth_ > kMaxNesting) {
                throw Error(ErrorCode::SyntaxError, "expression nested too deeply", p_.peek().span);
            }
        }
        ~DepthGuard() { --p_.depth_; }
        Parser& p_;
    };

    const Token& peek() const { return toks_[pos_]; }
    Token take() { return toks_[pos_++]; }

    static SourceSpan join(const SourceSpan& a, const SourceSpan& b) { return {a.begin, b.end, a.line, a.column}; }

    static RawExpr node(RawKind k, std::vector<RawExpr> children, SourceSpan span, Rational v = Rational(0)) {
        return std::make_shared<const RawNode>(RawNode{k, std::move(v), std::move(children), span});
    }

    RawExpr expr() {
        DepthGuard guard(*this);
        RawExpr lhs = term();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            const RawKind k = take().kind == Tok::Plus ? RawKind::Add : RawKind::Sub;
            RawExpr rhs = term();
            const SourceSpan s = join(lhs->span, rhs->span);
            lhs = node(k, {lhs, rhs}, s);
        }
        return lhs;
    }

    RawExpr term() {
        DepthGuard guard(*this);
        RawExpr lhs = unary();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            const RawKind k = take().kind == Tok::Star ? RawKind::Mul : RawKind::Div;
            RawExpr rhs = unary();
            const SourceSpan s = join(lhs->span, rhs->span);
            lhs = node(k, {lhs, rhs}, s);
        }
        return lhs;
    }

    RawExpr unary() {
        DepthGuard guard(*this);
        if (peek().kind == Tok::Minus) {
            const Token minus = take();
            RawExpr operand = unary();
            return node(RawKind::Neg, {operand}, join(minus.span, operand->span));
        }
        return power();
    }

    RawExpr power() {
        DepthGuard guard(*this);
        RawExpr base = primary();
        if (peek().kind != Tok::Caret) {
            return base;
        }
        take();
        RawExpr exponent = unary();
        const Rational q = fold_exponent(*exponent);
        return node(RawKind::Pow, {base}, join(base->span, exponent->span), q);
    }

    RawExpr primary() {
        DepthGuard guard(*this);
        const Token t = take();
        switch (t.kind) {
            case Tok::Number: return node(RawKind::Number, {}, t.span, parse_rational_literal(t.text));
            case Tok::Ident: {
                if (t.text == "y") {
                    return node(RawKind::Var, {}, t.span);
                }
                if (t.text == "log" || t.text == "ln") {
                    expect(Tok::LParen, "'(' after " + std::string(t.text));
                    RawExpr arg = expr();
                    const Token close = expect(Tok::RParen, "')'");
                    return node(RawKind::Log, {arg}, join(t.span, close.span));
                }
                throw Error(ErrorCode::UnknownIdentifier, "unknown identifier '" + std::string(t.text) + "'", t.span);
            }
            case Tok::LParen: {
                RawExpr inner = expr();
                const Token close = expect(Tok::RParen, "')'");
                auto copy = std::make_shared<RawNode>(*inner);
                copy->span = join(t.span, close.span);
                return copy;
            }
            case Tok::End: throw Error(ErrorCode::SyntaxError, "unexpected end of input", t.span);
            default: throw Error(ErrorCode::SyntaxError, "unexpected '" + std::string(t.text) + "'", t.span);
        }
    }

    Token expect(Tok k, const std::string& what) {
        if (peek().kind != k) {
            const Token& t = peek();
            throw Error(ErrorCode::SyntaxError,
                        "expected " + what + (t.kind == Tok::End ? " before end of input" : ", found '" + std::string(t.text) + "'"),
                        t.span);
        }
        return take();
    }

    // Exponents must fold to a rational literal.
    static Rational fold_exponent(const RawNode& n) {
        auto fail = [&](const std::string& why) -> Rational {
            throw Error(ErrorCode::NonRationalExponent, why, n.span);
        };
        auto child = [&](std::size_t i) { return fold_exponent(*n.children[i]); };
        switch (n.kind) {
            case RawKind::Number: return n.value;
            case RawKind::Var: return fail("exponent depends on y");
            case RawKind::Log: return fail("exponent contains log");
            case RawKind::Neg: return -child(0);
            case RawKind::Add: return child(0) + child(1);
            case RawKind::Sub: return child(0) - child(1);
            case RawKind::Mul: return child(0) * child(1);
            case RawKind::Div: {
                const Rational d = child(1);
                if (d == 0) {
                    return fail("division by zero in exponent");
                }
                return child(0) / d;
            }
            case RawKind::Pow: {
                const Rational b = child(0);
                if (auto v = exact_pow(b, n.value)) {
                    return *v;
                }
                return fail("exponent does not fold to a rational");
            }
        }
        return fail("unsupported exponent");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::size_t depth_ = 0;
};

}  // namespace detail

/// Text to raw AST. Failures are Error values carrying a line:column span.
inline RawExpr parse(std::string_view text) {
    detail::Lexer lexer(text);
    detail::Parser parser(lexer.run());
    return parser.parse_all();
}

namespace detail {

inline bool contains_log(const RawNode& n) {
    if (n.kind == RawKind::Log) {
        return true;
    }
    for (const auto& c : n.children) {
        if (contains_log(*c)) {
            return true;
        }
    }
    return false;
}

template <class F>
auto with_span(const RawNode& n, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.span()) {
            throw;
        }
        throw Error(e.code(), e.detail(), n.span);
    }
}

inline SubExpr to_sub(const RawNode& n) {
    auto c = [&](std::size_t i) { return to_sub(*n.children[i]); };
    switch (n.kind) {
        case RawKind::Number: return sub_rational(n.value);
        case RawKind::Var: return sub_var();
        case RawKind::Add: return sub_add(c(0), c(1));
        case RawKind::Sub: return sub_sub(c(0), c(1));
        case RawKind::Mul: return sub_mul(c(0), c(1));
        case RawKind::Div: {
            SubExpr a = c(0);
            SubExpr b = c(1);
            return with_span(n, [&] { return sub_div(a, b); });
        }
        case RawKind::Neg: return sub_neg(c(0));
        case RawKind::Pow: {
            SubExpr b = c(0);
            return with_span(n, [&] { return sub_pow(b, n.value); });
        }
        case RawKind::Log: break;
    }
    throw Error(ErrorCode::SyntaxError, "log in log-free context", n.span);
}

inline constexpr long kMaxLogPowerExpansion = 32;

inline std::vector<CTerm> multiply_terms(const std::vector<CTerm>& a, const std::vector<CTerm>& b) {
    std::vector<CTerm> out;
    out.reserve(a.size() * b.size());
    for (const auto& x : a) {
        for (const auto& z : b) {
            CTerm t{sub_mul(x.factor, z.factor), x.logs};
            t.logs.insert(t.logs.end(), z.logs.begin(), z.logs.end());
            out.push_back(std::move(t));
        }
    }
    return out;
}

inline std::vector<CTerm> to_terms(const RawNode& n) {
    if (!contains_log(n)) {
        return {CTerm{to_sub(n), {}}};
    }
    auto c = [&](std::size_t i) { return to_terms(*n.children[i]); };
    switch (n.kind) {
        case RawKind::Add:
        case RawKind::Sub: {
            auto out = c(0);
            auto rhs = c(1);
            for (auto& t : rhs) {
                if (n.kind == RawKind::Sub) {
                    t.factor = sub_neg(t.factor);
                }
                out.push_back(std::move(t));
            }
            return out;
        }
        case RawKind::Neg: {
            auto out = c(0);
            for (auto& t : out) {
                t.factor = sub_neg(t.factor);
            }
            return out;
        }
        case RawKind::Mul: return multiply_terms(c(0), c(1));
        case RawKind::Div: {
            if (contains_log(*n.children[1])) {
                throw Error(ErrorCode::DivisionByLog, "division by an expression containing log", n.span);
            }
            auto out = c(0);
            const SubExpr d = to_sub(*n.children[1]);
            for (auto& t : out) {
                t.factor = with_span(n, [&] { return sub_div(t.factor, d); });
            }
            return out;
        }
        case RawKind::Pow: {
            const Rational& q = n.value;
            if (!is_integer(q) || q < 0) {
                throw Error(ErrorCode::PowerOfLog, "power " + to_string(q) + " of an expression containing log",
                            n.span);
            }
            if (q > kMaxLogPowerExpansion) {
                throw Error(ErrorCode::PowerOfLog, "power of a log expression too large to expand", n.span);
            }
            const auto base = c(0);
            std::vector<CTerm> out{CTerm{sub_rational(Rational(1)), {}}};
            for (long i = 0; i < q.convert_to<long>(); ++i) {
                out = multiply_terms(out, base);
            }
            return out;
        }
        case RawKind::Log: {
            if (contains_log(*n.children[0])) {
                throw Error(ErrorCode::NestedLog, "log of an expression containing log", n.span);
            }
            return {CTerm{sub_rational(Rational(1)), {to_sub(*n.children[0])}}};
        }
        default: break;
    }
    throw Error(ErrorCode::SyntaxError, "unexpected node", n.span);
}

}  // namespace detail

/// Distributes a raw AST into a sum of factor * product-of-logs terms.
inline CExpr normalize_to_definition(const RawExpr& raw) { return CExpr(detail::to_terms(*raw)); }

inline CExpr parse_cexpr(std::string_view text) { return normalize_to_definition(parse(text)); }

/// A number given in the expression syntax, e.g. "1/3", "0.25", "-2^(-1)".
inline Rational parse_rational_value(std::string_view text) {
    const CExpr e = parse_cexpr(text);
    if (e.is_zero()) {
        return Rational(0);
    }
    if (e.terms().size() != 1 || !e.terms().front().logs.empty() || !e.terms().front().factor.is_rational()) {
        throw Error(ErrorCode::InvalidArgument, "'" + std::string(text) + "' is not a rational number");
    }
    return e.terms().front().factor.value();
}

// ---------------------------------------------------------------------------
// Printing. Precedence levels: 1 sum, 2 product, 3 unary minus, 4 power, 5 atom.

namespace detail {

struct Printed {
    std::string text;
    int prec;
};

inline std::string paren_if(const Printed& p, int min_prec) {
    return p.prec >= min_prec ? p.text : "(" + p.text + ")";
}

inline Printed print_rational(const Rational& r) {
    const std::string s = to_string(r);
    if (!is_integer(r)) {
        return {s, 2};
    }
    return {s, r < 0 ? 3 : 5};
}

inline std::string print_exponent(const Rational& q) {
    if (is_integer(q) && q >= 0) {
        return to_string(q);
    }
    return "(" + to_string(q) + ")";
}

inline Printed print_sub(const SubExpr& e) {
    switch (e.kind()) {
        case SubKind::Rational: return print_rational(e.value());
        case SubKind::Var: return {"y", 5};
        case SubKind::Add: return {paren_if(print_sub(e.lhs()), 1) + " + " + paren_if(print_sub(e.rhs()), 2), 1};
        case SubKind::Sub: return {paren_if(print_sub(e.lhs()), 1) + " - " + paren_if(print_sub(e.rhs()), 2), 1};
        case SubKind::Mul: {
            const SubExpr r = e.lhs();
            const SubExpr z = e.rhs();
            if (r.is_rational() && z.kind() == SubKind::Div) {
                // r*(X/Y) reads back from "r*X/Y", and r*(1/Y) from "r/Y"
                const std::string head = paren_if(print_sub(r), 2);
                const std::string den = paren_if(print_sub(z.rhs()), 4);
                if (z.lhs().is_rational(Rational(1))) {
                    return {head + "/" + den, 2};
                }
                return {head + "*" + paren_if(print_sub(z.lhs()), 4) + "/" + den, 2};
            }
            if (r.is_rational(Rational(-1))) {
                return {"-" + paren_if(print_sub(z), 4), 3};
            }
            return {paren_if(print_sub(r), 2) + "*" + paren_if(print_sub(z), 4), 2};
        }
        case SubKind::Div: return {paren_if(print_sub(e.lhs()), 2) + "/" + paren_if(print_sub(e.rhs()), 4), 2};
        case SubKind::Pow: return {paren_if(print_sub(e.base()), 5) + "^" + print_exponent(e.exponent()), 4};
    }
    return {"?", 5};
}

inline std::string print_term(const CTerm& t, bool first) {
    if (t.logs.empty()) {
        return paren_if(print_sub(t.factor), first ? 1 : 2);
    }
    std::string logs;
    for (std::size_t i = 0; i < t.logs.size(); ++i) {
        logs += (i ? "*log(" : "log(") + print_sub(t.logs[i]).text + ")";
    }
    if (t.factor.is_rational(Rational(1))) {
        return logs;
    }
    if (t.factor.is_rational(Rational(-1))) {
        return "-" + logs;
    }
    return paren_if(print_sub(t.factor), 2) + "*" + logs;
}

}  // namespace detail

inline std::string print_canonical(const SubExpr& e) { return detail::print_sub(e).text; }

/// Deterministic text that parses and normalizes back to the same CExpr.
inline std::string print_canonical(const CExpr& e) {
    if (e.is_zero()) {
        return "0";
    }
    std::string out;
    bool first = true;
    for (const auto& t : e.terms()) {
        if (first) {
            out = detail::print_term(t, true);
            first = false;
        } else if (looks_negative(t.factor)) {
            out += " - " + detail::print_term(CTerm{sub_neg(t.factor), t.logs}, false);
        } else {
            out += " + " + detail::print_term(t, false);
        }
    }
    return out;
}

}  // namespace cfn
