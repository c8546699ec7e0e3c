#include <catch_amalgamated.hpp>

#include <functional>
#include <set>
#include <string>

#include "cfn/cfn.hpp"

using namespace cfn;

namespace {

std::optional<ErrorCode> code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

std::string canon(const char* text) { return print_canonical(parse_cexpr(text)); }

CorpusConfig pinned_config() { return CorpusConfig::load(CFN_CORPUS_CONFIG_PATH); }

}  // namespace

TEST_CASE("parse builds the expected tree", "[parser]") {
    const RawExpr raw = parse("y^(1/2)*log(1+y)");
    REQUIRE(raw->kind == RawKind::Mul);
    REQUIRE(raw->children.size() == 2);
    CHECK(raw->children[0]->kind == RawKind::Pow);
    CHECK(raw->children[0]->value == Rational(1, 2));
    CHECK(raw->children[1]->kind == RawKind::Log);

    const CExpr e = normalize_to_definition(raw);
    REQUIRE(e.terms().size() == 1);
    const CTerm& t = e.terms()[0];
    CHECK(t.factor.kind() == SubKind::Pow);
    CHECK(t.factor.exponent() == Rational(1, 2));
    CHECK(t.factor.base().is_var());
    REQUIRE(t.logs.size() == 1);
    CHECK(print_canonical(t.logs[0]) == "1 + y");
}

TEST_CASE("operator precedence and associativity", "[parser]") {
    CHECK(canon("1 - y - y^2") == canon("(1 - y) - y^2"));
    CHECK(canon("y/2/3") == canon("y/6"));
    CHECK(canon("-y^2") == canon("-(y^2)"));
    CHECK(canon("2^-1*y") == canon("y/2"));
    CHECK(canon("y^4^(1/2)") == canon("y^2"));
    CHECK(code_of([] { parse("y^2^(1/2)"); }) == ErrorCode::NonRationalExponent);
}

TEST_CASE("exponents must fold to rationals", "[parser]") {
    CHECK(canon("y^(1/2 + 1/3)") == canon("y^(5/6)"));
    CHECK(code_of([] { parse("y^y"); }) == ErrorCode::NonRationalExponent);
    CHECK(code_of([] { parse("y^log(2)"); }) == ErrorCode::NonRationalExponent);
    CHECK(code_of([] { parse("y^z"); }) == ErrorCode::UnknownIdentifier);
    CHECK(code_of([] { parse("x + 1"); }) == ErrorCode::UnknownIdentifier);
}

TEST_CASE("syntax errors carry spans", "[parser]") {
    try {
        parse("y +* 2");
        FAIL("expected a syntax error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SyntaxError);
        REQUIRE(e.span().has_value());
        CHECK(e.span()->column == 4);
    }
    CHECK(code_of([] { parse("(1+"); }) == ErrorCode::SyntaxError);
    CHECK(code_of([] { parse(""); }) == ErrorCode::SyntaxError);
    CHECK(code_of([] { parse("log y"); }) == ErrorCode::SyntaxError);
    CHECK(code_of([] { parse("y $ 2"); }) == ErrorCode::SyntaxError);
    CHECK(code_of([] { parse("1..2"); }) == ErrorCode::SyntaxError);
}

TEST_CASE("nesting is bounded", "[parser]") {
    std::string deep(kMaxNesting + 1, '(');
    deep += "y";
    deep += std::string(kMaxNesting + 1, ')');
    CHECK(code_of([&] { parse(deep); }) == ErrorCode::SyntaxError);
    std::string ok(50, '(');
    ok += "y";
    ok += std::string(50, ')');
    CHECK(canon(ok.c_str()) == "y");
}

TEST_CASE("normalization distributes over log factors", "[parser]") {
    CHECK(parse_cexpr("(log(y))*(log(y) + 1)*y") == parse_cexpr("y*log(y)*log(y) + y*log(y)"));
    CHECK(code_of([] { parse_cexpr("log(log(y))"); }) == ErrorCode::NestedLog);
    CHECK(code_of([] { parse_cexpr("1/log(y)"); }) == ErrorCode::DivisionByLog);
    CHECK(code_of([] { parse_cexpr("log(y)^(1/2)"); }) == ErrorCode::PowerOfLog);
    // integer powers of a log sum expand
    CHECK(prepare_constructible(parse_cexpr("(1 + log(y))^2")).truncate(8) ==
          prepare_constructible(parse_cexpr("1 + 2*log(y) + log(y)*log(y)")).truncate(8));
    // the raw parse of a nested log still succeeds
    CHECK_NOTHROW(parse("log(log(y))"));
}

TEST_CASE("canonical printing", "[printer]") {
    CHECK(canon("y*log(y)") == "y*log(y)");
    CHECK(print_canonical(CExpr{}) == "0");
    CHECK(canon("y - y") == "0");
    CHECK(canon("(4*y)^(1/2)") == "(4*y)^(1/2)");
    CHECK(canon("0.25*y") == "1/4*y");
    CHECK(canon("-y*log(y)") == "-y*log(y)");
}

TEST_CASE("printing round-trips the parser", "[printer]") {
    for (const char* text : {"y^(1/2)*log(1+y)", "(log(y))*(log(y) + 1)*y", "1/y + log(y) + y^(1/2)/(1-y)",
                             "-y*log(y) + 3 - 2*log(1+y)", "(1 - y)^(-3/2)*log(2*y)*log(3 + y^2)",
                             "y^(-2) - 1/(y*(1 + y))", "0.25*y - y/3", "2/(3*y)"}) {
        const CExpr e = parse_cexpr(text);
        CHECK(parse_cexpr(print_canonical(e)) == e);
    }
}

TEST_CASE("corpus expressions round-trip", "[printer][corpus]") {
    CorpusGenerator gen(pinned_config());
    for (const CExpr& e : gen.generate(200)) {
        const std::string text = print_canonical(e);
        INFO(text);
        CHECK(parse_cexpr(text) == e);
    }
}

TEST_CASE("symbolic derivative", "[expr]") {
    const CExpr d = derivative_symbolic(parse_cexpr("log(y)"));
    REQUIRE(d.terms().size() == 1);
    CHECK(d.terms()[0].logs.empty());
    CHECK(print_canonical(d) == "1/y");
    CHECK(print_canonical(derivative_symbolic(parse_cexpr("y*log(y)"))) == "log(y) + 1");
    CHECK(derivative_symbolic(parse_cexpr("(1+y)^(1/2)")) == parse_cexpr("1/2*(1 + y)^(-1/2)"));
    CHECK(derivative_symbolic(parse_cexpr("7")).is_zero());
}

TEST_CASE("shift substitutes t0 + y", "[expr]") {
    CHECK(shift(parse_cexpr("y^2"), Rational(1, 3)) == parse_cexpr("(1/3 + y)^2"));
    CHECK(shift(parse_cexpr("log(y)"), Rational(1, 2)) == parse_cexpr("log(1/2 + y)"));
    CHECK(code_of([] { shift(parse_cexpr("1/y"), Rational(0)); }) == ErrorCode::PointOutsideDomain);
}

TEST_CASE("folding keeps expressions small", "[expr]") {
    const SubExpr y = sub_var();
    CHECK(sub_sub(y, y).is_rational(Rational(0)));
    CHECK(sub_div(y, y).is_rational(Rational(1)));
    CHECK(sub_mul(sub_rational(Rational(1)), y) == y);
    CHECK(sub_pow(y, Rational(1)) == y);
    CHECK(sub_pow(y, Rational(0)).is_rational(Rational(1)));
    CHECK(sub_add(sub_rational(Rational(2)), sub_rational(Rational(3))).is_rational(Rational(5)));
    CHECK(code_of([&] { sub_div(y, sub_rational(Rational(0))); }) == ErrorCode::ExactZero);
}

TEST_CASE("rational values from text", "[parser]") {
    CHECK(parse_rational_value("1/3") == Rational(1, 3));
    CHECK(parse_rational_value("0.5") == Rational(1, 2));
    CHECK(parse_rational_value("-2") == Rational(-2));
    CHECK(code_of([] { parse_rational_value("y"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { parse_rational_value("log(2)"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("bounded draws stay in range", "[corpus]") {
    CorpusRng rng(42);
    std::set<long> seen;
    for (int i = 0; i < 2000; ++i) {
        const long v = rng.between(-3, 3);
        REQUIRE(v >= -3);
        REQUIRE(v <= 3);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
    CHECK(rng.weighted({0, 5, 0}) == 1);
}

TEST_CASE("the corpus is a function of config and seed", "[corpus]") {
    const CorpusConfig cfg = pinned_config();
    CHECK(cfg.version == 1);
    CorpusGenerator a(cfg), b(cfg), c(cfg, cfg.seed + 1);
    const auto ea = a.generate(40);
    const auto eb = b.generate(40);
    const auto ec = c.generate(40);
    REQUIRE(ea.size() == 40);
    CHECK(ea == eb);
    CHECK(ea != ec);
    for (const CExpr& e : ea) {
        CHECK(cexpr_depth(e) <= cfg.max_depth);
        CHECK(e.log_factor_count() <= cfg.max_log_factors);
        CHECK(validate(e).valid());
    }
}

TEST_CASE("corpus config validation", "[corpus]") {
    CHECK_THROWS(CorpusConfig::from_json(nlohmann::json{{"max_depth", 1}}));
    CHECK_THROWS(CorpusConfig::from_json(nlohmann::json{{"numerator_range", {3, 1}}}));
    CHECK_THROWS(CorpusConfig::load("/nonexistent/corpus.json"));
    const CorpusConfig d = CorpusConfig::from_json(nlohmann::json::object());
    CHECK(d.max_depth == 5);
    CHECK(d.exponents.size() == 9);
}
