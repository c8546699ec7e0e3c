#include <catch_amalgamated.hpp>

#include <cmath>
#include <thread>
#include <vector>

#include "cfn/cfn.hpp"

using namespace cfn;

namespace {

const Constant L2 = Constant::atom(Integer(2));
const Constant L3 = Constant::atom(Integer(3));

// 40 significant digits, computed independently
const Rational kLog2 = parse_rational_literal("0.6931471805599453094172321214581765680755");
const Rational kLog3 = parse_rational_literal("1.098612288668109691395245236922525704647");

double distance(const Interval& x, const Rational& ref) { return (x - Interval::point(ref, 256)).abs().upper(); }

PuiseuxSeries poly(std::vector<std::pair<Rational, Rational>> terms) {
    std::vector<std::pair<Rational, Constant>> out;
    for (auto& [e, c] : terms) {
        out.emplace_back(e, Constant(c));
    }
    return PuiseuxSeries::from_terms(out);
}

std::vector<Constant> coefficients(const PuiseuxSeries& s, Rational from, Rational step, int n) {
    std::vector<Constant> out;
    for (int k = 0; k < n; ++k) {
        out.push_back(s.coefficient(from + step * k));
    }
    return out;
}

}  // namespace

TEST_CASE("decimal literals are read in base 10", "[rational]") {
    CHECK(parse_rational_literal("0.25") == Rational(1, 4));
    CHECK(parse_rational_literal("007") == Rational(7));
    CHECK(parse_rational_literal("010.50") == Rational(21, 2));
    CHECK(parse_rational_literal(".5") == Rational(1, 2));
    CHECK(parse_rational_literal("3.") == Rational(3));
    CHECK(parse_rational_literal("0") == Rational(0));
}

TEST_CASE("exact powers of rationals", "[rational]") {
    CHECK(exact_pow(Rational(4), Rational(1, 2)) == Rational(2));
    CHECK(exact_pow(Rational(8, 27), Rational(-2, 3)) == Rational(9, 4));
    CHECK_FALSE(exact_pow(Rational(2), Rational(1, 2)).has_value());
    CHECK_FALSE(exact_pow(Rational(-4), Rational(1, 2)).has_value());
    CHECK_FALSE(exact_pow(Rational(0), Rational(-1)).has_value());
}

TEST_CASE("log of a rational factors into prime atoms", "[constant]") {
    CHECK(log_of_rational(Rational(1)).is_zero());
    CHECK(log_of_rational(Rational(8)) == L2 * Rational(3));
    CHECK(log_of_rational(Rational(9, 2)) == L3 * Rational(2) - L2);
    CHECK(log_of_rational(Rational(1, 6)) == -(L2 + L3));
    CHECK_THROWS_AS(log_of_rational(Rational(0)), Error);
}

TEST_CASE("constant ring arithmetic is canonical", "[constant]") {
    CHECK((L2 + (-L2)).is_zero());
    CHECK(L2 * L3 == L3 * L2);
    CHECK((L2 * L3 - L3 * L2).is_zero());
    CHECK(Constant(2) * (L2 + Constant(Rational(1, 2))) == L2 * Rational(2) + Constant(1));
    CHECK_FALSE((L2 - L3).is_zero());
    CHECK((L2 + Constant(1)).pow(2) == L2 * L2 + L2 * Rational(2) + Constant(1));
    CHECK((L2 * Rational(2) - L3 + Constant(Rational(1, 2))).str() == "2*L2 - L3 + 1/2");
}

TEST_CASE("constant signs come from verified enclosures", "[constant]") {
    CHECK(L2.sign(2048) == Sign::Positive);
    CHECK((L2 - L3).sign(2048) == Sign::Negative);
    CHECK(Constant{}.sign(2048) == Sign::Zero);
    // 3*log 2 - 2*log 3 = log(8/9) < 0, close to zero but decidable
    CHECK((L2 * Rational(3) - L3 * Rational(2)).sign(2048) == Sign::Negative);
    // 1/2 log 4 - log 2 = 0 exactly
    CHECK((log_of_rational(Rational(4)) * Rational(1, 2) - L2).sign(2048) == Sign::Zero);
}

TEST_CASE("constant enclosures contain reference values", "[constant]") {
    const Interval zero = Constant{}.eval(64);
    CHECK(zero.is_point());
    CHECK(zero.contains(Rational(0)));
    const Interval l2 = L2.eval(64);
    CHECK(l2.width() < 1e-17);
    CHECK(distance(l2, kLog2) < 1e-17);
    CHECK(distance(L2.eval(256), kLog2) < 1e-38);
    CHECK(distance(L3.eval(256), kLog3) < 1e-38);
    const Interval diff = (L2 - L3).eval(256);
    CHECK(diff.strictly_negative());
    CHECK(distance(diff, kLog2 - kLog3) < 1e-38);
    const Interval three = (Constant(3) + L2 * Rational(0)).eval(64);
    CHECK(three.contains(Rational(3)));
    CHECK(three.is_point());
}

TEST_CASE("series addition and multiplication", "[series]") {
    const PuiseuxSeries a = poly({{0, 1}, {1, 1}});
    const PuiseuxSeries b = poly({{0, -1}, {1, 1}});
    const auto sum = (a + b).finite_terms();
    REQUIRE(sum.size() == 1);
    CHECK(sum[0].exponent == 1);
    CHECK(sum[0].coefficient == Constant(2));

    const auto prod = (poly({{0, 1}, {1, -1}}) * a).finite_terms();
    REQUIRE(prod.size() == 2);
    CHECK(prod[0].exponent == 0);
    CHECK(prod[1].exponent == 2);
    CHECK(prod[1].coefficient == Constant(-1));

    const PuiseuxSeries r = PuiseuxSeries::monomial(Constant(1), Rational(1, 2)) *
                            PuiseuxSeries::monomial(Constant(1), Rational(1, 3));
    CHECK(r.ramification() == 6);
    const auto t = r.finite_terms();
    REQUIRE(t.size() == 1);
    CHECK(t[0].exponent == Rational(5, 6));
}

TEST_CASE("inverse matches long division", "[series]") {
    // long division of 1 by 1 - y gives 1 + y + y^2 + ...
    const PuiseuxSeries inv = inverse(poly({{0, 1}, {1, -1}}), 64);
    for (const auto& c : coefficients(inv, 0, 1, 20)) {
        CHECK(c == Constant(1));
    }
    const auto head = inv.truncate(3);
    REQUIRE(head.size() == 3);
    CHECK(head[2].exponent == 2);

    // 1/(1 + y)^2 = sum (-1)^k (k + 1) y^k
    const PuiseuxSeries sq = inverse(poly({{0, 1}, {1, 2}, {2, 1}}), 64);
    const auto c = coefficients(sq, 0, 1, 12);
    for (int k = 0; k < 12; ++k) {
        CHECK(c[static_cast<std::size_t>(k)] == Constant((k % 2 == 0 ? 1 : -1) * (k + 1)));
    }

    const auto iy = inverse(PuiseuxSeries::variable(), 64).finite_terms();
    REQUIRE(iy.size() == 1);
    CHECK(iy[0].exponent == -1);
    CHECK(inverse(PuiseuxSeries::constant(Constant(2)), 64).coefficient(Rational(0)) == Constant(Rational(1, 2)));

    CHECK_THROWS_AS(inverse(PuiseuxSeries::zero(), 64), Error);
    CHECK_THROWS_AS(inverse(PuiseuxSeries::constant(L2), 64), Error);
}

TEST_CASE("rational powers follow the binomial series", "[series]") {
    const PuiseuxSeries r = power(poly({{1, 4}}), Rational(1, 2), 64);
    const auto t = r.finite_terms();
    REQUIRE(t.size() == 1);
    CHECK(t[0].exponent == Rational(1, 2));
    CHECK(t[0].coefficient == Constant(2));

    // (1 + y)^(1/2): binom(1/2, k)
    const PuiseuxSeries s = power(poly({{0, 1}, {1, 1}}), Rational(1, 2), 64);
    Rational binom(1);
    for (int k = 0; k < 12; ++k) {
        CHECK(s.coefficient(Rational(k)) == Constant(binom));
        binom = binom * (Rational(1, 2) - k) / (k + 1);
    }
    CHECK(s.coefficient(Rational(2)) == Constant(Rational(-1, 8)));

    const auto m = power(poly({{2, 1}}), Rational(-3), 64).finite_terms();
    REQUIRE(m.size() == 1);
    CHECK(m[0].exponent == -6);

    CHECK_THROWS_AS(power(poly({{0, -1}, {1, 1}}), Rational(1, 2), 64), Error);
    CHECK_THROWS_AS(power(poly({{0, 2}}), Rational(1, 2), 64), Error);
}

TEST_CASE("power is additive in the exponent", "[series]") {
    const PuiseuxSeries a = poly({{Rational(1, 2), 64}, {1, 3}, {Rational(3, 2), -1}});
    const Rational q1(2, 3), q2(-1, 2);
    const PuiseuxSeries lhs = power(a, q1, 64) * power(a, q2, 64);
    const PuiseuxSeries rhs = power(a, q1 + q2, 64);
    const Rational from = Rational(1, 2) * (q1 + q2);
    const Rational step(1, 12);
    CHECK(coefficients(lhs, from, step, 24) == coefficients(rhs, from, step, 24));
}

TEST_CASE("log of a unit follows the Mercator series", "[series]") {
    auto [c0, s0] = log_unit(poly({{0, 1}, {1, 1}}), 64);
    CHECK(c0.is_zero());
    for (int k = 1; k < 12; ++k) {
        CHECK(s0.coefficient(Rational(k)) == Constant(Rational(k % 2 == 1 ? 1 : -1, k)));
    }
    auto [c1, s1] = log_unit(poly({{0, 2}}), 64);
    CHECK(c1 == L2);
    CHECK(s1.finite_terms().empty());
    auto [c2, s2] = log_unit(poly({{0, 2}, {1, 2}}), 64);
    CHECK(c2 == L2);
    CHECK(s2.coefficient(Rational(1)) == Constant(1));
    CHECK(s2.coefficient(Rational(2)) == Constant(Rational(-1, 2)));
    CHECK_THROWS_AS(log_unit(poly({{0, -1}}), 64), Error);
}

TEST_CASE("leading terms within the zero budget", "[series]") {
    const PuiseuxSeries cancel = poly({{0, 1}, {1, 1}}) - poly({{0, 1}}) - PuiseuxSeries::variable();
    CHECK(std::holds_alternative<ExactZero>(cancel.leading_term(0)));

    const auto lt = poly({{3, 1}, {2, -1}}).leading_term(64);
    REQUIRE(std::holds_alternative<SeriesTerm>(lt));
    CHECK(std::get<SeriesTerm>(lt).exponent == 2);
    CHECK(std::get<SeriesTerm>(lt).coefficient == Constant(-1));

    // two independent streams with the same coefficients: their difference
    // is zero but not provably so
    const PuiseuxSeries geometric1 = inverse(poly({{0, 1}, {1, -1}}), 64);
    const PuiseuxSeries geometric2 = inverse(poly({{0, 1}, {1, -1}}), 64);
    CHECK(std::holds_alternative<Undecided>((geometric1 - geometric2).leading_term(0)));
    CHECK(std::holds_alternative<Undecided>((geometric1 - geometric2).leading_term(64)));
}

TEST_CASE("truncation", "[series]") {
    CHECK(PuiseuxSeries::constant(Constant(5)).truncate(3).size() == 1);
    CHECK(PuiseuxSeries::zero().truncate(3).empty());
}

TEST_CASE("exact quotient of finite series", "[series]") {
    // (1 - y^2) / (1 + y) = 1 - y
    auto q = exact_quotient(poly({{0, 1}, {2, -1}}), poly({{0, 1}, {1, 1}}));
    REQUIRE(q.has_value());
    const auto t = q->finite_terms();
    REQUIRE(t.size() == 2);
    CHECK(t[1].coefficient == Constant(-1));
    CHECK_FALSE(exact_quotient(poly({{0, 1}}), poly({{0, 1}, {1, 1}})).has_value());
}

TEST_CASE("the ramification cap bounds exponent denominators", "[series]") {
    const auto saved = ramification_cap().load();
    ramification_cap().store(4);
    CHECK_THROWS_AS(PuiseuxSeries::monomial(Constant(1), Rational(1, 5)), Error);
    CHECK_NOTHROW(PuiseuxSeries::monomial(Constant(1), Rational(1, 4)));
    ramification_cap().store(saved);
}

TEST_CASE("memoized coefficients are shared across threads", "[series]") {
    const PuiseuxSeries s = power(poly({{0, 1}, {1, 1}}), Rational(1, 3), 64);
    std::vector<Constant> a, b;
    std::thread t1([&] { a = coefficients(s, 0, 1, 40); });
    std::thread t2([&] { b = coefficients(s, 0, 1, 40); });
    t1.join();
    t2.join();
    CHECK(a == b);
}
