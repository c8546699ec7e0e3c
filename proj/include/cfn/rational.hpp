#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

namespace cfn {

using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int, boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;

inline Integer numer(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Integer denom(const Rational& r) { return boost::multiprecision::denominator(r); }

inline bool is_integer(const Rational& r) { return denom(r) == 1; }

inline int sign(const Rational& r) { return r.sign(); }

inline std::string to_string(const Rational& r) { return r.str(); }

inline Rational make_rational(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }

/// Exact k-th root of a non-negative integer, if it exists.
inline std::optional<Integer> exact_root(const Integer& n, unsigned long k) {
    if (n < 0) {
        return std::nullopt;
    }
    Integer r;
    int exact = mpz_root(r.backend().data(), n.backend().data(), k);
    if (exact == 0) {
        return std::nullopt;
    }
    return r;
}

/// base^q when the result is again rational (base > 0 for non-integer q).
inline std::optional<Rational> exact_pow(const Rational& base, const Rational& q) {
    const Integer qn = numer(q);
    const Integer qd = denom(q);
    if (qd > std::numeric_limits<unsigned long>::max() || abs(qn) > 1'000'000) {
        return std::nullopt;
    }
    if (base == 0) {
        if (q > 0) {
            return Rational(0);
        }
        return std::nullopt;
    }
    if (qd != 1 && base < 0) {
        return std::nullopt;
    }
    const auto e = static_cast<unsigned>(abs(qn).convert_to<unsigned long>());
    Integer n = pow(numer(base), e);
    Integer d = pow(denom(base), e);
    if (qd != 1) {
        const auto k = qd.convert_to<unsigned long>();
        auto rn = exact_root(n, k);
        auto rd = exact_root(d, k);
        if (!rn || !rd) {
            return std::nullopt;
        }
        n = *rn;
        d = *rd;
    }
    Rational out(n, d);
    if (qn < 0) {
        out = 1 / out;
    }
    return out;
}

inline bool fits_int64(const Integer& n) {
    return n >= std::numeric_limits<std::int64_t>::min() && n <= std::numeric_limits<std::int64_t>::max();
}

/// Decimal digits, base 10 regardless of leading zeros.
inline Integer parse_decimal_digits(std::string_view digits) {
    const auto first = digits.find_first_not_of('0');
    if (first == std::string_view::npos) {
        return Integer(0);
    }
    return Integer(std::string(digits.substr(first)));
}

/// "12", "0.25", ".5", "3." as exact rationals.
inline Rational parse_rational_literal(std::string_view text) {
    const auto dot = text.find('.');
    if (dot == std::string_view::npos) {
        return Rational(parse_decimal_digits(text));
    }
    std::string digits(text.substr(0, dot));
    digits += text.substr(dot + 1);
    const Integer scale = pow(Integer(10), static_cast<unsigned>(text.size() - dot - 1));
    return Rational(parse_decimal_digits(digits), scale);
}

}  // namespace cfn
