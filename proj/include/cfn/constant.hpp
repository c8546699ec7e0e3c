#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cfn/errors.hpp"
#include "cfn/interval.hpp"
#include "cfn/rational.hpp"

namespace cfn {

/// Product of prime atoms L<p> = log p, stored as a sorted multiset of primes.
/// The empty monomial is 1.
class Monomial {
public:
    Monomial() = default;
    explicit Monomial(std::vector<Integer> primes) : primes_(std::move(primes)) {
        std::sort(primes_.begin(), primes_.end());
    }
    static Monomial atom(const Integer& prime) { return Monomial({prime}); }

    const std::vector<Integer>& primes() const noexcept { return primes_; }
    std::size_t degree() const noexcept { return primes_.size(); }
    bool is_one() const noexcept { return primes_.empty(); }

    friend Monomial operator*(const Monomial& a, const Monomial& b) {
        Monomial out;
        out.primes_.reserve(a.primes_.size() + b.primes_.size());
        std::merge(a.primes_.begin(), a.primes_.end(), b.primes_.begin(), b.primes_.end(),
                   std::back_inserter(out.primes_));
        return out;
    }

    friend bool operator==(const Monomial& a, const Monomial& b) { return a.primes_ == b.primes_; }
    // Degree first, then lexicographic on the sorted primes.
    friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
        if (a.degree() != b.degree()) {
            return a.degree() <=> b.degree();
        }
        for (std::size_t i = 0; i < a.primes_.size(); ++i) {
            if (a.primes_[i] != b.primes_[i]) {
                return a.primes_[i] < b.primes_[i] ? std::strong_ordering::less : std::strong_ordering::greater;
            }
        }
        return std::strong_ordering::equal;
    }

    /// "L2*L3^2"; "1" for the empty monomial.
    std::string str() const {
        if (primes_.empty()) {
            return "1";
        }
        std::string out;
        for (std::size_t i = 0; i < primes_.size();) {
            std::size_t j = i;
            while (j < primes_.size() && primes_[j] == primes_[i]) {
                ++j;
            }
            if (!out.empty()) {
                out += "*";
            }
            out += "L" + primes_[i].str();
            if (j - i > 1) {
                out += "^" + std::to_string(j - i);
            }
            i = j;
        }
        return out;
    }

    Interval eval(unsigned precision) const {
        Interval out = Interval::point(Rational(1), precision);
        for (const auto& p : primes_) {
            out *= log(Interval::point(Rational(p), precision));
        }
        return out;
    }

private:
    std::vector<Integer> primes_;
};

enum class Sign { Negative = -1, Zero = 0, Positive = 1, Undecided = 2 };

inline std::string_view to_string(Sign s) {
    switch (s) {
        case Sign::Negative: return "negative";
        case Sign::Zero: return "zero";
        case Sign::Positive: return "positive";
        case Sign::Undecided: return "undecided";
    }
    return "undecided";
}

/// Element of Q[L2, L3, L5, ...] in canonical sparse form: terms sorted by
/// monomial, no zero coefficients. The atoms are treated as algebraically
/// independent, so is_zero() is exact under that convention.
class Constant {
public:
    using Term = std::pair<Monomial, Rational>;

    Constant() = default;
    Constant(const Rational& r) {  // NOLINT(google-explicit-constructor)
        if (r != 0) {
            terms_.emplace_back(Monomial{}, r);
        }
    }
    Constant(long n) : Constant(Rational(n)) {}  // NOLINT(google-explicit-constructor)
    Constant(int n) : Constant(Rational(n)) {}   // NOLINT(google-explicit-constructor)

    static Constant atom(const Integer& prime) {
        Constant c;
        c.terms_.emplace_back(Monomial::atom(prime), Rational(1));
        return c;
    }
    static Constant monomial(const Monomial& m, const Rational& coeff) {
        Constant c;
        if (coeff != 0) {
            c.terms_.emplace_back(m, coeff);
        }
        return c;
    }

    const std::vector<Term>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    bool is_rational() const noexcept { return terms_.empty() || (terms_.size() == 1 && terms_[0].first.is_one()); }
    /// The value when is_rational(); throws otherwise.
    Rational rational() const {
        if (!is_rational()) {
            throw Error(ErrorCode::NonConstantLeading, "constant " + str() + " involves log atoms");
        }
        return terms_.empty() ? Rational(0) : terms_[0].second;
    }
    /// Coefficient of a given monomial.
    Rational coefficient(const Monomial& m) const {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                                   [](const Term& t, const Monomial& key) { return t.first < key; });
        return (it != terms_.end() && it->first == m) ? it->second : Rational(0);
    }

    friend bool operator==(const Constant& a, const Constant& b) { return a.terms_ == b.terms_; }

    friend Constant operator+(const Constant& a, const Constant& b) { return combine(a, b, 1); }
    friend Constant operator-(const Constant& a, const Constant& b) { return combine(a, b, -1); }
    friend Constant operator-(const Constant& a) {
        Constant out = a;
        for (auto& t : out.terms_) {
            t.second = -t.second;
        }
        return out;
    }

    friend Constant operator*(const Constant& a, const Rational& r) {
        if (r == 0) {
            return {};
        }
        Constant out = a;
        for (auto& t : out.terms_) {
            t.second *= r;
        }
        return out;
    }
    friend Constant operator*(const Rational& r, const Constant& a) { return a * r; }

    friend Constant operator*(const Constant& a, const Constant& b) {
        if (a.is_zero() || b.is_zero()) {
            return {};
        }
        if (a.terms_.size() == 1 && a.terms_[0].first.is_one()) {
            return b * a.terms_[0].second;
        }
        if (b.terms_.size() == 1 && b.terms_[0].first.is_one()) {
            return a * b.terms_[0].second;
        }
        std::map<Monomial, Rational> acc;
        for (const auto& [ma, ca] : a.terms_) {
            for (const auto& [mb, cb] : b.terms_) {
                acc[ma * mb] += ca * cb;
            }
        }
        Constant out;
        for (auto& [m, c] : acc) {
            if (c != 0) {
                out.terms_.emplace_back(m, std::move(c));
            }
        }
        return out;
    }

    Constant& operator+=(const Constant& b) { return *this = *this + b; }
    Constant& operator-=(const Constant& b) { return *this = *this - b; }
    Constant& operator*=(const Constant& b) { return *this = *this * b; }

    Constant pow(unsigned n) const {
        Constant out(1);
        Constant base = *this;
        while (n > 0) {
            if (n & 1u) {
                out *= base;
            }
            n >>= 1;
            if (n > 0) {
                base *= base;
            }
        }
        return out;
    }

    /// Canonical text, highest degree first, e.g. "2*L2 - L3 + 1/2".
    std::string str() const {
        if (terms_.empty()) {
            return "0";
        }
        std::vector<const Term*> order;
        for (const auto& t : terms_) {
            order.push_back(&t);
        }
        std::stable_sort(order.begin(), order.end(), [](const Term* x, const Term* y) {
            if (x->first.degree() != y->first.degree()) {
                return x->first.degree() > y->first.degree();
            }
            return x->first < y->first;
        });
        std::string out;
        bool first = true;
        for (const Term* t : order) {
            Rational c = t->second;
            const bool negative = c < 0;
            if (first) {
                if (negative) {
                    out += "-";
                }
            } else {
                out += negative ? " - " : " + ";
            }
            if (negative) {
                c = -c;
            }
            if (t->first.is_one()) {
                out += to_string(c);
            } else if (c == 1) {
                out += t->first.str();
            } else {
                out += to_string(c) + "*" + t->first.str();
            }
            first = false;
        }
        return out;
    }

    /// Rigorous enclosure of the real value with the atoms read as log p.
    Interval eval(unsigned precision) const {
        Interval out(std::max(precision, 2u));
        for (const auto& [m, c] : terms_) {
            out += Interval::point(c, precision) * m.eval(precision);
        }
        return out;
    }

    /// Sign by interval refinement from 64 bits, doubling up to max_precision.
    Sign sign(unsigned max_precision) const {
        if (is_zero()) {
            return Sign::Zero;
        }
        if (is_rational()) {
            return terms_[0].second > 0 ? Sign::Positive : Sign::Negative;
        }
        for (unsigned bits = 64; bits <= std::max(max_precision, 64u); bits *= 2) {
            Interval v = eval(bits);
            if (v.strictly_positive()) {
                return Sign::Positive;
            }
            if (v.strictly_negative()) {
                return Sign::Negative;
            }
        }
        return Sign::Undecided;
    }

private:
    static Constant combine(const Constant& a, const Constant& b, int sign_b) {
        Constant out;
        out.terms_.reserve(a.terms_.size() + b.terms_.size());
        auto i = a.terms_.begin();
        auto j = b.terms_.begin();
        while (i != a.terms_.end() || j != b.terms_.end()) {
            if (j == b.terms_.end() || (i != a.terms_.end() && i->first < j->first)) {
                out.terms_.push_back(*i++);
            } else if (i == a.terms_.end() || j->first < i->first) {
                out.terms_.emplace_back(j->first, sign_b > 0 ? j->second : Rational(-j->second));
                ++j;
            } else {
                Rational c = sign_b > 0 ? i->second + j->second : i->second - j->second;
                if (c != 0) {
                    out.terms_.emplace_back(i->first, std::move(c));
                }
                ++i;
                ++j;
            }
        }
        return out;
    }

    std::vector<Term> terms_;
};

namespace detail {

inline bool probable_prime(const Integer& n) { return mpz_probab_prime_p(n.backend().data(), 30) > 0; }

// Pollard-Brent rho; returns a nontrivial factor or 0 when the iteration cap is hit.
inline Integer pollard_brent(const Integer& n, std::uint64_t max_iterations) {
    if (n % 2 == 0) {
        return Integer(2);
    }
    for (unsigned long c = 1; c < 20; ++c) {
        Integer y = 2, x, g = 1, q = 1, ys;
        std::uint64_t r = 1, iterations = 0;
        const std::uint64_t m = 128;
        auto f = [&](const Integer& v) { return Integer((v * v + c) % n); };
        while (g == 1) {
            x = y;
            for (std::uint64_t i = 0; i < r; ++i) {
                y = f(y);
            }
            std::uint64_t k = 0;
            while (k < r && g == 1) {
                ys = y;
                for (std::uint64_t i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = (q * abs(x - y)) % n;
                }
                g = gcd(q, n);
                k += m;
            }
            r *= 2;
            iterations += r;
            if (iterations > max_iterations) {
                return Integer(0);
            }
        }
        if (g == n) {
            do {
                ys = f(ys);
                g = gcd(abs(x - ys), n);
            } while (g == 1);
        }
        if (g != n) {
            return g;
        }
    }
    return Integer(0);
}

inline void factor_into(Integer n, std::map<Integer, long>& out, long multiplicity) {
    for (unsigned long p = 2; p < 2000 && Integer(p) * p <= n; p += (p == 2 ? 1 : 2)) {
        while (n % p == 0) {
            out[Integer(p)] += multiplicity;
            n /= p;
        }
    }
    std::vector<Integer> pending;
    if (n > 1) {
        pending.push_back(n);
    }
    while (!pending.empty()) {
        Integer m = pending.back();
        pending.pop_back();
        if (probable_prime(m)) {
            out[m] += multiplicity;
            continue;
        }
        if (auto root = exact_root(m, 2); root) {
            pending.push_back(*root);
            pending.push_back(*root);
            continue;
        }
        Integer d = pollard_brent(m, 4'000'000);
        if (d == 0) {
            throw Error(ErrorCode::FactorizationLimit, "could not factor " + m.str());
        }
        pending.push_back(d);
        pending.push_back(m / d);
    }
}

}  // namespace detail

/// Prime factorization of |n| as prime -> exponent.
inline std::map<Integer, long> factorize(const Integer& n) {
    std::map<Integer, long> out;
    if (abs(n) > 1) {
        detail::factor_into(abs(n), out, 1);
    }
    return out;
}

/// log r as sum of e_p * L<p> for r = prod p^e_p.
inline Constant log_of_rational(const Rational& r) {
    if (r <= 0) {
        throw Error(ErrorCode::NonPositiveArgument, "log of non-positive rational " + to_string(r));
    }
    std::map<Integer, long> exponents = factorize(numer(r));
    for (const auto& [p, e] : factorize(denom(r))) {
        exponents[p] -= e;
    }
    Constant out;
    for (const auto& [p, e] : exponents) {
        if (e != 0) {
            out += Constant::atom(p) * Rational(e);
        }
    }
    return out;
}

}  // namespace cfn
