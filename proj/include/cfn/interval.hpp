#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <mpfr.h>

#include "cfn/errors.hpp"
#include "cfn/rational.hpp"

namespace cfn {

/// Closed interval [lo, hi] of MPFR floats. Every operation rounds the lower
/// endpoint down and the upper endpoint up, so the true real value of an
/// expression evaluated in Interval arithmetic is always enclosed.
class Interval {
public:
    explicit Interval(unsigned precision = 128) : precision_(std::max(precision, 2u)) {
        mpfr_init2(lo_, precision_);
        mpfr_init2(hi_, precision_);
        mpfr_set_zero(lo_, 1);
        mpfr_set_zero(hi_, 1);
    }

    Interval(const Interval& other) : precision_(other.precision_) {
        mpfr_init2(lo_, precision_);
        mpfr_init2(hi_, precision_);
        mpfr_set(lo_, other.lo_, MPFR_RNDD);
        mpfr_set(hi_, other.hi_, MPFR_RNDU);
    }

    Interval(Interval&& other) noexcept : Interval(other.precision_) { swap(other); }

    Interval& operator=(Interval other) noexcept {
        swap(other);
        return *this;
    }

    ~Interval() {
        mpfr_clear(lo_);
        mpfr_clear(hi_);
    }

    void swap(Interval& other) noexcept {
        mpfr_swap(lo_, other.lo_);
        mpfr_swap(hi_, other.hi_);
        std::swap(precision_, other.precision_);
    }

    static Interval point(const Rational& value, unsigned precision) {
        Interval out(precision);
        mpfr_set_q(out.lo_, value.backend().data(), MPFR_RNDD);
        mpfr_set_q(out.hi_, value.backend().data(), MPFR_RNDU);
        return out;
    }

    static Interval from_bounds(double lo, double hi, unsigned precision) {
        Interval out(precision);
        mpfr_set_d(out.lo_, lo, MPFR_RNDD);
        mpfr_set_d(out.hi_, hi, MPFR_RNDU);
        return out;
    }

    unsigned precision() const noexcept { return precision_; }
    mpfr_srcptr lo() const noexcept { return lo_; }
    mpfr_srcptr hi() const noexcept { return hi_; }

    double lower() const { return mpfr_get_d(lo_, MPFR_RNDD); }
    double upper() const { return mpfr_get_d(hi_, MPFR_RNDU); }
    double midpoint() const {
        Interval tmp(precision_ + 2);
        mpfr_add(tmp.lo_, lo_, hi_, MPFR_RNDN);
        mpfr_div_2ui(tmp.lo_, tmp.lo_, 1, MPFR_RNDN);
        return mpfr_get_d(tmp.lo_, MPFR_RNDN);
    }
    double width() const {
        Interval tmp(precision_);
        mpfr_sub(tmp.hi_, hi_, lo_, MPFR_RNDU);
        return mpfr_get_d(tmp.hi_, MPFR_RNDU);
    }
    /// max(|lo|, |hi|), rounded up.
    double magnitude() const { return std::max(std::fabs(lower()), std::fabs(upper())); }

    /// Midpoint as an exact-ish MPFR value wrapped in a degenerate interval.
    Interval mid_interval() const {
        Interval out(precision_ + 2);
        mpfr_add(out.lo_, lo_, hi_, MPFR_RNDN);
        mpfr_div_2ui(out.lo_, out.lo_, 1, MPFR_RNDN);
        mpfr_set(out.hi_, out.lo_, MPFR_RNDN);
        return out;
    }

    /// log2 of |midpoint|, usable for values far outside double range. -inf for zero.
    double log2_abs_mid() const {
        Interval m = mid_interval();
        if (mpfr_zero_p(m.lo_)) {
            return -INFINITY;
        }
        long exp = 0;
        double mant = mpfr_get_d_2exp(&exp, m.lo_, MPFR_RNDN);
        return std::log2(std::fabs(mant)) + static_cast<double>(exp);
    }
    int sign_mid() const {
        Interval m = mid_interval();
        return mpfr_sgn(m.lo_);
    }

    /// Relative width (hi-lo)/max(|lo|,|hi|), or absolute width when the magnitude is zero.
    double relative_width() const {
        Interval w(precision_);
        mpfr_sub(w.hi_, hi_, lo_, MPFR_RNDU);
        Interval m(precision_);
        mpfr_abs(m.lo_, lo_, MPFR_RNDN);
        mpfr_abs(m.hi_, hi_, MPFR_RNDN);
        mpfr_max(m.lo_, m.lo_, m.hi_, MPFR_RNDN);
        if (mpfr_zero_p(m.lo_)) {
            return mpfr_get_d(w.hi_, MPFR_RNDU);
        }
        mpfr_div(w.hi_, w.hi_, m.lo_, MPFR_RNDU);
        return mpfr_get_d(w.hi_, MPFR_RNDU);
    }

    bool contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }
    bool strictly_positive() const { return mpfr_sgn(lo_) > 0; }
    bool strictly_negative() const { return mpfr_sgn(hi_) < 0; }
    bool is_point() const { return mpfr_equal_p(lo_, hi_) != 0; }

    bool contains(const Rational& value) const {
        return mpfr_cmp_q(lo_, value.backend().data()) <= 0 && mpfr_cmp_q(hi_, value.backend().data()) >= 0;
    }
    bool contains(double value) const { return mpfr_cmp_d(lo_, value) <= 0 && mpfr_cmp_d(hi_, value) >= 0; }

    bool intersects(const Interval& other) const {
        return mpfr_lessequal_p(lo_, other.hi_) && mpfr_lessequal_p(other.lo_, hi_);
    }

    /// Smallest interval containing both.
    Interval hull(const Interval& other) const {
        Interval out(std::max(precision_, other.precision_));
        mpfr_min(out.lo_, lo_, other.lo_, MPFR_RNDD);
        mpfr_max(out.hi_, hi_, other.hi_, MPFR_RNDU);
        return out;
    }

    /// [lo - r, hi + r] for r >= 0.
    Interval widened(const Interval& radius) const {
        Interval out(std::max(precision_, radius.precision_));
        mpfr_sub(out.lo_, lo_, radius.hi_, MPFR_RNDD);
        mpfr_add(out.hi_, hi_, radius.hi_, MPFR_RNDU);
        return out;
    }

    Interval abs() const {
        Interval out(precision_);
        if (mpfr_sgn(lo_) >= 0) {
            return *this;
        }
        if (mpfr_sgn(hi_) <= 0) {
            return -*this;
        }
        mpfr_set_zero(out.lo_, 1);
        mpfr_neg(out.hi_, lo_, MPFR_RNDU);
        mpfr_max(out.hi_, out.hi_, hi_, MPFR_RNDU);
        return out;
    }

    std::string str(int digits = 20) const {
        return "[" + format(lo_, digits, MPFR_RNDD) + ", " + format(hi_, digits, MPFR_RNDU) + "]";
    }

    friend Interval operator-(const Interval& a) {
        Interval out(a.precision_);
        mpfr_neg(out.lo_, a.hi_, MPFR_RNDD);
        mpfr_neg(out.hi_, a.lo_, MPFR_RNDU);
        return out;
    }

    friend Interval operator+(const Interval& a, const Interval& b) {
        Interval out(std::max(a.precision_, b.precision_));
        mpfr_add(out.lo_, a.lo_, b.lo_, MPFR_RNDD);
        mpfr_add(out.hi_, a.hi_, b.hi_, MPFR_RNDU);
        return out;
    }

    friend Interval operator-(const Interval& a, const Interval& b) {
        Interval out(std::max(a.precision_, b.precision_));
        mpfr_sub(out.lo_, a.lo_, b.hi_, MPFR_RNDD);
        mpfr_sub(out.hi_, a.hi_, b.lo_, MPFR_RNDU);
        return out;
    }

    friend Interval operator*(const Interval& a, const Interval& b) {
        const unsigned prec = std::max(a.precision_, b.precision_);
        Interval out(prec);
        mpfr_t t;
        mpfr_init2(t, prec);
        bool first = true;
        for (mpfr_srcptr x : {a.lo_, a.hi_}) {
            for (mpfr_srcptr y : {b.lo_, b.hi_}) {
                mpfr_mul(t, x, y, MPFR_RNDD);
                if (first || mpfr_less_p(t, out.lo_)) {
                    mpfr_set(out.lo_, t, MPFR_RNDD);
                }
                mpfr_mul(t, x, y, MPFR_RNDU);
                if (first || mpfr_greater_p(t, out.hi_)) {
                    mpfr_set(out.hi_, t, MPFR_RNDU);
                }
                first = false;
            }
        }
        mpfr_clear(t);
        return out;
    }

    friend Interval operator/(const Interval& a, const Interval& b) {
        if (b.contains_zero()) {
            throw Error(ErrorCode::DomainViolationAtPoint, "division by an enclosure containing 0");
        }
        const unsigned prec = std::max(a.precision_, b.precision_);
        Interval out(prec);
        mpfr_t t;
        mpfr_init2(t, prec);
        bool first = true;
        for (mpfr_srcptr x : {a.lo_, a.hi_}) {
            for (mpfr_srcptr y : {b.lo_, b.hi_}) {
                mpfr_div(t, x, y, MPFR_RNDD);
                if (first || mpfr_less_p(t, out.lo_)) {
                    mpfr_set(out.lo_, t, MPFR_RNDD);
                }
                mpfr_div(t, x, y, MPFR_RNDU);
                if (first || mpfr_greater_p(t, out.hi_)) {
                    mpfr_set(out.hi_, t, MPFR_RNDU);
                }
                first = false;
            }
        }
        mpfr_clear(t);
        return out;
    }

    Interval& operator+=(const Interval& b) { return *this = *this + b; }
    Interval& operator-=(const Interval& b) { return *this = *this - b; }
    Interval& operator*=(const Interval& b) { return *this = *this * b; }

    friend Interval log(const Interval& a) {
        if (!a.strictly_positive()) {
            throw Error(ErrorCode::DomainViolationAtPoint, "log of an enclosure not strictly positive: " + a.str(8));
        }
        Interval out(a.precision_);
        mpfr_log(out.lo_, a.lo_, MPFR_RNDD);
        mpfr_log(out.hi_, a.hi_, MPFR_RNDU);
        return out;
    }

    /// a^n for an integer n; negative n requires an enclosure excluding 0.
    friend Interval pow_int(const Interval& a, long n) {
        if (n == 0) {
            return point(Rational(1), a.precision_);
        }
        if (n < 0) {
            return point(Rational(1), a.precision_) / pow_int(a, -n);
        }
        Interval out(a.precision_);
        if (n % 2 == 1 || mpfr_sgn(a.lo_) >= 0) {
            mpfr_pow_si(out.lo_, a.lo_, n, MPFR_RNDD);
            mpfr_pow_si(out.hi_, a.hi_, n, MPFR_RNDU);
        } else if (mpfr_sgn(a.hi_) <= 0) {
            mpfr_pow_si(out.lo_, a.hi_, n, MPFR_RNDD);
            mpfr_pow_si(out.hi_, a.lo_, n, MPFR_RNDU);
        } else {
            Interval m = a.abs();
            mpfr_set_zero(out.lo_, 1);
            mpfr_pow_si(out.hi_, m.hi_, n, MPFR_RNDU);
        }
        return out;
    }

    /// a^q for rational q. Non-integer q needs a >= 0 (a > 0 when q < 0).
    friend Interval pow(const Interval& a, const Rational& q) {
        if (is_integer(q)) {
            const Integer n = numer(q);
            if (!fits_int64(n)) {
                throw Error(ErrorCode::InvalidArgument, "exponent too large for interval evaluation");
            }
            return pow_int(a, n.convert_to<long>());
        }
        if (mpfr_sgn(a.lo_) < 0 || (q < 0 && mpfr_sgn(a.lo_) == 0)) {
            throw Error(ErrorCode::DomainViolationAtPoint, "fractional power of an enclosure reaching <= 0: " + a.str(8));
        }
        const Integer qn = numer(q);
        const Integer qd = denom(q);
        if (!fits_int64(qn) || qd > 1'000'000) {
            throw Error(ErrorCode::InvalidArgument, "exponent too large for interval evaluation");
        }
        const long num = qn.convert_to<long>();
        const unsigned long den = qd.convert_to<unsigned long>();
        Interval out(a.precision_);
        mpfr_t r;
        mpfr_init2(r, a.precision_ + 8);
        if (num > 0) {
            mpfr_rootn_ui(r, a.lo_, den, MPFR_RNDD);
            mpfr_pow_si(out.lo_, r, num, MPFR_RNDD);
            mpfr_rootn_ui(r, a.hi_, den, MPFR_RNDU);
            mpfr_pow_si(out.hi_, r, num, MPFR_RNDU);
        } else {
            mpfr_rootn_ui(r, a.hi_, den, MPFR_RNDU);
            mpfr_pow_si(out.lo_, r, num, MPFR_RNDD);
            mpfr_rootn_ui(r, a.lo_, den, MPFR_RNDD);
            mpfr_pow_si(out.hi_, r, num, MPFR_RNDU);
        }
        mpfr_clear(r);
        return out;
    }

private:
    static std::string format(mpfr_srcptr x, int digits, mpfr_rnd_t rnd) {
        char* buf = nullptr;
        std::string fmt = "%." + std::to_string(digits) + "R" + (rnd == MPFR_RNDD ? "D" : "U") + "g";
        mpfr_asprintf(&buf, fmt.c_str(), x);
        std::string out(buf);
        mpfr_free_str(buf);
        return out;
    }

    unsigned precision_;
    mpfr_t lo_;
    mpfr_t hi_;
};

}  // namespace cfn
