#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cfn/errors.hpp"
#include "cfn/expr.hpp"
#include "cfn/grid.hpp"
#include "cfn/interval.hpp"

namespace cfn {

inline constexpr unsigned kDefaultPrecision = 128;

inline Interval eval_interval(const SubExpr& e, const Interval& y) {
    const unsigned prec = y.precision();
    switch (e.kind()) {
        case SubKind::Rational: return Interval::point(e.value(), prec);
        case SubKind::Var: return y;
        case SubKind::Add: return eval_interval(e.lhs(), y) + eval_interval(e.rhs(), y);
        case SubKind::Sub: return eval_interval(e.lhs(), y) - eval_interval(e.rhs(), y);
        case SubKind::Mul: return eval_interval(e.lhs(), y) * eval_interval(e.rhs(), y);
        case SubKind::Div: return eval_interval(e.lhs(), y) / eval_interval(e.rhs(), y);
        case SubKind::Pow: return pow(eval_interval(e.base(), y), e.exponent());
    }
    throw Error(ErrorCode::InvalidArgument, "unknown expression node");
}

inline Interval eval_interval(const CExpr& e, const Interval& y) {
    Interval sum(y.precision());
    for (const auto& t : e.terms()) {
        Interval term = eval_interval(t.factor, y);
        for (const auto& g : t.logs) {
            term *= log(eval_interval(g, y));
        }
        sum += term;
    }
    return sum;
}

/// Outward-rounded enclosure of e(y) for y > 0.
inline Interval eval_interval(const CExpr& e, const Rational& y, unsigned precision = kDefaultPrecision) {
    if (y <= 0) {
        throw Error(ErrorCode::PointOutsideDomain, "evaluation point " + to_string(y) + " is not positive");
    }
    return eval_interval(e, Interval::point(y, precision));
}

namespace detail {

inline bool well_resolved(const Interval& v) {
    if (v.is_point()) {
        return true;
    }
    if (v.contains_zero()) {
        return v.width() < 1e-30;
    }
    return v.relative_width() < 1e-20;
}

}  // namespace detail

/// Evaluation with precision doubled (up to 16x) until the enclosure is tight.
inline Interval eval_adaptive(const CExpr& e, const Rational& y, unsigned precision, unsigned* used = nullptr) {
    unsigned prec = precision;
    Interval v = eval_interval(e, y, prec);
    while (!detail::well_resolved(v) && prec < 16 * precision) {
        prec *= 2;
        v = eval_interval(e, y, prec);
    }
    if (used != nullptr) {
        *used = prec;
    }
    return v;
}

// ---------------------------------------------------------------------------

enum class Trend { ConvergingTo, DivergingPlus, DivergingMinus, Inconclusive };

inline std::string to_string(Trend t) {
    switch (t) {
        case Trend::ConvergingTo: return "converging";
        case Trend::DivergingPlus: return "diverging+";
        case Trend::DivergingMinus: return "diverging-";
        case Trend::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct ProbePoint {
    Rational y;
    std::optional<Interval> value;
    unsigned precision = 0;
    std::string error;
};

struct ProbeReport {
    std::vector<ProbePoint> points;
    Trend trend = Trend::Inconclusive;
    std::optional<Interval> limit;  // when converging
};

/// 10^-2, ..., 10^-6.
inline std::vector<Rational> default_probe_schedule() {
    std::vector<Rational> out;
    for (int k = 2; k <= 6; ++k) {
        out.emplace_back(Integer(1), pow(Integer(10), static_cast<unsigned>(k)));
    }
    return out;
}

/// 10^-(2^k) for k = 1..levels; reaches far enough to expose log growth.
inline std::vector<Rational> deep_probe_schedule(unsigned levels = 20) {
    std::vector<Rational> out;
    for (unsigned k = 1; k <= levels; ++k) {
        out.emplace_back(Integer(1), pow(Integer(10), 1u << k));
    }
    return out;
}

/// Evaluates e along a schedule decreasing to 0 and classifies the trend from
/// the last three well-resolved values. Advisory only.
inline ProbeReport probe_limit(const CExpr& e, const std::vector<Rational>& schedule,
                               unsigned precision = kDefaultPrecision, double threshold = 1e6) {
    ProbeReport rep;
    std::vector<Interval> good;
    for (const auto& y : schedule) {
        ProbePoint pt{y, std::nullopt, precision, {}};
        try {
            pt.value = eval_adaptive(e, y, precision, &pt.precision);
            if (detail::well_resolved(*pt.value) || pt.value->relative_width() < 1e-6) {
                good.push_back(*pt.value);
            }
        } catch (const Error& err) {
            pt.error = err.what();
        }
        rep.points.push_back(std::move(pt));
    }
    if (good.size() < 3) {
        return rep;
    }
    const Interval& a = good[good.size() - 3];
    const Interval& b = good[good.size() - 2];
    const Interval& c = good[good.size() - 1];
    const double va = a.midpoint();
    const double vb = b.midpoint();
    const double vc = c.midpoint();
    if (!std::isfinite(va) || !std::isfinite(vb) || !std::isfinite(vc)) {
        // beyond double range: the direction of the last values decides
        const int s = c.sign_mid();
        if (s != 0 && s == b.sign_mid() && c.log2_abs_mid() > b.log2_abs_mid() && b.log2_abs_mid() > a.log2_abs_mid()) {
            rep.trend = s > 0 ? Trend::DivergingPlus : Trend::DivergingMinus;
        }
        return rep;
    }
    // differences taken before rounding to double, so a tail far below the
    // value itself still shows up
    const double d1 = (b - a).midpoint();
    const double d2 = (c - b).midpoint();
    if (d1 == 0 && d2 == 0) {
        rep.trend = Trend::ConvergingTo;
        rep.limit = c.hull(b);
        return rep;
    }
    const double magnitude_c = std::fabs(vc);
    const bool growing = std::fabs(vc) > std::fabs(vb) && std::fabs(vb) > std::fabs(va);
    if (magnitude_c > threshold && growing && (vc > 0) == (vb > 0)) {
        rep.trend = vc > 0 ? Trend::DivergingPlus : Trend::DivergingMinus;
        return rep;
    }
    if (d1 != 0) {
        const double r = std::fabs(d2) / std::fabs(d1);
        if (r <= 0.7) {
            const double radius = 2.0 * std::fabs(d2) * r / (1.0 - r);
            rep.trend = Trend::ConvergingTo;
            rep.limit = c.widened(Interval::from_bounds(-radius, radius, c.precision()));
            return rep;
        }
        if (r >= 0.9 && (d1 > 0) == (d2 > 0) && growing) {
            rep.trend = d2 > 0 ? Trend::DivergingPlus : Trend::DivergingMinus;
            return rep;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------

struct FiniteDifferenceReport {
    std::vector<Rational> steps;
    std::vector<Interval> central;      // (f(t0+h) - f(t0-h)) / 2h
    std::vector<Interval> extrapolated;  // Richardson on consecutive steps
    double estimate = 0;
    double error_bound = 0;
    std::optional<Interval> enclosure;  // estimate +- error_bound
};

/// 10^-4, ..., 10^-7.
inline std::vector<Rational> default_difference_steps() {
    std::vector<Rational> out;
    for (int k = 4; k <= 7; ++k) {
        out.emplace_back(Integer(1), pow(Integer(10), static_cast<unsigned>(k)));
    }
    return out;
}

/// Central differences with one Richardson step per consecutive pair of step
/// sizes (error model c h^2); the error bound is the spread of the last two
/// extrapolations plus their enclosure widths.
inline FiniteDifferenceReport finite_difference(const CExpr& e, const Rational& t0,
                                                const std::vector<Rational>& steps = default_difference_steps(),
                                                unsigned precision = 256) {
    FiniteDifferenceReport rep;
    rep.steps = steps;
    for (const auto& h : steps) {
        if (t0 - h <= 0) {
            throw Error(ErrorCode::PointOutsideDomain, "t0 - h leaves the domain");
        }
        Interval up = eval_interval(e, t0 + h, precision);
        Interval down = eval_interval(e, t0 - h, precision);
        rep.central.push_back((up - down) / Interval::point(2 * h, precision));
    }
    for (std::size_t i = 1; i < steps.size(); ++i) {
        const Rational rho = steps[i - 1] / steps[i];
        const Interval denom = Interval::point(rho * rho - 1, precision);
        rep.extrapolated.push_back(rep.central[i] + (rep.central[i] - rep.central[i - 1]) / denom);
    }
    const std::vector<Interval>& est = rep.extrapolated.size() >= 2 ? rep.extrapolated : rep.central;
    if (est.empty()) {
        return rep;
    }
    const Interval& last = est.back();
    rep.estimate = last.midpoint();
    double spread = 0;
    if (est.size() >= 2) {
        const Interval& prev = est[est.size() - 2];
        spread = (last - prev).abs().upper() + prev.width();
    }
    rep.error_bound = spread + last.width();
    rep.enclosure = last.widened(Interval::from_bounds(-rep.error_bound, rep.error_bound, precision));
    return rep;
}

// ---------------------------------------------------------------------------

struct CrosscheckSample {
    Rational y;
    Interval value;
    Interval truncated;
    double deviation = 0;
    double relative_deviation = 0;
    double next_order = 0;  // magnitude of the first omitted p-group, 0 if none
    bool consistent = false;
};

struct CrosscheckReport {
    std::size_t terms_used = 0;
    std::vector<CrosscheckSample> samples;
    double max_deviation = 0;
    double max_relative_deviation = 0;
    bool consistent = true;
};

/// Sum of c y^p ell^l over the given terms, ell = -log y.
inline Interval eval_grid_terms(const std::vector<GridTerm>& terms, const Rational& y, unsigned precision) {
    const Interval yy = Interval::point(y, precision);
    const Interval ell = Interval::point(Rational(0), precision) - log(yy);
    Interval sum(precision);
    for (const auto& t : terms) {
        sum += t.c.eval(precision) * pow(yy, t.p) * pow_int(ell, t.l);
    }
    return sum;
}

/// Compares e against its first K grid terms at each sample. A sample is
/// consistent when the deviation is within 4 times the first omitted p-group
/// (or within rounding when nothing is omitted).
inline CrosscheckReport crosscheck_series(const CExpr& e, const GridSeries& g, std::size_t K,
                                          const std::vector<Rational>& samples, unsigned precision = kDefaultPrecision) {
    CrosscheckReport rep;
    const auto all = g.truncate(K + static_cast<std::size_t>(g.max_l()) + 2);
    std::vector<GridTerm> head(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(std::min(K, all.size())));
    std::vector<GridTerm> next;
    if (all.size() > head.size()) {
        const Rational p_next = all[head.size()].p;
        for (std::size_t i = head.size(); i < all.size() && all[i].p == p_next; ++i) {
            next.push_back(all[i]);
        }
    }
    rep.terms_used = head.size();
    for (const auto& y : samples) {
        CrosscheckSample s{y, eval_interval(e, y, precision), eval_grid_terms(head, y, precision)};
        const Interval diff = (s.value - s.truncated).abs();
        s.deviation = diff.upper();
        const double mag = s.value.magnitude();
        s.relative_deviation = mag > 0 ? s.deviation / mag : s.deviation;
        const double rounding = s.value.width() + s.truncated.width();
        if (!next.empty()) {
            s.next_order = eval_grid_terms(next, y, precision).magnitude();
            // each term of the group separately, so cancellation inside it does not hide the order
            double group = 0;
            for (const auto& t : next) {
                group += eval_grid_terms({t}, y, precision).magnitude();
            }
            s.next_order = std::max(s.next_order, group);
            s.consistent = s.deviation <= 4.0 * s.next_order + rounding;
        } else {
            s.consistent = s.deviation <= 2.0 * rounding + 1e-300;
        }
        rep.max_deviation = std::max(rep.max_deviation, s.deviation);
        rep.max_relative_deviation = std::max(rep.max_relative_deviation, s.relative_deviation);
        rep.consistent = rep.consistent && s.consistent;
        rep.samples.push_back(std::move(s));
    }
    return rep;
}

}  // namespace cfn
