#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "cfn/constant.hpp"
#include "cfn/rational.hpp"
#include "cfn/series.hpp"

namespace cfn {

/// One term c * y^p * ell^l of a grid series, ell = |log y|.
struct GridTerm {
    Rational p;
    long l = 0;
    Constant c;
    friend bool operator==(const GridTerm&, const GridTerm&) = default;
};

/// Sum over (l, m) of m * ell^l * S_{l,m}(y), where m is a monomial in the
/// log atoms and each S_{l,m} is a Puiseux series with rational coefficients.
/// The coefficient of y^p ell^l is sum_m m * [y^p] S_{l,m}.
class GridSeries {
public:
    using Key = std::pair<long, Monomial>;

    GridSeries() = default;

    static GridSeries from_series(const PuiseuxSeries& s, long l = 0, const Monomial& m = Monomial{}) {
        GridSeries g;
        g.add_component({l, m}, s);
        return g;
    }

    /// A constant placed at ell^l; split into its monomials.
    static GridSeries constant(const Constant& c, long l = 0) {
        GridSeries g;
        for (const auto& [m, r] : c.terms()) {
            g.add_component({l, m}, PuiseuxSeries::constant(Constant(r)));
        }
        return g;
    }

    const std::map<Key, PuiseuxSeries>& components() const noexcept { return comps_; }
    bool empty() const noexcept { return comps_.empty(); }

    long max_l() const {
        long out = 0;
        for (const auto& [k, s] : comps_) {
            out = std::max(out, k.first);
        }
        return out;
    }

    std::set<long> l_values() const {
        std::set<long> out;
        for (const auto& [k, s] : comps_) {
            out.insert(k.first);
        }
        return out;
    }

    std::int64_t ramification() const {
        std::int64_t d = 1;
        for (const auto& [k, s] : comps_) {
            d = detail::checked_lcm(d, s.ramification());
        }
        return d;
    }

    /// Every exponent present is >= this bound (0 for the empty grid).
    Rational order_bound() const {
        std::optional<Rational> lo;
        for (const auto& [k, s] : comps_) {
            if (!lo || s.order_bound() < *lo) {
                lo = s.order_bound();
            }
        }
        return lo.value_or(Rational(0));
    }

    /// True when every component has known finite support.
    bool exhausted() const {
        return std::all_of(comps_.begin(), comps_.end(), [](const auto& kv) { return kv.second.exhausted(); });
    }

    /// Exclusive upper bound on the exponents present, when exhausted().
    std::optional<Rational> support_end() const {
        Rational end(0);
        bool any = false;
        for (const auto& [k, s] : comps_) {
            if (!s.exhausted()) {
                return std::nullopt;
            }
            const std::size_t len = *s.support_length();
            if (len == 0) {
                continue;
            }
            const Rational e = s.exponent_at(len - 1) + Rational(1, s.ramification());
            if (!any || e > end) {
                end = e;
            }
            any = true;
        }
        return any ? end : order_bound();
    }

    Constant coefficient(const Rational& p, long l) const {
        Constant out;
        for (auto it = comps_.lower_bound({l, Monomial{}}); it != comps_.end() && it->first.first == l; ++it) {
            const Constant c = it->second.coefficient(p);
            if (c.is_zero()) {
                continue;
            }
            out += c.is_rational() ? Constant::monomial(it->first.second, c.rational())
                                   : c * Constant::monomial(it->first.second, Rational(1));
        }
        return out;
    }

    /// Nonzero coefficients at exponent p, l descending (dominance order).
    std::vector<GridTerm> terms_at(const Rational& p) const {
        std::vector<GridTerm> out;
        const auto ls = l_values();
        for (auto it = ls.rbegin(); it != ls.rend(); ++it) {
            Constant c = coefficient(p, *it);
            if (!c.is_zero()) {
                out.push_back({p, *it, std::move(c)});
            }
        }
        return out;
    }

    /// Sum over the ell^l components with each monomial folded back in.
    PuiseuxSeries component_sum(long l) const {
        PuiseuxSeries out;
        for (auto it = comps_.lower_bound({l, Monomial{}}); it != comps_.end() && it->first.first == l; ++it) {
            out = out + (it->second.scaled(Constant::monomial(it->first.second, Rational(1))));
        }
        return out;
    }

    /// First `count` nonzero terms in ascending p (l descending within p),
    /// scanning at most `scan_limit` positions of the common grid.
    std::vector<GridTerm> truncate(std::size_t count, std::size_t scan_limit = 4096) const {
        std::vector<GridTerm> out;
        if (comps_.empty()) {
            return out;
        }
        const std::int64_t d = ramification();
        const Rational step(1, d);
        const auto end = support_end();
        Rational p = order_bound();
        for (std::size_t n = 0; n < scan_limit && out.size() < count; ++n, p += step) {
            if (end && p >= *end) {
                break;
            }
            for (auto& t : terms_at(p)) {
                if (out.size() < count) {
                    out.push_back(std::move(t));
                }
            }
        }
        return out;
    }

    /// Terms with p >= `from`, as a grid of the same shape.
    GridSeries tail_from(const Rational& from) const {
        GridSeries g;
        for (const auto& [k, s] : comps_) {
            g.add_component(k, s.tail_from(from));
        }
        return g;
    }

    friend GridSeries operator+(const GridSeries& a, const GridSeries& b) {
        GridSeries out = a;
        for (const auto& [k, s] : b.comps_) {
            out.add_component(k, s);
        }
        return out;
    }

    friend GridSeries operator-(const GridSeries& a) {
        GridSeries out;
        for (const auto& [k, s] : a.comps_) {
            out.comps_.emplace(k, -s);
        }
        return out;
    }

    friend GridSeries operator-(const GridSeries& a, const GridSeries& b) { return a + (-b); }

    friend GridSeries operator*(const GridSeries& a, const GridSeries& b) {
        GridSeries out;
        for (const auto& [ka, sa] : a.comps_) {
            for (const auto& [kb, sb] : b.comps_) {
                out.add_component({ka.first + kb.first, ka.second * kb.second}, sa * sb);
            }
        }
        return out;
    }

    /// Termwise d/dy with ell = -log y:
    /// d(y^p ell^l) = p y^{p-1} ell^l - l y^{p-1} ell^{l-1}.
    GridSeries derivative() const {
        GridSeries out;
        for (const auto& [k, s] : comps_) {
            out.add_component(k, s.derivative());
            if (k.first > 0) {
                out.add_component({k.first - 1, k.second}, s.scaled(Constant(Rational(-k.first)), Rational(-1)));
            }
        }
        return out;
    }

private:
    void add_component(const Key& k, const PuiseuxSeries& s) {
        if (s.exhausted() && *s.support_length() == 0) {
            return;
        }
        auto it = comps_.find(k);
        if (it == comps_.end()) {
            comps_.emplace(k, s);
        } else {
            it->second = it->second + s;
        }
    }

    std::map<Key, PuiseuxSeries> comps_;
};

}  // namespace cfn
