#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "cfn/constant.hpp"
#include "cfn/errors.hpp"
#include "cfn/rational.hpp"

namespace cfn {

/// Upper bound on the common exponent denominator of any series.
inline std::atomic<std::int64_t>& ramification_cap() {
    static std::atomic<std::int64_t> cap{64};
    return cap;
}

namespace detail {

inline std::int64_t checked_lcm(std::int64_t a, std::int64_t b) {
    const std::int64_t l = std::lcm(a, b);
    if (l > ramification_cap().load()) {
        throw Error(ErrorCode::RamificationCap,
                    "ramification " + std::to_string(l) + " exceeds cap " + std::to_string(ramification_cap().load()));
    }
    return l;
}

inline const Constant& zero_constant() {
    static const Constant zero;
    return zero;
}

/// Dense coefficient stream on the grid y^{(start + k) / ram}, k = 0, 1, ...
/// Coefficients are produced on demand and memoized; the memo is guarded so
/// concurrent readers observe the same sequence.
class SeriesNode {
public:
    SeriesNode(std::int64_t ram, std::int64_t start, std::optional<std::size_t> length)
        : ram_(ram), start_(start), length_(length) {}
    SeriesNode(const SeriesNode&) = delete;
    SeriesNode& operator=(const SeriesNode&) = delete;
    virtual ~SeriesNode() = default;

    std::int64_t ram() const noexcept { return ram_; }
    std::int64_t start() const noexcept { return start_; }
    /// Known support length: coefficients at k >= length are zero.
    const std::optional<std::size_t>& length() const noexcept { return length_; }

    const Constant& coeff(std::size_t k) const {
        if (length_ && k >= *length_) {
            return zero_constant();
        }
        std::lock_guard lock(mutex_);
        while (memo_.size() <= k) {
            memo_.push_back(compute(memo_.size()));
        }
        return memo_[k];
    }

protected:
    virtual Constant compute(std::size_t k) const = 0;
    // Only valid from inside compute(), where the lock is held and j < k.
    const Constant& produced(std::size_t j) const { return memo_[j]; }

private:
    std::int64_t ram_;
    std::int64_t start_;
    std::optional<std::size_t> length_;
    mutable std::mutex mutex_;
    mutable std::deque<Constant> memo_;
};

using NodePtr = std::shared_ptr<const SeriesNode>;

// Exclusive end of the support on a grid refined by `mult`, or nullopt when unknown.
inline std::optional<std::int64_t> support_end(const SeriesNode& n, std::int64_t mult) {
    if (!n.length()) {
        return std::nullopt;
    }
    const auto len = static_cast<std::int64_t>(*n.length());
    if (len == 0) {
        return std::numeric_limits<std::int64_t>::min();
    }
    return n.start() * mult + (len - 1) * mult + 1;
}

class FiniteNode final : public SeriesNode {
public:
    FiniteNode(std::int64_t ram, std::int64_t start, std::vector<Constant> coeffs)
        : SeriesNode(ram, start, coeffs.size()), coeffs_(std::move(coeffs)) {}

protected:
    Constant compute(std::size_t k) const override { return coeffs_[k]; }

private:
    std::vector<Constant> coeffs_;
};

class SumNode final : public SeriesNode {
public:
    SumNode(NodePtr a, NodePtr b, bool subtract, std::int64_t ram)
        : SeriesNode(ram, std::min(a->start() * (ram / a->ram()), b->start() * (ram / b->ram())),
                     length_of(*a, *b, ram)),
          a_(std::move(a)), b_(std::move(b)), subtract_(subtract), ma_(ram / a_->ram()), mb_(ram / b_->ram()) {}

protected:
    Constant compute(std::size_t k) const override {
        const std::int64_t n = start() + static_cast<std::int64_t>(k);
        Constant out;
        const std::int64_t ia = n - a_->start() * ma_;
        if (ia >= 0 && ia % ma_ == 0) {
            out = a_->coeff(static_cast<std::size_t>(ia / ma_));
        }
        const std::int64_t ib = n - b_->start() * mb_;
        if (ib >= 0 && ib % mb_ == 0) {
            const Constant& cb = b_->coeff(static_cast<std::size_t>(ib / mb_));
            out = subtract_ ? out - cb : out + cb;
        }
        return out;
    }

private:
    static std::optional<std::size_t> length_of(const SeriesNode& a, const SeriesNode& b, std::int64_t ram) {
        auto ea = support_end(a, ram / a.ram());
        auto eb = support_end(b, ram / b.ram());
        if (!ea || !eb) {
            return std::nullopt;
        }
        const std::int64_t start = std::min(a.start() * (ram / a.ram()), b.start() * (ram / b.ram()));
        const std::int64_t end = std::max(*ea, *eb);
        return static_cast<std::size_t>(std::max<std::int64_t>(end - start, 0));
    }

    NodePtr a_, b_;
    bool subtract_;
    std::int64_t ma_, mb_;
};

class ProductNode final : public SeriesNode {
public:
    ProductNode(NodePtr a, NodePtr b, std::int64_t ram)
        : SeriesNode(ram, a->start() * (ram / a->ram()) + b->start() * (ram / b->ram()), length_of(*a, *b, ram)),
          a_(std::move(a)), b_(std::move(b)), ma_(ram / a_->ram()), mb_(ram / b_->ram()) {}

protected:
    Constant compute(std::size_t k) const override {
        Constant out;
        const auto kk = static_cast<std::int64_t>(k);
        const std::int64_t la = a_->length() ? static_cast<std::int64_t>(*a_->length()) : kk / ma_ + 1;
        const std::int64_t lb = b_->length() ? static_cast<std::int64_t>(*b_->length()) : kk / mb_ + 1;
        for (std::int64_t i = 0; i < la && i * ma_ <= kk; ++i) {
            const std::int64_t rest = kk - i * ma_;
            if (rest % mb_ != 0 || rest / mb_ >= lb) {
                continue;
            }
            const Constant& ca = a_->coeff(static_cast<std::size_t>(i));
            if (ca.is_zero()) {
                continue;
            }
            const Constant& cb = b_->coeff(static_cast<std::size_t>(rest / mb_));
            if (!cb.is_zero()) {
                out += ca * cb;
            }
        }
        return out;
    }

private:
    static std::optional<std::size_t> length_of(const SeriesNode& a, const SeriesNode& b, std::int64_t ram) {
        if (!a.length() || !b.length()) {
            // A known-empty factor still forces an empty product.
            if ((a.length() && *a.length() == 0) || (b.length() && *b.length() == 0)) {
                return 0;
            }
            return std::nullopt;
        }
        if (*a.length() == 0 || *b.length() == 0) {
            return 0;
        }
        return (*a.length() - 1) * static_cast<std::size_t>(ram / a.ram()) +
               (*b.length() - 1) * static_cast<std::size_t>(ram / b.ram()) + 1;
    }

    NodePtr a_, b_;
    std::int64_t ma_, mb_;
};

/// c * y^shift * a, regridded to `ram`.
class ScaleShiftNode final : public SeriesNode {
public:
    ScaleShiftNode(NodePtr a, Constant c, std::int64_t shift_on_grid, std::int64_t ram)
        : SeriesNode(ram, a->start() * (ram / a->ram()) + shift_on_grid, length_of(*a, c, ram)),
          a_(std::move(a)), c_(std::move(c)), m_(ram / a_->ram()) {}

protected:
    Constant compute(std::size_t k) const override {
        if (k % static_cast<std::size_t>(m_) != 0) {
            return {};
        }
        return a_->coeff(k / static_cast<std::size_t>(m_)) * c_;
    }

private:
    static std::optional<std::size_t> length_of(const SeriesNode& a, const Constant& c, std::int64_t ram) {
        if (c.is_zero()) {
            return 0;
        }
        if (!a.length()) {
            return std::nullopt;
        }
        return *a.length() == 0 ? 0 : (*a.length() - 1) * static_cast<std::size_t>(ram / a.ram()) + 1;
    }

    NodePtr a_;
    Constant c_;
    std::int64_t m_;
};

/// Coefficients of `a` from index `from` onward.
class TailNode final : public SeriesNode {
public:
    TailNode(NodePtr a, std::size_t from)
        : SeriesNode(a->ram(), a->start() + static_cast<std::int64_t>(from), length_of(*a, from)),
          a_(std::move(a)), from_(from) {}

protected:
    Constant compute(std::size_t k) const override { return a_->coeff(from_ + k); }

private:
    static std::optional<std::size_t> length_of(const SeriesNode& a, std::size_t from) {
        if (!a.length()) {
            return std::nullopt;
        }
        return *a.length() > from ? *a.length() - from : 0;
    }
    NodePtr a_;
    std::size_t from_;
};

/// a / (c y^p) where (c, p) is the leading term at index k0; first coefficient is 1.
class NormalizedNode final : public SeriesNode {
public:
    NormalizedNode(NodePtr a, std::size_t k0, Rational inverse_leading)
        : SeriesNode(a->ram(), 0, a->length() ? std::optional<std::size_t>(*a->length() - k0) : std::nullopt),
          a_(std::move(a)), k0_(k0), inv_(std::move(inverse_leading)) {}

protected:
    Constant compute(std::size_t k) const override { return a_->coeff(k0_ + k) * inv_; }

private:
    NodePtr a_;
    std::size_t k0_;
    Rational inv_;
};

// 1 / w for w with w_0 = 1.
class InverseNode final : public SeriesNode {
public:
    explicit InverseNode(NodePtr w) : SeriesNode(w->ram(), 0, std::nullopt), w_(std::move(w)) {}

protected:
    Constant compute(std::size_t n) const override {
        if (n == 0) {
            return Constant(1);
        }
        Constant acc;
        const std::size_t limit = w_->length() ? std::min(n, *w_->length() - 1) : n;
        for (std::size_t i = 1; i <= limit; ++i) {
            const Constant& wi = w_->coeff(i);
            if (!wi.is_zero()) {
                acc += wi * produced(n - i);
            }
        }
        return -acc;
    }

private:
    NodePtr w_;
};

// w^q for w with w_0 = 1, via the J.C.P. Miller recurrence
// n b_n = sum_{k=1..n} ((q+1) k - n) w_k b_{n-k}.
class PowerNode final : public SeriesNode {
public:
    PowerNode(NodePtr w, Rational q) : SeriesNode(w->ram(), 0, std::nullopt), w_(std::move(w)), q_(std::move(q)) {}

protected:
    Constant compute(std::size_t n) const override {
        if (n == 0) {
            return Constant(1);
        }
        Constant acc;
        const std::size_t limit = w_->length() ? std::min(n, *w_->length() - 1) : n;
        for (std::size_t k = 1; k <= limit; ++k) {
            const Constant& wk = w_->coeff(k);
            if (wk.is_zero()) {
                continue;
            }
            const Rational weight = (q_ + 1) * Rational(static_cast<long>(k)) - Rational(static_cast<long>(n));
            if (weight != 0) {
                acc += (wk * produced(n - k)) * weight;
            }
        }
        return acc * Rational(1, static_cast<long>(n));
    }

private:
    NodePtr w_;
    Rational q_;
};

// log w for w with w_0 = 1: n L_n = n w_n - sum_{k=1..n-1} k L_k w_{n-k}.
class LogNode final : public SeriesNode {
public:
    explicit LogNode(NodePtr w) : SeriesNode(w->ram(), 0, std::nullopt), w_(std::move(w)) {}

protected:
    Constant compute(std::size_t n) const override {
        if (n == 0) {
            return {};
        }
        Constant acc;
        for (std::size_t k = 1; k < n; ++k) {
            const Constant& lk = produced(k);
            if (lk.is_zero()) {
                continue;
            }
            const Constant& w = w_->coeff(n - k);
            if (!w.is_zero()) {
                acc += (lk * w) * Rational(static_cast<long>(k));
            }
        }
        return w_->coeff(n) - acc * Rational(1, static_cast<long>(n));
    }

private:
    NodePtr w_;
};

// d/dy termwise: c y^e -> e c y^{e-1}.
class DerivativeNode final : public SeriesNode {
public:
    explicit DerivativeNode(NodePtr a)
        : SeriesNode(a->ram(), a->start() - a->ram(), a->length()), a_(std::move(a)) {}

protected:
    Constant compute(std::size_t k) const override {
        const Constant& c = a_->coeff(k);
        if (c.is_zero()) {
            return {};
        }
        return c * Rational(a_->start() + static_cast<std::int64_t>(k), a_->ram());
    }

private:
    NodePtr a_;
};

}  // namespace detail

struct SeriesTerm {
    Rational exponent;
    Constant coefficient;
    friend bool operator==(const SeriesTerm&, const SeriesTerm&) = default;
};

struct ExactZero {
    friend bool operator==(const ExactZero&, const ExactZero&) = default;
};
struct Undecided {
    friend bool operator==(const Undecided&, const Undecided&) = default;
};

using LeadingTerm = std::variant<SeriesTerm, ExactZero, Undecided>;

/// Lazy Puiseux series sum c_k y^{e_k} over Constant, with exponents on the
/// grid (1/ramification)Z, strictly increasing and bounded below by order_bound().
/// Copies share the same memoized coefficient stream.
class PuiseuxSeries {
public:
    PuiseuxSeries() : node_(std::make_shared<detail::FiniteNode>(1, 0, std::vector<Constant>{})) {}

    static PuiseuxSeries zero() { return {}; }
    static PuiseuxSeries constant(const Constant& c) { return monomial(c, Rational(0)); }
    static PuiseuxSeries variable() { return monomial(Constant(1), Rational(1)); }
    static PuiseuxSeries monomial(const Constant& c, const Rational& exponent) {
        if (c.is_zero()) {
            return zero();
        }
        const std::int64_t ram = checked_denominator(exponent);
        const std::int64_t start = numer(exponent).convert_to<std::int64_t>();
        return PuiseuxSeries(std::make_shared<detail::FiniteNode>(ram, start, std::vector<Constant>{c}));
    }
    /// Finite series from (exponent, coefficient) pairs; repeated exponents are summed.
    static PuiseuxSeries from_terms(const std::vector<std::pair<Rational, Constant>>& terms) {
        std::map<Rational, Constant> summed;
        std::int64_t ram = 1;
        for (const auto& [e, c] : terms) {
            ram = detail::checked_lcm(ram, checked_denominator(e));
            summed[e] += c;
        }
        std::erase_if(summed, [](const auto& kv) { return kv.second.is_zero(); });
        if (summed.empty()) {
            return zero();
        }
        const auto on_grid = [ram](const Rational& e) { return numer(e * Rational(ram)).convert_to<std::int64_t>(); };
        const std::int64_t start = on_grid(summed.begin()->first);
        std::vector<Constant> coeffs(static_cast<std::size_t>(on_grid(summed.rbegin()->first) - start + 1));
        for (const auto& [e, c] : summed) {
            coeffs[static_cast<std::size_t>(on_grid(e) - start)] = c;
        }
        return PuiseuxSeries(std::make_shared<detail::FiniteNode>(ram, start, std::move(coeffs)));
    }

    std::int64_t ramification() const noexcept { return node_->ram(); }
    Rational order_bound() const { return Rational(node_->start(), node_->ram()); }
    /// True when the support is known to be finite (every term can be produced).
    bool exhausted() const noexcept { return node_->length().has_value(); }
    std::optional<std::size_t> support_length() const { return node_->length(); }

    Rational exponent_at(std::size_t k) const {
        return Rational(node_->start() + static_cast<std::int64_t>(k), node_->ram());
    }
    const Constant& coefficient_at(std::size_t k) const { return node_->coeff(k); }

    /// Coefficient of y^exponent (zero off the grid or below the order bound).
    Constant coefficient(const Rational& exponent) const {
        const Rational idx = (exponent - order_bound()) * Rational(node_->ram());
        if (idx < 0 || !is_integer(idx)) {
            return {};
        }
        const Integer i = numer(idx);
        if (node_->length() && i >= Integer(static_cast<std::uint64_t>(*node_->length()))) {
            return {};
        }
        return node_->coeff(i.convert_to<std::size_t>());
    }

    /// Index of the first nonzero coefficient. Finite supports are scanned in
    /// full; otherwise at most `budget` grid positions are examined.
    std::variant<std::size_t, ExactZero, Undecided> leading_index(std::size_t budget) const {
        const std::size_t limit = node_->length() ? *node_->length() : budget;
        for (std::size_t k = 0; k < limit; ++k) {
            if (!node_->coeff(k).is_zero()) {
                return k;
            }
        }
        if (node_->length()) {
            return ExactZero{};
        }
        return Undecided{};
    }

    LeadingTerm leading_term(std::size_t budget) const {
        auto idx = leading_index(budget);
        if (auto* k = std::get_if<std::size_t>(&idx)) {
            return SeriesTerm{exponent_at(*k), node_->coeff(*k)};
        }
        if (std::holds_alternative<ExactZero>(idx)) {
            return ExactZero{};
        }
        return Undecided{};
    }

    /// All nonzero terms of a series with known finite support.
    std::vector<SeriesTerm> finite_terms() const {
        if (!node_->length()) {
            throw Error(ErrorCode::InvalidArgument, "series support is not known to be finite");
        }
        return truncate(*node_->length(), *node_->length());
    }

    /// First `count` nonzero terms, scanning at most `scan_limit` positions.
    std::vector<SeriesTerm> truncate(std::size_t count, std::size_t scan_limit = 4096) const {
        std::vector<SeriesTerm> out;
        const std::size_t limit = node_->length() ? std::min(*node_->length(), scan_limit) : scan_limit;
        for (std::size_t k = 0; k < limit && out.size() < count; ++k) {
            const Constant& c = node_->coeff(k);
            if (!c.is_zero()) {
                out.push_back({exponent_at(k), c});
            }
        }
        return out;
    }

    /// Terms with exponent strictly greater than `exponent`.
    PuiseuxSeries tail_after(const Rational& exponent) const {
        Rational idx = (exponent - order_bound()) * Rational(node_->ram());
        std::size_t from = 0;
        if (idx >= 0) {
            Integer fl = numer(idx) / denom(idx);  // floor for non-negative
            from = fl.convert_to<std::size_t>() + 1;
        }
        if (from == 0) {
            return *this;
        }
        return PuiseuxSeries(std::make_shared<detail::TailNode>(node_, from));
    }

    /// Terms with exponent >= `exponent`.
    PuiseuxSeries tail_from(const Rational& exponent) const {
        const Rational idx = (exponent - order_bound()) * Rational(node_->ram());
        if (idx <= 0) {
            return *this;
        }
        Integer ceil = numer(idx) / denom(idx);
        if (ceil * denom(idx) != numer(idx)) {
            ceil += 1;
        }
        return PuiseuxSeries(std::make_shared<detail::TailNode>(node_, ceil.convert_to<std::size_t>()));
    }

    /// c * y^shift * this.
    PuiseuxSeries scaled(const Constant& c, const Rational& shift = Rational(0)) const {
        const std::int64_t ram = detail::checked_lcm(node_->ram(), checked_denominator(shift));
        const Rational on_grid = shift * Rational(ram);
        const std::int64_t shift_on_grid = numer(on_grid).convert_to<std::int64_t>();
        return PuiseuxSeries(std::make_shared<detail::ScaleShiftNode>(node_, c, shift_on_grid, ram));
    }

    PuiseuxSeries derivative() const { return PuiseuxSeries(std::make_shared<detail::DerivativeNode>(node_)); }

    friend PuiseuxSeries operator+(const PuiseuxSeries& a, const PuiseuxSeries& b) {
        if (a.is_empty()) {
            return b;
        }
        if (b.is_empty()) {
            return a;
        }
        const std::int64_t ram = detail::checked_lcm(a.node_->ram(), b.node_->ram());
        return PuiseuxSeries(std::make_shared<detail::SumNode>(a.node_, b.node_, false, ram));
    }
    friend PuiseuxSeries operator-(const PuiseuxSeries& a, const PuiseuxSeries& b) {
        if (b.is_empty()) {
            return a;
        }
        const std::int64_t ram = detail::checked_lcm(a.node_->ram(), b.node_->ram());
        return PuiseuxSeries(std::make_shared<detail::SumNode>(a.node_, b.node_, true, ram));
    }
    friend PuiseuxSeries operator-(const PuiseuxSeries& a) { return a.scaled(Constant(-1)); }
    friend PuiseuxSeries operator*(const PuiseuxSeries& a, const PuiseuxSeries& b) {
        if (a.is_empty() || b.is_empty()) {
            return zero();
        }
        const std::int64_t ram = detail::checked_lcm(a.node_->ram(), b.node_->ram());
        return PuiseuxSeries(std::make_shared<detail::ProductNode>(a.node_, b.node_, ram));
    }

    const detail::NodePtr& node() const noexcept { return node_; }

private:
    explicit PuiseuxSeries(detail::NodePtr node) : node_(std::move(node)) {}

    bool is_empty() const { return node_->length() && *node_->length() == 0; }

    static std::int64_t checked_denominator(const Rational& r) {
        const Integer d = denom(r);
        if (d > ramification_cap().load()) {
            throw Error(ErrorCode::RamificationCap, "exponent " + to_string(r) + " exceeds the ramification cap");
        }
        return d.convert_to<std::int64_t>();
    }

    struct Normalized {
        detail::NodePtr w;
        Rational exponent;
        Constant leading;
    };

    Normalized normalize(std::size_t budget, bool need_rational_leading, ErrorCode non_rational_code) const {
        auto idx = leading_index(budget);
        if (std::holds_alternative<Undecided>(idx)) {
            throw Error(ErrorCode::LeadingTermUndecided,
                        "no nonzero term within " + std::to_string(budget) + " grid positions");
        }
        if (std::holds_alternative<ExactZero>(idx)) {
            throw Error(ErrorCode::ExactZero, "series is exactly zero");
        }
        const std::size_t k0 = std::get<std::size_t>(idx);
        const Constant& c = node_->coeff(k0);
        if (need_rational_leading && !c.is_rational()) {
            throw Error(non_rational_code, "leading coefficient " + c.str() + " is not rational");
        }
        Rational inv = c.is_rational() ? Rational(1) / c.rational() : Rational(1);
        return {std::make_shared<detail::NormalizedNode>(node_, k0, inv), exponent_at(k0), c};
    }

    friend PuiseuxSeries inverse(const PuiseuxSeries& a, std::size_t budget);
    friend PuiseuxSeries power(const PuiseuxSeries& a, const Rational& q, std::size_t budget);
    friend std::pair<Constant, PuiseuxSeries> log_unit(const PuiseuxSeries& a, std::size_t budget);

    detail::NodePtr node_;
};

namespace detail {
inline bool is_one(const NodePtr& w) { return w->length() && *w->length() == 1; }
}  // namespace detail

/// 1/a; the leading coefficient must be a nonzero rational.
inline PuiseuxSeries inverse(const PuiseuxSeries& a, std::size_t budget) {
    auto n = a.normalize(budget, true, ErrorCode::NonInvertibleLeading);
    const Rational c = n.leading.rational();
    PuiseuxSeries unit = detail::is_one(n.w) ? PuiseuxSeries::constant(Constant(1))
                                             : PuiseuxSeries(std::make_shared<detail::InverseNode>(n.w));
    return unit.scaled(Constant(Rational(1) / c), -n.exponent);
}

/// a^q via (c y^p (1 + e))^q = c^q y^{pq} (1 + e)^q; c^q must be rational.
inline PuiseuxSeries power(const PuiseuxSeries& a, const Rational& q, std::size_t budget) {
    if (q == 0) {
        return PuiseuxSeries::constant(Constant(1));
    }
    if (is_integer(q) && q > 0) {
        if (q > 1'000'000) {
            throw Error(ErrorCode::InvalidArgument, "integer exponent too large");
        }
        auto n = numer(q).convert_to<std::uint64_t>();
        PuiseuxSeries out = PuiseuxSeries::constant(Constant(1));
        PuiseuxSeries base = a;
        bool first = true;
        while (n > 0) {
            if (n & 1u) {
                out = first ? base : out * base;
                first = false;
            }
            n >>= 1;
            if (n > 0) {
                base = base * base;
            }
        }
        return out;
    }
    const bool integral = is_integer(q);
    auto n = a.normalize(budget, true, integral ? ErrorCode::NonInvertibleLeading : ErrorCode::NonRationalRadicand);
    const Rational c = n.leading.rational();
    if (!integral && c < 0) {
        throw Error(ErrorCode::NegativeLeading, "fractional power of a series with negative leading coefficient " +
                                                    to_string(c));
    }
    auto cq = exact_pow(c, q);
    if (!cq) {
        const std::string base = is_integer(c) ? to_string(c) : "(" + to_string(c) + ")";
        throw Error(ErrorCode::NonRationalRadicand, base + "^(" + to_string(q) + ") is not rational");
    }
    PuiseuxSeries unit = detail::is_one(n.w) ? PuiseuxSeries::constant(Constant(1))
                                             : PuiseuxSeries(std::make_shared<detail::PowerNode>(n.w, q));
    return unit.scaled(Constant(*cq), n.exponent * q);
}

/// For a of order 0 with positive rational leading coefficient c:
/// (log c, log(a / c)), the second a Mercator-type series of positive order.
inline std::pair<Constant, PuiseuxSeries> log_unit(const PuiseuxSeries& a, std::size_t budget) {
    auto n = a.normalize(budget, true, ErrorCode::NonConstantLeading);
    if (n.exponent != 0) {
        throw Error(ErrorCode::InvalidArgument, "log_unit needs order 0, got " + to_string(n.exponent));
    }
    const Rational c = n.leading.rational();
    if (c <= 0) {
        throw Error(ErrorCode::NonPositiveLeading, "log of series with leading coefficient " + to_string(c));
    }
    PuiseuxSeries series = detail::is_one(n.w) ? PuiseuxSeries::zero()
                                               : PuiseuxSeries(std::make_shared<detail::LogNode>(n.w));
    return {log_of_rational(c), series};
}

/// a / b by long division from the lowest order, when a and b have finite
/// support and the quotient does too; nullopt otherwise.
inline std::optional<PuiseuxSeries> exact_quotient(const PuiseuxSeries& a, const PuiseuxSeries& b) {
    if (!a.exhausted() || !b.exhausted()) {
        return std::nullopt;
    }
    const auto bt = b.finite_terms();
    if (bt.empty() || !bt.front().coefficient.is_rational()) {
        return std::nullopt;
    }
    std::map<Rational, Constant> rem;
    for (auto& t : a.finite_terms()) {
        rem.emplace(t.exponent, std::move(t.coefficient));
    }
    if (rem.empty()) {
        return PuiseuxSeries::zero();
    }
    const Rational a_end = rem.rbegin()->first;
    const Rational b_span = bt.back().exponent - bt.front().exponent;
    const Rational inv = Rational(1) / bt.front().coefficient.rational();
    std::vector<std::pair<Rational, Constant>> q;
    while (!rem.empty()) {
        const auto [e, c] = *rem.begin();
        const Rational qe = e - bt.front().exponent;
        if (qe + bt.front().exponent + b_span > a_end) {
            return std::nullopt;
        }
        const Constant qc = c * inv;
        for (const auto& t : bt) {
            auto [it, fresh] = rem.try_emplace(qe + t.exponent);
            it->second -= qc * t.coefficient;
            if (it->second.is_zero()) {
                rem.erase(it);
            }
        }
        q.emplace_back(qe, qc);
    }
    return PuiseuxSeries::from_terms(q);
}

/// Puiseux series with first term (0, 1): the fragment's strong unit.
class Unit {
public:
    Unit() : series_(PuiseuxSeries::constant(Constant(1))) {}

    static Unit one() { return {}; }
    /// Checks the (0, 1) leading term within `budget` positions.
    static Unit from_series(PuiseuxSeries s, std::size_t budget) {
        auto lead = s.leading_term(budget);
        const auto* t = std::get_if<SeriesTerm>(&lead);
        if (t == nullptr || t->exponent != 0 || !(t->coefficient == Constant(1))) {
            throw Error(ErrorCode::InvalidArgument, "series is not a unit (leading term must be 1*y^0)");
        }
        return Unit(std::move(s));
    }

    const PuiseuxSeries& series() const noexcept { return series_; }
    bool is_one() const { return series_.exhausted() && series_.truncate(2).size() == 1; }

private:
    explicit Unit(PuiseuxSeries s) : series_(std::move(s)) {}
    PuiseuxSeries series_;
};

}  // namespace cfn
