#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfn/errors.hpp"
#include "cfn/expr.hpp"
#include "cfn/parser.hpp"
#include "cfn/rational.hpp"
#include "cfn/validate.hpp"

namespace cfn {

/// Generator settings; the checked-in file config/corpus_v1.json pins them.
struct CorpusConfig {
    int version = 1;
    std::uint64_t seed = 1;
    unsigned max_depth = 5;
    unsigned max_log_factors = 3;
    unsigned max_terms = 3;
    unsigned log_argument_depth = 3;
    // rational, var, add, sub, mul, div, pow
    std::vector<unsigned> weights{3, 4, 3, 2, 3, 2, 2};
    // relative frequency of 0, 1, 2, 3 log factors in a term
    std::vector<unsigned> log_weights{5, 3, 2, 1};
    long numerator_min = -5;
    long numerator_max = 5;
    long denominator_max = 4;
    std::vector<Rational> exponents{Rational(-2),   Rational(-1),   Rational(-1, 2), Rational(1, 2), Rational(1, 3),
                                    Rational(2, 3), Rational(3, 2), Rational(2),     Rational(3)};
    unsigned max_attempts = 64;

    static CorpusConfig from_json(const nlohmann::json& j) {
        CorpusConfig c;
        c.version = j.value("version", c.version);
        c.seed = j.value("seed", c.seed);
        c.max_depth = j.value("max_depth", c.max_depth);
        c.max_log_factors = j.value("max_log_factors", c.max_log_factors);
        c.max_terms = j.value("max_terms", c.max_terms);
        c.log_argument_depth = j.value("log_argument_depth", c.log_argument_depth);
        if (j.contains("weights")) {
            const auto& w = j.at("weights");
            c.weights = {w.at("rational"), w.at("var"), w.at("add"), w.at("sub"),
                         w.at("mul"),      w.at("div"), w.at("pow")};
        }
        if (j.contains("log_weights")) {
            c.log_weights = j.at("log_weights").get<std::vector<unsigned>>();
        }
        if (j.contains("numerator_range")) {
            c.numerator_min = j.at("numerator_range").at(0);
            c.numerator_max = j.at("numerator_range").at(1);
        }
        c.denominator_max = j.value("denominator_max", c.denominator_max);
        if (j.contains("exponents")) {
            c.exponents.clear();
            for (const auto& s : j.at("exponents")) {
                c.exponents.push_back(Rational(s.get<std::string>()));
            }
        }
        c.max_attempts = j.value("max_attempts", c.max_attempts);
        if (c.max_depth < 2 || c.denominator_max < 1 || c.numerator_min > c.numerator_max ||
            c.weights.size() != 7 || c.log_weights.empty() || c.max_terms == 0) {
            throw std::invalid_argument("corpus config out of range");
        }
        if (c.log_weights.size() > c.max_log_factors + 1) {
            c.log_weights.resize(c.max_log_factors + 1);
        }
        return c;
    }

    static CorpusConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) {
            throw std::runtime_error("cannot open corpus config " + path);
        }
        return from_json(nlohmann::json::parse(in));
    }
};

/// Nesting depth of a log-free expression; leaves have depth 1.
inline unsigned sub_depth(const SubExpr& e) {
    switch (e.kind()) {
        case SubKind::Rational:
        case SubKind::Var: return 1;
        case SubKind::Pow: return 1 + sub_depth(e.base());
        default: return 1 + std::max(sub_depth(e.lhs()), sub_depth(e.rhs()));
    }
}

/// Depth of a constructible expression counting each log as one level.
inline unsigned cexpr_depth(const CExpr& e) {
    unsigned d = 0;
    for (const auto& t : e.terms()) {
        d = std::max(d, sub_depth(t.factor));
        for (const auto& g : t.logs) {
            d = std::max(d, 1 + sub_depth(g));
        }
    }
    return d;
}

/// mt19937_64 with bounded draws done by hand, so a seed gives the same
/// corpus with every standard library.
class CorpusRng {
public:
    explicit CorpusRng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

    long between(long lo, long hi) { return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1))); }

    std::size_t weighted(const std::vector<unsigned>& w) {
        std::uint64_t total = 0;
        for (unsigned x : w) {
            total += x;
        }
        std::uint64_t r = below(total);
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (r < w[i]) {
                return i;
            }
            r -= w[i];
        }
        return w.size() - 1;
    }

private:
    std::mt19937_64 eng_;
};

struct CorpusStats {
    std::size_t candidates = 0;
    std::size_t rejected_invalid = 0;
    std::size_t rejected_undecided = 0;
    std::size_t rejected_shape = 0;  // deeper than max_depth after folding
    std::size_t exhausted = 0;  // draws that ran out of attempts
};

class CorpusGenerator {
public:
    explicit CorpusGenerator(CorpusConfig config) : cfg_(std::move(config)), rng_(cfg_.seed) {}
    CorpusGenerator(CorpusConfig config, std::uint64_t seed) : cfg_(std::move(config)), rng_(seed) {}

    const CorpusConfig& config() const noexcept { return cfg_; }
    const CorpusStats& stats() const noexcept { return stats_; }

    Rational rational() {
        long n = 0;
        while (n == 0) {
            n = rng_.between(cfg_.numerator_min, cfg_.numerator_max);
        }
        return Rational(n, rng_.between(1, cfg_.denominator_max));
    }

    Rational positive_rational() {
        const Rational r = rational();
        return r < 0 ? Rational(-r) : r;
    }

    SubExpr factor(unsigned depth) {
        if (depth <= 1) {
            return leaf();
        }
        // operands are drawn in separate statements: argument evaluation
        // order is unspecified and would make the corpus compiler-dependent
        switch (rng_.weighted(cfg_.weights)) {
            case 0: return sub_rational(rational());
            case 1: return sub_var();
            case 2: {
                SubExpr a = factor(depth - 1);
                return sub_add(a, factor(depth - 1));
            }
            case 3: {
                SubExpr a = factor(depth - 1);
                return sub_sub(a, factor(depth - 1));
            }
            case 4: {
                SubExpr a = factor(depth - 1);
                return sub_mul(a, factor(depth - 1));
            }
            case 5: {
                SubExpr a = factor(depth - 1);
                return sub_div(a, factor(depth - 1));
            }
            default: {
                const Rational q = exponent();
                return sub_pow(is_integer(q) ? factor(depth - 1) : positive(depth - 1), q);
            }
        }
    }

    /// Expressions that are positive near 0+ by construction, except that
    /// c + y*f can still lose its constant to a pole of f; validation sorts
    /// those out.
    SubExpr positive(unsigned depth) {
        if (depth <= 1) {
            return positive_leaf();
        }
        switch (rng_.below(6)) {
            case 0: {
                SubExpr a = positive(depth - 1);
                return sub_add(a, positive(depth - 1));
            }
            case 1: {
                SubExpr a = positive(depth - 1);
                return sub_mul(a, positive(depth - 1));
            }
            case 2: {
                SubExpr a = positive(depth - 1);
                return sub_div(a, positive(depth - 1));
            }
            case 3: {
                SubExpr a = positive(depth - 1);
                return sub_pow(a, exponent());
            }
            case 4: {
                SubExpr c = sub_rational(positive_rational());
                return sub_add(c, sub_mul(sub_var(), factor(depth - 2)));
            }
            default: return positive_leaf();
        }
    }

    /// An unvalidated draw.
    CExpr candidate() {
        std::vector<CTerm> terms;
        const auto n = static_cast<std::size_t>(rng_.between(1, cfg_.max_terms));
        for (std::size_t i = 0; i < n; ++i) {
            CTerm t{factor(cfg_.max_depth - 1), {}};
            const std::size_t logs = rng_.weighted(cfg_.log_weights);
            const unsigned arg_depth = std::min(cfg_.log_argument_depth, cfg_.max_depth - 1);
            for (std::size_t j = 0; j < logs; ++j) {
                t.logs.push_back(positive(arg_depth));
            }
            terms.push_back(std::move(t));
        }
        return CExpr(std::move(terms));
    }

    /// The next candidate that validates, or nullopt after max_attempts.
    std::optional<CExpr> next(std::size_t zero_budget = kDefaultZeroBudget) {
        for (unsigned attempt = 0; attempt < cfg_.max_attempts; ++attempt) {
            ++stats_.candidates;
            CExpr e;
            ValidationReport rep;
            try {
                // folding can already reject a draw, e.g. x/(y - y)
                e = candidate();
                // canonical folding can add a level, e.g. (r*X)/Y -> r*(X/Y)
                if (cexpr_depth(e) > cfg_.max_depth || e.log_factor_count() > cfg_.max_log_factors) {
                    ++stats_.rejected_shape;
                    continue;
                }
                rep = validate(e, zero_budget);
            } catch (const Error&) {
                ++stats_.rejected_invalid;
                continue;
            }
            if (rep.status == ValidationReport::Status::Valid) {
                return e;
            }
            ++(rep.status == ValidationReport::Status::Invalid ? stats_.rejected_invalid : stats_.rejected_undecided);
        }
        ++stats_.exhausted;
        return std::nullopt;
    }

    std::vector<CExpr> generate(std::size_t count, std::size_t zero_budget = kDefaultZeroBudget) {
        std::vector<CExpr> out;
        while (out.size() < count) {
            if (auto e = next(zero_budget)) {
                out.push_back(std::move(*e));
            } else {
                break;
            }
        }
        return out;
    }

private:
    SubExpr leaf() {
        const unsigned w_rat = cfg_.weights[0];
        const unsigned w_var = cfg_.weights[1];
        if (rng_.below(static_cast<std::uint64_t>(w_rat) + w_var) < w_rat) {
            return sub_rational(rational());
        }
        return sub_var();
    }

    SubExpr positive_leaf() {
        if (rng_.below(2) == 0) {
            return sub_var();
        }
        return sub_rational(positive_rational());
    }

    Rational exponent() { return cfg_.exponents[rng_.below(cfg_.exponents.size())]; }

    CorpusConfig cfg_;
    CorpusRng rng_;
    CorpusStats stats_;
};

}  // namespace cfn
