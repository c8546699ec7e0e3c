// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "cfn/cfn.hpp"
#include "cfn/corpus.hpp"

using namespace cfn;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct FormTally {
    std::size_t forms = 0;
    std::size_t bad = 0;
    std::string first_bad;

    std::size_t undecided = 0;  // the expansion itself hit the zero budget
    std::string first_undecided;

    void add(const GridSeries& g, const std::string& label) {
        PreparedForm f;
        try {
            f = to_prepared_form(g);
        } catch (const Error& err) {
            if (classify(err.code()) != ErrorClass::Undecided) {
                throw;
            }
            if (undecided++ == 0) {
                first_undecided = label + ": " + err.what();
            }
            return;
        }
        const FormCheck c = check_prepared_form(f);
        ++forms;
        if (!c.ok() && bad++ == 0) {
            first_bad = label + ": " + c.detail;
        }
    }
};

bool report(int n, bool pass, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", n, detail.c_str());
    std::fflush(stdout);
    return pass;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

// ---------------------------------------------------------------------------

bool closure_suite(const CorpusConfig& cfg, FormTally& forms) {
    const auto t0 = Clock::now();
    CorpusGenerator gen(cfg, cfg.seed);
    const auto corpus = gen.generate(200);
    std::size_t match = 0, mismatch = 0, undecided = 0, too_deep = 0;
    std::string first_mismatch;
    for (const auto& e : corpus) {
        if (cexpr_depth(e) > 5 || e.log_factor_count() > 3) {
            ++too_deep;
        }
        const ClosureReport r = closure_check(e, 12);
        switch (r.status) {
            case ClosureReport::Status::Match: ++match; break;
            case ClosureReport::Status::Undecided: ++undecided; break;
            case ClosureReport::Status::Mismatch:
                if (mismatch++ == 0) {
                    first_mismatch = print_canonical(e);
                }
                break;
        }
        try {
            forms.add(prepare_constructible(e), print_canonical(e));
            forms.add(prepare_constructible(derivative_symbolic(e)), "d/dy " + print_canonical(e));
        } catch (const Error&) {
            // undecided expansions are already counted by the closure check
        }
    }
    const double elapsed = seconds_since(t0);
    const double rate = corpus.empty() ? 1.0 : static_cast<double>(undecided) / static_cast<double>(corpus.size());
    const bool pass = corpus.size() >= 200 && too_deep == 0 && mismatch == 0 && rate < 0.05 && elapsed < 60.0;
    std::string detail = std::to_string(corpus.size()) + " expressions, " + std::to_string(match) + " match, " +
                         std::to_string(mismatch) + " mismatch, " + std::to_string(undecided) + " undecided (" +
                         fmt(100 * rate) + "%), " + fmt(elapsed) + " s";
    if (too_deep > 0) {
        detail += ", " + std::to_string(too_deep) + " outside depth/log limits";
    }
    if (!first_mismatch.empty()) {
        detail += ", first mismatch: " + first_mismatch;
    }
    return report(1, pass, detail);
}

// ---------------------------------------------------------------------------

// First exponent with a nonzero coefficient, if found within the budget.
std::optional<Rational> leading_exponent(const GridSeries& g) {
    const auto head = g.truncate(1);
    if (head.empty()) {
        return std::nullopt;
    }
    return head.front().p;
}

bool limit_suite(const CorpusConfig& cfg, FormTally& forms) {
    const auto t0 = Clock::now();
    // Finite cases E = C + y^k * B, where C is a drawn constant (the known
    // answer) and k pushes the y-dependent part down to order y^3 so the
    // probe at 1e-6 can resolve the limit to the required relative accuracy.
    CorpusGenerator gen(cfg, cfg.seed + 1);
    std::size_t finite_cases = 0, finite_ok = 0, exact_ok = 0;
    std::string first_bad;
    for (int attempt = 0; attempt < 400 && finite_cases < 100; ++attempt) {
        auto b = gen.next();
        if (!b) {
            break;
        }
        const Rational r0 = gen.rational();
        const Rational r1 = gen.rational();
        const Rational q = gen.positive_rational() + Rational(1, 2);
        CExpr c = CExpr::from_sub(sub_rational(r0)) + CExpr({CTerm{sub_rational(r1), {sub_rational(q)}}});
        Rational k(0);
        try {
            const GridSeries gb = prepare_constructible(*b);
            if (auto p = leading_exponent(gb)) {
                const Rational need = Rational(3) - *p;
                k = need > 0 ? Rational(numer(need) / denom(need) + (is_integer(need) ? 0 : 1)) : Rational(0);
            }
        } catch (const Error&) {
            continue;
        }
        const CExpr e = c + CExpr::from_sub(sub_pow(sub_var(), k)) * *b;
        if (cexpr_depth(e) > 8) {
            continue;
        }
        const LimitResult lim = limit_of_expr(e);
        if (!lim.is_finite()) {
            continue;
        }
        ++finite_cases;
        forms.add(prepare_constructible(e), print_canonical(e));
        const Constant expected = Constant(r0) + Constant(r1) * log_of_rational(q);
        if (lim.value() == expected) {
            ++exact_ok;
        }
        const Interval exact = lim.value().eval(128);
        const ProbeReport probe = probe_limit(e, default_probe_schedule(), 128);
        bool ok = false;
        if (probe.trend == Trend::ConvergingTo && probe.limit && probe.points.back().value) {
            const double mid = exact.midpoint();
            const double at_end = probe.points.back().value->midpoint();
            const double rel = std::fabs(at_end - mid) / std::max(std::fabs(mid), 1.0);
            ok = exact.intersects(*probe.limit) && rel <= 1e-6;
        }
        if (ok) {
            ++finite_ok;
        } else if (first_bad.empty()) {
            first_bad = print_canonical(e) + " (probe " + to_string(probe.trend) + ")";
        }
    }

    // Divergent cases straight from the corpus.
    CorpusGenerator dgen(cfg, cfg.seed + 2);
    std::size_t divergent = 0, decided = 0, sign_ok = 0;
    for (int attempt = 0; attempt < 400 && divergent < 30; ++attempt) {
        auto e = dgen.next();
        if (!e) {
            break;
        }
        const LimitResult lim = limit_of_expr(*e);
        if (lim.kind() != LimitResult::Kind::PlusInfinity && lim.kind() != LimitResult::Kind::MinusInfinity) {
            continue;
        }
        ++divergent;
        forms.add(prepare_constructible(*e), print_canonical(*e));
        const ProbeReport probe = probe_limit(*e, deep_probe_schedule(), 128);
        if (probe.trend == Trend::Inconclusive) {
            continue;
        }
        ++decided;
        const bool plus = lim.kind() == LimitResult::Kind::PlusInfinity;
        if ((plus && probe.trend == Trend::DivergingPlus) || (!plus && probe.trend == Trend::DivergingMinus)) {
            ++sign_ok;
        } else if (first_bad.empty()) {
            first_bad = print_canonical(*e) + " symbolic " + lim.str() + ", probe " + to_string(probe.trend);
        }
    }
    const bool pass = finite_cases >= 100 && finite_ok == finite_cases && exact_ok == finite_cases &&
                      divergent >= 20 && decided >= 20 && sign_ok == decided;
    std::string detail = std::to_string(finite_ok) + "/" + std::to_string(finite_cases) +
                         " finite limits agree with the probe (" + std::to_string(exact_ok) +
                         " equal the constructed value), " + std::to_string(sign_ok) + "/" + std::to_string(decided) +
                         " decided divergent signs match (" + std::to_string(divergent) + " divergent), " +
                         fmt(seconds_since(t0)) + " s";
    if (!first_bad.empty()) {
        detail += ", first failure: " + first_bad;
    }
    return report(2, pass, detail);
}

// ---------------------------------------------------------------------------

bool pipeline_suite(const CorpusConfig& cfg, FormTally& forms) {
    const auto t0 = Clock::now();
    const std::vector<Rational> points{Rational(1, 4), Rational(1, 3), Rational(1, 2), Rational(2, 3)};
    CorpusGenerator gen(cfg, cfg.seed + 3);
    std::size_t pairs = 0, exact_ok = 0, numeric_ok = 0, skipped = 0, undecided = 0;
    std::string first_bad;
    for (int attempt = 0; attempt < 400 && pairs < 60; ++attempt) {
        auto e = gen.next();
        if (!e) {
            break;
        }
        const Rational& t = points[static_cast<std::size_t>(attempt) % points.size()];
        LimitResult quotient = LimitResult::undecided("");
        LimitResult symbolic = LimitResult::undecided("");
        try {
            quotient = difference_quotient_derivative(*e, t);
            symbolic = value_at(derivative_symbolic(*e), t);
            forms.add(prepare_constructible(shift(*e, t)), print_canonical(*e) + " at " + to_string(t));
        } catch (const Error&) {
            // outside the domain at t, or a radicand that is not a rational power
            ++skipped;
            continue;
        }
        if (quotient.is_undecided() || symbolic.is_undecided()) {
            ++undecided;
            continue;
        }
        ++pairs;
        const bool exact = quotient == symbolic;
        bool numeric = false;
        try {
            const FiniteDifferenceReport fd = finite_difference(*e, t);
            numeric = fd.enclosure && quotient.value().eval(256).intersects(*fd.enclosure);
        } catch (const Error&) {
        }
        exact_ok += exact ? 1 : 0;
        numeric_ok += numeric ? 1 : 0;
        if ((!exact || !numeric) && first_bad.empty()) {
            first_bad = print_canonical(*e) + " at " + to_string(t) + ": quotient " + quotient.str() +
                        ", symbolic " + symbolic.str();
        }
    }
    const bool pass = pairs >= 50 && exact_ok == pairs && numeric_ok == pairs;
    std::string detail = std::to_string(pairs) + " pairs, " + std::to_string(exact_ok) + " exact agreements, " +
                         std::to_string(numeric_ok) + " within the finite-difference bound, " +
                         std::to_string(skipped) + " skipped outside the fragment, " + std::to_string(undecided) +
                         " undecided, " + fmt(seconds_since(t0)) + " s";
    if (!first_bad.empty()) {
        detail += ", first failure: " + first_bad;
    }
    return report(3, pass, detail);
}

// ---------------------------------------------------------------------------

bool form_invariants(const FormTally& forms) {
    std::string detail = std::to_string(forms.forms - forms.bad) + "/" + std::to_string(forms.forms) +
                         " prepared forms satisfy both structural properties";
    if (forms.undecided > 0) {
        detail += ", " + std::to_string(forms.undecided) + (forms.undecided == 1 ? " expansion" : " expansions") + " undecided within the zero budget (first: " +
                  forms.first_undecided + ")";
    }
    if (forms.bad > 0) {
        detail += ", first violation: " + forms.first_bad;
    }
    return report(4, forms.forms > 0 && forms.bad == 0, detail);
}

// ---------------------------------------------------------------------------

PuiseuxSeries random_polynomial(CorpusGenerator& gen, CorpusRng& rng, std::int64_t ram, const Rational& lead_exp,
                                const Rational& lead_coeff) {
    std::vector<std::pair<Rational, Constant>> terms{{lead_exp, Constant(lead_coeff)}};
    const auto extra = rng.between(1, 6);
    for (long i = 0; i < extra; ++i) {
        terms.push_back({lead_exp + Rational(rng.between(1, 8), ram), Constant(gen.rational())});
    }
    return PuiseuxSeries::from_terms(terms);
}

bool coefficients_match(const PuiseuxSeries& s, const Rational& from, std::int64_t ram, std::size_t count,
                        const std::function<Constant(std::size_t)>& expected) {
    for (std::size_t k = 0; k < count; ++k) {
        if (!(s.coefficient(from + Rational(static_cast<long>(k), ram)) == expected(k))) {
            return false;
        }
    }
    return true;
}

bool kernel_suite(const CorpusConfig& cfg) {
    const auto t0 = Clock::now();
    CorpusGenerator gen(cfg, cfg.seed + 4);
    CorpusRng rng(cfg.seed + 5);
    const std::size_t budget = kDefaultZeroBudget;

    std::size_t inverse_ok = 0;
    std::size_t power_ok = 0;
    const std::vector<Rational> bases{Rational(1), Rational(2), Rational(1, 2), Rational(3, 2)};
    for (int i = 0; i < 100; ++i) {
        const std::int64_t ram = rng.between(1, 3);
        const Rational lead_exp(rng.between(-4, 4), ram);
        // a^q needs c^q rational, so the leading coefficient is a sixth power
        const Rational s = bases[rng.below(bases.size())];
        const Rational c = Rational(rng.below(2) == 0 ? 1 : -1) * s * s * s * s * s * s;
        PuiseuxSeries a = random_polynomial(gen, rng, ram, lead_exp, c);
        if (i % 2 == 1) {
            // an infinite series: a polynomial over a unit polynomial
            a = a * inverse(random_polynomial(gen, rng, ram, Rational(0), Rational(1)), budget);
        }
        const PuiseuxSeries one = a * inverse(a, budget);
        if (coefficients_match(one, Rational(0), ram, 32, [](std::size_t k) { return Constant(k == 0 ? 1 : 0); })) {
            ++inverse_ok;
        }
        const PuiseuxSeries pa = c > 0 ? a : -a;
        const Rational q1 = cfg.exponents[rng.below(cfg.exponents.size())];
        const Rational q2 = cfg.exponents[rng.below(cfg.exponents.size())];
        const PuiseuxSeries lhs = power(pa, q1, budget) * power(pa, q2, budget);
        const PuiseuxSeries rhs = power(pa, q1 + q2, budget);
        const std::int64_t grid = detail::checked_lcm(lhs.ramification(), rhs.ramification());
        const Rational from = lead_exp * (q1 + q2);
        if (coefficients_match(lhs, from, grid, 16, [&](std::size_t k) {
                return rhs.coefficient(from + Rational(static_cast<long>(k), grid));
            })) {
            ++power_ok;
        }
    }

    // Mercator and binomial series against closed-form coefficients and
    // against interval evaluation of the expression.
    std::size_t expansions = 0, closed_form_ok = 0, numeric_ok = 0;
    const std::vector<Rational> samples{Rational(1, 10), Rational(1, 100), Rational(1, 1000)};
    for (int i = 0; i < 40; ++i) {
        const Rational c = gen.rational();
        const bool mercator = i % 2 == 0;
        const Rational q = cfg.exponents[rng.below(cfg.exponents.size())];
        const std::string text = mercator ? "log(1 + " + to_string(c) + "*y)"
                                          : "(1 + " + to_string(c) + "*y)^(" + to_string(q) + ")";
        const CExpr e = parse_cexpr(text);
        const GridSeries g = prepare_constructible(e);
        ++expansions;
        bool exact = true;
        Rational binom(1);
        Rational ck(1);
        for (long k = 0; k < 12; ++k) {
            Rational want;
            if (mercator) {
                want = k == 0 ? Rational(0) : (k % 2 == 1 ? ck : Rational(-ck)) / k;
            } else {
                want = binom * ck;
                binom = binom * (q - k) / (k + 1);
            }
            exact = exact && g.coefficient(Rational(k), 0) == Constant(want);
            ck *= c;
        }
        closed_form_ok += exact ? 1 : 0;
        const CrosscheckReport cc = crosscheck_series(e, g, 8, samples, 128);
        numeric_ok += cc.consistent ? 1 : 0;
    }

    const bool pass = inverse_ok == 100 && power_ok == 100 && closed_form_ok == expansions && numeric_ok == expansions;
    return report(5, pass,
                  std::to_string(inverse_ok) + "/100 a*inverse(a) = 1 through 32 terms, " + std::to_string(power_ok) +
                      "/100 a^q1*a^q2 = a^(q1+q2) through 16 terms, " + std::to_string(closed_form_ok) + "/" +
                      std::to_string(expansions) + " Mercator/binomial expansions exact, " +
                      std::to_string(numeric_ok) + "/" + std::to_string(expansions) +
                      " consistent with the first omitted order, " + fmt(seconds_since(t0)) + " s");
}

// ---------------------------------------------------------------------------

bool conventions() {
    const bool empty_grid = limit_at_zero(GridSeries{}) == LimitResult::finite(Constant{});
    const bool empty_expr = limit_of_expr(CExpr{}) == LimitResult::finite(Constant{});
    const bool empty_form = to_prepared_form(GridSeries{}).terms.empty();
    const CExpr ylogy = parse_cexpr("y*log(y)");
    const GridSeries g = prepare_constructible(ylogy);
    // the only term sits at p = 1 > 0 and is discarded by the limit
    const auto terms = g.truncate(4);
    const bool discard_shape = terms.size() == 1 && terms[0].p == 1 && terms[0].l == 1 && terms[0].c == Constant(-1);
    const bool discard = limit_of_expr(ylogy) == LimitResult::finite(Constant{});
    const bool pass = empty_grid && empty_expr && empty_form && discard_shape && discard;
    return report(6, pass,
                  std::string("empty form -> ") + (empty_grid && empty_expr ? "Finite(0)" : "wrong") +
                      ", lim y*log(y) = " + limit_of_expr(ylogy).str() +
                      (discard_shape ? " from the single discarded term -1*y*ell" : " (unexpected grid)"));
}

}  // namespace

int main(int argc, char** argv) {
    const std::string path = argc > 1 ? argv[1] : CFN_CORPUS_CONFIG_PATH;
    const CorpusConfig cfg = CorpusConfig::load(path);
    FormTally forms;
    bool ok = true;
    ok &= closure_suite(cfg, forms);
    ok &= limit_suite(cfg, forms);
    ok &= pipeline_suite(cfg, forms);
    ok &= form_invariants(forms);
    ok &= kernel_suite(cfg);
    ok &= conventions();
    return ok ? 0 : 1;
}
