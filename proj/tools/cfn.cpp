// cfn: command-line front end for the constructible-function engine.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfn/cfn.hpp"
#include "cfn/corpus.hpp"
#include "cfn/serialize.hpp"

namespace {

using namespace cfn;

enum Exit : int { kOk = 0, kUsage = 1, kDomain = 2, kUndecided = 3, kInternal = 4 };

struct RunConfig {
    std::size_t zero_budget = kDefaultZeroBudget;
    std::int64_t ramification_cap = 64;
    unsigned precision = kDefaultPrecision;
    std::size_t K = 12;
    bool json = false;
    bool probe = false;
    std::uint64_t seed = 1;
    std::string corpus_config = CFN_DEFAULT_CORPUS_CONFIG;
};

int exit_code_for(const Error& e) {
    switch (classify(e.code())) {
        case ErrorClass::Grammar: return kUsage;
        case ErrorClass::Domain: return kDomain;
        case ErrorClass::Undecided: return kUndecided;
    }
    return kInternal;
}

void print_error(const Error& e, const std::string& source, bool json) {
    if (json) {
        std::cout << error_json(e).dump() << "\n";
        return;
    }
    std::cerr << "error: " << e.what() << "\n";
    if (!e.span() || source.find('\n') != std::string::npos) {
        return;
    }
    std::cerr << "  " << source << "\n  " << std::string(e.span()->column - 1, ' ') << "^\n";
}

std::string grid_term_text(const GridTerm& t) {
    std::string out = t.c.str();
    if (t.p != 0) {
        out += " * y^" + (t.p < 0 || !is_integer(t.p) ? "(" + to_string(t.p) + ")" : to_string(t.p));
    }
    if (t.l == 1) {
        out += " * ell";
    } else if (t.l > 1) {
        out += " * ell^" + std::to_string(t.l);
    }
    return out;
}

std::string series_text(const std::vector<SeriesTerm>& terms) {
    std::string out;
    for (const auto& t : terms) {
        if (!out.empty()) {
            out += " + ";
        }
        out += "(" + t.coefficient.str() + ")";
        if (t.exponent != 0) {
            out += "*y^(" + to_string(t.exponent) + ")";
        }
    }
    return out.empty() ? "0" : out;
}

std::string limit_text(const LimitResult& r) {
    if (r.is_finite()) {
        return "finite " + r.value().str();
    }
    return r.str();
}

int cmd_prepare(const std::string& text, const RunConfig& cfg) {
    const CExpr e = parse_cexpr(text);
    const ValidationReport rep = validate(e, cfg.zero_budget);
    if (rep.status != ValidationReport::Status::Valid) {
        const auto& issue = rep.failures.empty() ? rep.undecided.front() : rep.failures.front();
        throw Error(issue.code, issue.subject + ": " + issue.message);
    }
    Preparer prep(cfg.zero_budget);
    const GridSeries g = prep.prepare(e);
    const PreparedForm form = to_prepared_form(g, std::nullopt, cfg.zero_budget);
    const auto head = g.truncate(cfg.K);
    if (cfg.json) {
        Json out{{"expression", print_canonical(e)}, {"grid", to_json(head)}, {"form", to_json(form)}};
        std::cout << out.dump() << "\n";
        return kOk;
    }
    std::cout << "expression: " << print_canonical(e) << "\n";
    if (form.terms.empty()) {
        std::cout << "form: 0\n";
        return kOk;
    }
    std::cout << "grid (first " << head.size() << " terms, ell = -log y):\n";
    for (const auto& t : head) {
        std::cout << "  " << grid_term_text(t) << "\n";
    }
    std::cout << "form:\n";
    for (const auto& t : form.terms) {
        std::cout << "  (" << t.a.str() << ", " << to_string(t.p) << ", " << t.l << ")  u = "
                  << series_text(t.u.series().truncate(4)) << (t.u.is_one() ? "" : " + ...") << "\n";
    }
    return kOk;
}

int cmd_limit(const std::string& text, const RunConfig& cfg) {
    const CExpr e = parse_cexpr(text);
    const LimitResult r = limit_of_expr(e, cfg.zero_budget);
    std::optional<ProbeReport> probe;
    if (cfg.probe) {
        const auto schedule =
            r.is_finite() || r.is_undecided() ? default_probe_schedule() : deep_probe_schedule();
        probe = probe_limit(e, schedule, cfg.precision);
    }
    if (cfg.json) {
        Json out{{"expression", print_canonical(e)}, {"limit", to_json(r)}};
        if (probe) {
            out["probe"] = to_json(*probe);
        }
        std::cout << out.dump() << "\n";
    } else {
        std::cout << limit_text(r) << "\n";
        if (probe) {
            std::cout << "probe: " << to_string(probe->trend);
            if (probe->limit) {
                std::cout << " " << probe->limit->str(17);
            }
            std::cout << "\n";
        }
    }
    return r.is_undecided() ? kUndecided : kOk;
}

int cmd_diff(const std::string& text, const std::optional<std::string>& at, const RunConfig& cfg) {
    const CExpr e = parse_cexpr(text);
    const CExpr d = derivative_symbolic(e);
    if (!at) {
        if (cfg.json) {
            std::cout << Json{{"expression", print_canonical(e)}, {"derivative", print_canonical(d)}}.dump() << "\n";
        } else {
            std::cout << print_canonical(d) << "\n";
        }
        return kOk;
    }
    const Rational t0 = parse_rational_value(*at);
    const LimitResult quotient = difference_quotient_derivative(e, t0, cfg.zero_budget);
    const LimitResult symbolic = value_at(d, t0, cfg.zero_budget);
    const bool decided = !quotient.is_undecided() && !symbolic.is_undecided();
    const bool agree = decided && quotient == symbolic;
    if (cfg.json) {
        std::cout << Json{{"expression", print_canonical(e)},
                          {"derivative", print_canonical(d)},
                          {"at", to_string(t0)},
                          {"difference_quotient", to_json(quotient)},
                          {"symbolic", to_json(symbolic)},
                          {"agree", decided ? Json(agree) : Json(nullptr)}}
                         .dump()
                  << "\n";
    } else {
        std::cout << print_canonical(d) << "\n";
        std::cout << "difference quotient at " << to_string(t0) << ": " << limit_text(quotient) << "\n";
        std::cout << "symbolic derivative at " << to_string(t0) << ": " << limit_text(symbolic) << "\n";
        if (decided && !agree) {
            std::cout << "DISAGREEMENT: this is a bug\n";
        }
    }
    if (!decided) {
        return kUndecided;
    }
    return agree ? kOk : kInternal;
}

int cmd_eval(const std::string& text, const std::string& at, const RunConfig& cfg) {
    const CExpr e = parse_cexpr(text);
    const Rational y = parse_rational_value(at);
    if (y <= 0) {
        throw Error(ErrorCode::PointOutsideDomain, "evaluation point must be positive");
    }
    const Interval v = eval_interval(e, y, cfg.precision);
    if (cfg.json) {
        std::cout << Json{{"expression", print_canonical(e)}, {"at", to_string(y)}, {"value", interval_json(v)}}.dump()
                  << "\n";
    } else {
        std::cout << v.str(20) << "\n";
    }
    return kOk;
}

int cmd_check(const std::string& text, const RunConfig& cfg) {
    const CExpr e = parse_cexpr(text);
    const ClosureReport r = closure_check(e, cfg.K, cfg.zero_budget);
    if (cfg.json) {
        Json out{{"expression", print_canonical(e)}};
        out.update(to_json(r));
        std::cout << out.dump() << "\n";
    } else {
        std::cout << to_string(r.status) << " (" << r.checked_terms << " terms compared)\n";
        if (r.status == ClosureReport::Status::Mismatch) {
            std::cout << "first difference at y^(" << to_string(r.p) << ") ell^" << r.l << ": symbolic "
                      << r.symbolic.str() << ", termwise " << r.termwise.str() << "\n";
        } else if (!r.reason.empty()) {
            std::cout << r.reason << "\n";
        }
    }
    switch (r.status) {
        case ClosureReport::Status::Match: return kOk;
        case ClosureReport::Status::Undecided: return kUndecided;
        case ClosureReport::Status::Mismatch: return kInternal;
    }
    return kInternal;
}

int cmd_validate(const std::string& text, const RunConfig& cfg) {
    const CExpr e = parse_cexpr(text);
    const ValidationReport r = validate(e, cfg.zero_budget);
    if (cfg.json) {
        Json out{{"expression", print_canonical(e)}};
        out.update(to_json(r));
        std::cout << out.dump() << "\n";
    } else {
        std::cout << to_string(r.status);
        if (r.delta) {
            std::cout << ", delta = " << to_string(*r.delta);
        }
        std::cout << "\n";
        for (const auto& i : r.failures) {
            std::cout << "  " << to_string(i.code) << " in " << i.subject << ": " << i.message << "\n";
        }
        for (const auto& i : r.undecided) {
            std::cout << "  undecided " << to_string(i.code) << " in " << i.subject << ": " << i.message << "\n";
        }
    }
    switch (r.status) {
        case ValidationReport::Status::Valid: return kOk;
        case ValidationReport::Status::Invalid:
            return exit_code_for(Error(r.failures.front().code, ""));
        case ValidationReport::Status::Undecided: return kUndecided;
    }
    return kInternal;
}

struct SelfcheckCounts {
    std::size_t match = 0, mismatch = 0, undecided = 0, trivial = 0;
    std::size_t limit_agree = 0, limit_disagree = 0, limit_skipped = 0;
    std::size_t crosscheck_ok = 0, crosscheck_fail = 0, crosscheck_skipped = 0;
};

int cmd_selfcheck(std::size_t size, const RunConfig& cfg) {
    CorpusConfig corpus_cfg = CorpusConfig::load(cfg.corpus_config);
    CorpusGenerator gen(corpus_cfg, cfg.seed);
    const auto corpus = gen.generate(size, cfg.zero_budget);
    SelfcheckCounts n;
    Json items = Json::array();
    const std::vector<Rational> samples{Rational(1, 100), Rational(1, 1000)};
    for (const auto& e : corpus) {
        Json item{{"expression", print_canonical(e)}};
        const ClosureReport closure = closure_check(e, cfg.K, cfg.zero_budget);
        item["closure"] = to_json(closure);
        if (e.is_zero()) {
            ++n.trivial;
        }
        switch (closure.status) {
            case ClosureReport::Status::Match: ++n.match; break;
            case ClosureReport::Status::Mismatch: ++n.mismatch; break;
            case ClosureReport::Status::Undecided: ++n.undecided; break;
        }
        const LimitResult lim = limit_of_expr(e, cfg.zero_budget);
        item["limit"] = to_json(lim);
        // limit versus probe: only finite limits, and only when the probe settles
        if (lim.is_finite()) {
            const ProbeReport probe = probe_limit(e, default_probe_schedule(), cfg.precision);
            if (probe.trend == Trend::ConvergingTo && probe.limit) {
                const bool ok = lim.value().eval(cfg.precision).intersects(*probe.limit);
                ++(ok ? n.limit_agree : n.limit_disagree);
                item["limit_vs_probe"] = ok ? "agree" : "disagree";
            } else {
                ++n.limit_skipped;
                item["limit_vs_probe"] = "probe inconclusive";
            }
        } else {
            ++n.limit_skipped;
        }
        try {
            const GridSeries g = prepare_constructible(e, cfg.zero_budget);
            const CrosscheckReport cc = crosscheck_series(e, g, cfg.K, samples, cfg.precision);
            ++(cc.consistent ? n.crosscheck_ok : n.crosscheck_fail);
            item["crosscheck"] = cc.consistent ? "consistent" : "inconsistent";
        } catch (const Error& err) {
            ++n.crosscheck_skipped;
            item["crosscheck"] = std::string("skipped: ") + err.what();
        }
        items.push_back(std::move(item));
    }
    const bool failed = n.mismatch > 0 || n.limit_disagree > 0 || n.crosscheck_fail > 0;
    if (cfg.json) {
        Json out{{"corpus_size", corpus.size()},
                 {"seed", cfg.seed},
                 {"config_version", corpus_cfg.version},
                 {"closure", {{"match", n.match}, {"mismatch", n.mismatch}, {"undecided", n.undecided},
                              {"trivial", n.trivial}}},
                 {"limit_vs_probe", {{"agree", n.limit_agree}, {"disagree", n.limit_disagree},
                                     {"skipped", n.limit_skipped}}},
                 {"crosscheck", {{"consistent", n.crosscheck_ok}, {"inconsistent", n.crosscheck_fail},
                                 {"skipped", n.crosscheck_skipped}}},
                 {"items", items},
                 {"ok", !failed}};
        std::cout << out.dump() << "\n";
    } else if (!corpus.empty()) {
        std::cout << n.match << " closure matches, " << n.mismatch << " mismatches, " << n.undecided
                  << " undecided";
        if (n.trivial > 0) {
            std::cout << " (" << n.trivial << " trivial)";
        }
        std::cout << "\n";
        std::cout << "limit vs probe: " << n.limit_agree << " agree, " << n.limit_disagree << " disagree, "
                  << n.limit_skipped << " skipped\n";
        std::cout << "crosscheck: " << n.crosscheck_ok << " consistent, " << n.crosscheck_fail << " inconsistent, "
                  << n.crosscheck_skipped << " skipped\n";
    } else {
        std::cout << "empty corpus\n";
    }
    return failed ? kInternal : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact asymptotics and derivatives of constructible functions at 0+"};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    app.add_option("--budget", cfg.zero_budget, "Zero budget in grid positions")
        ->envname("CFN_BUDGET")
        ->check(CLI::PositiveNumber);
    app.add_option("--ram-cap", cfg.ramification_cap, "Largest allowed exponent denominator")
        ->envname("CFN_RAM_CAP")
        ->check(CLI::PositiveNumber);
    app.add_option("--precision", cfg.precision, "Working precision in bits for numeric output")
        ->envname("CFN_PRECISION")
        ->check(CLI::Range(16u, 1u << 20));
    app.add_option("-K", cfg.K, "Number of grid terms to show or compare")->envname("CFN_K")->check(CLI::PositiveNumber);
    app.add_flag("--json", cfg.json, "Emit JSON")->envname("CFN_JSON");
    app.add_option("--seed", cfg.seed, "Corpus seed")->envname("CFN_SEED");
    app.add_option("--corpus-config", cfg.corpus_config, "Corpus generator config")->envname("CFN_CORPUS_CONFIG");

    std::string expr;
    std::optional<std::string> at;
    std::string eval_at;
    std::size_t size = 100;

    auto* prepare = app.add_subcommand("prepare", "Grid expansion and prepared form");
    prepare->add_option("expr", expr)->required();
    auto* limit = app.add_subcommand("limit", "Limit as y -> 0+");
    limit->add_option("expr", expr)->required();
    limit->add_flag("--probe", cfg.probe, "Attach a numeric probe")->envname("CFN_PROBE");
    auto* diff = app.add_subcommand("diff", "Symbolic derivative, optionally checked at a point");
    diff->add_option("expr", expr)->required();
    diff->add_option("--at", at, "Point t0 > 0 for the difference-quotient check");
    auto* eval = app.add_subcommand("eval", "Interval evaluation at a point");
    eval->add_option("expr", expr)->required();
    eval->add_option("--at", eval_at, "Point y > 0")->required();
    auto* check = app.add_subcommand("check", "Derivative closure check on the grid");
    check->add_option("expr", expr)->required();
    auto* valid = app.add_subcommand("validate", "Domain validation near 0+");
    valid->add_option("expr", expr)->required();
    auto* self = app.add_subcommand("selfcheck", "Run the checks over a seeded corpus");
    self->add_option("--size", size, "Corpus size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    ramification_cap().store(cfg.ramification_cap);
    try {
        if (*prepare) return cmd_prepare(expr, cfg);
        if (*limit) return cmd_limit(expr, cfg);
        if (*diff) return cmd_diff(expr, at, cfg);
        if (*eval) return cmd_eval(expr, eval_at, cfg);
        if (*check) return cmd_check(expr, cfg);
        if (*valid) return cmd_validate(expr, cfg);
        if (*self) return cmd_selfcheck(size, cfg);
    } catch (const Error& e) {
        print_error(e, expr, cfg.json);
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kUsage;
}
