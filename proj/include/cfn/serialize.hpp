#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cfn/asymptotics.hpp"
#include "cfn/calculus.hpp"
#include "cfn/expr.hpp"
#include "cfn/grid.hpp"
#include "cfn/numeric.hpp"
#include "cfn/prepare.hpp"
#include "cfn/series.hpp"
#include "cfn/validate.hpp"

namespace cfn {

using Json = nlohmann::ordered_json;

inline Json to_json(const Constant& c) { return c.str(); }

inline Json interval_json(const Interval& v, int digits = 20) {
    return Json{{"lo", v.lower()}, {"hi", v.upper()}, {"text", v.str(digits)}};
}

/// [[exponent, constant], ...]
inline Json to_json(const std::vector<SeriesTerm>& terms) {
    Json out = Json::array();
    for (const auto& t : terms) {
        out.push_back(Json::array({to_string(t.exponent), t.coefficient.str()}));
    }
    return out;
}

inline Json to_json(const std::vector<GridTerm>& terms) {
    Json out = Json::array();
    for (const auto& t : terms) {
        out.push_back(Json{{"p", to_string(t.p)}, {"l", t.l}, {"c", t.c.str()}});
    }
    return out;
}

inline Json to_json(const LimitResult& r) {
    switch (r.kind()) {
        case LimitResult::Kind::Finite: return Json{{"kind", "finite"}, {"value", r.value().str()}};
        case LimitResult::Kind::PlusInfinity: return Json{{"kind", "+inf"}};
        case LimitResult::Kind::MinusInfinity: return Json{{"kind", "-inf"}};
        case LimitResult::Kind::Undecided: return Json{{"kind", "undecided"}, {"reason", r.reason()}};
    }
    return Json{};
}

inline Json to_json(const PreparedForm& f, std::size_t unit_terms = 6) {
    Json out = Json::array();
    for (const auto& t : f.terms) {
        out.push_back(Json{{"a", t.a.str()},
                           {"p", to_string(t.p)},
                           {"l", t.l},
                           {"unit_truncation", to_json(t.u.series().truncate(unit_terms))}});
    }
    return out;
}

inline Json to_json(const ClosureReport& r) {
    Json out{{"status", to_string(r.status)}, {"checked_terms", r.checked_terms}};
    if (r.status == ClosureReport::Status::Mismatch) {
        out["first_difference"] = Json{{"p", to_string(r.p)},
                                       {"l", r.l},
                                       {"symbolic", r.symbolic.str()},
                                       {"termwise", r.termwise.str()}};
    }
    if (!r.reason.empty()) {
        out["reason"] = r.reason;
    }
    return out;
}

inline Json to_json(const SubExpr& e) {
    switch (e.kind()) {
        case SubKind::Rational: return Json{{"op", "rational"}, {"value", to_string(e.value())}};
        case SubKind::Var: return Json{{"op", "y"}};
        case SubKind::Add: return Json{{"op", "add"}, {"args", Json::array({to_json(e.lhs()), to_json(e.rhs())})}};
        case SubKind::Sub: return Json{{"op", "sub"}, {"args", Json::array({to_json(e.lhs()), to_json(e.rhs())})}};
        case SubKind::Mul: return Json{{"op", "mul"}, {"args", Json::array({to_json(e.lhs()), to_json(e.rhs())})}};
        case SubKind::Div: return Json{{"op", "div"}, {"args", Json::array({to_json(e.lhs()), to_json(e.rhs())})}};
        case SubKind::Pow:
            return Json{{"op", "pow"}, {"base", to_json(e.base())}, {"exponent", to_string(e.exponent())}};
    }
    return Json{};
}

inline Json to_json(const CExpr& e) {
    Json terms = Json::array();
    for (const auto& t : e.terms()) {
        Json logs = Json::array();
        for (const auto& g : t.logs) {
            logs.push_back(to_json(g));
        }
        terms.push_back(Json{{"factor", to_json(t.factor)}, {"logs", logs}});
    }
    return Json{{"terms", terms}};
}

inline Json to_json(const ProbeReport& r) {
    Json pts = Json::array();
    for (const auto& p : r.points) {
        Json j{{"y", to_string(p.y)}};
        if (p.value) {
            j["value"] = interval_json(*p.value, 17);
            j["precision"] = p.precision;
        } else {
            j["error"] = p.error;
        }
        pts.push_back(std::move(j));
    }
    Json out{{"points", pts}, {"trend", to_string(r.trend)}};
    if (r.limit) {
        out["limit"] = interval_json(*r.limit, 17);
    }
    return out;
}

inline Json to_json(const FiniteDifferenceReport& r) {
    Json out{{"estimate", r.estimate}, {"error_bound", r.error_bound}};
    Json steps = Json::array();
    for (const auto& h : r.steps) {
        steps.push_back(to_string(h));
    }
    out["steps"] = steps;
    return out;
}

inline Json to_json(const CrosscheckReport& r) {
    Json samples = Json::array();
    for (const auto& s : r.samples) {
        samples.push_back(Json{{"y", to_string(s.y)},
                               {"deviation", s.deviation},
                               {"relative_deviation", s.relative_deviation},
                               {"next_order", s.next_order},
                               {"consistent", s.consistent}});
    }
    return Json{{"terms_used", r.terms_used},
                {"max_deviation", r.max_deviation},
                {"max_relative_deviation", r.max_relative_deviation},
                {"consistent", r.consistent},
                {"samples", samples}};
}

inline Json to_json(const ValidationReport& r) {
    auto issues = [](const std::vector<ValidationIssue>& v) {
        Json out = Json::array();
        for (const auto& i : v) {
            out.push_back(Json{{"code", std::string(to_string(i.code))}, {"subject", i.subject}, {"message", i.message}});
        }
        return out;
    };
    Json out{{"status", to_string(r.status)}, {"failures", issues(r.failures)}, {"undecided", issues(r.undecided)}};
    out["delta"] = r.delta ? Json(to_string(*r.delta)) : Json(nullptr);
    return out;
}

inline Json error_json(const Error& e) {
    Json out{{"error", std::string(to_string(e.code()))}, {"message", e.detail()}};
    if (e.span()) {
        out["line"] = e.span()->line;
        out["column"] = e.span()->column;
    }
    return out;
}

}  // namespace cfn
