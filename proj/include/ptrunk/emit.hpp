#pragma once

/**
 * @file emit.hpp
 * @brief JSON, DOT and plain-text renderings of trunks, counts and series.
 *        Arbitrary-precision values are written as decimal strings.
 */

#include <json.hpp>

#include <sstream>
#include <string>

#include "ptrunk/solutions.hpp"

namespace ptrunk {

using Json = nlohmann::ordered_json;

inline Json rational_json(const Rational& q) {
    return Json{{"num", q.get_num().get_str()}, {"den", q.get_den().get_str()}};
}

inline Json point_json(const Point& r) {
    Json a = Json::array();
    for (const auto& x : r) a.push_back(x.get_str());
    return a;
}

inline Json certificate_json(const StalkCertificate& c) {
    return Json{{"u", c.u},       {"v", c.v},         {"alpha", c.alpha}, {"u0", c.u0.get_str()},
                {"v0", c.v0.get_str()}, {"m", c.m}, {"orientation", c.swapped ? "y" : "x"}};
}

inline Json trunk_json(const Trunk& T) {
    Json j;
    j["p"] = T.p().value();
    j["n"] = T.nvars();
    j["root_content"] = T.root_content;
    j["max_height"] = T.max_height;
    j["truncated"] = T.truncated;
    const Valuation lvl = T.resolved_level();
    j["resolved_level"] = lvl.is_infinite() ? Json("inf") : Json(lvl.value());
    const auto st = T.stats();
    j["stats"] = {{"interior", st.interior},
                  {"dead_end", st.dead_end},
                  {"hensel_root", st.hensel_root},
                  {"stalk_entry", st.stalk_entry}};
    Json vs = Json::array();
    for (const auto& v : T.vertices) {
        Json o;
        o["id"] = v.index;
        o["parent"] = v.is_root() ? Json(nullptr) : Json(v.parent);
        o["height"] = v.height;
        o["residue"] = point_json(v.residue);
        o["thickness"] = v.thickness;
        o["treetop"] = v.treetop;
        o["status"] = std::string(to_string(v.status));
        o["attached"] = to_string(v.attached);
        o["children"] = v.children;
        if (v.symbolic) {
            if (v.status == VertexStatus::HenselRoot) {
                o["params"] = {{"k0", v.height}, {"phi0", v.treetop}};
            } else if (v.certificate) {
                o["params"] = certificate_json(*v.certificate);
            }
        }
        if (v.stalk_candidate) o["stalk_candidate"] = true;
        vs.push_back(std::move(o));
    }
    j["vertices"] = std::move(vs);
    return j;
}

/// DOT drawing: thickness labels, pruned Hensel trees as a circled H, dead ends marked with the empty set.
inline std::string trunk_dot(const Trunk& T) {
    std::ostringstream os;
    os << "digraph trunk {\n  rankdir=BT;\n  node [shape=circle, fontsize=10];\n";
    for (const auto& v : T.vertices) {
        os << "  v" << v.index << " [";
        if (v.symbolic && v.status == VertexStatus::HenselRoot) {
            os << "label=\"H\", shape=doublecircle";
        } else if (v.symbolic && v.certificate) {
            os << "label=\"S(" << v.certificate->u << "," << v.certificate->v << "," << v.certificate->alpha
               << ")\", shape=box";
        } else if (v.status == VertexStatus::DeadEnd) {
            os << "label=\"" << v.thickness << "\", xlabel=\"∅\"";
        } else if (Trunk::is_frontier(v)) {
            os << "label=\"" << v.thickness << "\", style=dashed";
        } else {
            os << "label=\"" << v.thickness << "\"";
        }
        os << "];\n";
    }
    for (const auto& v : T.vertices) {
        for (std::size_t c : v.children) os << "  v" << v.index << " -> v" << c << ";\n";
    }
    os << "}\n";
    return os.str();
}

inline std::string trunk_text(const Trunk& T) {
    std::ostringstream os;
    os << "trunk p=" << T.p().value() << " n=" << T.nvars() << " vertices=" << T.size()
       << " resolved_level=" << T.resolved_level() << (T.truncated ? " (truncated)" : "") << "\n";
    for (const auto& v : T.vertices) {
        os << std::string(2 * v.height, ' ') << "k=" << v.height << " r=(";
        for (std::size_t i = 0; i < v.residue.size(); ++i) os << (i ? "," : "") << v.residue[i].get_str();
        os << ") t=" << v.thickness << " phi=" << v.treetop << " " << to_string(v.status);
        if (v.certificate) {
            os << " u=" << v.certificate->u << " v=" << v.certificate->v << " alpha=" << v.certificate->alpha;
        }
        os << "\n";
    }
    return os.str();
}

inline Json report_json(const CountReport& r) {
    Json j;
    j["p"] = r.p;
    j["n"] = r.n;
    Json rows = Json::array();
    for (std::size_t e = 0; e < r.counts.size(); ++e) {
        rows.push_back({{"e", e},
                        {"N", r.counts[e].get_str()},
                        {"breakdown",
                         {{"explicit", r.breakdown[e].explicit_part.get_str()},
                          {"hensel", r.breakdown[e].hensel_part.get_str()},
                          {"stalk", r.breakdown[e].stalk_part.get_str()}}}});
    }
    j["counts"] = std::move(rows);
    return j;
}

inline Json series_json(const SeriesTruncation& s) {
    Json a = Json::array();
    for (const auto& c : s.coeffs) a.push_back(rational_json(c));
    return a;
}

inline Json qpoly_json(const QPoly& q) {
    Json a = Json::array();
    for (const auto& c : q.coeffs()) a.push_back(rational_json(c));
    return a;
}

/// Denominator as a product of candidate factors times a constant, when it splits that way.
inline std::optional<std::string> factored_form(const RationalFunction& f, unsigned u, unsigned v, const Prime& p) {
    QPoly rest = f.denominator();
    std::string den;
    const std::vector<std::string> names = {
        p.z().get_str() + " - T",
        ipow(p.z(), 2).get_str() + " - T^" + std::to_string(u),
        ipow(p.z(), 2 * u).get_str() + " - T^" + std::to_string(u * u),
        ipow(p.z(), u + v).get_str() + " - T^" + std::to_string(u * v),
    };
    const auto factors = candidate_factors(u, v, p);
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (factors[i].degree() < 1) continue;
        unsigned mult = 0;
        while (rest.degree() >= factors[i].degree()) {
            auto [q, r] = QPoly::divmod(rest, factors[i]);
            if (!r.is_zero()) break;
            rest = q;
            ++mult;
        }
        if (mult == 0) continue;
        if (!den.empty()) den += "*";
        den += "(" + names[i] + ")";
        if (mult > 1) den += "^" + std::to_string(mult);
    }
    if (rest.degree() != 0) return std::nullopt;
    const QPoly num = (1 / rest[0]) * f.numerator();
    if (den.empty()) return to_string(num);
    return "(" + to_string(num) + ") / (" + den + ")";
}

inline Json rational_function_json(const RationalFunction& f, std::optional<std::string> factored = std::nullopt) {
    Json j;
    j["numerator"] = qpoly_json(f.numerator());
    j["denominator"] = qpoly_json(f.denominator());
    j["text"] = to_string(f);
    if (factored) j["factored"] = *factored;
    return j;
}

inline Json error_json(const Error& e) {
    return Json{{"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}}};
}

}  // namespace ptrunk
