#ifndef ENDCYCLE_CERTIFICATE_HPP
#define ENDCYCLE_CERTIFICATE_HPP

// JSON form of membership certificates. Field names are listed in
// docs/FORMATS.md.

#include <cstdio>
#include <string>

#include "json.hpp"

#include "cycle_space.hpp"

namespace endcycle {

using Json = nlohmann::json;

namespace detail {

inline text::Token json_token(const std::string& s) { return text::Token{s, 0, 0}; }

inline Json edges_json(const Graph& g, const std::vector<OrientedEdge>& edges) {
    Json out = Json::array();
    for (const auto& o : edges) out.push_back(g.oriented_name(o));
    return out;
}

inline std::vector<OrientedEdge> edges_from_json(const Graph& g, const Json& j) {
    std::vector<OrientedEdge> out;
    for (const auto& s : j) out.push_back(g.parse_oriented(json_token(s.get<std::string>())));
    return out;
}

inline Json vertices_json(const Graph& g, const std::vector<VertexId>& vs) {
    Json out = Json::array();
    for (const auto& v : vs) out.push_back(g.vertex_name(v));
    return out;
}

inline std::vector<VertexId> vertices_from_json(const Graph& g, const Json& j) {
    std::vector<VertexId> out;
    for (const auto& s : j) out.push_back(g.parse_vertex(json_token(s.get<std::string>())));
    return out;
}

inline Json ray_json(const Graph& g, const RayDescriptor& r) {
    return Json{{"start", g.vertex_name(r.start)}, {"initial", edges_json(g, r.initial)}, {"period", edges_json(g, r.period)}};
}

inline RayDescriptor ray_from_json(const Graph& g, const Json& j) {
    return RayDescriptor{g.parse_vertex(json_token(j.at("start").get<std::string>())), edges_from_json(g, j.at("initial")),
                         edges_from_json(g, j.at("period"))};
}

inline Json range_json(const ShiftRange& r) {
    return Json{{"from", r.lo ? Json(*r.lo) : Json(nullptr)}, {"to", r.hi ? Json(*r.hi) : Json(nullptr)}};
}

inline ShiftRange range_from_json(const Json& j) {
    ShiftRange r;
    if (!j.at("from").is_null()) r.lo = j.at("from").get<Index>();
    if (!j.at("to").is_null()) r.hi = j.at("to").get<Index>();
    return r;
}

}  // namespace detail

/// `end(+,0,1)`.
inline EndId parse_end(const std::string& s) {
    EndId e;
    char sign = 0;
    long long q = 0, res = 0;
    char tail = 0;
    if (std::sscanf(s.c_str(), "end(%c,%lld,%lld%c", &sign, &q, &res, &tail) != 4 || tail != ')' ||
        (sign != '+' && sign != '-') || s.back() != ')')
        throw Error(ErrorKind::ParseError, "malformed end name '" + s + "'");
    e.direction = sign == '+' ? 1 : -1;
    e.component = static_cast<int>(q);
    e.residue = res;
    return e;
}

inline Json cut_to_json(const Graph& g, const OrientedCut& cut) {
    Json j;
    switch (cut.kind) {
        case OrientedCut::Kind::FiniteSet:
            j["kind"] = "finite";
            j["vertices"] = detail::vertices_json(g, cut.vertices);
            break;
        case OrientedCut::Kind::HalfSpaces: {
            j["kind"] = "half-spaces";
            Json hs = Json::array();
            for (const auto& h : cut.half_spaces) hs.push_back(Json{{"end", h.end.name()}, {"threshold", h.threshold}});
            j["half_spaces"] = hs;
            j["delta"] = detail::vertices_json(g, cut.vertices);
            break;
        }
        case OrientedCut::Kind::VertexClasses: {
            j["kind"] = "vertex-classes";
            Json cs = Json::array();
            for (int c : cut.classes) cs.push_back(g.vertex_classes()[c].name);
            j["classes"] = cs;
            break;
        }
    }
    try {
        j["edges"] = detail::edges_json(g, cut_edges(g, cut));
    } catch (const Error&) {
    }
    return j;
}

inline OrientedCut cut_from_json(const Graph& g, const Json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "finite") return OrientedCut::finite(detail::vertices_from_json(g, j.at("vertices")));
    if (kind == "half-spaces") {
        std::vector<HalfSpace> hs;
        for (const auto& h : j.at("half_spaces"))
            hs.push_back(HalfSpace{parse_end(h.at("end").get<std::string>()), h.at("threshold").get<Index>()});
        return OrientedCut::half_spaces_with(hs, detail::vertices_from_json(g, j.at("delta")));
    }
    if (kind == "vertex-classes") {
        std::vector<int> cs;
        for (const auto& c : j.at("classes")) {
            auto cls = g.find_vertex_class(c.get<std::string>());
            if (!cls) throw Error(ErrorKind::UnknownVertexClass, "unknown vertex class " + c.get<std::string>());
            cs.push_back(*cls);
        }
        return OrientedCut::of_classes(cs);
    }
    throw Error(ErrorKind::ParseError, "unknown cut kind '" + kind + "'");
}

inline Json circle_to_json(const Graph& g, Value k, const Circle& c) {
    if (const auto* f = std::get_if<FiniteCircuit>(&c))
        return Json{{"kind", "circuit"}, {"coefficient", k}, {"edges", detail::edges_json(g, f->edges)}};
    const auto& d = std::get<DoubleRayCircle>(c);
    return Json{{"kind", "double-ray"},
                {"coefficient", k},
                {"end", end_of_ray(g, d.outbound).name()},
                {"inbound", detail::ray_json(g, d.inbound)},
                {"path", detail::edges_json(g, d.path)},
                {"outbound", detail::ray_json(g, d.outbound)}};
}

inline Json result_to_json(const Graph& g, const MembershipResult& r) {
    Json j;
    j["graph"] = g.name();
    if (r.member()) {
        j["verdict"] = "member";
        Json circles = Json::array();
        for (const auto& t : r.decomposition().circles) circles.push_back(circle_to_json(g, t.coefficient, t.circle));
        for (const auto& f : r.decomposition().families)
            circles.push_back(Json{{"kind", "circuit-family"},
                                   {"coefficient", f.coefficient},
                                   {"edges", detail::edges_json(g, f.circuit.edges)},
                                   {"range", detail::range_json(f.range)}});
        j["circles"] = circles;
    } else {
        j["verdict"] = "non-member";
        j["cut"] = cut_to_json(g, r.violation().cut);
        j["sum"] = r.violation().sum;
    }
    return j;
}

/// Inverse of result_to_json. Throws ParseError on unknown shapes.
inline MembershipResult result_from_json(const Graph& g, const Json& j) {
    try {
        const auto verdict = j.at("verdict").get<std::string>();
        if (verdict == "non-member")
            return MembershipResult{NonMemberCertificate{cut_from_json(g, j.at("cut")), j.at("sum").get<Value>()}};
        if (verdict != "member") throw Error(ErrorKind::ParseError, "unknown verdict '" + verdict + "'");
        CircleDecomposition dec;
        for (const auto& c : j.at("circles")) {
            const auto kind = c.at("kind").get<std::string>();
            Value k = c.at("coefficient").get<Value>();
            if (kind == "circuit") {
                dec.circles.push_back({k, FiniteCircuit{detail::edges_from_json(g, c.at("edges"))}});
            } else if (kind == "circuit-family") {
                dec.families.push_back(
                    {k, FiniteCircuit{detail::edges_from_json(g, c.at("edges"))}, detail::range_from_json(c.at("range"))});
            } else if (kind == "double-ray") {
                dec.circles.push_back({k, DoubleRayCircle{detail::ray_from_json(g, c.at("inbound")),
                                                          detail::edges_from_json(g, c.at("path")),
                                                          detail::ray_from_json(g, c.at("outbound"))}});
            } else {
                throw Error(ErrorKind::ParseError, "unknown circle kind '" + kind + "'");
            }
        }
        return MembershipResult{dec};
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("malformed certificate: ") + e.what());
    }
}

}  // namespace endcycle

#endif
