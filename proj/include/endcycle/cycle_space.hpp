#ifndef ENDCYCLE_CYCLE_SPACE_HPP
#define ENDCYCLE_CYCLE_SPACE_HPP

// Membership in the topological cycle space, with certificates both ways:
// a finite oriented cut with non-zero sum, or a thin family of circles whose
// indicator vectors sum to the input.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "edge_space.hpp"
#include "graph.hpp"

namespace endcycle {

// ---------------------------------------------------------------------------
// Oriented cuts

/// Periodic vertices of the end's cover component at cells >= threshold
/// (plus ends) or <= threshold (minus ends).
struct HalfSpace {
    EndId end;
    Index threshold = 0;
    auto operator<=>(const HalfSpace&) const = default;
};

/// The X-side of a cut. FiniteSet: X = vertices. HalfSpaces: X is the union
/// of the half-spaces, symmetric difference with the finite set `vertices`.
/// VertexClasses: every instance of the listed classes (usually infinite).
struct OrientedCut {
    enum class Kind { FiniteSet, HalfSpaces, VertexClasses };
    Kind kind = Kind::FiniteSet;
    std::vector<VertexId> vertices;
    std::vector<HalfSpace> half_spaces;
    std::vector<int> classes;

    static OrientedCut finite(std::vector<VertexId> xs) {
        OrientedCut c;
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        c.vertices = std::move(xs);
        return c;
    }
    static OrientedCut half_spaces_with(std::vector<HalfSpace> hs, std::vector<VertexId> delta = {}) {
        OrientedCut c = finite(std::move(delta));
        c.kind = Kind::HalfSpaces;
        std::sort(hs.begin(), hs.end());
        c.half_spaces = std::move(hs);
        return c;
    }
    static OrientedCut of_classes(std::vector<int> cls) {
        OrientedCut c;
        c.kind = Kind::VertexClasses;
        std::sort(cls.begin(), cls.end());
        c.classes = std::move(cls);
        return c;
    }

    bool operator==(const OrientedCut&) const = default;
};

inline bool in_half_space(const Graph& g, const HalfSpace& h, VertexId v) {
    if (!g.vertex_classes().at(v.cls).periodic) return false;
    auto end = g.end_towards(v, h.end.direction);
    if (!end || *end != h.end) return false;
    return h.end.direction > 0 ? v.cell >= h.threshold : v.cell <= h.threshold;
}

inline bool cut_contains(const Graph& g, const OrientedCut& cut, VertexId v) {
    switch (cut.kind) {
        case OrientedCut::Kind::FiniteSet:
            return std::binary_search(cut.vertices.begin(), cut.vertices.end(), v);
        case OrientedCut::Kind::HalfSpaces: {
            bool in = false;
            for (const auto& h : cut.half_spaces)
                if (in_half_space(g, h, v)) in = true;
            return in != std::binary_search(cut.vertices.begin(), cut.vertices.end(), v);
        }
        case OrientedCut::Kind::VertexClasses:
            return std::binary_search(cut.classes.begin(), cut.classes.end(), v.cls);
    }
    return false;
}

namespace detail {

inline void check_cut_valid(const Graph& g, const OrientedCut& cut) {
    for (const auto& v : cut.vertices) g.require_vertex(v);
    for (const auto& h : cut.half_spaces)
        if (!g.has_end(h.end)) throw Error(ErrorKind::UnknownVertex, "half-space refers to an unknown end");
    for (int c : cut.classes)
        if (c < 0 || c >= static_cast<int>(g.vertex_classes().size()))
            throw Error(ErrorKind::UnknownVertexClass, "cut refers to an unknown vertex class");
}

}  // namespace detail

/// All oriented edges from X to its complement, oriented away from X.
inline std::vector<OrientedEdge> cut_edges(const Graph& g, const OrientedCut& cut) {
    detail::check_cut_valid(g, cut);
    std::set<EdgeId> candidates;
    if (cut.kind == OrientedCut::Kind::VertexClasses) {
        for (int c = 0; c < static_cast<int>(g.edge_classes().size()); ++c) {
            const auto& ec = g.edge_classes()[c];
            bool t = std::binary_search(cut.classes.begin(), cut.classes.end(), ec.tail);
            bool h = std::binary_search(cut.classes.begin(), cut.classes.end(), ec.head);
            if (t == h) continue;
            if (ec.periodic)
                throw Error(ErrorKind::InfiniteCut, "every instance of edge class " + ec.name + " crosses the cut");
            candidates.insert(EdgeId{c, 0});
        }
    } else {
        for (const auto& v : cut.vertices)
            for (const auto& o : g.incident(v)) candidates.insert(o.edge);
        Index d = g.max_offset() + 1;
        for (const auto& h : cut.half_spaces)
            for (const auto& e : g.edges_in_cells(h.threshold - d, h.threshold + d)) candidates.insert(e);
        if (!cut.half_spaces.empty())
            for (const auto& e : g.edges_in_cells(1, 0)) candidates.insert(e);
    }
    std::vector<OrientedEdge> out;
    for (const auto& e : candidates) {
        bool t = cut_contains(g, cut, g.tail(e));
        bool h = cut_contains(g, cut, g.head(e));
        if (t && !h) out.push_back(OrientedEdge{e, true});
        if (h && !t) out.push_back(OrientedEdge{e, false});
    }
    return out;
}

inline Value cut_sum(const Graph& g, const EdgeVector& phi, const OrientedCut& cut) {
    if (phi.graph_id() != g.id()) throw Error(ErrorKind::GraphMismatch, "vector lives on another graph");
    Value s = 0;
    for (const auto& o : cut_edges(g, cut)) s += phi.evaluate(o);
    return s;
}

inline std::string describe_cut(const Graph& g, const OrientedCut& cut) {
    std::string out;
    auto list = [&](const std::vector<VertexId>& vs) {
        std::string s = "{";
        for (std::size_t i = 0; i < vs.size(); ++i) s += (i ? ", " : "") + g.vertex_name(vs[i]);
        return s + "}";
    };
    switch (cut.kind) {
        case OrientedCut::Kind::FiniteSet:
            return "X = " + list(cut.vertices);
        case OrientedCut::Kind::HalfSpaces:
            for (const auto& h : cut.half_spaces)
                out += (out.empty() ? "" : " u ") + std::string("H(") + h.end.name() + (h.end.direction > 0 ? ", >= " : ", <= ") +
                       std::to_string(h.threshold) + ")";
            if (out.empty()) out = "{}";
            if (!cut.vertices.empty()) out += " xor " + list(cut.vertices);
            return "X = " + out;
        case OrientedCut::Kind::VertexClasses:
            for (int c : cut.classes) out += (out.empty() ? "" : ", ") + g.vertex_classes()[c].name;
            return "X = all of {" + out + "}";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Circles

/// A closed walk visiting each vertex once.
struct FiniteCircuit {
    std::vector<OrientedEdge> edges;
    bool operator==(const FiniteCircuit&) const = default;
};

/// A double ray closed up through an end: come in from the end along
/// `inbound` (given outward from its start), follow `path`, and leave along
/// `outbound`. Both rays converge to the same end.
struct DoubleRayCircle {
    RayDescriptor inbound;
    std::vector<OrientedEdge> path;
    RayDescriptor outbound;
    bool operator==(const DoubleRayCircle&) const = default;
};

using Circle = std::variant<FiniteCircuit, DoubleRayCircle>;

struct CircleTerm {
    Value coefficient = 1;
    Circle circle;
    bool operator==(const CircleTerm&) const = default;
};

/// The circuit template shifted over every s in `range`.
struct CircleFamily {
    Value coefficient = 1;
    FiniteCircuit circuit;
    ShiftRange range;
    bool operator==(const CircleFamily&) const = default;
};

struct CircleDecomposition {
    std::vector<CircleTerm> circles;
    std::vector<CircleFamily> families;

    std::size_t size() const { return circles.size() + families.size(); }
    bool operator==(const CircleDecomposition&) const = default;
};

/// Indicator vector of a ray: +1 along its traversal direction. Rays whose
/// period advances by more than one cell have period-p tails, which the
/// vector representation does not cover.
inline EdgeVector ray_vector(const Graph& g, const RayDescriptor& ray) {
    RayShape shape = ray_shape(g, ray);
    if (shape.shift != 1 && shape.shift != -1)
        throw Error(ErrorKind::NotRepresentable, "ray period advances by " + std::to_string(shape.shift) + " cells");
    EdgeVector out = indicator(g, ray.initial);
    int dir = static_cast<int>(shape.shift);
    for (const auto& o : ray.period) {
        EdgeVector piece(g);
        piece.set_tail(g, o.edge.cls, dir, o.edge.cell, o.forward ? 1 : -1);
        out = add(out, piece);
    }
    return out;
}

inline VertexId circuit_start(const Graph& g, const FiniteCircuit& c) { return g.source(c.edges.front()); }

inline FiniteCircuit shifted(const FiniteCircuit& c, const Graph& g, Index s) {
    FiniteCircuit out;
    for (const auto& o : c.edges) out.edges.push_back(shifted(o, g, s));
    return out;
}

/// Throws NotInCycleSpace with a reason if the circle is malformed.
inline void check_circle(const Graph& g, const Circle& circle) {
    auto bad = [](const std::string& why) { throw Error(ErrorKind::NotInCycleSpace, "invalid circle: " + why); };
    try {
        if (const auto* c = std::get_if<FiniteCircuit>(&circle)) {
            if (c->edges.empty()) bad("empty circuit");
            VertexId start = circuit_start(g, *c);
            if (walk_end(g, start, c->edges) != start) bad("circuit does not close");
            std::set<VertexId> seen;
            for (const auto& o : c->edges)
                if (!seen.insert(g.source(o)).second) bad("circuit revisits " + g.vertex_name(g.source(o)));
            return;
        }
        const auto& d = std::get<DoubleRayCircle>(circle);
        EndId in_end = end_of_ray(g, d.inbound);
        EndId out_end = end_of_ray(g, d.outbound);
        if (in_end != out_end) bad("rays converge to different ends");
        if (walk_end(g, d.inbound.start, d.path) != d.outbound.start) bad("path does not join the rays");
        RayShape si = ray_shape(g, d.inbound), so = ray_shape(g, d.outbound);
        Index ai = si.shift < 0 ? -si.shift : si.shift, ao = so.shift < 0 ? -so.shift : so.shift;
        Index spread = si.tail_start.cell - so.tail_start.cell;
        if (spread < 0) spread = -spread;
        Index ci = ray_check_periods(g, d.inbound), co = ray_check_periods(g, d.outbound);
        Index window = 4 * (ci * ai + co * ao) + spread + 2 * ai * ao;
        auto in_vs = ray_vertices(g, d.inbound, window / ai + ci);
        auto out_vs = ray_vertices(g, d.outbound, window / ao + co);
        std::vector<VertexId> all(in_vs.rbegin(), in_vs.rend());
        for (const auto& o : d.path) all.push_back(g.target(o));
        all.insert(all.end(), out_vs.begin() + 1, out_vs.end());
        std::set<VertexId> seen;
        for (const auto& v : all)
            if (!seen.insert(v).second) bad("double ray revisits " + g.vertex_name(v));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NotInCycleSpace) throw;
        bad(e.what());
    }
}

inline EdgeVector circle_vector(const Graph& g, const Circle& circle) {
    if (const auto* c = std::get_if<FiniteCircuit>(&circle)) return indicator(g, c->edges);
    const auto& d = std::get<DoubleRayCircle>(circle);
    return indicator(g, d.path) + ray_vector(g, d.outbound) - ray_vector(g, d.inbound);
}

inline VectorFamily indicator_family(const Graph& g, const CircleDecomposition& dec) {
    VectorFamily fam;
    for (const auto& t : dec.circles) fam.finite_members.push_back({t.coefficient, circle_vector(g, t.circle)});
    for (const auto& f : dec.families)
        fam.periodic_members.push_back({f.coefficient, indicator(g, f.circuit.edges), f.range});
    return fam;
}

// ---------------------------------------------------------------------------
// Peeling

namespace detail {

using Flow = std::map<EdgeId, Value>;

inline Value flow_at(const Flow& flow, OrientedEdge o) {
    auto it = flow.find(o.edge);
    if (it == flow.end()) return 0;
    return o.forward ? it->second : -it->second;
}

inline void flow_add(Flow& flow, OrientedEdge o, Value k) {
    Value& v = flow[o.edge];
    v += o.forward ? k : -k;
    if (v == 0) flow.erase(o.edge);
}

/// Edges at v oriented away from it, in the periodic cover (ignores the
/// lower end of periodic-n graphs and all non-periodic edges).
inline std::vector<OrientedEdge> cover_incident(const Graph& g, VertexId v) {
    std::vector<OrientedEdge> out;
    const auto& classes = g.edge_classes();
    for (int c = 0; c < static_cast<int>(classes.size()); ++c) {
        const auto& ec = classes[c];
        if (!ec.periodic) continue;
        if (ec.tail == v.cls) out.push_back(OrientedEdge{EdgeId{c, v.cell - ec.tail_cell}, true});
        if (ec.head == v.cls) out.push_back(OrientedEdge{EdgeId{c, v.cell - ec.head_cell}, false});
    }
    return out;
}

inline VertexId cover_source(const Graph& g, OrientedEdge o) {
    const auto& ec = g.edge_classes()[o.edge.cls];
    return o.forward ? VertexId{ec.tail, o.edge.cell + ec.tail_cell} : VertexId{ec.head, o.edge.cell + ec.head_cell};
}
inline VertexId cover_target(const Graph& g, OrientedEdge o) { return cover_source(g, o.reversed()); }

inline VertexId any_source(const Graph& g, OrientedEdge o) {
    return g.edge_classes()[o.edge.cls].periodic ? cover_source(g, o) : g.source(o);
}
inline VertexId any_target(const Graph& g, OrientedEdge o) { return any_source(g, o.reversed()); }

inline std::vector<OrientedEdge> any_incident(const Graph& g, VertexId v) {
    std::vector<OrientedEdge> out;
    if (g.vertex_classes()[v.cls].periodic) out = cover_incident(g, v);
    for (const auto& o : g.incident(v))
        if (!g.edge_classes()[o.edge.cls].periodic) out.push_back(o);
    return out;
}

/// Splits a finite circulation into vertex-simple circuits: start at the
/// smallest edge, always leave by the smallest edge still carrying flow, and
/// cut off the first cycle closed.
inline std::vector<std::pair<Value, FiniteCircuit>> peel_circuits(const Graph& g, Flow flow) {
    std::vector<std::pair<Value, FiniteCircuit>> out;
    while (!flow.empty()) {
        auto [e0, v0] = *flow.begin();
        OrientedEdge first{e0, v0 > 0};
        std::vector<OrientedEdge> walk{first};
        std::map<VertexId, std::size_t> seen{{any_source(g, first), 0}};
        VertexId at = any_target(g, first);
        while (!seen.count(at)) {
            seen[at] = walk.size();
            std::optional<OrientedEdge> next;
            for (const auto& o : any_incident(g, at))
                if (flow_at(flow, o) > 0 && (!next || o < *next)) next = o;
            if (!next) throw Error(ErrorKind::Internal, "flow is not balanced at " + g.vertex_name(at));
            walk.push_back(*next);
            at = any_target(g, *next);
        }
        FiniteCircuit c;
        c.edges.assign(walk.begin() + static_cast<std::ptrdiff_t>(seen[at]), walk.end());
        Value k = flow_at(flow, c.edges.front());
        for (const auto& o : c.edges) k = std::min(k, flow_at(flow, o));
        for (const auto& o : c.edges) flow_add(flow, o, -k);
        out.emplace_back(k, std::move(c));
    }
    return out;
}

/// A finite circulation in the periodic cover whose shifts sum to the
/// constant per-class flow `tail`: the one-cell slice of the tail, corrected
/// by W - shift(W, 1) where W cancels the slice's accumulated divergence.
inline Flow periodic_template(const Graph& g, const std::map<int, Value>& tail) {
    Flow slice;
    std::map<VertexId, Value> div;
    for (const auto& [c, v] : tail) {
        OrientedEdge o{EdgeId{c, 0}, true};
        slice[o.edge] = v;
        div[cover_source(g, o)] -= v;
        div[cover_target(g, o)] += v;
    }
    std::map<VertexId, Value> charge;
    std::map<int, Value> running;
    for (const auto& [v, d] : div) {
        Value& r = running[v.cls];
        r += d;
        // cells between listed ones keep the running value
        auto next = div.upper_bound(v);
        Index stop = (next != div.end() && next->first.cls == v.cls) ? next->first.cell : v.cell + 1;
        for (Index k = v.cell; k < stop; ++k)
            if (r != 0) charge[VertexId{v.cls, k}] = r;
    }
    for (const auto& [cls, r] : running)
        if (r != 0) throw Error(ErrorKind::Internal, "tail flow is not balanced in the quotient");
    if (charge.empty()) return slice;

    Index lo = charge.begin()->first.cell, hi = lo;
    for (const auto& [v, q] : charge) {
        lo = std::min(lo, v.cell);
        hi = std::max(hi, v.cell);
    }
    Index margin = 4 * g.max_offset() * static_cast<Index>(g.vertex_classes().size() + 1) + 4;
    for (int attempt = 0; attempt < 4; ++attempt, margin *= 2) {
        Flow w;
        std::set<VertexId> done;
        bool ok = true;
        for (const auto& [root, q0] : charge) {
            if (done.count(root)) continue;
            std::map<VertexId, OrientedEdge> parent;  // edge from vertex towards its parent
            std::vector<VertexId> order{root};
            done.insert(root);
            for (std::size_t i = 0; i < order.size(); ++i) {
                VertexId x = order[i];
                for (const auto& o : cover_incident(g, x)) {
                    VertexId y = cover_target(g, o);
                    if (y.cell < lo - margin || y.cell > hi + margin || done.count(y)) continue;
                    done.insert(y);
                    parent[y] = o.reversed();
                    order.push_back(y);
                }
            }
            std::map<VertexId, Value> subtree;
            for (auto it = order.rbegin(); it != order.rend(); ++it) {
                auto c = charge.find(*it);
                Value s = subtree[*it] + (c == charge.end() ? 0 : c->second);
                if (*it == root) {
                    if (s != 0) ok = false;
                    break;
                }
                OrientedEdge up = parent.at(*it);
                if (s != 0) flow_add(w, up, s);
                subtree[cover_target(g, up)] += s;
            }
            if (!ok) break;
        }
        if (!ok) continue;
        Flow z = slice;
        for (const auto& [e, v] : w) {
            flow_add(z, OrientedEdge{e, true}, v);
            flow_add(z, OrientedEdge{EdgeId{e.cls, e.cell + 1}, true}, -v);
        }
        return z;
    }
    throw Error(ErrorKind::Internal, "could not route a periodic template");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Membership

struct NonMemberCertificate {
    OrientedCut cut;
    Value sum = 0;
    bool operator==(const NonMemberCertificate&) const = default;
};

struct MembershipResult {
    std::variant<CircleDecomposition, NonMemberCertificate> value;

    bool member() const { return value.index() == 0; }
    const CircleDecomposition& decomposition() const { return std::get<CircleDecomposition>(value); }
    const NonMemberCertificate& violation() const { return std::get<NonMemberCertificate>(value); }
};

/// Checks every vertex star and one half-space cut per end. Vertices far
/// beyond the vector's extent all see constant tails, so the stars of a
/// window one bond wider than the extent cover every vertex class; and once
/// stars balance, a half-space cut's sum does not depend on its threshold.
/// Every finite cut is a finite sum of such cuts.
inline std::optional<NonMemberCertificate> find_violated_cut(const Graph& g, const EdgeVector& phi) {
    if (phi.graph_id() != g.id()) throw Error(ErrorKind::GraphMismatch, "vector lives on another graph");
    auto extent = phi.cell_extent(g).value_or(std::pair<Index, Index>{0, 0});
    auto caps = g.cap_cell_range();
    Index d = g.max_offset() + 1;
    Index lo = std::min(extent.first, caps.first) - d, hi = std::max(extent.second, caps.second) + d;
    for (const auto& v : g.vertices_in_cells(lo, hi)) {
        Value s = 0;
        for (const auto& o : g.incident(v)) s += phi.evaluate(o);
        if (s != 0) return NonMemberCertificate{OrientedCut::finite({v}), s};
    }
    for (const auto& end : g.ends()) {
        auto cut = OrientedCut::half_spaces_with({HalfSpace{end, end.direction > 0 ? 1 : 0}});
        Value s = cut_sum(g, phi, cut);
        if (s != 0) return NonMemberCertificate{cut, s};
    }
    return std::nullopt;
}

namespace detail {

inline std::map<int, Value> tail_values(const EdgeVector& phi, int dir) {
    std::map<int, Value> out;
    for (const auto& [c, t] : phi.tails(dir)) out[c] = t.value;
    return out;
}

/// Where the tails of one direction have all started.
inline Index tail_start(const Graph& g, const EdgeVector& phi, int dir) {
    std::optional<Index> out;
    for (const auto& [c, t] : phi.tails(dir)) out = out ? (dir > 0 ? std::max(*out, t.from) : std::min(*out, t.from)) : t.from;
    Index s = out.value_or(0);
    if (g.kind() == GraphKind::PeriodicN) s = std::max<Index>(s, 0);
    return s;
}

inline std::pair<Index, Index> edge_cell_extent(const std::vector<OrientedEdge>& edges) {
    Index lo = edges.front().edge.cell, hi = lo;
    for (const auto& o : edges) {
        lo = std::min(lo, o.edge.cell);
        hi = std::max(hi, o.edge.cell);
    }
    return {lo, hi};
}

/// Moves a periodic circuit so that it starts at `at` on the `dir` side.
inline FiniteCircuit place_circuit(const Graph& g, const FiniteCircuit& c, int dir, Index at) {
    auto [lo, hi] = edge_cell_extent(c.edges);
    return shifted(c, g, dir > 0 ? at - lo : at - hi);
}

inline void add_finite_circuits(const Graph& g, const EdgeVector& rest, CircleDecomposition& dec) {
    if (rest.has_tails()) throw Error(ErrorKind::Internal, "tails left over after peeling");
    for (auto& [k, c] : peel_circuits(g, rest.finite_part())) dec.circles.push_back({k, std::move(c)});
}

/// Tail flows as periodic families of circuits, then finite circuits.
inline CircleDecomposition decompose_by_families(const Graph& g, const EdgeVector& phi) {
    CircleDecomposition dec;
    auto tp = tail_values(phi, 1), tm = tail_values(phi, -1);
    bool both_ways = g.kind() == GraphKind::PeriodicZ && !tp.empty() && tp == tm;
    if (both_ways) {
        for (auto& [k, c] : peel_circuits(g, periodic_template(g, tp)))
            dec.families.push_back({k, std::move(c), ShiftRange::all()});
    } else {
        for (int dir : {1, -1}) {
            const auto& t = dir > 0 ? tp : tm;
            if (t.empty()) continue;
            Index at = tail_start(g, phi, dir);
            for (auto& [k, c] : peel_circuits(g, periodic_template(g, t)))
                dec.families.push_back(
                    {k, place_circuit(g, c, dir, at), dir > 0 ? ShiftRange::from(0) : ShiftRange::upto(0)});
        }
    }
    add_finite_circuits(g, phi - thin_sum(g, indicator_family(g, dec)), dec);
    return dec;
}

/// Cycles of the quotient flow: the same peeling as for finite circuits, on
/// edge classes.
inline std::vector<std::pair<Value, std::vector<OrientedEdge>>> quotient_cycles(const Graph& g,
                                                                              std::map<int, Value> flow) {
    std::vector<std::pair<Value, std::vector<OrientedEdge>>> out;
    const auto& classes = g.edge_classes();
    auto at_value = [&](int c, bool fwd) {
        auto it = flow.find(c);
        return it == flow.end() ? 0 : (fwd ? it->second : -it->second);
    };
    while (!flow.empty()) {
        auto [c0, v0] = *flow.begin();
        OrientedEdge first{EdgeId{c0, 0}, v0 > 0};
        auto src = [&](const OrientedEdge& o) { return o.forward ? classes[o.edge.cls].tail : classes[o.edge.cls].head; };
        auto dst = [&](const OrientedEdge& o) { return src(o.reversed()); };
        std::vector<OrientedEdge> walk{first};
        std::map<int, std::size_t> seen{{src(first), 0}};
        int at = dst(first);
        while (!seen.count(at)) {
            seen[at] = walk.size();
            std::optional<OrientedEdge> next;
            for (const auto& [c, v] : flow) {
                for (bool fwd : {true, false}) {
                    OrientedEdge o{EdgeId{c, 0}, fwd};
                    if (src(o) == at && at_value(c, fwd) > 0 && !next) next = o;
                }
            }
            if (!next) throw Error(ErrorKind::Internal, "quotient flow is not balanced");
            walk.push_back(*next);
            at = dst(*next);
        }
        std::vector<OrientedEdge> cyc(walk.begin() + static_cast<std::ptrdiff_t>(seen[at]), walk.end());
        Value k = at_value(cyc.front().edge.cls, cyc.front().forward);
        for (const auto& o : cyc) k = std::min(k, at_value(o.edge.cls, o.forward));
        for (const auto& o : cyc) {
            Value& v = flow[o.edge.cls];
            v -= o.forward ? k : -k;
            if (v == 0) flow.erase(o.edge.cls);
        }
        out.emplace_back(k, std::move(cyc));
    }
    return out;
}

/// Lifts a quotient cycle to the cover starting at `start`; returns the
/// lifted edges and the vertex reached.
inline std::pair<std::vector<OrientedEdge>, VertexId> lift(const Graph& g, const std::vector<OrientedEdge>& cyc,
                                                           VertexId start) {
    std::vector<OrientedEdge> out;
    VertexId at = start;
    for (const auto& o : cyc) {
        const auto& ec = g.edge_classes()[o.edge.cls];
        OrientedEdge l{EdgeId{o.edge.cls, at.cell - (o.forward ? ec.tail_cell : ec.head_cell)}, o.forward};
        out.push_back(l);
        at = cover_target(g, l);
    }
    return {out, at};
}

inline std::vector<OrientedEdge> reverse_walk(const std::vector<OrientedEdge>& w) {
    std::vector<OrientedEdge> out;
    for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(it->reversed());
    return out;
}

/// Shortest path in the graph between two vertices avoiding `avoid`,
/// preferring edges along which `rest` is positive.
inline std::optional<std::vector<OrientedEdge>> connect(const Graph& g, const EdgeVector& rest, VertexId from,
                                                        VertexId to, const std::set<VertexId>& avoid, Index lo,
                                                        Index hi) {
    if (from == to) return std::vector<OrientedEdge>{};
    for (bool along_rest : {true, false}) {
        std::map<VertexId, OrientedEdge> via;
        std::queue<VertexId> queue;
        queue.push(from);
        std::set<VertexId> seen{from};
        while (!queue.empty() && !seen.count(to)) {
            VertexId x = queue.front();
            queue.pop();
            for (const auto& o : g.incident(x)) {
                VertexId y = g.target(o);
                if (seen.count(y) || avoid.count(y)) continue;
                if (g.vertex_classes()[y.cls].periodic && (y.cell < lo || y.cell > hi)) continue;
                if (along_rest && rest.evaluate(o) <= 0) continue;
                seen.insert(y);
                via[y] = o;
                queue.push(y);
            }
        }
        if (!seen.count(to)) continue;
        std::vector<OrientedEdge> path;
        for (VertexId at = to; at != from; at = g.source(via.at(at))) path.push_back(via.at(at));
        std::reverse(path.begin(), path.end());
        return path;
    }
    return std::nullopt;
}

/// Splits each tail flow into quotient cycles. Cycles of voltage 0 become
/// periodic circuit families; cycles winding once become rays, and each ray
/// leaving through an end is paired with one arriving from the same end into
/// a double-ray circle.
inline CircleDecomposition decompose_by_end_closure(const Graph& g, const EdgeVector& phi) {
    CircleDecomposition dec;
    struct Ray {
        Value k;
        RayDescriptor ray;
        EndId end;
    };
    struct Pair {
        Value k;
        RayDescriptor in, out;
    };
    std::vector<Pair> pairs;
    for (int dir : {1, -1}) {
        auto t = tail_values(phi, dir);
        if (t.empty()) continue;
        Index at = tail_start(g, phi, dir);
        std::vector<Ray> outs, ins;
        for (auto& [k, cyc] : quotient_cycles(g, t)) {
            VertexId start{cyc.front().forward ? g.edge_classes()[cyc.front().edge.cls].tail
                                               : g.edge_classes()[cyc.front().edge.cls].head,
                           0};
            auto [edges, stop] = lift(g, cyc, start);
            Index voltage = stop.cell - start.cell;
            if (voltage == 0) {
                dec.families.push_back({k, place_circuit(g, FiniteCircuit{edges}, dir, at),
                                        dir > 0 ? ShiftRange::from(0) : ShiftRange::upto(0)});
                continue;
            }
            if (voltage != 1 && voltage != -1) throw Error(ErrorKind::Unsupported, "tail cycle winds more than once");
            bool outgoing = voltage == dir;
            std::vector<OrientedEdge> period = outgoing ? edges : reverse_walk(edges);
            VertexId origin = outgoing ? start : stop;
            auto [elo, ehi] = edge_cell_extent(period);
            Index s = dir > 0 ? at - elo : at - ehi;
            RayDescriptor ray{shifted(origin, g, s), {}, {}};
            for (const auto& o : period) ray.period.push_back(shifted(o, g, s));
            Ray r{k, ray, end_of_ray(g, ray)};
            (outgoing ? outs : ins).push_back(r);
        }
        for (auto& o : outs) {
            for (auto& i : ins) {
                if (o.k == 0) break;
                if (i.k == 0 || i.end != o.end) continue;
                Value m = std::min(o.k, i.k);
                pairs.push_back({m, i.ray, o.ray});
                o.k -= m;
                i.k -= m;
            }
            if (o.k != 0) throw Error(ErrorKind::Internal, "unpaired flow towards " + o.end.name());
        }
        for (const auto& i : ins)
            if (i.k != 0) throw Error(ErrorKind::Internal, "unpaired flow from " + i.end.name());
    }
    EdgeVector rest = phi - thin_sum(g, indicator_family(g, dec));
    for (const auto& p : pairs) rest = rest - scale(p.k, ray_vector(g, p.out) - ray_vector(g, p.in));
    if (rest.has_tails()) throw Error(ErrorKind::Internal, "tails left over after pairing rays");

    Index margin = 4 * g.max_offset() * static_cast<Index>(g.vertex_classes().size() + 1) + 4;
    for (const auto& p : pairs) {
        auto extent = rest.cell_extent(g).value_or(std::pair<Index, Index>{0, 0});
        auto caps = g.cap_cell_range();
        Index lo = std::min({extent.first, caps.first, p.in.start.cell, p.out.start.cell}) - margin;
        Index hi = std::max({extent.second, caps.second, p.in.start.cell, p.out.start.cell}) + margin;
        std::set<VertexId> avoid;
        for (const auto* r : {&p.in, &p.out}) {
            auto vs = ray_vertices(g, *r, hi - lo + 2);
            avoid.insert(vs.begin() + 1, vs.end());
        }
        auto path = connect(g, rest, p.in.start, p.out.start, avoid, lo, hi);
        if (!path) throw Error(ErrorKind::Internal, "no path joins the rays");
        DoubleRayCircle c{p.in, *path, p.out};
        check_circle(g, c);
        rest = rest - scale(p.k, indicator(g, *path));
        dec.circles.push_back({p.k, c});
    }
    add_finite_circuits(g, rest, dec);
    return dec;
}

}  // namespace detail

/// Confirms each circle is well formed, the indicator family is thin, and
/// its thin sum is exactly phi.
inline bool certifies(const Graph& g, const EdgeVector& phi, const CircleDecomposition& dec) {
    try {
        for (const auto& t : dec.circles) check_circle(g, t.circle);
        for (const auto& f : dec.families) {
            check_circle(g, f.circuit);
            if (!f.range.is_finite() && !f.circuit.edges.empty())
                for (const auto& o : f.circuit.edges)
                    if (!g.edge_classes()[o.edge.cls].periodic) return false;
        }
        auto fam = indicator_family(g, dec);
        if (!is_thin(g, fam)) return false;
        return thin_sum(g, fam) == phi;
    } catch (const Error&) {
        return false;
    }
}

/// Thin circle decomposition of phi. Two strategies are tried; the one with
/// fewer circles wins, preferring periodic families on a tie.
inline CircleDecomposition decompose(const Graph& g, const EdgeVector& phi) {
    if (auto bad = find_violated_cut(g, phi))
        throw Error(ErrorKind::NotInCycleSpace,
                    "cut " + describe_cut(g, bad->cut) + " has sum " + std::to_string(bad->sum));
    std::optional<CircleDecomposition> best;
    auto consider = [&](const std::function<CircleDecomposition()>& run) {
        try {
            auto dec = run();
            if (!certifies(g, phi, dec)) return;
            if (!best || dec.size() < best->size()) best = std::move(dec);
        } catch (const Error&) {
        }
    };
    consider([&] { return detail::decompose_by_families(g, phi); });
    if (phi.has_tails()) consider([&] { return detail::decompose_by_end_closure(g, phi); });
    if (!best) throw Error(ErrorKind::Internal, "peeling stalled although every cut balances");
    return *best;
}

inline MembershipResult is_member(const Graph& g, const EdgeVector& phi) {
    if (auto bad = find_violated_cut(g, phi)) return MembershipResult{*bad};
    return MembershipResult{decompose(g, phi)};
}

inline bool verify_certificate(const Graph& g, const EdgeVector& phi, const MembershipResult& result) {
    if (result.member()) return certifies(g, phi, result.decomposition());
    try {
        const auto& v = result.violation();
        return v.sum != 0 && cut_sum(g, phi, v.cut) == v.sum;
    } catch (const Error&) {
        return false;
    }
}

/// All cuts whose X-side is a subset of the truncation at radius r together
/// with any set of half-spaces beyond it, deduplicated by crossing edges.
inline std::vector<OrientedCut> enumerate_finite_cuts(const Graph& g, Index r) {
    auto vertices = truncate(g, r).subgraph.vertices;
    std::vector<HalfSpace> spaces;
    for (const auto& end : g.ends()) spaces.push_back(HalfSpace{end, end.direction > 0 ? r + 1 : -r - 1});
    std::size_t n = vertices.size() + spaces.size();
    if (n > 24) throw Error(ErrorKind::Unsupported, "too many subsets to enumerate (" + std::to_string(n) + " items)");
    std::vector<OrientedCut> out;
    std::set<std::vector<OrientedEdge>> seen;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        std::vector<VertexId> xs;
        std::vector<HalfSpace> hs;
        for (std::size_t i = 0; i < vertices.size(); ++i)
            if (mask >> i & 1) xs.push_back(vertices[i]);
        for (std::size_t i = 0; i < spaces.size(); ++i)
            if (mask >> (vertices.size() + i) & 1) hs.push_back(spaces[i]);
        OrientedCut cut = hs.empty() ? OrientedCut::finite(xs) : OrientedCut::half_spaces_with(hs, xs);
        if (seen.insert(cut_edges(g, cut)).second) out.push_back(std::move(cut));
    }
    return out;
}

}  // namespace endcycle

#endif
