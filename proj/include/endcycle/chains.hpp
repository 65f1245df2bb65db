#ifndef ENDCYCLE_CHAINS_HPP
#define ENDCYCLE_CHAINS_HPP

// Combinatorial 1-chains of the compactified graph. Simplices come from a
// small dictionary (passes, walks, constants, and jumps through an end), and
// chains are finite lists plus periodic families of them. The winding map
// sends a chain to its signed per-edge traversal count.

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "cycle_space.hpp"

namespace endcycle {

struct Pass {
    OrientedEdge edge;
    bool operator==(const Pass&) const = default;
};

struct Walk {
    VertexId start;
    std::vector<OrientedEdge> edges;
    bool operator==(const Walk&) const = default;
};

struct Constant {
    std::variant<VertexId, EndId> point;
    bool operator==(const Constant&) const = default;
};

/// Leaves u = out.start along `out`, passes through their common end, and
/// comes back along `in` (described outward from its start v) to v.
struct EndJump {
    RayDescriptor out;
    RayDescriptor in;
    bool operator==(const EndJump&) const = default;
};

using Simplex = std::variant<Pass, Walk, Constant, EndJump>;

struct ChainTerm {
    Value coefficient = 1;
    Simplex simplex;
    bool operator==(const ChainTerm&) const = default;
};

/// Shift: the template moved by s cells for every s in `range`.
/// Grow: member s (s >= 0) is the walk template with s copies of `left`
/// prepended and s copies of `right` appended, each copy moved one segment
/// further out. Nested walks of this shape all share the template.
struct PeriodicTerm {
    enum class Mode { Shift, Grow };
    Value coefficient = 1;
    Simplex simplex;
    ShiftRange range;
    Mode mode = Mode::Shift;
    Walk left = {};
    Walk right = {};
    bool operator==(const PeriodicTerm&) const = default;
};

struct ChainRep {
    std::vector<ChainTerm> finite;
    std::vector<PeriodicTerm> periodic;

    bool empty() const { return finite.empty() && periodic.empty(); }
    bool operator==(const ChainRep&) const = default;
};

using ZeroChain = std::map<VertexId, Value>;

inline ChainRep operator-(ChainRep a, const ChainRep& b) {
    for (auto t : b.finite) {
        t.coefficient = -t.coefficient;
        a.finite.push_back(t);
    }
    for (auto t : b.periodic) {
        t.coefficient = -t.coefficient;
        a.periodic.push_back(t);
    }
    return a;
}

inline ChainRep operator+(ChainRep a, const ChainRep& b) {
    a.finite.insert(a.finite.end(), b.finite.begin(), b.finite.end());
    a.periodic.insert(a.periodic.end(), b.periodic.begin(), b.periodic.end());
    return a;
}

// ---------------------------------------------------------------------------
// Simplices

inline Simplex shifted(const Simplex& s, const Graph& g, Index by) {
    return std::visit(
        [&](const auto& x) -> Simplex {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Pass>) {
                return Pass{shifted(x.edge, g, by)};
            } else if constexpr (std::is_same_v<T, Walk>) {
                Walk w{shifted(x.start, g, by), {}};
                for (const auto& o : x.edges) w.edges.push_back(shifted(o, g, by));
                return w;
            } else if constexpr (std::is_same_v<T, Constant>) {
                if (const auto* v = std::get_if<VertexId>(&x.point)) return Constant{shifted(*v, g, by)};
                return x;
            } else {
                auto move = [&](const RayDescriptor& r) {
                    RayDescriptor m{shifted(r.start, g, by), {}, {}};
                    for (const auto& o : r.initial) m.initial.push_back(shifted(o, g, by));
                    for (const auto& o : r.period) m.period.push_back(shifted(o, g, by));
                    return m;
                };
                return EndJump{move(x.out), move(x.in)};
            }
        },
        s);
}

namespace detail {

inline Index segment_shift(const Graph& g, const Walk& seg) {
    VertexId stop = walk_end(g, seg.start, seg.edges, ErrorKind::NotAdmissible);
    return stop.cell - seg.start.cell;
}

/// Member s of a Grow family.
inline Walk grown(const Graph& g, const PeriodicTerm& t, Index s) {
    const auto& core = std::get<Walk>(t.simplex);
    Index lstep = segment_shift(g, t.left), rstep = segment_shift(g, t.right);
    Walk w{core.start, {}};
    for (Index j = s - 1; j >= 0; --j) {
        for (const auto& o : t.left.edges) w.edges.push_back(shifted(o, g, -j * lstep));
        if (j == s - 1) w.start = shifted(t.left.start, g, -j * lstep);
    }
    w.edges.insert(w.edges.end(), core.edges.begin(), core.edges.end());
    for (Index j = 0; j < s; ++j)
        for (const auto& o : t.right.edges) w.edges.push_back(shifted(o, g, j * rstep));
    return w;
}

inline Simplex member(const Graph& g, const PeriodicTerm& t, Index s) {
    if (t.mode == PeriodicTerm::Mode::Grow) return grown(g, t, s);
    return shifted(t.simplex, g, s);
}

/// Vertices of a simplex with finite image, plus whether it touches an end.
inline std::vector<VertexId> simplex_vertices(const Graph& g, const Simplex& s) {
    if (const auto* p = std::get_if<Pass>(&s)) return {g.source(p->edge), g.target(p->edge)};
    if (const auto* w = std::get_if<Walk>(&s)) {
        std::vector<VertexId> out{w->start};
        for (const auto& o : w->edges) out.push_back(g.target(o));
        return out;
    }
    if (const auto* c = std::get_if<Constant>(&s)) {
        if (const auto* v = std::get_if<VertexId>(&c->point)) return {*v};
        return {};
    }
    const auto& j = std::get<EndJump>(s);
    return {j.out.start, j.in.start};
}

/// Structural checks: walks are contiguous, rays are rays, jumps use one end.
inline void check_simplex(const Graph& g, const Simplex& s) {
    if (const auto* p = std::get_if<Pass>(&s)) {
        g.require_edge(p->edge.edge);
    } else if (const auto* w = std::get_if<Walk>(&s)) {
        g.require_vertex(w->start);
        walk_end(g, w->start, w->edges);
    } else if (const auto* c = std::get_if<Constant>(&s)) {
        if (const auto* v = std::get_if<VertexId>(&c->point)) g.require_vertex(*v);
        else if (!g.has_end(std::get<EndId>(c->point))) throw Error(ErrorKind::UnknownVertex, "unknown end");
    } else {
        const auto& j = std::get<EndJump>(s);
        if (end_of_ray(g, j.out) != end_of_ray(g, j.in))
            throw Error(ErrorKind::NotARay, "end jump rays converge to different ends");
    }
}

inline bool has_fixed_part(const Graph& g, const Simplex& s, VertexId& witness) {
    for (const auto& v : simplex_vertices(g, s))
        if (!g.vertex_classes()[v.cls].periodic) {
            witness = v;
            return true;
        }
    auto fixed_edge = [&](const OrientedEdge& o) {
        if (g.edge_classes()[o.edge.cls].periodic) return false;
        witness = g.source(o);
        return true;
    };
    if (const auto* p = std::get_if<Pass>(&s)) return fixed_edge(p->edge);
    if (const auto* w = std::get_if<Walk>(&s))
        for (const auto& o : w->edges)
            if (fixed_edge(o)) return true;
    if (const auto* j = std::get_if<EndJump>(&s))
        for (const auto* r : {&j->out, &j->in})
            for (const auto& o : r->initial)
                if (fixed_edge(o)) return true;
    return false;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Admissibility

struct Admissibility {
    bool admissible = true;
    std::optional<VertexId> witness;
    std::string reason;
    explicit operator bool() const { return admissible; }
};

/// A chain is admissible when every point of the graph meets finitely many
/// member images and every 0-face is a vertex. For a periodic family with
/// infinitely many members this means every member must drift off to
/// infinity: no part of the template may stay fixed, Grow families (whose
/// members all contain the template) are excluded, and the rays of an end
/// jump must point the way the shifts go.
inline Admissibility check_admissible(const Graph& g, const ChainRep& rep) {
    auto no = [](std::optional<VertexId> w, std::string why) { return Admissibility{false, w, std::move(why)}; };
    auto structural = [&](const Simplex& s) -> std::optional<Admissibility> {
        try {
            detail::check_simplex(g, s);
        } catch (const Error& e) {
            return no(std::nullopt, std::string("malformed simplex: ") + e.what());
        }
        if (const auto* c = std::get_if<Constant>(&s); c && std::holds_alternative<EndId>(c->point))
            return no(std::nullopt, "constant simplex at " + std::get<EndId>(c->point).name() + " has a 0-face outside the graph");
        return std::nullopt;
    };
    for (const auto& t : rep.finite)
        if (auto bad = structural(t.simplex)) return *bad;
    for (const auto& t : rep.periodic) {
        if (t.range.empty() || t.coefficient == 0) continue;
        if (t.mode == PeriodicTerm::Mode::Grow) {
            if (!std::holds_alternative<Walk>(t.simplex)) return no(std::nullopt, "grow families need a walk template");
            if (!t.range.lo || *t.range.lo < 0) return no(std::nullopt, "grow families start at a non-negative index");
            if (auto bad = structural(t.left)) return *bad;
            if (auto bad = structural(t.right)) return *bad;
            const auto& core = std::get<Walk>(t.simplex);
            if (walk_end(g, t.left.start, t.left.edges) != core.start ||
                walk_end(g, core.start, core.edges) != t.right.start)
                return no(std::nullopt, "grow segments do not attach to the template");
            if (auto bad = structural(detail::grown(g, t, *t.range.lo))) return *bad;
            if (!t.range.is_finite())
                return no(core.start, "every member contains " + g.vertex_name(core.start));
            continue;
        }
        if (t.range.is_finite()) {
            for (Index s = *t.range.lo; s <= *t.range.hi; ++s)
                if (auto bad = structural(detail::member(g, t, s))) return *bad;
            continue;
        }
        Index s0 = t.range.lo.value_or(t.range.hi.value_or(0));
        auto first = detail::member(g, t, s0);
        if (auto bad = structural(first)) return *bad;
        if (g.kind() == GraphKind::PeriodicN && !t.range.lo) return no(std::nullopt, "shifts run below cell 0");
        VertexId fixed;
        if (detail::has_fixed_part(g, first, fixed))
            return no(fixed, "every member contains " + g.vertex_name(fixed));
        if (const auto* j = std::get_if<EndJump>(&first)) {
            // shifts run one way (or both); a ray pointing elsewhere sweeps
            // its tail start through infinitely many members
            for (const auto* r : {&j->out, &j->in}) {
                RayShape shape = ray_shape(g, *r);
                bool along = shape.shift > 0 ? !t.range.hi : !t.range.lo;
                if (!along || (!t.range.lo && !t.range.hi))
                    return no(shape.tail_start,
                              "ray tails of infinitely many members pass " + g.vertex_name(shape.tail_start));
            }
        }
    }
    return Admissibility{};
}

namespace detail {
inline void require_admissible(const Graph& g, const ChainRep& rep) {
    auto a = check_admissible(g, rep);
    if (!a) throw Error(ErrorKind::NotAdmissible, "chain is not admissible: " + a.reason);
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Boundary and winding map

namespace detail {

inline void add_to(ZeroChain& z, VertexId v, Value k) {
    if (k == 0) return;
    Value& x = z[v];
    x += k;
    if (x == 0) z.erase(v);
}

inline ZeroChain simplex_boundary(const Graph& g, const Simplex& s) {
    ZeroChain z;
    if (const auto* p = std::get_if<Pass>(&s)) {
        add_to(z, g.target(p->edge), 1);
        add_to(z, g.source(p->edge), -1);
    } else if (const auto* w = std::get_if<Walk>(&s)) {
        add_to(z, walk_end(g, w->start, w->edges), 1);
        add_to(z, w->start, -1);
    } else if (const auto* j = std::get_if<EndJump>(&s)) {
        add_to(z, j->in.start, 1);
        add_to(z, j->out.start, -1);
    }
    return z;
}

/// Sum over s in an infinite range of the template 0-chain moved by s.
/// Finite exactly when each vertex class carries total weight zero.
inline ZeroChain telescope(const Graph& g, const ZeroChain& tmpl, const ShiftRange& range) {
    std::map<int, std::map<Index, Value>> by_class;
    for (const auto& [v, k] : tmpl) {
        if (!g.vertex_classes()[v.cls].periodic)
            throw Error(ErrorKind::InfiniteBoundarySupport, g.vertex_name(v) + " is an endpoint of every member");
        by_class[v.cls][v.cell] += k;
    }
    ZeroChain out;
    for (const auto& [cls, cells] : by_class) {
        Value total = 0;
        for (const auto& [c, k] : cells) total += k;
        if (total != 0)
            throw Error(ErrorKind::InfiniteBoundarySupport,
                        "endpoints of class " + g.vertex_classes()[cls].name + " do not cancel along the family");
        if (!range.lo && !range.hi) continue;
        Index cmin = cells.begin()->first, cmax = cells.rbegin()->first;
        if (range.lo) {
            for (Index k = cmin + *range.lo; k < cmax + *range.lo; ++k) {
                Value s = 0;
                for (const auto& [c, a] : cells)
                    if (c <= k - *range.lo) s += a;
                add_to(out, VertexId{cls, k}, s);
            }
        } else {
            for (Index k = cmin + *range.hi + 1; k <= cmax + *range.hi; ++k) {
                Value s = 0;
                for (const auto& [c, a] : cells)
                    if (c >= k - *range.hi) s += a;
                add_to(out, VertexId{cls, k}, s);
            }
        }
    }
    return out;
}

inline EdgeVector simplex_vector(const Graph& g, const Simplex& s) {
    if (const auto* p = std::get_if<Pass>(&s)) return indicator(g, {p->edge});
    if (const auto* w = std::get_if<Walk>(&s)) return indicator(g, w->edges);
    if (std::holds_alternative<Constant>(s)) return EdgeVector(g);
    const auto& j = std::get<EndJump>(s);
    return ray_vector(g, j.out) - ray_vector(g, j.in);
}

inline constexpr Index kMaxExpansion = 100000;

template <class F>
void for_each_member(const Graph& g, const PeriodicTerm& t, F&& f) {
    if (*t.range.hi - *t.range.lo > kMaxExpansion)
        throw Error(ErrorKind::Unsupported, "finite family too long to expand");
    for (Index s = *t.range.lo; s <= *t.range.hi; ++s) f(member(g, t, s));
}

/// Representative member of an infinite Shift family and the range of
/// further shifts relative to it, chosen so it lies inside the graph.
inline std::pair<Simplex, ShiftRange> anchored(const Graph& g, const PeriodicTerm& t) {
    if (t.range.lo) return {member(g, t, *t.range.lo), ShiftRange::from(0)};
    if (t.range.hi) return {member(g, t, *t.range.hi), ShiftRange::upto(0)};
    return {t.simplex, ShiftRange::all()};
}

}  // namespace detail

/// Sum of coefficient * (end - start) over all members. Infinite families
/// with the same shift range are summed before telescoping, so a family of
/// passes around a periodic walk cancels as a whole.
inline ZeroChain boundary(const Graph& g, const ChainRep& rep) {
    detail::require_admissible(g, rep);
    ZeroChain out;
    auto absorb = [&](const ZeroChain& z, Value k) {
        for (const auto& [v, x] : z) detail::add_to(out, v, k * x);
    };
    for (const auto& t : rep.finite) absorb(detail::simplex_boundary(g, t.simplex), t.coefficient);
    std::map<ShiftRange, ZeroChain> grouped;
    for (const auto& t : rep.periodic) {
        if (t.range.empty() || t.coefficient == 0) continue;
        if (t.range.is_finite()) {
            detail::for_each_member(g, t, [&](const Simplex& s) { absorb(detail::simplex_boundary(g, s), t.coefficient); });
            continue;
        }
        auto [s, range] = detail::anchored(g, t);
        for (const auto& [v, x] : detail::simplex_boundary(g, s)) detail::add_to(grouped[range], v, t.coefficient * x);
    }
    for (const auto& [range, z] : grouped) absorb(detail::telescope(g, z, range), 1);
    return out;
}

/// Net number of member endpoints carried off into each end by the infinite
/// families: a family of passes marching along a ray leaves its start
/// vertex unbalanced and deposits the missing unit at the end. Sums with
/// zero flux at every end are chains in the end-aware homology; for them
/// the boundary has zero augmentation on every component.
inline std::map<EndId, Value> end_flux(const Graph& g, const ChainRep& rep) {
    detail::require_admissible(g, rep);
    std::map<EndId, Value> out;
    auto deposit = [&](const ZeroChain& z, const ShiftRange& range, int dir) {
        for (const auto& [v, k] : detail::telescope(g, z, range)) {
            auto end = g.end_towards(v, dir);
            if (end) out[*end] -= k;
        }
    };
    std::map<ShiftRange, ZeroChain> grouped;
    for (const auto& t : rep.periodic) {
        if (t.range.empty() || t.coefficient == 0 || t.range.is_finite()) continue;
        auto [s, range] = detail::anchored(g, t);
        for (const auto& [v, x] : detail::simplex_boundary(g, s)) detail::add_to(grouped[range], v, t.coefficient * x);
    }
    for (const auto& [range, z] : grouped) {
        if (range.lo || !range.hi) deposit(z, ShiftRange::from(range.lo.value_or(0)), 1);
        if (range.hi || !range.lo) {
            ZeroChain left;
            for (const auto& [v, k] : z) left[shifted(v, g, -1)] = k;
            deposit(range.hi ? z : left, ShiftRange::upto(range.hi.value_or(0)), -1);
        }
    }
    std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
    return out;
}

/// The winding map: signed number of traversals of each edge.
inline EdgeVector edge_vector_of(const Graph& g, const ChainRep& rep) {
    detail::require_admissible(g, rep);
    VectorFamily fam;
    for (const auto& t : rep.finite) fam.finite_members.push_back({t.coefficient, detail::simplex_vector(g, t.simplex)});
    for (const auto& t : rep.periodic) {
        if (t.range.empty() || t.coefficient == 0) continue;
        if (t.range.is_finite()) {
            detail::for_each_member(g, t, [&](const Simplex& s) {
                fam.finite_members.push_back({t.coefficient, detail::simplex_vector(g, s)});
            });
            continue;
        }
        auto [s, range] = detail::anchored(g, t);
        fam.periodic_members.push_back({t.coefficient, detail::simplex_vector(g, s), range});
    }
    return thin_sum(g, fam);
}

/// Replaces walks by their passes and end jumps by pass families along their
/// rays; constants carry no passes and are dropped.
inline ChainRep subdivide_to_passes(const Graph& g, const ChainRep& rep) {
    detail::require_admissible(g, rep);
    ChainRep out;
    auto passes = [&](const Simplex& s, Value k) {
        if (const auto* p = std::get_if<Pass>(&s)) {
            out.finite.push_back({k, *p});
        } else if (const auto* w = std::get_if<Walk>(&s)) {
            for (const auto& o : w->edges) out.finite.push_back({k, Pass{o}});
        } else if (const auto* j = std::get_if<EndJump>(&s)) {
            for (const auto& o : j->out.initial) out.finite.push_back({k, Pass{o}});
            for (const auto& o : j->in.initial) out.finite.push_back({k, Pass{o.reversed()}});
            for (bool inbound : {false, true}) {
                const auto& ray = inbound ? j->in : j->out;
                RayShape shape = ray_shape(g, ray);
                if (shape.shift != 1 && shape.shift != -1)
                    throw Error(ErrorKind::NotRepresentable, "ray period advances by more than one cell");
                ShiftRange range = shape.shift > 0 ? ShiftRange::from(0) : ShiftRange::upto(0);
                for (const auto& o : ray.period) {
                    OrientedEdge e = inbound ? o.reversed() : o;
                    out.periodic.push_back({k, Pass{e}, range});
                }
            }
        }
    };
    for (const auto& t : rep.finite) passes(t.simplex, t.coefficient);
    for (const auto& t : rep.periodic) {
        if (t.range.empty() || t.coefficient == 0) continue;
        if (t.range.is_finite()) {
            detail::for_each_member(g, t, [&](const Simplex& s) { passes(s, t.coefficient); });
            continue;
        }
        if (std::holds_alternative<EndJump>(t.simplex))
            throw Error(ErrorKind::NotRepresentable, "a family of end jumps has no pass family of this shape");
        auto [s, range] = detail::anchored(g, t);
        if (const auto* p = std::get_if<Pass>(&s)) out.periodic.push_back({t.coefficient, *p, range});
        if (const auto* w = std::get_if<Walk>(&s))
            for (const auto& o : w->edges) out.periodic.push_back({t.coefficient, Pass{o}, range});
    }
    return out;
}

namespace detail {
inline void require_cycle_shape(const Graph& g, const ChainRep& rep) {
    auto z = boundary(g, rep);
    if (!z.empty())
        throw Error(ErrorKind::NonzeroBoundary,
                    "boundary is non-zero at " + g.vertex_name(z.begin()->first) + " (" + std::to_string(z.begin()->second) + ")");
}
}  // namespace detail

/// Whether the chain is a sum of finite cycles, decided through its edge
/// vector: such chains are exactly those whose winding image lies in the
/// topological cycle space.
inline bool is_cycle_adhoc(const Graph& g, const ChainRep& rep) {
    detail::require_cycle_shape(g, rep);
    return is_member(g, edge_vector_of(g, rep)).member();
}

/// Image of the chain's homology class under the winding map.
inline EdgeVector homology_class(const Graph& g, const ChainRep& rep) {
    detail::require_cycle_shape(g, rep);
    EdgeVector v = edge_vector_of(g, rep);
    auto r = is_member(g, v);
    if (!r.member())
        throw Error(ErrorKind::NotACycle, "winding image violates the cut " + describe_cut(g, r.violation().cut) +
                                              " (sum " + std::to_string(r.violation().sum) + ")");
    return v;
}

inline bool homologous(const Graph& g, const ChainRep& a, const ChainRep& b) {
    detail::require_cycle_shape(g, a);
    detail::require_cycle_shape(g, b);
    return edge_vector_of(g, a - b).is_zero();
}

/// A cycle whose winding image is the thin sum of the decomposition: one
/// closed walk per finite circuit, a periodic walk per family, and for a
/// double ray a jump through its end closed up by the connecting path.
inline ChainRep chain_of_decomposition(const Graph& g, const CircleDecomposition& dec) {
    ChainRep out;
    auto closed = [&](const FiniteCircuit& c) { return Walk{g.source(c.edges.front()), c.edges}; };
    for (const auto& t : dec.circles) {
        if (const auto* c = std::get_if<FiniteCircuit>(&t.circle)) {
            out.finite.push_back({t.coefficient, closed(*c)});
            continue;
        }
        const auto& d = std::get<DoubleRayCircle>(t.circle);
        out.finite.push_back({t.coefficient, EndJump{d.outbound, d.inbound}});
        if (!d.path.empty()) out.finite.push_back({t.coefficient, Walk{d.inbound.start, d.path}});
    }
    for (const auto& f : dec.families) {
        PeriodicTerm t;
        t.coefficient = f.coefficient;
        t.simplex = closed(f.circuit);
        t.range = f.range;
        out.periodic.push_back(t);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Homology groups

struct GroupDescriptor {
    std::size_t rank = 0;
    std::string note;

    std::string str() const {
        if (rank == 0) return "0";
        if (rank == 1) return "Z";
        return "Z^" + std::to_string(rank);
    }
};

struct H0 {
    GroupDescriptor group;
    std::vector<ComponentInfo> components;
};

/// One free generator per component of the compactified graph.
inline H0 h0(const Graph& g) {
    ComponentMap cm(g, {});
    if (cm.has_infinitely_many())
        throw Error(ErrorKind::Unsupported, "graph has infinitely many components");
    return H0{GroupDescriptor{cm.components().size(), "one generator per component"}, cm.components()};
}

/// Coefficient sum of a 0-chain on each component, in the order of h0.
inline std::vector<Value> augmentation(const Graph& g, const ZeroChain& z) {
    ComponentMap cm(g, {});
    if (cm.has_infinitely_many())
        throw Error(ErrorKind::Unsupported, "graph has infinitely many components");
    std::vector<Value> out(cm.components().size(), 0);
    for (const auto& [v, k] : z) {
        auto key = cm.key_of(v);
        if (!key) throw Error(ErrorKind::UnknownVertex, "0-chain uses a vertex outside the graph");
        out.at(static_cast<std::size_t>(key->component)) += k;
    }
    return out;
}

inline GroupDescriptor h_n_trivial(const Graph&, Index n) {
    if (n <= 1) throw Error(ErrorKind::BadDimension, "only dimensions n >= 2 are trivial; got " + std::to_string(n));
    return GroupDescriptor{0, "the compactified graph is 1-dimensional, so every simplex of dimension " +
                                  std::to_string(n) + " is degenerate"};
}

// ---------------------------------------------------------------------------
// Restriction to an admissible pair

/// A: the union of the kept components of G minus the deleted vertices.
struct AdmissiblePair {
    std::vector<VertexId> deleted;
    std::vector<int> kept;
};

/// Membership in the closure of A inside the compactified graph: the kept
/// components, their ends, the deleted vertices next to them, and every
/// edge with an endpoint in a kept component.
class PairClosure {
public:
    PairClosure(const Graph& g, const AdmissiblePair& pair) : g_(g), map_(g, pair.deleted) {
        for (const auto& v : pair.deleted) g.require_vertex(v);
        for (int k : pair.kept) {
            if (k < 0 || k >= static_cast<int>(map_.components().size()))
                throw Error(ErrorKind::NotAdmissiblePair, "no component " + std::to_string(k));
            if (map_.components()[k].kind == ComponentInfo::Kind::FiniteFamily)
                throw Error(ErrorKind::NotAdmissiblePair, "component " + std::to_string(k) + " stands for infinitely many components");
            kept_.insert(k);
        }
    }

    const ComponentMap& components() const { return map_; }

    bool in_component(VertexId v) const {
        auto key = map_.key_of(v);
        return key && kept_.count(key->component);
    }
    bool contains(VertexId v) const {
        if (in_component(v)) return true;
        if (!map_.is_removed(v)) return false;
        for (const auto& o : g_.incident(v))
            if (in_component(g_.target(o))) return true;
        return false;
    }
    bool contains(EdgeId e) const { return in_component(g_.tail(e)) || in_component(g_.head(e)); }
    bool contains(const EndId& e) const {
        auto c = map_.component_of_end(e);
        return c && kept_.count(*c);
    }
    bool contains(const RayDescriptor& r) const {
        if (!contains(end_of_ray(g_, r))) return false;
        auto [lo, hi] = map_.window();
        Index periods = ray_check_periods(g_, r) + (hi - lo) + 2;
        for (const auto& o : ray_edges(g_, r, periods))
            if (!contains(o.edge)) return false;
        return contains(r.start);
    }
    bool contains(const Simplex& s) const {
        if (const auto* p = std::get_if<Pass>(&s)) return contains(p->edge.edge);
        if (const auto* w = std::get_if<Walk>(&s)) {
            for (const auto& o : w->edges)
                if (!contains(o.edge)) return false;
            return contains(w->start);
        }
        if (const auto* c = std::get_if<Constant>(&s)) {
            if (const auto* v = std::get_if<VertexId>(&c->point)) return contains(*v);
            return contains(std::get<EndId>(c->point));
        }
        const auto& j = std::get<EndJump>(s);
        return contains(j.out) && contains(j.in);
    }

private:
    const Graph& g_;
    ComponentMap map_;
    std::set<int> kept_;
};

/// The members of the chain whose images lie in the closure of A. Infinite
/// families are scanned shift by shift through the analysis window; beyond
/// it membership repeats with the period of the cover labels.
inline ChainRep restrict_chain(const Graph& g, const AdmissiblePair& pair, const ChainRep& rep) {
    detail::require_admissible(g, rep);
    PairClosure closure(g, pair);
    ChainRep out;
    for (const auto& t : rep.finite)
        if (closure.contains(t.simplex)) out.finite.push_back(t);
    auto [wlo, whi] = closure.components().window();
    Index period = 1;
    for (std::size_t q = 0; q < g.quotient_component_count(); ++q)
        period = std::lcm(period, std::max<Index>(g.modulus(static_cast<int>(q)), 1));
    for (const auto& t : rep.periodic) {
        if (t.range.empty() || t.coefficient == 0) continue;
        Index lo = t.range.lo.value_or(wlo - (whi - wlo) - 2 * period);
        Index hi = t.range.hi.value_or(whi + (whi - wlo) + 2 * period);
        if (hi - lo > detail::kMaxExpansion) throw Error(ErrorKind::Unsupported, "family too long to scan");
        auto inside = [&](Index s) { return closure.contains(detail::member(g, t, s)); };
        // behaviour past each open end, checked over a few periods
        auto settled = [&](Index from, int dir) -> std::optional<bool> {
            bool first = inside(from);
            for (Index k = 1; k <= 2 * period; ++k)
                if (inside(from + dir * k) != first) throw Error(ErrorKind::Unsupported, "family alternates in and out of A");
            return first;
        };
        bool open_lo = !t.range.lo && *settled(lo, -1);
        bool open_hi = !t.range.hi && *settled(hi, 1);
        std::optional<Index> run;
        for (Index s = lo; s <= hi + 1; ++s) {
            bool in = s <= hi && inside(s);
            if (in && !run) run = s;
            if (!in && run) {
                PeriodicTerm piece = t;
                piece.range = ShiftRange::between(*run, s - 1);
                if (open_lo && *run == lo) piece.range.lo.reset();
                if (open_hi && s - 1 == hi) piece.range.hi.reset();
                out.periodic.push_back(piece);
                run.reset();
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Chain file format

namespace detail {

class ChainParser {
public:
    ChainParser(const Graph& g, const std::vector<text::Token>& tokens) : g_(g), t_(tokens) {}

    bool done() const { return i_ >= t_.size(); }
    const text::Token& peek() const { return t_.at(std::min(i_, t_.size() - 1)); }
    const text::Token& next() {
        if (done()) text::fail(t_.back(), "unexpected end of line");
        return t_[i_++];
    }
    bool accept(std::string_view s) {
        if (!done() && t_[i_].text == s) {
            ++i_;
            return true;
        }
        return false;
    }

    /// `pass e[0] +`, `walk v e v ...`, `const v`, `const end(+,0,0)`,
    /// `endjump <ray> ; <ray>`.
    Simplex simplex() {
        const auto& head = next();
        if (head.text == "pass") {
            const auto& e = next();
            if (!e.text.empty() && (e.text.back() == '+' || e.text.back() == '-') && e.text.find('[') != std::string::npos &&
                e.text[e.text.size() - 2] == ']')
                return Pass{g_.parse_oriented(e)};
            const auto& sign = next();
            if (sign.text != "+" && sign.text != "-") text::fail(sign, "expected + or -");
            return Pass{OrientedEdge{g_.parse_edge(e), sign.text == "+"}};
        }
        if (head.text == "walk") return walk();
        if (head.text == "const") {
            const auto& p = next();
            if (p.text == "end" || p.text.rfind("end(", 0) == 0) {
                std::string name = p.text;
                while (name.back() != ')') name += next().text;
                try {
                    return Constant{parse_end_name(name)};
                } catch (const Error& e) {
                    text::fail(p, e.what());
                }
            }
            return Constant{g_.parse_vertex(p)};
        }
        if (head.text == "endjump") {
            EndJump j;
            j.out = ray();
            text::expect(next(), ";");
            j.in = ray();
            return j;
        }
        text::fail(head, "unknown simplex '" + head.text + "'");
    }

    Walk walk() {
        Walk w{g_.parse_vertex(next()), {}};
        VertexId at = w.start;
        while (!done() && peek().text != "}" && peek().text != ")" && peek().text != ";" && peek().text != "left" &&
               peek().text != "right") {
            const auto& etok = next();
            EdgeId e = g_.parse_edge(etok);
            VertexId to = g_.parse_vertex(next());
            w.edges.push_back(orient(etok, e, at, to));
            at = to;
        }
        return w;
    }

    /// `<v> <e> <v> ... ( <e> <v> ... )`
    RayDescriptor ray() {
        RayDescriptor r{g_.parse_vertex(next()), {}, {}};
        VertexId at = r.start;
        while (!accept("(")) {
            const auto& etok = next();
            EdgeId e = g_.parse_edge(etok);
            VertexId to = g_.parse_vertex(next());
            r.initial.push_back(orient(etok, e, at, to));
            at = to;
        }
        while (!accept(")")) {
            const auto& etok = next();
            EdgeId e = g_.parse_edge(etok);
            VertexId to = g_.parse_vertex(next());
            r.period.push_back(orient(etok, e, at, to));
            at = to;
        }
        return r;
    }

    ShiftRange range() {
        const auto& tok = next();
        const std::string& s = tok.text;
        auto dots = s.find("..");
        if (s.size() < 4 || s.front() != '[' || s.back() != ']' || dots == std::string::npos)
            text::fail(tok, "expected a range such as [0..], [..], [-2..3]");
        std::string a = s.substr(1, dots - 1), b = s.substr(dots + 2, s.size() - dots - 3);
        ShiftRange r;
        if (!a.empty()) {
            auto v = text::to_int(a);
            if (!v) text::fail(tok, "bad range bound '" + a + "'");
            r.lo = *v;
        }
        if (!b.empty()) {
            auto v = text::to_int(b);
            if (!v) text::fail(tok, "bad range bound '" + b + "'");
            r.hi = *v;
        }
        return r;
    }

    Walk segment() {
        text::expect(next(), "(");
        Walk w = walk();
        text::expect(next(), ")");
        return w;
    }

private:
    static EndId parse_end_name(const std::string& s) {
        EndId e;
        char sign = 0, close = 0;
        long long q = 0, res = 0;
        if (std::sscanf(s.c_str(), "end(%c,%lld,%lld%c", &sign, &q, &res, &close) != 4 || close != ')' ||
            (sign != '+' && sign != '-'))
            throw Error(ErrorKind::ParseError, "malformed end name '" + s + "'");
        e.direction = sign == '+' ? 1 : -1;
        e.component = static_cast<int>(q);
        e.residue = res;
        return e;
    }

    OrientedEdge orient(const text::Token& at_tok, EdgeId e, VertexId from, VertexId to) const {
        if (g_.tail(e) == from && g_.head(e) == to) return OrientedEdge{e, true};
        if (g_.head(e) == from && g_.tail(e) == to) return OrientedEdge{e, false};
        text::fail(at_tok, "edge " + at_tok.text + " does not join " + g_.vertex_name(from) + " and " + g_.vertex_name(to));
    }

    const Graph& g_;
    const std::vector<text::Token>& t_;
    std::size_t i_ = 0;
};

}  // namespace detail

/// Lines: `[coeff <k>] <simplex>`, `[coeff <k>] periodic <range> { <simplex> }`,
/// `[coeff <k>] grow <range> { walk ... } left ( <walk> ) right ( <walk> )`.
inline ChainRep parse_chain(const Graph& g, std::string_view source) {
    ChainRep rep;
    for (const auto& line : text::split_lines(source)) {
        detail::ChainParser p(g, line.tokens);
        Value k = 1;
        if (p.accept("coeff")) k = text::expect_int(p.next());
        const auto& head = p.peek();
        try {
            if (p.accept("periodic")) {
                ShiftRange r = p.range();
                text::expect(p.next(), "{");
                Simplex s = p.simplex();
                text::expect(p.next(), "}");
                rep.periodic.push_back({k, s, r});
            } else if (p.accept("grow")) {
                PeriodicTerm t;
                t.coefficient = k;
                t.mode = PeriodicTerm::Mode::Grow;
                t.range = p.range();
                text::expect(p.next(), "{");
                text::expect(p.next(), "walk");
                t.simplex = p.walk();
                text::expect(p.next(), "}");
                text::expect(p.next(), "left");
                t.left = p.segment();
                text::expect(p.next(), "right");
                t.right = p.segment();
                rep.periodic.push_back(t);
            } else {
                rep.finite.push_back({k, p.simplex()});
            }
            if (!p.done()) text::fail(p.peek(), "unexpected '" + p.peek().text + "'");
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            text::fail(head, e.what());
        }
    }
    return rep;
}

namespace detail {

inline std::string walk_text(const Graph& g, VertexId start, const std::vector<OrientedEdge>& edges) {
    std::string out = g.vertex_name(start);
    for (const auto& o : edges) out += " " + g.edge_name(o.edge) + " " + g.vertex_name(g.target(o));
    return out;
}

inline std::string ray_text(const Graph& g, const RayDescriptor& r) {
    std::string out = walk_text(g, r.start, r.initial);
    VertexId at = walk_end(g, r.start, r.initial);
    out += " (";
    for (const auto& o : r.period) {
        out += " " + g.edge_name(o.edge) + " " + g.vertex_name(g.target(o));
        at = g.target(o);
    }
    return out + " )";
}

}  // namespace detail

inline std::string format_simplex(const Graph& g, const Simplex& s) {
    if (const auto* p = std::get_if<Pass>(&s)) return "pass " + g.edge_name(p->edge.edge) + (p->edge.forward ? " +" : " -");
    if (const auto* w = std::get_if<Walk>(&s)) return "walk " + detail::walk_text(g, w->start, w->edges);
    if (const auto* c = std::get_if<Constant>(&s)) {
        if (const auto* v = std::get_if<VertexId>(&c->point)) return "const " + g.vertex_name(*v);
        return "const " + std::get<EndId>(c->point).name();
    }
    const auto& j = std::get<EndJump>(s);
    return "endjump " + detail::ray_text(g, j.out) + " ; " + detail::ray_text(g, j.in);
}

inline std::string format_chain(const Graph& g, const ChainRep& rep) {
    std::string out;
    auto coeff = [](Value k) { return k == 1 ? std::string() : "coeff " + std::to_string(k) + " "; };
    for (const auto& t : rep.finite) out += coeff(t.coefficient) + format_simplex(g, t.simplex) + "\n";
    for (const auto& t : rep.periodic) {
        if (t.mode == PeriodicTerm::Mode::Grow) {
            const auto& core = std::get<Walk>(t.simplex);
            out += coeff(t.coefficient) + "grow " + t.range.str() + " { walk " + detail::walk_text(g, core.start, core.edges) +
                   " } left ( " + detail::walk_text(g, t.left.start, t.left.edges) + " ) right ( " +
                   detail::walk_text(g, t.right.start, t.right.edges) + " )\n";
        } else {
            out += coeff(t.coefficient) + "periodic " + t.range.str() + " { " + format_simplex(g, t.simplex) + " }\n";
        }
    }
    return out;
}

/// Pair file: `delete <v> ...` and `keep <vertex>` lines; each kept vertex
/// names the component of G minus the deleted set that contains it.
inline AdmissiblePair parse_pair(const Graph& g, std::string_view source) {
    std::vector<VertexId> deleted;
    std::vector<std::pair<text::Token, VertexId>> keep;
    for (const auto& line : text::split_lines(source)) {
        const auto& t = line.tokens;
        if (t[0].text == "delete") {
            for (std::size_t i = 1; i < t.size(); ++i) deleted.push_back(g.parse_vertex(t[i]));
        } else if (t[0].text == "keep") {
            for (std::size_t i = 1; i < t.size(); ++i) keep.emplace_back(t[i], g.parse_vertex(t[i]));
        } else {
            text::fail(t[0], "expected 'delete' or 'keep'");
        }
    }
    AdmissiblePair pair{deleted, {}};
    ComponentMap map(g, deleted);
    for (const auto& [tok, v] : keep) {
        auto key = map.key_of(v);
        if (!key) text::fail(tok, "kept vertex " + tok.text + " is deleted");
        pair.kept.push_back(key->component);
    }
    std::sort(pair.kept.begin(), pair.kept.end());
    pair.kept.erase(std::unique(pair.kept.begin(), pair.kept.end()), pair.kept.end());
    return pair;
}

}  // namespace endcycle

#endif
