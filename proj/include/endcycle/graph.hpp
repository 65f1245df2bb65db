#ifndef ENDCYCLE_GRAPH_HPP
#define ENDCYCLE_GRAPH_HPP

// Finitely described locally finite graphs: finite graphs, and graphs built
// from a cell pattern repeated over the integers (periodic-z) or the naturals
// (periodic-n), optionally with a finite set of cap vertices. Every such graph
// has finitely many ends, and the end structure is computed from the quotient
// "voltage" graph of the cell pattern.

#include <algorithm>
#include <atomic>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "text.hpp"

namespace endcycle {

using Index = std::int64_t;

enum class GraphKind { Finite, PeriodicZ, PeriodicN };

inline const char* to_string(GraphKind kind) {
    switch (kind) {
        case GraphKind::Finite: return "finite";
        case GraphKind::PeriodicZ: return "periodic-z";
        case GraphKind::PeriodicN: return "periodic-n";
    }
    return "?";
}

/// A vertex instance. `cell` is meaningful only for periodic vertex classes
/// and is 0 otherwise.
struct VertexId {
    int cls = -1;
    Index cell = 0;
    auto operator<=>(const VertexId&) const = default;
};

/// An edge instance. For periodic classes `cell` is the lower of the two
/// endpoint cells; non-periodic edges use cell 0.
struct EdgeId {
    int cls = -1;
    Index cell = 0;
    auto operator<=>(const EdgeId&) const = default;
};

struct OrientedEdge {
    EdgeId edge;
    bool forward = true;  // natural direction

    OrientedEdge reversed() const { return OrientedEdge{edge, !forward}; }
    auto operator<=>(const OrientedEdge&) const = default;
};

/// An end of a periodic graph: the direction of infinity, the component of the
/// quotient pattern, and the residue class of the cover component.
struct EndId {
    int direction = 1;
    int component = 0;
    Index residue = 0;
    auto operator<=>(const EndId&) const = default;

    std::string name() const {
        return std::string("end(") + (direction > 0 ? "+" : "-") + "," + std::to_string(component) + "," +
               std::to_string(residue) + ")";
    }
};

// ---------------------------------------------------------------------------
// Textual description

struct VertexDecl {
    std::string name;
    bool cap = false;
};

struct EndpointRef {
    std::string vertex_class;
    std::optional<Index> offset;
};

struct EdgeDecl {
    std::string name;
    EndpointRef tail;
    EndpointRef head;
};

struct GraphSpec {
    std::string name = "unnamed";
    GraphKind kind = GraphKind::Finite;
    std::vector<VertexDecl> vertices;
    std::vector<EdgeDecl> edges;

    bool operator==(const GraphSpec& o) const {
        auto key = [](const GraphSpec& s) {
            std::vector<std::tuple<std::string, bool>> vs;
            for (const auto& v : s.vertices) vs.emplace_back(v.name, v.cap);
            std::vector<std::tuple<std::string, std::string, std::optional<Index>, std::string, std::optional<Index>>> es;
            for (const auto& e : s.edges)
                es.emplace_back(e.name, e.tail.vertex_class, e.tail.offset, e.head.vertex_class, e.head.offset);
            std::sort(vs.begin(), vs.end());
            std::sort(es.begin(), es.end());
            return std::tuple(s.name, s.kind, vs, es);
        };
        return key(*this) == key(o);
    }
};

namespace detail {
inline EndpointRef parse_endpoint(const text::Token& tok) {
    auto ref = text::parse_ref(tok);
    return EndpointRef{ref.name, ref.index};
}
}  // namespace detail

/// Parses the line-based graph format:
///
///     graph <name>
///     kind finite|periodic-z|periodic-n
///     vertex <class>          # or cap-vertex <class>
///     edge <class>: <tail>[<offset>] -> <head>[<offset>]
///
/// Lines may appear in any order; `#` starts a comment.
inline GraphSpec parse_graph_spec(std::string_view source) {
    GraphSpec spec;
    bool have_kind = false;
    for (const auto& line : text::split_lines(source)) {
        const auto& t = line.tokens;
        const std::string& head = t[0].text;
        if (head == "graph") {
            if (t.size() != 2) text::fail(t[0], "expected 'graph <name>'");
            spec.name = t[1].text;
        } else if (head == "kind") {
            if (t.size() != 2) text::fail(t[0], "expected 'kind <finite|periodic-z|periodic-n>'");
            if (t[1].text == "finite") spec.kind = GraphKind::Finite;
            else if (t[1].text == "periodic-z") spec.kind = GraphKind::PeriodicZ;
            else if (t[1].text == "periodic-n") spec.kind = GraphKind::PeriodicN;
            else text::fail(t[1], "unknown graph kind '" + t[1].text + "'");
            have_kind = true;
        } else if (head == "vertex" || head == "cap-vertex") {
            if (t.size() != 2) text::fail(t[0], "expected '" + head + " <class>'");
            if (!text::is_identifier(t[1].text)) text::fail(t[1], "bad vertex class name");
            spec.vertices.push_back(VertexDecl{t[1].text, head == "cap-vertex"});
        } else if (head == "edge") {
            if (t.size() != 6) text::fail(t[0], "expected 'edge <class>: <tail> -> <head>'");
            if (!text::is_identifier(t[1].text)) text::fail(t[1], "bad edge class name");
            text::expect(t[2], ":");
            text::expect(t[4], "->");
            spec.edges.push_back(EdgeDecl{t[1].text, detail::parse_endpoint(t[3]), detail::parse_endpoint(t[5])});
        } else {
            text::fail(t[0], "unknown directive '" + head + "'");
        }
    }
    (void)have_kind;
    return spec;
}

inline std::string format_graph_spec(const GraphSpec& spec) {
    std::ostringstream out;
    out << "graph " << spec.name << "\n";
    out << "kind " << to_string(spec.kind) << "\n";
    for (const auto& v : spec.vertices) out << (v.cap ? "cap-vertex " : "vertex ") << v.name << "\n";
    auto endpoint = [](const EndpointRef& r) {
        std::string s = r.vertex_class;
        if (r.offset) s += "[" + std::string(*r.offset >= 0 ? "+" : "") + std::to_string(*r.offset) + "]";
        return s;
    };
    for (const auto& e : spec.edges)
        out << "edge " << e.name << ": " << endpoint(e.tail) << " -> " << endpoint(e.head) << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Validated graph

struct VertexClass {
    std::string name;
    bool periodic = false;
};

/// For periodic edge classes `tail_cell`/`head_cell` are offsets relative to
/// the edge's cell (the smaller one is 0). For non-periodic classes they are
/// absolute cells of periodic endpoints, and 0 for cap endpoints.
struct EdgeClass {
    std::string name;
    int tail = -1;
    int head = -1;
    Index tail_cell = 0;
    Index head_cell = 0;
    bool periodic = false;
};

class Graph;
Graph validate(const GraphSpec& spec);

class Graph {
public:
    static constexpr Index kMaxOffset = 8;

    Graph() = default;

    const std::string& name() const { return name_; }
    GraphKind kind() const { return kind_; }
    bool is_periodic() const { return kind_ != GraphKind::Finite; }
    std::uint64_t id() const { return id_; }
    const GraphSpec& spec() const { return spec_; }

    const std::vector<VertexClass>& vertex_classes() const { return vclasses_; }
    const std::vector<EdgeClass>& edge_classes() const { return eclasses_; }

    /// Largest bond offset D (0 for graphs without periodic edges).
    Index max_offset() const { return max_offset_; }

    std::optional<int> find_vertex_class(std::string_view name) const {
        for (std::size_t i = 0; i < vclasses_.size(); ++i)
            if (vclasses_[i].name == name) return static_cast<int>(i);
        return std::nullopt;
    }
    std::optional<int> find_edge_class(std::string_view name) const {
        for (std::size_t i = 0; i < eclasses_.size(); ++i)
            if (eclasses_[i].name == name) return static_cast<int>(i);
        return std::nullopt;
    }

    bool has_vertex(VertexId v) const {
        if (v.cls < 0 || v.cls >= static_cast<int>(vclasses_.size())) return false;
        if (!vclasses_[v.cls].periodic) return v.cell == 0;
        return kind_ == GraphKind::PeriodicZ || v.cell >= 0;
    }

    bool has_edge(EdgeId e) const {
        if (e.cls < 0 || e.cls >= static_cast<int>(eclasses_.size())) return false;
        if (!eclasses_[e.cls].periodic) return e.cell == 0;
        return kind_ == GraphKind::PeriodicZ || e.cell >= 0;
    }

    void require_vertex(VertexId v) const {
        if (!has_vertex(v)) throw Error(ErrorKind::UnknownVertex, "vertex not in graph " + name_);
    }
    void require_edge(EdgeId e) const {
        if (!has_edge(e)) throw Error(ErrorKind::UnknownEdge, "edge not in graph " + name_);
    }

    VertexId tail(EdgeId e) const {
        const auto& c = eclasses_.at(e.cls);
        return VertexId{c.tail, c.periodic ? e.cell + c.tail_cell : c.tail_cell};
    }
    VertexId head(EdgeId e) const {
        const auto& c = eclasses_.at(e.cls);
        return VertexId{c.head, c.periodic ? e.cell + c.head_cell : c.head_cell};
    }
    VertexId source(OrientedEdge o) const { return o.forward ? tail(o.edge) : head(o.edge); }
    VertexId target(OrientedEdge o) const { return o.forward ? head(o.edge) : tail(o.edge); }

    /// All edges at `v`, oriented away from it.
    std::vector<OrientedEdge> incident(VertexId v) const {
        std::vector<OrientedEdge> out;
        if (!has_vertex(v)) return out;
        for (const auto& [cls, as_tail] : incidence_[v.cls]) {
            const auto& c = eclasses_[cls];
            Index own = as_tail ? c.tail_cell : c.head_cell;
            EdgeId e{cls, 0};
            if (c.periodic) {
                e.cell = v.cell - own;
            } else if (vclasses_[v.cls].periodic && own != v.cell) {
                continue;
            }
            if (has_edge(e)) out.push_back(OrientedEdge{e, as_tail});
        }
        return out;
    }

    std::size_t degree(int vertex_class) const { return incidence_.at(vertex_class).size(); }

    /// Periodic vertices in cells [lo, hi] (clamped to the index set) plus all
    /// non-periodic vertices, in sorted order.
    std::vector<VertexId> vertices_in_cells(Index lo, Index hi) const {
        std::vector<VertexId> out;
        if (kind_ == GraphKind::PeriodicN) lo = std::max<Index>(lo, 0);
        for (int c = 0; c < static_cast<int>(vclasses_.size()); ++c) {
            if (!vclasses_[c].periodic) {
                out.push_back(VertexId{c, 0});
                continue;
            }
            for (Index k = lo; k <= hi; ++k) out.push_back(VertexId{c, k});
        }
        return out;
    }

    /// Periodic edges with cell in [lo, hi] (clamped) plus all non-periodic edges.
    std::vector<EdgeId> edges_in_cells(Index lo, Index hi) const {
        std::vector<EdgeId> out;
        if (kind_ == GraphKind::PeriodicN) lo = std::max<Index>(lo, 0);
        for (int c = 0; c < static_cast<int>(eclasses_.size()); ++c) {
            if (!eclasses_[c].periodic) {
                out.push_back(EdgeId{c, 0});
                continue;
            }
            for (Index k = lo; k <= hi; ++k) out.push_back(EdgeId{c, k});
        }
        return out;
    }

    /// Lowest and highest cell touched by non-periodic edges (0,0 if none).
    std::pair<Index, Index> cap_cell_range() const { return cap_range_; }

    // -- names ------------------------------------------------------------

    std::string vertex_name(VertexId v) const {
        const auto& c = vclasses_.at(v.cls);
        return c.periodic ? c.name + "[" + std::to_string(v.cell) + "]" : c.name;
    }
    std::string edge_name(EdgeId e) const {
        const auto& c = eclasses_.at(e.cls);
        return c.periodic ? c.name + "[" + std::to_string(e.cell) + "]" : c.name;
    }
    std::string oriented_name(OrientedEdge o) const { return edge_name(o.edge) + (o.forward ? "+" : "-"); }

    VertexId parse_vertex(const text::Token& tok) const {
        auto ref = text::parse_ref(tok);
        auto cls = find_vertex_class(ref.name);
        if (!cls) text::fail(tok, "unknown vertex class '" + ref.name + "'");
        VertexId v{*cls, 0};
        if (vclasses_[*cls].periodic) {
            if (!ref.index) text::fail(tok, "periodic vertex '" + ref.name + "' needs an index");
            v.cell = *ref.index;
        } else if (ref.index && *ref.index != 0) {
            text::fail(tok, "vertex '" + ref.name + "' is not periodic");
        }
        if (!has_vertex(v)) text::fail(tok, "vertex '" + tok.text + "' is not in the graph");
        return v;
    }

    /// Looks up a vertex by its display name, e.g. "v[3]" or "o".
    std::optional<VertexId> find_vertex(std::string_view name) const {
        try {
            return parse_vertex(text::Token{std::string(name), 0, 0});
        } catch (const ParseError&) {
            return std::nullopt;
        }
    }

    EdgeId parse_edge(const text::Token& tok) const {
        auto ref = text::parse_ref(tok);
        auto cls = find_edge_class(ref.name);
        if (!cls) text::fail(tok, "unknown edge class '" + ref.name + "'");
        EdgeId e{*cls, 0};
        if (eclasses_[*cls].periodic) {
            if (!ref.index) text::fail(tok, "periodic edge '" + ref.name + "' needs an index");
            e.cell = *ref.index;
        } else if (ref.index && *ref.index != 0) {
            text::fail(tok, "edge '" + ref.name + "' is not periodic");
        }
        if (!has_edge(e)) text::fail(tok, "edge '" + tok.text + "' is not in the graph");
        return e;
    }

    /// `e[3]+` / `e[3]-`.
    OrientedEdge parse_oriented(const text::Token& tok) const {
        if (tok.text.size() < 2 || (tok.text.back() != '+' && tok.text.back() != '-'))
            text::fail(tok, "expected oriented edge such as e[0]+");
        text::Token inner = tok;
        inner.text.pop_back();
        return OrientedEdge{parse_edge(inner), tok.text.back() == '+'};
    }

    // -- cover structure --------------------------------------------------

    /// Component of the quotient pattern graph, or -1 for cap vertex classes.
    int quotient_component(int vertex_class) const { return qcomp_.at(vertex_class); }
    Index potential(int vertex_class) const { return potential_.at(vertex_class); }
    /// gcd of cycle voltages of a quotient component; 0 means every lift is finite.
    Index modulus(int quotient_component) const { return modulus_.at(quotient_component); }
    std::size_t quotient_component_count() const { return modulus_.size(); }

    /// Residue (modulus > 0) or copy index (modulus 0) of the cover component
    /// containing a periodic vertex.
    Index label(VertexId v) const {
        Index level = v.cell - potential_.at(v.cls);
        Index m = modulus_.at(qcomp_.at(v.cls));
        if (m == 0) return level;
        return ((level % m) + m) % m;
    }

    /// The end a far-out periodic vertex lies towards, if its cover component
    /// is infinite.
    std::optional<EndId> end_towards(VertexId v, int direction) const {
        if (!vclasses_.at(v.cls).periodic) return std::nullopt;
        int q = qcomp_[v.cls];
        if (modulus_[q] == 0) return std::nullopt;
        return EndId{direction, q, label(v)};
    }

    const std::vector<EndId>& ends() const { return ends_; }
    bool has_end(const EndId& e) const { return std::binary_search(ends_.begin(), ends_.end(), e); }

private:
    friend Graph validate(const GraphSpec& spec);

    std::string name_;
    GraphKind kind_ = GraphKind::Finite;
    std::uint64_t id_ = 0;
    GraphSpec spec_;
    std::vector<VertexClass> vclasses_;
    std::vector<EdgeClass> eclasses_;
    std::vector<std::vector<std::pair<int, bool>>> incidence_;
    Index max_offset_ = 0;
    std::pair<Index, Index> cap_range_{0, 0};
    std::vector<int> qcomp_;
    std::vector<Index> potential_;
    std::vector<Index> modulus_;
    std::vector<EndId> ends_;
};

namespace detail {
inline std::uint64_t next_graph_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter++;
}
}  // namespace detail

inline Graph validate(const GraphSpec& spec) {
    Graph g;
    g.name_ = spec.name;
    g.kind_ = spec.kind;
    g.spec_ = spec;
    g.id_ = detail::next_graph_id();

    // Classes are stored sorted by name so that index order is name order;
    // tie-breaking everywhere relies on this.
    std::vector<VertexDecl> vdecls = spec.vertices;
    std::sort(vdecls.begin(), vdecls.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    for (std::size_t i = 1; i < vdecls.size(); ++i)
        if (vdecls[i].name == vdecls[i - 1].name)
            throw Error(ErrorKind::UnknownVertexClass, "duplicate vertex class '" + vdecls[i].name + "'");
    for (const auto& v : vdecls)
        g.vclasses_.push_back(VertexClass{v.name, spec.kind != GraphKind::Finite && !v.cap});

    std::vector<EdgeDecl> edecls = spec.edges;
    std::sort(edecls.begin(), edecls.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    for (std::size_t i = 1; i < edecls.size(); ++i)
        if (edecls[i].name == edecls[i - 1].name)
            throw Error(ErrorKind::UnknownEdge, "duplicate edge class '" + edecls[i].name + "'");

    bool first_cap_cell = true;
    for (const auto& d : edecls) {
        auto tail = g.find_vertex_class(d.tail.vertex_class);
        auto head = g.find_vertex_class(d.head.vertex_class);
        if (!tail) throw Error(ErrorKind::UnknownVertexClass, "edge " + d.name + ": '" + d.tail.vertex_class + "'");
        if (!head) throw Error(ErrorKind::UnknownVertexClass, "edge " + d.name + ": '" + d.head.vertex_class + "'");
        EdgeClass c;
        c.name = d.name;
        c.tail = *tail;
        c.head = *head;
        bool tp = g.vclasses_[*tail].periodic;
        bool hp = g.vclasses_[*head].periodic;
        if ((!tp && d.tail.offset && *d.tail.offset != 0 && spec.kind == GraphKind::Finite) ||
            (!hp && d.head.offset && *d.head.offset != 0 && spec.kind == GraphKind::Finite))
            throw Error(ErrorKind::BadOffset, "edge " + d.name + ": offsets are not allowed in finite graphs");
        if ((!tp && d.tail.offset && *d.tail.offset != 0) || (!hp && d.head.offset && *d.head.offset != 0))
            throw Error(ErrorKind::BadOffset, "edge " + d.name + ": cap vertices take no index");
        c.periodic = tp && hp;
        if (c.periodic) {
            Index ot = d.tail.offset.value_or(0);
            Index oh = d.head.offset.value_or(0);
            Index lo = std::min(ot, oh);
            c.tail_cell = ot - lo;
            c.head_cell = oh - lo;
            Index span = std::max(c.tail_cell, c.head_cell);
            if (span > Graph::kMaxOffset)
                throw Error(ErrorKind::BadOffset, "edge " + d.name + ": offset " + std::to_string(span) +
                                                      " exceeds bound " + std::to_string(Graph::kMaxOffset));
            g.max_offset_ = std::max(g.max_offset_, span);
        } else {
            c.tail_cell = tp ? d.tail.offset.value_or(0) : 0;
            c.head_cell = hp ? d.head.offset.value_or(0) : 0;
            for (auto [periodic, cell] : {std::pair{tp, c.tail_cell}, std::pair{hp, c.head_cell}}) {
                if (!periodic) continue;
                if (spec.kind == GraphKind::PeriodicN && cell < 0)
                    throw Error(ErrorKind::BadOffset, "edge " + d.name + ": negative cell in periodic-n graph");
                if (first_cap_cell) g.cap_range_ = {cell, cell};
                g.cap_range_.first = std::min(g.cap_range_.first, cell);
                g.cap_range_.second = std::max(g.cap_range_.second, cell);
                first_cap_cell = false;
            }
        }
        if (c.tail == c.head && c.tail_cell == c.head_cell)
            throw Error(ErrorKind::LoopEdge, "edge " + d.name + " is a loop");
        g.eclasses_.push_back(c);
    }

    g.incidence_.assign(g.vclasses_.size(), {});
    for (int i = 0; i < static_cast<int>(g.eclasses_.size()); ++i) {
        g.incidence_[g.eclasses_[i].tail].push_back({i, true});
        g.incidence_[g.eclasses_[i].head].push_back({i, false});
    }

    // Quotient components, level potentials and voltage moduli.
    std::size_t n = g.vclasses_.size();
    g.qcomp_.assign(n, -1);
    g.potential_.assign(n, 0);
    for (std::size_t start = 0; start < n; ++start) {
        if (!g.vclasses_[start].periodic || g.qcomp_[start] >= 0) continue;
        int q = static_cast<int>(g.modulus_.size());
        Index modulus = 0;
        std::vector<int> stack{static_cast<int>(start)};
        g.qcomp_[start] = q;
        std::vector<int> members;
        while (!stack.empty()) {
            int a = stack.back();
            stack.pop_back();
            members.push_back(a);
            for (auto [cls, as_tail] : g.incidence_[a]) {
                const auto& c = g.eclasses_[cls];
                if (!c.periodic) continue;
                int b = as_tail ? c.head : c.tail;
                Index step = as_tail ? c.head_cell - c.tail_cell : c.tail_cell - c.head_cell;
                if (g.qcomp_[b] < 0) {
                    g.qcomp_[b] = q;
                    g.potential_[b] = g.potential_[a] + step;
                    stack.push_back(b);
                }
            }
        }
        for (int a : members)
            for (auto [cls, as_tail] : g.incidence_[a]) {
                const auto& c = g.eclasses_[cls];
                if (!c.periodic || !as_tail) continue;
                Index delta = (c.head_cell - c.tail_cell) - (g.potential_[c.head] - g.potential_[c.tail]);
                modulus = std::gcd(modulus, delta < 0 ? -delta : delta);
            }
        g.modulus_.push_back(modulus);
    }

    for (int q = 0; q < static_cast<int>(g.modulus_.size()); ++q) {
        for (Index r = 0; r < g.modulus_[q]; ++r) {
            if (g.kind_ == GraphKind::PeriodicZ) g.ends_.push_back(EndId{-1, q, r});
            g.ends_.push_back(EndId{+1, q, r});
        }
    }
    std::sort(g.ends_.begin(), g.ends_.end());
    return g;
}

inline Graph parse_graph(std::string_view source) { return validate(parse_graph_spec(source)); }

// ---------------------------------------------------------------------------
// Finite pieces

struct FiniteSubgraph {
    std::vector<VertexId> vertices;
    std::vector<EdgeId> edges;
};

struct Truncation {
    FiniteSubgraph subgraph;
    std::vector<VertexId> boundary;
};

/// Cell range kept by truncate(g, r).
inline std::pair<Index, Index> truncation_cells(const Graph& g, Index r) {
    if (g.kind() == GraphKind::PeriodicN) return {0, r};
    return {-r, r};
}

/// Induced subgraph on the vertex set, using candidate edges in `cells`.
inline FiniteSubgraph induced(const Graph& g, const std::vector<VertexId>& vertices) {
    FiniteSubgraph sub;
    sub.vertices = vertices;
    std::sort(sub.vertices.begin(), sub.vertices.end());
    std::set<EdgeId> edges;
    for (const auto& v : sub.vertices)
        for (const auto& o : g.incident(v))
            if (std::binary_search(sub.vertices.begin(), sub.vertices.end(), g.target(o))) edges.insert(o.edge);
    sub.edges.assign(edges.begin(), edges.end());
    return sub;
}

/// Cells (or cap and cells) with |index| <= r, together with the vertices that
/// have an edge leaving the truncation.
inline Truncation truncate(const Graph& g, Index r) {
    Truncation t;
    std::vector<VertexId> vertices;
    if (g.is_periodic()) {
        auto [lo, hi] = truncation_cells(g, r);
        vertices = g.vertices_in_cells(lo, hi);
    } else {
        vertices = g.vertices_in_cells(0, 0);
    }
    t.subgraph = induced(g, vertices);
    for (const auto& v : t.subgraph.vertices)
        for (const auto& o : g.incident(v))
            if (!std::binary_search(t.subgraph.vertices.begin(), t.subgraph.vertices.end(), g.target(o))) {
                t.boundary.push_back(v);
                break;
            }
    return t;
}

/// Induced subgraph on vertices within graph distance r of `center`.
inline FiniteSubgraph ball(const Graph& g, VertexId center, Index r) {
    g.require_vertex(center);
    std::map<VertexId, Index> dist{{center, 0}};
    std::queue<VertexId> queue;
    queue.push(center);
    while (!queue.empty()) {
        VertexId v = queue.front();
        queue.pop();
        if (dist[v] == r) continue;
        for (const auto& o : g.incident(v)) {
            VertexId w = g.target(o);
            if (dist.emplace(w, dist[v] + 1).second) queue.push(w);
        }
    }
    std::vector<VertexId> vertices;
    for (const auto& [v, d] : dist) vertices.push_back(v);
    return induced(g, vertices);
}

// ---------------------------------------------------------------------------
// Walks and rays

/// Follows `edges` from `start`; throws NotARay-free UnknownEdge/UnknownVertex
/// style errors through `kind` when the walk is not contiguous.
inline VertexId walk_end(const Graph& g, VertexId start, const std::vector<OrientedEdge>& edges,
                         ErrorKind kind = ErrorKind::UnknownEdge) {
    VertexId at = start;
    for (const auto& o : edges) {
        if (!g.has_edge(o.edge)) throw Error(kind, "walk uses an edge outside the graph");
        if (g.source(o) != at)
            throw Error(kind, "walk is not contiguous at " + g.oriented_name(o) + " (expected to leave " +
                                  g.vertex_name(at) + ")");
        at = g.target(o);
    }
    return at;
}

/// A ray given by an initial walk from `start` followed by a periodic tail:
/// `period` is walked from the end of `initial` and then repeated, each copy
/// shifted by the cell difference between its end and its start.
struct RayDescriptor {
    VertexId start;
    std::vector<OrientedEdge> initial;
    std::vector<OrientedEdge> period;

    auto operator<=>(const RayDescriptor&) const = default;
};

inline VertexId shifted(VertexId v, const Graph& g, Index s) {
    if (g.vertex_classes().at(v.cls).periodic) v.cell += s;
    return v;
}
inline EdgeId shifted(EdgeId e, const Graph& g, Index s) {
    if (g.edge_classes().at(e.cls).periodic) e.cell += s;
    return e;
}
inline OrientedEdge shifted(OrientedEdge o, const Graph& g, Index s) {
    return OrientedEdge{shifted(o.edge, g, s), o.forward};
}

struct RayShape {
    VertexId tail_start;
    Index shift = 0;
};

/// Validates the ray and returns where its tail starts and how far each
/// period advances.
inline RayShape ray_shape(const Graph& g, const RayDescriptor& ray) {
    if (!g.has_vertex(ray.start)) throw Error(ErrorKind::NotARay, "ray start is not a vertex of the graph");
    VertexId tail_start = walk_end(g, ray.start, ray.initial, ErrorKind::NotARay);
    if (ray.period.empty()) throw Error(ErrorKind::NotARay, "ray has an empty period");
    VertexId period_end = walk_end(g, tail_start, ray.period, ErrorKind::NotARay);
    if (period_end.cls != tail_start.cls || !g.vertex_classes()[tail_start.cls].periodic)
        throw Error(ErrorKind::NotARay, "ray period does not return to its vertex class");
    for (const auto& o : ray.period)
        if (!g.edge_classes()[o.edge.cls].periodic)
            throw Error(ErrorKind::NotARay, "ray period uses non-periodic edge " + g.edge_name(o.edge));
    Index shift = period_end.cell - tail_start.cell;
    if (shift == 0) throw Error(ErrorKind::NotARay, "ray period does not advance");
    if (shift < 0 && g.kind() == GraphKind::PeriodicN)
        throw Error(ErrorKind::NotARay, "ray heads below cell 0 in a periodic-n graph");
    return RayShape{tail_start, shift};
}

/// Vertex sequence of the ray through `periods` repetitions of its tail.
inline std::vector<VertexId> ray_vertices(const Graph& g, const RayDescriptor& ray, Index periods) {
    std::vector<VertexId> out{ray.start};
    for (const auto& o : ray.initial) out.push_back(g.target(o));
    RayShape shape = ray_shape(g, ray);
    for (Index m = 0; m < periods; ++m)
        for (const auto& o : ray.period) out.push_back(shifted(g.target(o), g, m * shape.shift));
    return out;
}

/// Number of tail periods after which no later vertex can coincide with an
/// earlier one.
inline Index ray_check_periods(const Graph& g, const RayDescriptor& ray) {
    RayShape shape = ray_shape(g, ray);
    Index lo = shape.tail_start.cell, hi = shape.tail_start.cell;
    VertexId at = ray.start;
    auto touch = [&](VertexId v) {
        if (g.vertex_classes()[v.cls].periodic) {
            lo = std::min(lo, v.cell);
            hi = std::max(hi, v.cell);
        }
    };
    touch(at);
    for (const auto& o : ray.initial) touch(g.target(o));
    for (const auto& o : ray.period) touch(g.target(o));
    Index s = shape.shift < 0 ? -shape.shift : shape.shift;
    return (hi - lo) / s + 3;
}

/// Edge sequence of the ray through `periods` repetitions.
inline std::vector<OrientedEdge> ray_edges(const Graph& g, const RayDescriptor& ray, Index periods) {
    std::vector<OrientedEdge> out = ray.initial;
    RayShape shape = ray_shape(g, ray);
    for (Index m = 0; m < periods; ++m)
        for (const auto& o : ray.period) out.push_back(shifted(o, g, m * shape.shift));
    return out;
}

/// The end the ray converges to. Throws NotARay if the description is not an
/// injective one-way infinite path.
inline EndId end_of_ray(const Graph& g, const RayDescriptor& ray) {
    RayShape shape = ray_shape(g, ray);
    auto vertices = ray_vertices(g, ray, ray_check_periods(g, ray));
    std::set<VertexId> seen;
    for (const auto& v : vertices)
        if (!seen.insert(v).second) throw Error(ErrorKind::NotARay, "ray revisits " + g.vertex_name(v));
    auto end = g.end_towards(shape.tail_start, shape.shift > 0 ? 1 : -1);
    if (!end) throw Error(ErrorKind::NotARay, "ray tail lies in a finite component");
    return *end;
}

// ---------------------------------------------------------------------------
// Components of G minus a finite vertex set

struct ComponentInfo {
    enum class Kind { Finite, Unbounded, FiniteFamily };
    Kind kind = Kind::Finite;
    /// Finite: all vertices. Unbounded: the vertices inside the analysis
    /// window. FiniteFamily: one representative copy.
    std::vector<VertexId> vertices;
    std::vector<EndId> ends;
    int quotient_component = -1;
};

/// Components of G - removed for a finite `removed` set. Everything within a
/// window of cells around the removed set and the cap edges is computed by
/// union-find; beyond it the graph coincides with the periodic cover, whose
/// components are identified by (quotient component, label).
class ComponentMap {
public:
    struct Key {
        int component = -1;
        Index copy = 0;  // distinguishes copies of a FiniteFamily
        auto operator<=>(const Key&) const = default;
    };

    ComponentMap(const Graph& g, std::vector<VertexId> removed) : g_(&g), removed_(std::move(removed)) {
        std::sort(removed_.begin(), removed_.end());
        build();
    }

    const std::vector<ComponentInfo>& components() const { return components_; }

    std::size_t unbounded_count() const {
        return static_cast<std::size_t>(std::count_if(components_.begin(), components_.end(), [](const auto& c) {
            return c.kind == ComponentInfo::Kind::Unbounded;
        }));
    }
    bool has_infinitely_many() const {
        return std::any_of(components_.begin(), components_.end(),
                           [](const auto& c) { return c.kind == ComponentInfo::Kind::FiniteFamily; });
    }

    bool is_removed(VertexId v) const { return std::binary_search(removed_.begin(), removed_.end(), v); }

    std::optional<Key> key_of(VertexId v) const {
        if (!g_->has_vertex(v) || is_removed(v)) return std::nullopt;
        auto it = index_.find(v);
        if (it != index_.end()) return root_key_.at(find(it->second));
        // Outside the window: far region of the periodic cover.
        int q = g_->quotient_component(v.cls);
        if (g_->modulus(q) == 0) return Key{family_of_.at(q), g_->label(v)};
        int dir = v.cell > hi_ ? 1 : -1;
        return Key{end_component_.at(*g_->end_towards(v, dir)), 0};
    }

    std::optional<int> component_of_end(const EndId& e) const {
        auto it = end_component_.find(e);
        if (it == end_component_.end()) return std::nullopt;
        return it->second;
    }

    /// Window of cells analysed explicitly.
    std::pair<Index, Index> window() const { return {lo_, hi_}; }

private:
    std::size_t find(std::size_t i) const {
        while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
        return i;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

    void build() {
        const Graph& g = *g_;
        Index core_lo = 0, core_hi = 0;
        bool have_core = false;
        auto widen = [&](Index c) {
            if (!have_core) core_lo = core_hi = c;
            core_lo = std::min(core_lo, c);
            core_hi = std::max(core_hi, c);
            have_core = true;
        };
        for (const auto& v : removed_)
            if (g.vertex_classes()[v.cls].periodic) widen(v.cell);
        bool has_cap_edges = std::any_of(g.edge_classes().begin(), g.edge_classes().end(),
                                         [](const auto& c) { return !c.periodic; });
        if (has_cap_edges) {
            widen(g.cap_cell_range().first);
            widen(g.cap_cell_range().second);
        }
        if (!have_core) widen(0);

        Index periodic_classes = 0;
        for (const auto& c : g.vertex_classes()) periodic_classes += c.periodic ? 1 : 0;
        Index d = std::max<Index>(g.max_offset(), 1);
        margin_ = 4 * (periodic_classes + 1) * d + 4;
        lo_ = core_lo - margin_;
        hi_ = core_hi + margin_;
        if (g.kind() == GraphKind::PeriodicN) lo_ = std::max<Index>(lo_, 0);
        if (!g.is_periodic()) lo_ = hi_ = 0;

        std::vector<VertexId> verts;
        for (const auto& v : g.vertices_in_cells(lo_, hi_))
            if (!is_removed(v)) verts.push_back(v);
        for (std::size_t i = 0; i < verts.size(); ++i) index_[verts[i]] = i;
        parent_.resize(verts.size());
        std::iota(parent_.begin(), parent_.end(), 0);
        for (std::size_t i = 0; i < verts.size(); ++i)
            for (const auto& o : g.incident(verts[i])) {
                auto it = index_.find(g.target(o));
                if (it != index_.end()) unite(i, it->second);
            }

        // Far bands: vertices far from the core that share a cover component
        // are connected beyond the window.
        Index band = margin_ / 2;
        auto far_dir = [&](VertexId v) -> int {
            if (!g.vertex_classes()[v.cls].periodic) return 0;
            if (v.cell >= core_hi + band) return 1;
            if (g.kind() == GraphKind::PeriodicZ && v.cell <= core_lo - band) return -1;
            return 0;
        };
        std::map<std::tuple<int, int, Index>, std::size_t> cover_rep;
        for (std::size_t i = 0; i < verts.size(); ++i) {
            int dir = far_dir(verts[i]);
            if (dir == 0) continue;
            int q = g.quotient_component(verts[i].cls);
            auto key = g.modulus(q) == 0 ? std::tuple{0, q, g.label(verts[i])}
                                         : std::tuple{dir, q, g.label(verts[i])};
            auto [it, inserted] = cover_rep.emplace(key, i);
            if (!inserted) unite(i, it->second);
        }

        // Classify roots.
        std::map<std::size_t, std::vector<std::size_t>> groups;
        for (std::size_t i = 0; i < verts.size(); ++i) groups[find(i)].push_back(i);
        for (const auto& [root, members] : groups) {
            std::set<EndId> ends;
            bool all_finite_class = true;
            int family_q = -1;
            bool touches_far = false;
            bool intact = true;
            for (std::size_t i : members) {
                VertexId v = verts[i];
                int dir = far_dir(v);
                touches_far = touches_far || dir != 0;
                if (!g.vertex_classes()[v.cls].periodic) {
                    all_finite_class = false;
                    continue;
                }
                int q = g.quotient_component(v.cls);
                if (g.modulus(q) != 0) {
                    all_finite_class = false;
                    if (dir != 0) ends.insert(*g.end_towards(v, dir));
                } else {
                    if (family_q >= 0 && family_q != q) all_finite_class = false;
                    family_q = q;
                }
                for (const auto& o : g.incident(v)) {
                    VertexId w = g.target(o);
                    if (is_removed(w) || !g.vertex_classes()[w.cls].periodic) intact = false;
                }
            }
            if (!ends.empty()) {
                ComponentInfo info;
                info.kind = ComponentInfo::Kind::Unbounded;
                info.ends.assign(ends.begin(), ends.end());
                for (std::size_t i : members) info.vertices.push_back(verts[i]);
                int id = static_cast<int>(components_.size());
                components_.push_back(std::move(info));
                for (const auto& e : ends) end_component_[e] = id;
                root_key_[root] = Key{id, 0};
            } else if (all_finite_class && family_q >= 0 && (touches_far || intact)) {
                auto it = family_of_.find(family_q);
                if (it == family_of_.end()) {
                    ComponentInfo info;
                    info.kind = ComponentInfo::Kind::FiniteFamily;
                    info.quotient_component = family_q;
                    for (std::size_t i : members) info.vertices.push_back(verts[i]);
                    it = family_of_.emplace(family_q, static_cast<int>(components_.size())).first;
                    components_.push_back(std::move(info));
                }
                root_key_[root] = Key{it->second, g.label(verts[members.front()])};
            } else {
                ComponentInfo info;
                for (std::size_t i : members) info.vertices.push_back(verts[i]);
                root_key_[root] = Key{static_cast<int>(components_.size()), 0};
                components_.push_back(std::move(info));
            }
        }
        // Finite quotient components with no copy inside the window still
        // contribute a family.
        for (int q = 0; q < static_cast<int>(g.quotient_component_count()); ++q) {
            if (g.modulus(q) != 0 || family_of_.count(q)) continue;
            ComponentInfo info;
            info.kind = ComponentInfo::Kind::FiniteFamily;
            info.quotient_component = q;
            family_of_[q] = static_cast<int>(components_.size());
            components_.push_back(std::move(info));
        }
    }

    const Graph* g_;
    std::vector<VertexId> removed_;
    Index lo_ = 0, hi_ = 0, margin_ = 0;
    std::map<VertexId, std::size_t> index_;
    mutable std::vector<std::size_t> parent_;
    std::map<std::size_t, Key> root_key_;
    std::map<EndId, int> end_component_;
    std::map<int, int> family_of_;
    std::vector<ComponentInfo> components_;
};

/// Connected components of the graph. Components of the Freudenthal
/// compactification correspond one-to-one with these.
inline std::vector<ComponentInfo> components(const Graph& g) { return ComponentMap(g, {}).components(); }

/// Unbounded components of G minus truncate(g, r).
inline std::size_t unbounded_components_beyond(const Graph& g, Index r) {
    if (!g.is_periodic()) return 0;
    return ComponentMap(g, truncate(g, r).subgraph.vertices).unbounded_count();
}

/// Number of ends: the count of unbounded components outside truncate(g, r),
/// taken once two consecutive radii (both at least the bond range) agree.
inline std::size_t end_count(const Graph& g) {
    if (!g.is_periodic()) return 0;
    Index r = std::max<Index>(g.max_offset(), 1);
    std::size_t previous = unbounded_components_beyond(g, r);
    for (int attempt = 0; attempt < 64; ++attempt, ++r) {
        std::size_t next = unbounded_components_beyond(g, r + 1);
        if (next == previous) {
            if (next != g.ends().size())
                throw Error(ErrorKind::Internal, "stabilized end count disagrees with the cover structure");
            return next;
        }
        previous = next;
    }
    throw Error(ErrorKind::Internal, "end count did not stabilize");
}

}  // namespace endcycle

#endif
