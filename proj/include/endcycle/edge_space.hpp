#ifndef ENDCYCLE_EDGE_SPACE_HPP
#define ENDCYCLE_EDGE_SPACE_HPP

// The oriented edge space: antisymmetric integer functions on oriented edges,
// restricted to the computable fragment of a finite part plus, per periodic
// edge class and direction of infinity, a constant tail.

#include <cstdint>
#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "graph.hpp"

namespace endcycle {

using Value = std::int64_t;

/// Constant value on all cells beyond `from` (inclusive) in one direction.
struct Tail {
    Index from = 0;
    Value value = 0;
    bool operator==(const Tail&) const = default;
};

class EdgeVector;
EdgeVector combine(const EdgeVector& a, Value ka, const EdgeVector& b, Value kb);

/// Values are stored on natural orientations; the reverse orientation reads
/// the negated value. Finite entries never lie inside a tail region.
class EdgeVector {
public:
    EdgeVector() = default;
    explicit EdgeVector(const Graph& g) : graph_id_(g.id()) {}

    std::uint64_t graph_id() const { return graph_id_; }

    Value value(EdgeId e) const {
        if (auto it = plus_.find(e.cls); it != plus_.end() && e.cell >= it->second.from) return it->second.value;
        if (auto it = minus_.find(e.cls); it != minus_.end() && e.cell <= it->second.from) return it->second.value;
        auto it = finite_.find(e);
        return it == finite_.end() ? 0 : it->second;
    }

    Value evaluate(OrientedEdge o) const { return o.forward ? value(o.edge) : -value(o.edge); }

    bool in_tail_region(EdgeId e) const {
        if (auto it = plus_.find(e.cls); it != plus_.end() && e.cell >= it->second.from) return true;
        if (auto it = minus_.find(e.cls); it != minus_.end() && e.cell <= it->second.from) return true;
        return false;
    }

    /// Sets a finite entry on the natural orientation.
    void set(EdgeId e, Value v) {
        if (in_tail_region(e)) throw Error(ErrorKind::UnknownEdge, "finite entry lies inside a tail region");
        if (v == 0) finite_.erase(e);
        else finite_[e] = v;
    }

    /// Installs a tail on a periodic edge class; `direction` is +1 or -1.
    void set_tail(const Graph& g, int cls, int direction, Index from, Value v) {
        if (cls < 0 || cls >= static_cast<int>(g.edge_classes().size()) || !g.edge_classes()[cls].periodic)
            throw Error(ErrorKind::UnknownEdge, "tails need a periodic edge class");
        if (direction < 0 && g.kind() != GraphKind::PeriodicZ)
            throw Error(ErrorKind::UnknownEdge, "negative tails exist only in periodic-z graphs");
        auto& tails = direction > 0 ? plus_ : minus_;
        auto& other = direction > 0 ? minus_ : plus_;
        if (auto it = other.find(cls); it != other.end()) {
            bool overlap = direction > 0 ? from <= it->second.from : from >= it->second.from;
            if (overlap) throw Error(ErrorKind::UnknownEdge, "tails of one class overlap");
        }
        for (const auto& [e, val] : finite_)
            if (e.cls == cls && (direction > 0 ? e.cell >= from : e.cell <= from))
                throw Error(ErrorKind::UnknownEdge, "tail covers an existing finite entry");
        if (v == 0) tails.erase(cls);
        else tails[cls] = Tail{from, v};
    }

    const std::map<EdgeId, Value>& finite_part() const { return finite_; }
    const std::map<int, Tail>& tails(int direction) const { return direction > 0 ? plus_ : minus_; }

    bool has_tails() const { return !plus_.empty() || !minus_.empty(); }
    bool is_zero() const { return finite_.empty() && plus_.empty() && minus_.empty(); }

    /// Lowest and highest cell mentioned by the finite part or a threshold.
    std::optional<std::pair<Index, Index>> cell_extent(const Graph& g) const {
        std::optional<std::pair<Index, Index>> out;
        auto touch = [&](Index c) {
            if (!out) out = std::pair{c, c};
            out->first = std::min(out->first, c);
            out->second = std::max(out->second, c);
        };
        for (const auto& [e, v] : finite_)
            if (g.edge_classes()[e.cls].periodic) touch(e.cell);
        for (const auto& [c, t] : plus_) touch(t.from);
        for (const auto& [c, t] : minus_) touch(t.from);
        return out;
    }

    EdgeVector shifted(const Graph& g, Index s) const {
        EdgeVector out(*this);
        out.finite_.clear();
        for (const auto& [e, v] : finite_) out.finite_[endcycle::shifted(e, g, s)] = v;
        for (auto& [c, t] : out.plus_) t.from += s;
        for (auto& [c, t] : out.minus_) t.from += s;
        return out;
    }

    friend bool operator==(const EdgeVector& a, const EdgeVector& b) {
        return a.graph_id_ == b.graph_id_ && combine(a, 1, b, -1).is_zero();
    }

private:
    friend EdgeVector combine(const EdgeVector&, Value, const EdgeVector&, Value);

    std::uint64_t graph_id_ = 0;
    std::map<EdgeId, Value> finite_;
    std::map<int, Tail> plus_;
    std::map<int, Tail> minus_;
};

/// ka * a + kb * b. Result tails start beyond every threshold and finite
/// entry of the inputs on their side; cells in between become finite entries.
inline EdgeVector combine(const EdgeVector& a, Value ka, const EdgeVector& b, Value kb) {
    if (a.graph_id_ != b.graph_id_) throw Error(ErrorKind::GraphMismatch, "edge vectors live on different graphs");
    EdgeVector out;
    out.graph_id_ = a.graph_id_;

    std::set<int> tail_classes;
    for (const auto* v : {&a, &b}) {
        for (const auto& [c, t] : v->plus_) tail_classes.insert(c);
        for (const auto& [c, t] : v->minus_) tail_classes.insert(c);
    }

    std::set<EdgeId> keys;
    for (const auto* v : {&a, &b})
        for (const auto& [e, val] : v->finite_) keys.insert(e);

    for (int cls : tail_classes) {
        std::vector<Index> plus_froms, minus_froms, cells;
        Value plus_value = 0, minus_value = 0;
        for (auto [v, k] : {std::pair{&a, ka}, std::pair{&b, kb}}) {
            if (auto it = v->plus_.find(cls); it != v->plus_.end()) {
                plus_froms.push_back(it->second.from);
                plus_value += k * it->second.value;
            }
            if (auto it = v->minus_.find(cls); it != v->minus_.end()) {
                minus_froms.push_back(it->second.from);
                minus_value += k * it->second.value;
            }
            for (const auto& [e, val] : v->finite_)
                if (e.cls == cls) cells.push_back(e.cell);
        }
        auto max_of = [](const std::vector<Index>& xs) { return *std::max_element(xs.begin(), xs.end()); };
        auto min_of = [](const std::vector<Index>& xs) { return *std::min_element(xs.begin(), xs.end()); };
        // A result tail starts beyond every threshold and entry on its side,
        // so only input tails of the same direction are active inside it.
        std::optional<Index> plus_from, minus_from;
        if (!plus_froms.empty()) {
            Index p = max_of(plus_froms);
            if (!cells.empty()) p = std::max(p, max_of(cells) + 1);
            if (!minus_froms.empty()) p = std::max(p, max_of(minus_froms) + 1);
            plus_from = p;
        }
        if (!minus_froms.empty()) {
            Index m = min_of(minus_froms);
            if (!cells.empty()) m = std::min(m, min_of(cells) - 1);
            if (!plus_froms.empty()) m = std::min(m, min_of(plus_froms) - 1);
            minus_from = m;
        }
        std::vector<Index> marks = cells;
        marks.insert(marks.end(), plus_froms.begin(), plus_froms.end());
        marks.insert(marks.end(), minus_froms.begin(), minus_froms.end());
        Index band_lo = minus_from ? *minus_from + 1 : min_of(marks);
        Index band_hi = plus_from ? *plus_from - 1 : max_of(marks);
        for (Index k = band_lo; k <= band_hi; ++k) keys.insert(EdgeId{cls, k});
        if (plus_from && plus_value != 0) out.plus_[cls] = Tail{*plus_from, plus_value};
        if (minus_from && minus_value != 0) out.minus_[cls] = Tail{*minus_from, minus_value};
    }

    for (const auto& e : keys) {
        if (out.in_tail_region(e)) continue;
        Value v = ka * a.value(e) + kb * b.value(e);
        if (v != 0) out.finite_[e] = v;
    }
    return out;
}

inline EdgeVector add(const EdgeVector& a, const EdgeVector& b) { return combine(a, 1, b, 1); }
inline EdgeVector subtract(const EdgeVector& a, const EdgeVector& b) { return combine(a, 1, b, -1); }
inline EdgeVector negate(const EdgeVector& a) { return combine(a, -1, a, 0); }
inline EdgeVector scale(Value k, const EdgeVector& a) { return combine(a, k, a, 0); }

inline EdgeVector operator+(const EdgeVector& a, const EdgeVector& b) { return add(a, b); }
inline EdgeVector operator-(const EdgeVector& a, const EdgeVector& b) { return subtract(a, b); }

inline Value evaluate(const EdgeVector& phi, OrientedEdge o) { return phi.evaluate(o); }

/// Indicator of a walk or circuit: +1 per traversal in the natural direction.
inline EdgeVector indicator(const Graph& g, const std::vector<OrientedEdge>& edges) {
    EdgeVector out(g);
    std::map<EdgeId, Value> counts;
    for (const auto& o : edges) {
        g.require_edge(o.edge);
        counts[o.edge] += o.forward ? 1 : -1;
    }
    for (const auto& [e, v] : counts) out.set(e, v);
    return out;
}

// ---------------------------------------------------------------------------
// Families

/// Shift range [lo, hi]; a missing bound is infinite.
struct ShiftRange {
    std::optional<Index> lo;
    std::optional<Index> hi;

    static ShiftRange all() { return {}; }
    static ShiftRange from(Index lo) { return {lo, std::nullopt}; }
    static ShiftRange upto(Index hi) { return {std::nullopt, hi}; }
    static ShiftRange between(Index lo, Index hi) { return {lo, hi}; }

    bool is_finite() const { return lo && hi; }
    bool contains(Index s) const { return (!lo || s >= *lo) && (!hi || s <= *hi); }
    bool empty() const { return lo && hi && *lo > *hi; }
    auto operator<=>(const ShiftRange&) const = default;

    std::string str() const {
        return "[" + (lo ? std::to_string(*lo) : std::string()) + ".." + (hi ? std::to_string(*hi) : std::string()) +
               "]";
    }
};

struct FamilyMember {
    Value coefficient = 1;
    EdgeVector vector;
};

/// The template shifted cell-by-cell over every s in `range`.
struct PeriodicFamilyMember {
    Value coefficient = 1;
    EdgeVector pattern;
    ShiftRange range;
};

struct VectorFamily {
    std::vector<FamilyMember> finite_members;
    std::vector<PeriodicFamilyMember> periodic_members;
};

struct ThinResult {
    bool thin = true;
    std::optional<OrientedEdge> witness;
    explicit operator bool() const { return thin; }
};

namespace detail {

inline void check_member_valid(const Graph& g, const PeriodicFamilyMember& m) {
    if (m.pattern.graph_id() != g.id()) throw Error(ErrorKind::GraphMismatch, "family member on another graph");
    if (m.range.empty()) return;
    if (g.kind() == GraphKind::PeriodicN) {
        auto extent = m.pattern.cell_extent(g);
        if (!extent) return;
        if (!m.range.lo || extent->first + *m.range.lo < 0)
            throw Error(ErrorKind::UnknownEdge, "periodic member shifts below cell 0");
    }
    if (!g.is_periodic() && (!m.range.is_finite() || *m.range.lo != *m.range.hi))
        throw Error(ErrorKind::UnknownEdge, "finite graphs admit no shifts");
}

inline std::optional<OrientedEdge> thin_witness(const Graph& g, const PeriodicFamilyMember& m) {
    if (m.coefficient == 0 || m.range.is_finite() || m.range.empty() || m.pattern.is_zero()) return std::nullopt;
    for (const auto& [e, v] : m.pattern.finite_part())
        if (!g.edge_classes()[e.cls].periodic) return OrientedEdge{e, true};
    Index anchor_lo = m.range.lo.value_or(0);
    Index anchor_hi = m.range.hi.value_or(0);
    if (!m.range.lo) {
        // Shifts run to -infinity: every plus tail sweeps over each edge.
        for (const auto& [c, t] : m.pattern.tails(1)) return OrientedEdge{EdgeId{c, t.from + anchor_hi}, true};
    }
    if (!m.range.hi) {
        for (const auto& [c, t] : m.pattern.tails(-1)) return OrientedEdge{EdgeId{c, t.from + anchor_lo}, true};
    }
    return std::nullopt;
}

}  // namespace detail

/// A family is thin iff each edge is non-zero in finitely many members.
/// Finite members never break thinness; a periodic member does exactly when
/// its template has a non-periodic entry or a tail pointing against an
/// unbounded shift direction.
inline ThinResult is_thin(const Graph& g, const VectorFamily& fam) {
    for (const auto& m : fam.periodic_members) {
        detail::check_member_valid(g, m);
        if (auto w = detail::thin_witness(g, m)) return ThinResult{false, w};
    }
    return ThinResult{};
}

/// Pointwise sum of a thin family. Periodic members over infinite ranges
/// turn each finite template entry into a tail; templates with tails along
/// an unbounded range have linearly growing sums, which are not representable.
inline EdgeVector thin_sum(const Graph& g, const VectorFamily& fam) {
    if (auto t = is_thin(g, fam); !t)
        throw Error(ErrorKind::NotThin, "family is not thin at " + g.oriented_name(*t.witness));
    EdgeVector out(g);
    for (const auto& m : fam.finite_members) {
        if (m.vector.graph_id() != g.id()) throw Error(ErrorKind::GraphMismatch, "family member on another graph");
        out = combine(out, 1, m.vector, m.coefficient);
    }
    for (const auto& m : fam.periodic_members) {
        if (m.coefficient == 0 || m.range.empty() || m.pattern.is_zero()) continue;
        if (m.range.is_finite()) {
            if (*m.range.hi - *m.range.lo > 1'000'000)
                throw Error(ErrorKind::Unsupported, "finite shift range too large to expand");
            for (Index s = *m.range.lo; s <= *m.range.hi; ++s)
                out = combine(out, 1, m.pattern.shifted(g, s), m.coefficient);
            continue;
        }
        if (m.pattern.has_tails())
            throw Error(ErrorKind::NotRepresentable, "sum of shifted tails grows without bound");
        EdgeVector contribution(g);
        for (const auto& [e, v] : m.pattern.finite_part()) {
            EdgeVector piece(g);
            if (m.range.lo && !m.range.hi) {
                piece.set_tail(g, e.cls, 1, e.cell + *m.range.lo, v);
            } else if (!m.range.lo && m.range.hi) {
                piece.set_tail(g, e.cls, -1, e.cell + *m.range.hi, v);
            } else {
                piece.set_tail(g, e.cls, 1, 0, v);
                piece.set_tail(g, e.cls, -1, -1, v);
            }
            contribution = add(contribution, piece);
        }
        out = combine(out, 1, contribution, m.coefficient);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Vector file format

/// Lines: `set <edge>[<i>] = <int>`, `tail+ <class> from <i> = <int>`,
/// `tail- <class> from <i> = <int>`, and `tail <class> from <i> = <int>`
/// (direction from the sign of the index in periodic-z graphs).
inline EdgeVector parse_vector(const Graph& g, std::string_view source) {
    EdgeVector out(g);
    struct Entry {
        text::Token at;
        EdgeId edge;
        Value value;
    };
    std::vector<Entry> sets;
    for (const auto& line : text::split_lines(source)) {
        const auto& t = line.tokens;
        const std::string& head = t[0].text;
        try {
            if (head == "set") {
                if (t.size() != 4) text::fail(t[0], "expected 'set <edge> = <int>'");
                text::expect(t[2], "=");
                sets.push_back(Entry{t[1], g.parse_edge(t[1]), text::expect_int(t[3])});
            } else if (head == "tail" || head == "tail+" || head == "tail-") {
                if (t.size() != 6) text::fail(t[0], "expected '" + head + " <class> from <index> = <int>'");
                text::expect(t[2], "from");
                text::expect(t[4], "=");
                auto cls = g.find_edge_class(t[1].text);
                if (!cls) text::fail(t[1], "unknown edge class '" + t[1].text + "'");
                Index from = text::expect_int(t[3]);
                int dir = head == "tail+" ? 1 : head == "tail-" ? -1 : (g.kind() == GraphKind::PeriodicZ && from < 0 ? -1 : 1);
                out.set_tail(g, *cls, dir, from, text::expect_int(t[5]));
            } else {
                text::fail(t[0], "unknown directive '" + head + "'");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            text::fail(t[0], e.what());
        }
    }
    for (const auto& s : sets) {
        if (out.in_tail_region(s.edge)) text::fail(s.at, "entry lies inside a tail region");
        if (out.value(s.edge) != 0) text::fail(s.at, "duplicate entry");
        out.set(s.edge, s.value);
    }
    return out;
}

inline std::string format_vector(const Graph& g, const EdgeVector& phi) {
    std::ostringstream out;
    for (const auto& [e, v] : phi.finite_part()) out << "set " << g.edge_name(e) << " = " << v << "\n";
    for (int dir : {1, -1})
        for (const auto& [c, t] : phi.tails(dir))
            out << (dir > 0 ? "tail+ " : "tail- ") << g.edge_classes()[c].name << " from " << t.from << " = "
                << t.value << "\n";
    return out.str();
}

}  // namespace endcycle

#endif
