#ifndef ENDCYCLE_TESTS_ORACLE_HPP
#define ENDCYCLE_TESTS_ORACLE_HPP

// Brute-force cut oracle. Enumerates every X = S u H with S a subset of the
// truncation at radius r and H a union of unbounded components of the part of
// the graph beyond r, and evaluates the cut sum directly from crossing edges.
// Half-spaces are found by union-find on a wide window, independently of the
// library's end bookkeeping.

#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "endcycle/edge_space.hpp"

namespace oracle {

using namespace endcycle;

struct Violation {
    std::vector<VertexId> finite_part;
    std::vector<std::size_t> half_spaces;
    Value sum = 0;
};

class CutOracle {
public:
    CutOracle(const Graph& g, Index r) : g_(g) {
        inner_ = truncate(g, r).subgraph.vertices;
        for (std::size_t i = 0; i < inner_.size(); ++i) index_[inner_[i]] = static_cast<int>(i);
        if (g.is_periodic()) {
            Index width = 8 * (g.max_offset() + 1) * static_cast<Index>(g.vertex_classes().size() + 1) + 8;
            add_region(r + 1, r + width, 1, r + width - g.max_offset() + 1);
            if (g.kind() == GraphKind::PeriodicZ) add_region(-r - width, -r - 1, -1, -r - width + g.max_offset() - 1);
        }
        for (std::size_t i = 0; i < inner_.size(); ++i)
            for (const auto& o : g.incident(inner_[i])) {
                auto it = index_.find(g.target(o));
                if (it == index_.end()) continue;  // beyond the window: never adjacent to the truncation
                if (!o.forward) continue;
                edges_.push_back(EdgeRef{o.edge, static_cast<int>(i), it->second});
            }
        // edges with the head inside and the tail outside
        for (std::size_t i = 0; i < inner_.size(); ++i)
            for (const auto& o : g.incident(inner_[i])) {
                if (o.forward) continue;
                auto it = index_.find(g.target(o));
                if (it == index_.end() || it->second < static_cast<int>(inner_.size())) continue;
                edges_.push_back(EdgeRef{o.edge, it->second, static_cast<int>(i)});
            }
        at_.assign(inner_.size(), {});
        for (std::size_t k = 0; k < edges_.size(); ++k) {
            if (edges_[k].tail < static_cast<int>(inner_.size())) at_[edges_[k].tail].push_back(k);
            if (edges_[k].head < static_cast<int>(inner_.size()) && edges_[k].head != edges_[k].tail)
                at_[edges_[k].head].push_back(k);
        }
    }

    std::size_t subset_count() const { return std::size_t{1} << (inner_.size() + spaces_.size()); }
    std::size_t half_space_count() const { return spaces_.size(); }

    /// First X with a non-zero cut sum, in Gray-code order.
    std::optional<Violation> find_violation(const EdgeVector& phi) const {
        std::vector<Value> val(edges_.size());
        for (std::size_t k = 0; k < edges_.size(); ++k) val[k] = phi.value(edges_[k].edge);
        std::size_t n = inner_.size();
        std::vector<char> in(n + outer_.size(), 0);
        auto contrib = [&](std::size_t k) -> Value {
            bool t = in[edges_[k].tail], h = in[edges_[k].head];
            return t && !h ? val[k] : (h && !t ? -val[k] : 0);
        };
        for (std::uint64_t hmask = 0; hmask < (std::uint64_t{1} << spaces_.size()); ++hmask) {
            std::fill(in.begin(), in.end(), 0);
            for (std::size_t s = 0; s < spaces_.size(); ++s)
                if (hmask >> s & 1)
                    for (int v : spaces_[s]) in[v] = 1;
            Value sum = 0;
            for (std::size_t k = 0; k < edges_.size(); ++k) sum += contrib(k);
            for (std::uint64_t step = 0;; ++step) {
                if (sum != 0) return violation(in, hmask, sum);
                if (step + 1 == (std::uint64_t{1} << n)) break;
                std::size_t bit = static_cast<std::size_t>(__builtin_ctzll(step + 1));
                for (auto k : at_[bit]) sum -= contrib(k);
                in[bit] ^= 1;
                for (auto k : at_[bit]) sum += contrib(k);
            }
        }
        return std::nullopt;
    }

private:
    struct EdgeRef {
        EdgeId edge;
        int tail;
        int head;
    };

    void add_region(Index lo, Index hi, int, Index far) {
        std::vector<VertexId> vs;
        for (const auto& v : g_.vertices_in_cells(lo, hi))
            if (g_.vertex_classes()[v.cls].periodic) vs.push_back(v);
        std::map<VertexId, std::size_t> local;
        for (std::size_t i = 0; i < vs.size(); ++i) local[vs[i]] = i;
        std::vector<std::size_t> parent(vs.size());
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](std::size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (std::size_t i = 0; i < vs.size(); ++i)
            for (const auto& o : g_.incident(vs[i]))
                if (auto it = local.find(g_.target(o)); it != local.end()) parent[find(i)] = find(it->second);
        std::map<std::size_t, std::vector<int>> groups;
        std::map<std::size_t, bool> reaches_far;
        for (std::size_t i = 0; i < vs.size(); ++i) {
            int idx = static_cast<int>(inner_.size() + outer_.size());
            index_[vs[i]] = idx;
            outer_.push_back(vs[i]);
            groups[find(i)].push_back(idx);
            bool far_out = lo > 0 ? vs[i].cell >= far : vs[i].cell <= far;
            if (far_out) reaches_far[find(i)] = true;
        }
        for (auto& [root, members] : groups)
            if (reaches_far[root]) spaces_.push_back(members);
    }

    Violation violation(const std::vector<char>& in, std::uint64_t hmask, Value sum) const {
        Violation v;
        v.sum = sum;
        for (std::size_t i = 0; i < inner_.size(); ++i)
            if (in[i]) v.finite_part.push_back(inner_[i]);
        for (std::size_t s = 0; s < spaces_.size(); ++s)
            if (hmask >> s & 1) v.half_spaces.push_back(s);
        return v;
    }

    const Graph& g_;
    std::vector<VertexId> inner_;
    std::vector<VertexId> outer_;
    std::map<VertexId, int> index_;
    std::vector<std::vector<int>> spaces_;
    std::vector<EdgeRef> edges_;
    std::vector<std::vector<std::size_t>> at_;
};

}  // namespace oracle

#endif
