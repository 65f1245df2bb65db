#ifndef ENDCYCLE_TESTS_CHAIN_FUZZ_HPP
#define ENDCYCLE_TESTS_CHAIN_FUZZ_HPP

// Seeded random chain representations assembled from a per-graph menu of
// simplices, placed at random shifts or repeated as periodic families.

#include <random>
#include <string>
#include <vector>

#include "endcycle/chains.hpp"
#include "endcycle/examples.hpp"

namespace chain_fuzz {

using namespace endcycle;

struct Menu {
    Graph graph;
    std::vector<std::string> simplices;  // may be shifted and repeated
    std::vector<std::string> fixed;      // used as-is, never shifted
    std::vector<std::string> cycles;     // closed simplices and cycle reps, one per entry
};

inline Menu ladder_menu() {
    return {parse_graph(examples::kDoubleLadder),
            {"pass e[0] +", "pass f[0] -", "pass e'[0] +", "walk v[0] e[0] v[1] f[1] v'[1]",
             "walk v[0] e[0] v[1] f[1] v'[1] e'[0] v'[0] f[0] v[0]", "const v[0]"},
            {},
            {"walk v[0] e[0] v[1] f[1] v'[1] e'[0] v'[0] f[0] v[0]",
             "periodic [..] { walk v[0] e[0] v[1] f[1] v'[1] e'[0] v'[0] f[0] v[0] }",
             "periodic [0..] { walk v[0] e[0] v[1] f[1] v'[1] e'[0] v'[0] f[0] v[0] }",
             "periodic [..] { pass e[0] + }\nperiodic [..] { pass f[1] + }\nperiodic [..] { pass e'[0] - }\nperiodic [..] { pass f[0] - }",
             "periodic [..] { pass e[0] + }", "periodic [..] { pass e'[0] - }",
             "walk v[0] e[0] v[1] e[1] v[2] f[2] v'[2] e'[1] v'[1] e'[0] v'[0] f[0] v[0]",
             "walk v[0] e[0] v[1] f[1] v'[1] f[1] v[1] e[0] v[0]", "const v'[2]"}};
}

inline Menu intro_menu() {
    return {parse_graph(examples::kIntroChords),
            {"pass right[0] +", "pass left[0] -", "pass chord[0] +", "walk p[0] chord[0] n[0] left[0] n[1]",
             "walk p[0] right[0] p[1] chord[1] n[1] left[0] n[0] chord[0] p[0]"},
            {"pass right0 +", "pass left0 +", "walk o right0 p[0] chord[0] n[0] left0 o",
             "endjump o right0 p[0] ( right[0] p[1] ) ; o left0 n[0] ( left[0] n[1] )"},
            {"walk p[0] right[0] p[1] chord[1] n[1] left[0] n[0] chord[0] p[0]", "walk o right0 p[0] chord[0] n[0] left0 o",
             "endjump o right0 p[0] ( right[0] p[1] ) ; o left0 n[0] ( left[0] n[1] )",
             "pass right0 +\npass left0 +\nperiodic [0..] { pass right[0] + }\nperiodic [0..] { pass left[0] + }",
             "periodic [1..] { walk p[0] right[0] p[1] chord[1] n[1] left[0] n[0] chord[0] p[0] }"}};
}

inline int draw(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

/// Random sum of menu simplices; infinite families are only drawn from
/// templates whose boundary telescopes, so the result always has a boundary.
inline ChainRep random_chain(const Menu& m, std::mt19937_64& rng, bool allow_rays = true) {
    static const std::vector<std::string> ranges = {"[..]", "[0..]", "[..2]", "[-1..3]", "[2..]", "[0..4]"};
    const Graph& g = m.graph;
    for (;;) {
        std::string src;
        int n = draw(rng, 1, 4);
        for (int i = 0; i < n; ++i) {
            int k = draw(rng, -3, 3);
            if (k == 0) k = 1;
            std::string coeff = "coeff " + std::to_string(k) + " ";
            if (!m.fixed.empty() && rng() % 4 == 0) {
                src += coeff + m.fixed[rng() % m.fixed.size()] + "\n";
                continue;
            }
            const auto& s = m.simplices[rng() % m.simplices.size()];
            std::string range = ranges[rng() % ranges.size()];
            if (g.kind() == GraphKind::PeriodicN && range.find("[..") == 0) range = "[0..]";
            if (rng() % 2) src += coeff + "periodic " + range + " { " + s + " }\n";
            else src += coeff + s + "\n";
        }
        auto rep = parse_chain(g, src);
        Index lo = g.kind() == GraphKind::PeriodicN ? 0 : -4;
        for (auto& t : rep.finite) {
            bool fixed_part = false;
            for (const auto& v : detail::simplex_vertices(g, t.simplex))
                if (!g.vertex_classes()[v.cls].periodic) fixed_part = true;
            if (!fixed_part) t.simplex = shifted(t.simplex, g, draw(rng, static_cast<int>(lo), 4));
        }
        try {
            if (!check_admissible(g, rep)) continue;
            boundary(g, rep);
            if (!allow_rays && !end_flux(g, rep).empty()) continue;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::InfiniteBoundarySupport) throw;
            continue;
        }
        return rep;
    }
}

/// Random integer combination of menu cycles, shifted where possible.
inline ChainRep random_cycle(const Menu& m, std::mt19937_64& rng) {
    const Graph& g = m.graph;
    ChainRep out;
    int n = draw(rng, 1, 3);
    for (int i = 0; i < n; ++i) {
        auto rep = parse_chain(g, m.cycles[rng() % m.cycles.size()]);
        Value k = draw(rng, -2, 2);
        if (k == 0) k = 1;
        for (auto& t : rep.finite) t.coefficient *= k;
        for (auto& t : rep.periodic) t.coefficient *= k;
        bool movable = true;
        for (const auto& t : rep.finite)
            for (const auto& v : detail::simplex_vertices(g, t.simplex))
                if (!g.vertex_classes()[v.cls].periodic) movable = false;
        if (movable && rep.periodic.empty()) {
            Index s = draw(rng, g.kind() == GraphKind::PeriodicN ? 0 : -3, 3);
            for (auto& t : rep.finite) t.simplex = shifted(t.simplex, g, s);
        }
        out = out + rep;
    }
    return out;
}

}  // namespace chain_fuzz

#endif
