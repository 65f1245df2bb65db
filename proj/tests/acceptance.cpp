// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "endcycle/certificate.hpp"
#include "endcycle/chains.hpp"
#include "endcycle/cli.hpp"
#include "support/chain_fuzz.hpp"
#include "support/fuzz.hpp"
#include "support/oracle.hpp"

using namespace endcycle;

namespace {

using Clock = std::chrono::steady_clock;

struct Check {
    bool ok = true;
    std::ostringstream detail;
    void require(bool cond, const std::string& what) {
        if (!cond && ok) detail << "failed: " << what << "; ";
        ok = ok && cond;
    }
};

std::string text_of(const std::vector<examples::NamedText>& items, const std::string& name) {
    for (const auto& i : items)
        if (i.name == name) return i.text;
    throw std::runtime_error("missing builtin item " + name);
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

bool all_edges_agree(const Graph& g, const EdgeVector& a, const EdgeVector& b, Index r) {
    for (const auto& e : truncate(g, r).subgraph.edges)
        if (a.value(e) != b.value(e)) return false;
    return a == b;
}

void ladder_suite(Check& c) {
    const auto* b = examples::find_builtin("double-ladder");
    auto g = parse_graph(b->graph);
    for (const char* name : {"phi", "psi"}) {
        auto t0 = Clock::now();
        auto phi = parse_vector(g, text_of(b->vectors, name));
        auto r = is_member(g, phi);
        if (std::string(name) == "phi") {
            c.require(!r.member(), "phi is a non-member");
            if (!r.member()) {
                Value sum = cut_sum(g, phi, r.violation().cut);
                c.require(sum != 0 && sum == r.violation().sum, "recomputed cut sum of phi is non-zero");
                c.require(verify_certificate(g, phi, r), "phi certificate verifies");
            }
            c.require(!is_cycle_adhoc(g, parse_chain(g, text_of(b->chains, "phi-passes"))), "phi rep is not an ad-hoc cycle");
        } else {
            c.require(r.member(), "psi is a member");
            if (r.member()) {
                auto sum = thin_sum(g, indicator_family(g, r.decomposition()));
                c.require(all_edges_agree(g, sum, phi, 6), "decomposition re-sums to psi on truncate(6) and tails");
            }
            c.require(is_cycle_adhoc(g, parse_chain(g, text_of(b->chains, "psi-squares"))), "psi rep is an ad-hoc cycle");
        }
        double s = seconds_since(t0);
        c.require(s < 1.0, std::string(name) + " under 1 s");
        c.detail << name << " " << s << " s; ";
    }
}

void nested_walks(Check& c) {
    auto t0 = Clock::now();
    const auto* b = examples::find_builtin("double-ladder");
    auto g = parse_graph(b->graph);
    auto a = check_admissible(g, parse_chain(g, text_of(b->chains, "nested-walks")));
    c.require(!a.admissible, "nested walks rejected");
    c.require(a.witness && g.vertex_name(*a.witness) == "v[0]", "witness is v[0]");
    double s = seconds_since(t0);
    c.require(s < 1.0, "under 1 s");
    c.detail << "witness " << (a.witness ? g.vertex_name(*a.witness) : "none") << ", " << s << " s; ";
}

void intro_suite(Check& c) {
    auto t0 = Clock::now();
    auto ray = parse_graph(examples::kDoubleRay);
    c.require(ray.ends().size() == 2, "double ray has two ends");
    c.require(!is_member(ray, parse_vector(ray, examples::kRailVector)).member(), "rail is a non-member of the double ray");
    const auto* b = examples::find_builtin("intro-chords");
    auto g = parse_graph(b->graph);
    c.require(g.ends().size() == 1, "chords identify the ends");
    auto rail = parse_vector(g, text_of(b->vectors, "rail"));
    auto r = is_member(g, rail);
    c.require(r.member(), "rail is a member with chords");
    if (r.member()) {
        const auto& d = r.decomposition();
        c.require(d.families.empty() && d.circles.size() == 1 && std::holds_alternative<DoubleRayCircle>(d.circles[0].circle),
                  "single double-ray circle");
        c.require(verify_certificate(g, rail, r), "certificate verifies");
    }
    c.require(homologous(g, parse_chain(g, text_of(b->chains, "rail-passes")), parse_chain(g, text_of(b->chains, "rail-loop"))),
              "pass family homologous to the loop");
    double s = seconds_since(t0);
    c.require(s < 1.0, "under 1 s");
    c.detail << s << " s; ";
}

void oracle_equivalence(Check& c) {
    auto t0 = Clock::now();
    std::mt19937_64 rng(20240601);
    std::size_t vectors = 0, graphs = 0, members = 0, disagreements = 0;
    for (const auto& s : fuzz::oracle_subjects()) {
        ++graphs;
        Index d = std::max<Index>(s.graph.max_offset(), 1);
        oracle::CutOracle orc(s.graph, s.threshold + 2 * d + 2);
        for (int i = 0; i < 36; ++i) {
            auto phi = fuzz::random_vector(s, rng, i % 2 == 1);
            auto r = is_member(s.graph, phi);
            bool oracle_member = !orc.find_violation(phi);
            ++vectors;
            if (r.member()) ++members;
            if (r.member() != oracle_member || !verify_certificate(s.graph, phi, r)) {
                ++disagreements;
                if (disagreements == 1) c.detail << "first disagreement on " << s.name << ": " << format_vector(s.graph, phi) << "; ";
            }
        }
    }
    double secs = seconds_since(t0);
    c.require(vectors >= 200 && graphs >= 5, "corpus size");
    c.require(disagreements == 0, "no disagreements");
    c.require(secs < 60.0, "under 60 s");
    c.detail << vectors << " vectors (" << members << " members) on " << graphs << " graphs, " << disagreements
             << " disagreements, " << secs << " s; ";
}

void winding_algebra(Check& c) {
    std::mt19937_64 rng(77);
    std::size_t reps = 0, pairs_homologous = 0;
    for (const auto& menu : {chain_fuzz::ladder_menu(), chain_fuzz::intro_menu()}) {
        const Graph& g = menu.graph;
        for (int i = 0; i < 60; ++i) {
            auto a = chain_fuzz::random_cycle(menu, rng), b = chain_fuzz::random_cycle(menu, rng);
            c.require(boundary(g, a).empty(), "fuzzed cycle has zero boundary");
            auto fa = edge_vector_of(g, a), fb = edge_vector_of(g, b);
            c.require(edge_vector_of(g, a + b) == fa + fb, "f(a + b) = f(a) + f(b)");
            c.require(edge_vector_of(g, a - b) == fa - fb, "f(a - b) = f(a) - f(b)");
            auto sub = subdivide_to_passes(g, a);
            c.require(edge_vector_of(g, a - sub).is_zero(), "f(subdivision difference) = 0");
            c.require(homologous(g, a, sub), "a homologous to its subdivision");
            // a plus a null-homologous difference: some chain minus its subdivision
            auto w = chain_fuzz::random_chain(menu, rng);
            auto moved = a + (w - subdivide_to_passes(g, w));
            c.require(homologous(g, a, moved) && edge_vector_of(g, moved) == fa, "null-homologous change keeps the class");
            if (homologous(g, a, moved)) ++pairs_homologous;
            bool h = homologous(g, a, b);
            c.require(h == (fa == fb), "homologous iff equal edge vectors");
            if (h) ++pairs_homologous;
            reps += 3;
        }
    }
    c.require(reps >= 100, "at least 100 reps");
    c.detail << reps << " cycle reps, " << pairs_homologous << " homologous pairs; ";
}

void zeroth_homology(Check& c) {
    const char* three = R"(graph ladder-two-triangles
kind periodic-z
vertex v
vertex v'
edge e: v -> v[+1]
edge e': v' -> v'[+1]
edge f: v -> v'
cap-vertex a
cap-vertex b
cap-vertex c
edge ab: a -> b
edge bc: b -> c
edge ca: c -> a
cap-vertex x
cap-vertex y
edge xy: x -> y
)";
    std::vector<std::pair<std::string, std::size_t>> cases = {
        {examples::kDoubleLadder, 1}, {examples::kDisjointLadderTriangle, 2}, {three, 3}};
    for (const auto& [text, rank] : cases) {
        auto g = parse_graph(text);
        c.require(h0(g).group.rank == rank, g.name() + " has rank " + std::to_string(rank));
    }
    c.detail << "ranks 1/2/3 ok; ";

    // boundaries of fuzzed chains: zero augmentation on every component
    std::mt19937_64 rng(5);
    std::size_t chains = 0, nonzero = 0;
    auto three_menu = chain_fuzz::Menu{parse_graph(three),
                                       {"pass e[0] +", "walk v[0] f[0] v'[0] e'[0] v'[1]", "pass f[0] -",
                                        "walk v[0] e[0] v[1] f[1] v'[1] e'[0] v'[0] f[0] v[0]", "const v'[0]"},
                                       {"pass ab +", "walk a ab b bc c", "pass xy -", "const x"},
                                       {}};
    for (const auto& menu : {chain_fuzz::ladder_menu(), chain_fuzz::intro_menu(), three_menu}) {
        const Graph& g = menu.graph;
        for (int i = 0; i < 80; ++i) {
            auto rep = chain_fuzz::random_chain(menu, rng, false);
            auto z = boundary(g, rep);
            if (!z.empty()) ++nonzero;
            auto aug = augmentation(g, z);
            bool zero = std::all_of(aug.begin(), aug.end(), [](Value v) { return v == 0; });
            c.require(zero, "augmentation of a boundary is zero");
            ++chains;
        }
    }
    c.detail << chains << " chains (" << nonzero << " with non-zero boundary); ";

    auto g = parse_graph(examples::kDoubleLadder);
    for (Index n : {2, 5, 100}) c.require(h_n_trivial(g, n).rank == 0, "H_n trivial");
    c.detail << "H2, H5, H100 trivial; ";
}

void restriction(Check& c) {
    const auto* b = examples::find_builtin("double-ladder");
    auto g = parse_graph(b->graph);
    auto pair = parse_pair(g, "delete v[0] v'[0]\nkeep v[1]\n");
    auto rep = parse_chain(g, text_of(b->chains, "psi-squares"));
    auto out = restrict_chain(g, pair, rep);
    ChainRep want = rep;
    want.periodic[0].range = ShiftRange::from(1);
    c.require(out == want, "restriction is the family from 1 on");
    c.require(check_admissible(g, out).admissible, "restriction admissible");
    PairClosure closure(g, pair);
    for (Index s = 1; s <= 12; ++s)
        c.require(closure.contains(detail::member(g, out.periodic.at(0), s)), "members lie in the closure of A");
    c.detail << format_chain(g, out).substr(0, 14) << "...; ";
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<void(Check&)> run;
    };
    std::vector<Criterion> criteria = {
        {"double-ladder suite", ladder_suite},
        {"nested-walk admissibility", nested_walks},
        {"intro-graph suite", intro_suite},
        {"oracle equivalence", oracle_equivalence},
        {"winding-map algebra", winding_algebra},
        {"zeroth and higher homology", zeroth_homology},
        {"restriction to an admissible pair", restriction},
    };
    int failed = 0;
    for (const auto& cr : criteria) {
        Check c;
        try {
            cr.run(c);
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail << "exception: " << e.what();
        }
        std::cout << (c.ok ? "PASS" : "FAIL") << "  " << cr.name << "  (" << c.detail.str() << ")" << std::endl;
        if (!c.ok) ++failed;
    }
    return failed ? 1 : 0;
}
