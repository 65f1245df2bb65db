#include <catch2/catch_amalgamated.hpp>

#include "endcycle/chains.hpp"
#include "endcycle/cycle_space.hpp"
#include "endcycle/examples.hpp"
#include "support/chain_fuzz.hpp"
#include "support/fuzz.hpp"

using namespace endcycle;

namespace {

std::string chain_text(const std::string& graph, const std::string& name) {
    for (const auto& c : examples::find_builtin(graph)->chains)
        if (c.name == name) return c.text;
    throw std::runtime_error("no chain " + name);
}

std::string vector_text(const std::string& graph, const std::string& name) {
    for (const auto& v : examples::find_builtin(graph)->vectors)
        if (v.name == name) return v.text;
    throw std::runtime_error("no vector " + name);
}

const char* kLadderTwoTriangles = R"(graph ladder-two-triangles
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
cap-vertex z
edge xy: x -> y
edge yz: y -> z
edge zx: z -> x
)";

}  // namespace

TEST_CASE("nested walks are rejected with a witness") {
    auto g = parse_graph(examples::kDoubleLadder);
    auto rep = parse_chain(g, chain_text("double-ladder", "nested-walks"));
    auto a = check_admissible(g, rep);
    CHECK_FALSE(a.admissible);
    REQUIRE(a.witness);
    CHECK(g.vertex_name(*a.witness) == "v[0]");
    try {
        boundary(g, rep);
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotAdmissible);
    }
}

TEST_CASE("translating families are admissible") {
    auto g = parse_graph(examples::kDoubleLadder);
    for (const auto* name : {"phi-passes", "psi-squares", "psi-passes"}) {
        auto rep = parse_chain(g, chain_text("double-ladder", name));
        CHECK(check_admissible(g, rep).admissible);
    }
    auto single = parse_chain(g, "grow [0..4] { walk v[0] e[0] v[1] } left ( v[-1] e[-1] v[0] ) right ( v[1] e[1] v[2] )\n");
    CHECK(check_admissible(g, single).admissible);
}

TEST_CASE("boundaries") {
    auto g = parse_graph(examples::kDoubleLadder);
    auto pass = parse_chain(g, "pass e[0] +\n");
    auto z = boundary(g, pass);
    CHECK(z.size() == 2);
    CHECK(z.at(*g.find_vertex("v[1]")) == 1);
    CHECK(z.at(*g.find_vertex("v[0]")) == -1);

    auto run = parse_chain(g, "periodic [0..3] { pass e[0] + }\n");
    auto zr = boundary(g, run);
    CHECK(zr.size() == 2);
    CHECK(zr.at(*g.find_vertex("v[4]")) == 1);

    CHECK(boundary(g, parse_chain(g, chain_text("double-ladder", "psi-squares"))).empty());
    CHECK(boundary(g, parse_chain(g, chain_text("double-ladder", "phi-passes"))).empty());
    CHECK(boundary(g, parse_chain(g, "const v[0]\n")).empty());

    auto half = parse_chain(g, "periodic [0..] { pass e[0] + }\n");
    auto zh = boundary(g, half);
    CHECK(zh.size() == 1);
    CHECK(zh.at(*g.find_vertex("v[0]")) == -1);
}

TEST_CASE("end jumps") {
    auto g = parse_graph(examples::kIntroChords);
    auto loop = parse_chain(g, chain_text("intro-chords", "rail-loop"));
    CHECK(check_admissible(g, loop).admissible);
    CHECK(boundary(g, loop).empty());
    CHECK(edge_vector_of(g, loop) == parse_vector(g, vector_text("intro-chords", "rail")));

    auto open = parse_chain(g, "endjump o right0 p[0] ( right[0] p[1] ) ; p[0] ( right[0] p[1] )\n");
    auto z = boundary(g, open);
    CHECK(z.size() == 2);
    CHECK(z.at(*g.find_vertex("p[0]")) == 1);
    CHECK(z.at(*g.find_vertex("o")) == -1);
}

TEST_CASE("winding vectors") {
    auto g = parse_graph(examples::kDoubleLadder);
    auto phi = parse_vector(g, vector_text("double-ladder", "phi"));
    auto psi = parse_vector(g, vector_text("double-ladder", "psi"));
    CHECK(edge_vector_of(g, parse_chain(g, chain_text("double-ladder", "phi-passes"))) == phi);
    CHECK(edge_vector_of(g, parse_chain(g, chain_text("double-ladder", "psi-squares"))) == psi);
    CHECK(edge_vector_of(g, parse_chain(g, chain_text("double-ladder", "psi-passes"))) == psi);
    CHECK(edge_vector_of(g, parse_chain(g, "const v[3]\n")).is_zero());
}

TEST_CASE("subdivision keeps boundary and winding") {
    auto g = parse_graph(examples::kDoubleLadder);
    auto rep = parse_chain(g, chain_text("double-ladder", "psi-squares"));
    auto sub = subdivide_to_passes(g, rep);
    for (const auto& t : sub.finite) CHECK(std::holds_alternative<Pass>(t.simplex));
    for (const auto& t : sub.periodic) CHECK(std::holds_alternative<Pass>(t.simplex));
    CHECK(edge_vector_of(g, sub) == edge_vector_of(g, rep));
    CHECK(boundary(g, sub) == boundary(g, rep));
}

TEST_CASE("cycles and homology") {
    auto g = parse_graph(examples::kDoubleLadder);
    CHECK(is_cycle_adhoc(g, parse_chain(g, chain_text("double-ladder", "psi-squares"))));
    CHECK_FALSE(is_cycle_adhoc(g, parse_chain(g, chain_text("double-ladder", "phi-passes"))));
    CHECK(homologous(g, parse_chain(g, chain_text("double-ladder", "psi-squares")),
                     parse_chain(g, chain_text("double-ladder", "psi-passes"))));
    CHECK_FALSE(homologous(g, parse_chain(g, chain_text("double-ladder", "phi-passes")),
                           parse_chain(g, chain_text("double-ladder", "psi-squares"))));
    try {
        homology_class(g, parse_chain(g, "pass e[0] +\n"));
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonzeroBoundary);
    }
    try {
        homology_class(g, parse_chain(g, chain_text("double-ladder", "phi-passes")));
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotACycle);
    }

    auto intro = parse_graph(examples::kIntroChords);
    CHECK(homologous(intro, parse_chain(intro, chain_text("intro-chords", "rail-passes")),
                     parse_chain(intro, chain_text("intro-chords", "rail-loop"))));
}

TEST_CASE("zeroth homology") {
    CHECK(h0(parse_graph(examples::kDoubleLadder)).group.rank == 1);
    CHECK(h0(parse_graph(examples::kDoubleRay)).group.rank == 1);
    CHECK(h0(parse_graph(examples::kDisjointLadderTriangle)).group.rank == 2);
    auto g = parse_graph(kLadderTwoTriangles);
    auto h = h0(g);
    CHECK(h.group.rank == 3);
    CHECK(h.group.str() == "Z^3");
    auto finite = parse_chain(g, "pass ab +\npass e[4] -\nwalk x xy y yz z\n");
    CHECK(augmentation(g, boundary(g, finite)) == std::vector<Value>{0, 0, 0});
    // a lone ray of passes loses a unit into its end
    auto ray = parse_chain(g, "periodic [0..] { pass e[0] + }\n");
    auto aug = augmentation(g, boundary(g, ray));
    CHECK(std::count(aug.begin(), aug.end(), -1) == 1);
    auto flux = end_flux(g, ray);
    REQUIRE(flux.size() == 1);
    CHECK(flux.begin()->first.direction == 1);
    CHECK(flux.begin()->second == 1);
    ZeroChain z;
    z[*g.find_vertex("a")] = 2;
    auto a = augmentation(g, z);
    CHECK(std::count(a.begin(), a.end(), 2) == 1);
}

TEST_CASE("higher homology vanishes") {
    auto g = parse_graph(examples::kDoubleLadder);
    for (Index n : {2, 5, 100}) CHECK(h_n_trivial(g, n).rank == 0);
    for (Index n : {1, 0, -3}) {
        try {
            h_n_trivial(g, n);
            FAIL("accepted");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::BadDimension);
        }
    }
}

TEST_CASE("restriction to one side of a cut") {
    auto g = parse_graph(examples::kDoubleLadder);
    auto pair = parse_pair(g, "delete v[0] v'[0]\nkeep v[1]\n");
    REQUIRE(pair.kept.size() == 1);
    auto out = restrict_chain(g, pair, parse_chain(g, chain_text("double-ladder", "psi-squares")));
    REQUIRE(out.finite.empty());
    REQUIRE(out.periodic.size() == 1);
    CHECK(out.periodic[0].range.lo == 1);
    CHECK_FALSE(out.periodic[0].range.hi);

    auto passes = restrict_chain(g, pair, parse_chain(g, "pass f[0] +\npass e[0] +\npass e[-1] +\n"));
    REQUIRE(passes.finite.size() == 1);
    CHECK(format_chain(g, passes) == "pass e[0] +\n");

    try {
        parse_pair(g, "delete v[0]\nkeep v[0]\n");
        FAIL("accepted");
    } catch (const ParseError&) {
    }
}

TEST_CASE("chain format round trip") {
    for (const auto& b : examples::builtins()) {
        auto g = parse_graph(b.graph);
        for (const auto& c : b.chains) {
            auto rep = parse_chain(g, c.text);
            CHECK(parse_chain(g, format_chain(g, rep)) == rep);
        }
    }
}

TEST_CASE("chain parse errors carry positions") {
    auto g = parse_graph(examples::kDoubleLadder);
    try {
        parse_chain(g, "pass e[0] +\nwalk v[0] e[0] v[2]\n");
        FAIL("accepted");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_chain(g, "periodic [0..] { pass e[0] + \n"), ParseError);
    CHECK_THROWS_AS(parse_chain(g, "frobnicate\n"), ParseError);
}

TEST_CASE("end flux") {
    auto g = parse_graph(examples::kDoubleLadder);
    auto phi = end_flux(g, parse_chain(g, chain_text("double-ladder", "phi-passes")));
    REQUIRE(phi.size() == 2);
    CHECK(phi.begin()->second == -1);
    CHECK(phi.rbegin()->second == 1);
    CHECK(end_flux(g, parse_chain(g, chain_text("double-ladder", "psi-squares"))).empty());
    CHECK(end_flux(g, parse_chain(g, "periodic [..3] { pass e[0] - }\n")).begin()->second == 1);

    auto intro = parse_graph(examples::kIntroChords);
    CHECK(end_flux(intro, parse_chain(intro, chain_text("intro-chords", "rail-passes"))).empty());
    CHECK(end_flux(intro, subdivide_to_passes(intro, parse_chain(intro, chain_text("intro-chords", "rail-loop")))).empty());
}

TEST_CASE("winding map is linear") {
    auto menu = chain_fuzz::ladder_menu();
    const auto& g = menu.graph;
    std::mt19937_64 rng(7);
    int cycles = 0;
    for (int i = 0; i < 120; ++i) {
        auto a = chain_fuzz::random_chain(menu, rng), b = chain_fuzz::random_chain(menu, rng);
        INFO(format_chain(g, a) << "--\n" << format_chain(g, b));
        CHECK(edge_vector_of(g, a + b) == edge_vector_of(g, a) + edge_vector_of(g, b));
        CHECK(edge_vector_of(g, a - b) == edge_vector_of(g, a) - edge_vector_of(g, b));
        auto za = boundary(g, a), zb = boundary(g, b), zs = boundary(g, a + b);
        for (const auto& [v, k] : zb) za[v] += k;
        std::erase_if(za, [](const auto& kv) { return kv.second == 0; });
        CHECK(za == zs);
        // boundary augmentation is balanced by what escapes into the ends
        auto aug = augmentation(g, boundary(g, a));
        for (const auto& [end, k] : end_flux(g, a)) aug.at(0) += k;
        CHECK(aug == std::vector<Value>{0});
        auto sub = subdivide_to_passes(g, a);
        CHECK(edge_vector_of(g, sub) == edge_vector_of(g, a));
        if (boundary(g, a).empty()) {
            ++cycles;
            CHECK(homologous(g, a, subdivide_to_passes(g, a)));
        }
    }
    CHECK(cycles > 0);
}

TEST_CASE("circle decompositions give cycles with the same class") {
    std::mt19937_64 rng(21);
    for (const auto& s : fuzz::oracle_subjects()) {
        for (int i = 0; i < 12; ++i) {
            auto phi = fuzz::random_vector(s, rng, false);
            auto r = is_member(s.graph, phi);
            REQUIRE(r.member());
            auto rep = chain_of_decomposition(s.graph, r.decomposition());
            INFO(s.name << "\n" << format_chain(s.graph, rep));
            auto passes = subdivide_to_passes(s.graph, rep);
            CHECK(boundary(s.graph, passes).empty());
            CHECK(end_flux(s.graph, passes).empty());
            CHECK(homology_class(s.graph, passes) == phi);
            CHECK(homologous(s.graph, rep, passes));
        }
    }
}

TEST_CASE("homologous is an equivalence relation") {
    auto menu = chain_fuzz::ladder_menu();
    const auto& g = menu.graph;
    std::mt19937_64 rng(22);
    std::vector<ChainRep> reps;
    for (int i = 0; i < 24; ++i) reps.push_back(chain_fuzz::random_cycle(menu, rng));
    reps.push_back(reps[3] + parse_chain(g, "walk v[0] e[0] v[1]\npass e[0] -\n"));
    for (const auto& a : reps) {
        CHECK(homologous(g, a, a));
        for (const auto& b : reps) {
            CHECK(homologous(g, a, b) == homologous(g, b, a));
            for (const auto& c : reps)
                if (homologous(g, a, b) && homologous(g, b, c)) CHECK(homologous(g, a, c));
        }
    }
    CHECK(homologous(g, reps[3], reps.back()));
}
