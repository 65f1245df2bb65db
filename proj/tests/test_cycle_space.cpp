#include <catch2/catch_amalgamated.hpp>

#include "endcycle/certificate.hpp"
#include "endcycle/examples.hpp"

using namespace endcycle;

namespace {

Graph ladder() { return parse_graph(examples::kDoubleLadder); }

std::string vector_text(const std::string& graph, const std::string& name) {
    for (const auto& v : examples::find_builtin(graph)->vectors)
        if (v.name == name) return v.text;
    throw std::runtime_error("no vector " + name);
}

std::set<std::string> edge_names(const Graph& g, const std::vector<OrientedEdge>& es) {
    std::set<std::string> out;
    for (const auto& o : es) out.insert(g.oriented_name(o));
    return out;
}

}  // namespace

TEST_CASE("cut edges of a half-space") {
    auto g = ladder();
    auto minus_end = g.ends().front();
    REQUIRE(minus_end.direction == -1);
    auto cut = OrientedCut::half_spaces_with({HalfSpace{minus_end, 0}});
    CHECK(edge_names(g, cut_edges(g, cut)) == std::set<std::string>{"e[0]+", "e'[0]+"});
    CHECK(cut_edges(g, OrientedCut::finite({})).empty());
    try {
        cut_edges(g, OrientedCut::of_classes({*g.find_vertex_class("v")}));
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InfiniteCut);
    }
}

TEST_CASE("cut sums on the double ladder") {
    auto g = ladder();
    auto cut = OrientedCut::half_spaces_with({HalfSpace{g.ends().front(), 0}});
    auto phi = parse_vector(g, vector_text("double-ladder", "phi"));
    auto psi = parse_vector(g, vector_text("double-ladder", "psi"));
    CHECK(cut_sum(g, phi, cut) == 1);
    CHECK(cut_sum(g, psi, cut) == 0);
    CHECK(cut_sum(g, phi, OrientedCut::finite({})) == 0);
    CHECK(cut_sum(g, phi + psi, cut) == cut_sum(g, phi, cut) + cut_sum(g, psi, cut));
}

TEST_CASE("phi is not in the cycle space of the ladder") {
    auto g = ladder();
    auto phi = parse_vector(g, vector_text("double-ladder", "phi"));
    auto r = is_member(g, phi);
    REQUIRE(!r.member());
    CHECK(r.violation().sum == 1);
    CHECK(edge_names(g, cut_edges(g, r.violation().cut)) == std::set<std::string>{"e[0]+", "e'[0]+"});
    CHECK(verify_certificate(g, phi, r));
    auto forged = r;
    std::get<NonMemberCertificate>(forged.value).sum = 0;
    CHECK(!verify_certificate(g, phi, forged));
    CHECK_THROWS_AS(decompose(g, phi), Error);
}

TEST_CASE("psi decomposes into rung squares") {
    auto g = ladder();
    auto psi = parse_vector(g, vector_text("double-ladder", "psi"));
    auto r = is_member(g, psi);
    REQUIRE(r.member());
    const auto& dec = r.decomposition();
    REQUIRE(dec.circles.empty());
    REQUIRE(dec.families.size() == 1);
    CHECK(dec.families[0].coefficient == 1);
    CHECK(dec.families[0].range == ShiftRange::all());
    CHECK(edge_names(g, dec.families[0].circuit.edges) == std::set<std::string>{"e[0]+", "f[1]+", "e'[0]-", "f[0]-"});
    CHECK(verify_certificate(g, psi, r));
    auto sum = thin_sum(g, indicator_family(g, dec));
    for (const auto& e : truncate(g, 6).subgraph.edges) CHECK(sum.value(e) == psi.value(e));
    CHECK(sum.tails(1) == psi.tails(1));
    CHECK(sum.tails(-1) == psi.tails(-1));

    // a certificate for psi plus one rung does not verify
    auto off = psi + indicator(g, {OrientedEdge{g.parse_edge(text::Token{"f[0]", 1, 1}), true}});
    CHECK(!verify_certificate(g, off, r));
}

TEST_CASE("zero vector and finite circuits") {
    auto g = ladder();
    auto zero = is_member(g, EdgeVector(g));
    REQUIRE(zero.member());
    CHECK(zero.decomposition().size() == 0);

    auto tri = parse_graph("graph t\nkind finite\nvertex a\nvertex b\nvertex c\nedge x: a -> b\nedge y: b -> c\nedge z: a -> c\n");
    auto v = parse_vector(tri, "set x = 1\nset y = 1\nset z = -1\n");
    auto dec = decompose(tri, v);
    REQUIRE(dec.circles.size() == 1);
    CHECK(std::holds_alternative<FiniteCircuit>(dec.circles[0].circle));
    CHECK(thin_sum(tri, indicator_family(tri, dec)) == v);

    auto square = parse_vector(g, vector_text("double-ladder", "square"));
    auto sq = decompose(g, square);
    REQUIRE(sq.size() == 1);
    CHECK(thin_sum(g, indicator_family(g, sq)) == square);
}

TEST_CASE("intro graph: one end closes the rail into a circle") {
    auto line = parse_graph(examples::kDoubleRay);
    auto chords = parse_graph(examples::kIntroChords);
    auto on_line = is_member(line, parse_vector(line, examples::kRailVector));
    CHECK(!on_line.member());
    CHECK(verify_certificate(line, parse_vector(line, examples::kRailVector), on_line));

    auto rail = parse_vector(chords, examples::kRailVector);
    auto r = is_member(chords, rail);
    REQUIRE(r.member());
    REQUIRE(r.decomposition().size() == 1);
    REQUIRE(r.decomposition().circles.size() == 1);
    CHECK(std::holds_alternative<DoubleRayCircle>(r.decomposition().circles[0].circle));
    CHECK(verify_certificate(chords, rail, r));
}

TEST_CASE("certificates survive JSON") {
    for (const auto& b : examples::builtins()) {
        auto g = parse_graph(b.graph);
        for (const auto& v : b.vectors) {
            auto phi = parse_vector(g, v.text);
            auto r = is_member(g, phi);
            INFO(b.name << " " << v.name);
            CHECK(verify_certificate(g, phi, r));
            auto j = result_to_json(g, r);
            auto back = result_from_json(g, Json::parse(j.dump()));
            CHECK(back.member() == r.member());
            CHECK(verify_certificate(g, phi, back));
        }
    }
}

TEST_CASE("enumerated cuts") {
    auto g = ladder();
    auto cuts = enumerate_finite_cuts(g, 1);
    std::set<std::set<std::string>> seen;
    for (const auto& c : cuts) seen.insert(edge_names(g, cut_edges(g, c)));
    CHECK(seen.count({"e[0]+", "e'[0]+"}));
    CHECK(seen.count({"e[-1]-", "e[0]+", "f[0]+"}));
    auto ray = parse_graph(examples::kSingleRay);
    std::set<std::set<std::string>> ray_cuts;
    for (const auto& c : enumerate_finite_cuts(ray, 0)) ray_cuts.insert(edge_names(ray, cut_edges(ray, c)));
    CHECK(ray_cuts.count({"e[0]+"}));
    CHECK(ray_cuts.count({"e[0]-"}));
    auto tri = parse_graph("graph t\nkind finite\nvertex a\nvertex b\nvertex c\nedge x: a -> b\nedge y: b -> c\nedge z: a -> c\n");
    CHECK(enumerate_finite_cuts(tri, 3).size() == 7);
}
