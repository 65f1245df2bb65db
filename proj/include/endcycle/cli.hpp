#ifndef ENDCYCLE_CLI_HPP
#define ENDCYCLE_CLI_HPP

// Command-line front-end. `run` takes the argument vector and writes to the
// given streams so it can be driven from tests.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "certificate.hpp"
#include "chains.hpp"
#include "cycle_space.hpp"
#include "examples.hpp"
#include "graph.hpp"

namespace endcycle::cli {

enum ExitCode { kAnswer = 0, kInputError = 1, kInternalError = 2 };

/// DOT rendering of truncate(g, r). Boundary vertices are drawn doubled and
/// labelled with the ends they lead towards.
inline std::string export_dot(const Graph& g, Index r) {
    auto t = truncate(g, r);
    std::ostringstream out;
    out << "digraph \"" << g.name() << "\" {\n";
    out << "  // kind " << to_string(g.kind()) << ", radius " << r << ", " << t.subgraph.vertices.size() << " vertices, "
        << t.boundary.size() << " boundary\n";
    std::set<VertexId> boundary(t.boundary.begin(), t.boundary.end());
    auto [lo, hi] = truncation_cells(g, r);
    for (const auto& v : t.subgraph.vertices) {
        out << "  \"" << g.vertex_name(v) << "\"";
        if (boundary.count(v)) {
            std::vector<std::string> ends;
            for (int dir : {-1, 1}) {
                bool leaves = false;
                for (const auto& o : g.incident(v)) {
                    VertexId w = g.target(o);
                    if (g.vertex_classes()[w.cls].periodic && (dir > 0 ? w.cell > hi : w.cell < lo)) leaves = true;
                }
                if (!leaves) continue;
                if (auto e = g.end_towards(v, dir)) ends.push_back(e->name());
            }
            out << " [shape=doublecircle, boundary=true";
            if (!ends.empty()) {
                out << ", xlabel=\"";
                for (std::size_t i = 0; i < ends.size(); ++i) out << (i ? " " : "") << ends[i];
                out << "\"";
            }
            out << "]";
        }
        out << ";\n";
    }
    for (const auto& e : t.subgraph.edges)
        out << "  \"" << g.vertex_name(g.tail(e)) << "\" -> \"" << g.vertex_name(g.head(e)) << "\" [label=\"" << g.edge_name(e)
            << "\"];\n";
    out << "}\n";
    return out.str();
}

namespace detail {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A path, or `builtin:<graph>` / `builtin:<graph>/<vector or chain>`.
inline std::string load(const std::string& path) {
    if (path.rfind("builtin:", 0) == 0) {
        std::string rest = path.substr(8);
        auto slash = rest.find('/');
        const auto* b = examples::find_builtin(rest.substr(0, slash));
        if (!b) throw InputError("no builtin named '" + rest.substr(0, slash) + "'");
        if (slash == std::string::npos) return b->graph;
        std::string item = rest.substr(slash + 1);
        for (const auto& v : b->vectors)
            if (v.name == item) return v.text;
        for (const auto& c : b->chains)
            if (c.name == item) return c.text;
        throw InputError("builtin " + b->name + " has no vector or chain '" + item + "'");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline std::string describe_vertices(const Graph& g, const std::vector<VertexId>& vs) {
    std::string out;
    for (const auto& v : vs) out += (out.empty() ? "" : " ") + g.vertex_name(v);
    return out;
}

inline Json vector_json(const Graph& g, const EdgeVector& v) {
    Json set = Json::object();
    for (const auto& [e, k] : v.finite_part()) set[g.edge_name(e)] = k;
    Json tails = Json::array();
    for (int dir : {1, -1})
        for (const auto& [cls, t] : v.tails(dir))
            tails.push_back({{"class", g.edge_classes()[cls].name}, {"direction", dir > 0 ? "+" : "-"}, {"from", t.from}, {"value", t.value}});
    return {{"set", set}, {"tails", tails}};
}

inline Json zero_chain_json(const Graph& g, const ZeroChain& z) {
    Json out = Json::object();
    for (const auto& [v, k] : z) out[g.vertex_name(v)] = k;
    return out;
}

inline std::string zero_chain_text(const Graph& g, const ZeroChain& z) {
    if (z.empty()) return "0\n";
    std::string out;
    for (const auto& [v, k] : z) out += g.vertex_name(v) + " " + std::to_string(k) + "\n";
    return out;
}

inline Index support_threshold(const Graph& g, const EdgeVector& v) {
    auto ext = v.cell_extent(g);
    if (!ext) return 0;
    return std::max(std::abs(ext->first), std::abs(ext->second));
}

struct OracleReport {
    Index radius = 0;
    Index wanted = 0;
    std::uint64_t cuts = 0;
    bool exhaustive = true;
    std::uint64_t violations = 0;
    std::optional<OrientedCut> first;
    Value first_sum = 0;
};

inline constexpr std::size_t kExhaustiveItems = 18;
inline constexpr std::uint64_t kSampledCuts = 1 << 16;

/// Brute-force cut check on the truncation at radius threshold + 2D + 2,
/// capped by ENDCYCLE_MAX_RADIUS. Small truncations are enumerated
/// completely; larger ones are sampled with the given seed.
inline OracleReport run_oracle(const Graph& g, const EdgeVector& phi, std::optional<Index> radius, std::uint64_t seed) {
    OracleReport rep;
    Index d = std::max<Index>(g.max_offset(), 1);
    rep.wanted = radius.value_or(support_threshold(g, phi) + 2 * d + 2);
    rep.radius = rep.wanted;
    if (const char* cap = std::getenv("ENDCYCLE_MAX_RADIUS")) {
        auto c = text::to_int(cap);
        if (!c || *c < 0) throw InputError("ENDCYCLE_MAX_RADIUS must be a non-negative integer");
        rep.radius = std::min(rep.radius, *c);
    }
    if (!g.is_periodic()) rep.radius = 0;
    auto vertices = truncate(g, rep.radius).subgraph.vertices;
    std::vector<HalfSpace> spaces;
    for (const auto& end : g.ends())
        spaces.push_back(HalfSpace{end, end.direction > 0 ? rep.radius + 1 : -rep.radius - 1});
    std::size_t n = vertices.size() + spaces.size();
    auto check = [&](std::uint64_t mask) {
        std::vector<VertexId> xs;
        std::vector<HalfSpace> hs;
        for (std::size_t i = 0; i < vertices.size(); ++i)
            if (mask >> i & 1) xs.push_back(vertices[i]);
        for (std::size_t i = 0; i < spaces.size(); ++i)
            if (mask >> (vertices.size() + i) & 1) hs.push_back(spaces[i]);
        OrientedCut cut = hs.empty() ? OrientedCut::finite(xs) : OrientedCut::half_spaces_with(hs, xs);
        Value s = cut_sum(g, phi, cut);
        ++rep.cuts;
        if (s != 0) {
            if (!rep.violations) {
                rep.first = cut;
                rep.first_sum = s;
            }
            ++rep.violations;
        }
    };
    if (n <= kExhaustiveItems) {
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) check(mask);
    } else {
        if (n > 64) throw Error(ErrorKind::Unsupported, "truncation too large for the oracle; lower ENDCYCLE_MAX_RADIUS");
        rep.exhaustive = false;
        std::mt19937_64 rng(seed);
        for (std::uint64_t k = 0; k < kSampledCuts; ++k) check(n == 64 ? rng() : rng() & ((std::uint64_t{1} << n) - 1));
    }
    return rep;
}

inline std::string circle_text(const Graph& g, Value k, const Circle& c) {
    std::string coeff = k == 1 ? "" : std::to_string(k) + " * ";
    if (const auto* f = std::get_if<FiniteCircuit>(&c)) {
        std::string out = coeff + "circuit";
        for (const auto& o : f->edges) out += " " + g.oriented_name(o);
        return out;
    }
    const auto& d = std::get<DoubleRayCircle>(c);
    std::string out = coeff + "double ray through " + end_of_ray(g, d.outbound).name() + ": in from " + g.vertex_name(d.inbound.start) + ", path";
    for (const auto& o : d.path) out += " " + g.oriented_name(o);
    out += ", out from " + g.vertex_name(d.outbound.start);
    return out;
}

}  // namespace detail

/// Runs one command. Exit codes: 0 for every definite answer (including
/// non-membership), 1 for bad input, 2 for internal failures.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Topological cycle space and end-aware homology of locally finite graphs", "endcycle"};
    app.require_subcommand(1);
    bool json = false;
    std::optional<Index> radius;
    std::uint64_t seed = 1;
    bool oracle = false;
    app.add_flag("--json", json, "emit structured JSON");
    app.add_option("--radius", radius, "truncation radius for the oracle and export-dot");
    app.add_option("--seed", seed, "seed for sampled oracle checks");
    app.add_flag("--oracle", oracle, "cross-check member/decompose against brute-force cut enumeration");

    std::string graph_path, a_path, b_path, c_path;
    Index dimension = 0;
    bool list = false;
    std::string out_dir, example_name;
    std::function<int()> action;
    std::string op;

    auto graph_arg = [&](CLI::App* sub) { sub->add_option("graph", graph_path, "graph file or builtin:<name>")->required(); };
    auto command = [&](const char* name, const char* help) {
        auto* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        return sub;
    };
    auto load_graph = [&] { return parse_graph(detail::load(graph_path)); };

    auto* ends = command("ends", "count and name the ends");
    graph_arg(ends);
    ends->callback([&] {
        op = "ends";
        action = [&] {
            auto g = load_graph();
            auto n = end_count(g);
            if (json) {
                Json names = Json::array();
                for (const auto& e : g.ends()) names.push_back(e.name());
                out << Json{{"graph", g.name()}, {"count", n}, {"ends", names}}.dump(2) << "\n";
            } else {
                out << n << (n == 1 ? " end" : " ends") << "\n";
                for (const auto& e : g.ends()) out << "  " << e.name() << "\n";
            }
            return 0;
        };
    });

    auto membership = [&](bool full) {
        return [&, full] {
            auto g = load_graph();
            auto phi = parse_vector(g, detail::load(a_path));
            auto result = is_member(g, phi);
            if (!verify_certificate(g, phi, result)) {
                err << "endcycle: " << op << ": certificate failed verification\n";
                return int(kInternalError);
            }
            std::optional<detail::OracleReport> orc;
            if (oracle) orc = detail::run_oracle(g, phi, radius, seed);
            bool disagree = orc && result.member() && orc->violations;
            if (json) {
                Json j = result_to_json(g, result);
                if (orc) {
                    j["oracle"] = {{"radius", orc->radius},     {"requested_radius", orc->wanted}, {"cuts", orc->cuts},
                                   {"exhaustive", orc->exhaustive}, {"violations", orc->violations},  {"agrees", !disagree}};
                }
                out << j.dump(2) << "\n";
            } else if (result.member()) {
                const auto& d = result.decomposition();
                out << "MEMBER\n";
                out << d.circles.size() << " circle(s), " << d.families.size() << " periodic famil"
                    << (d.families.size() == 1 ? "y" : "ies") << "\n";
                if (full) {
                    for (const auto& t : d.circles) out << "  " << detail::circle_text(g, t.coefficient, t.circle) << "\n";
                    for (const auto& f : d.families)
                        out << "  family " << f.range.str() << ": "
                            << detail::circle_text(g, f.coefficient, Circle{f.circuit}) << "\n";
                }
            } else {
                const auto& v = result.violation();
                out << "NON-MEMBER\n";
                out << "cut " << describe_cut(g, v.cut) << "\n";
                out << "crossing edges";
                for (const auto& o : cut_edges(g, v.cut)) out << " " << g.oriented_name(o);
                out << "\nsum " << v.sum << "\n";
            }
            if (orc && !json) {
                out << "oracle: radius " << orc->radius;
                if (orc->radius < orc->wanted) out << " (capped from " << orc->wanted << ")";
                out << ", " << orc->cuts << (orc->exhaustive ? " cuts checked" : " sampled cuts") << ", " << orc->violations
                    << " violated";
                if (!result.member() && !orc->violations) out << " (inconclusive at this radius)";
                out << "\n";
            }
            if (disagree) {
                err << "endcycle: " << op << ": oracle found a violated cut " << describe_cut(g, *orc->first) << " (sum "
                    << orc->first_sum << ") for a member\n";
                return int(kInternalError);
            }
            return 0;
        };
    };

    auto* member = command("member", "decide membership in the topological cycle space");
    graph_arg(member);
    member->add_option("vector", a_path, "edge vector file")->required();
    member->callback([&] {
        op = "member";
        action = membership(false);
    });

    auto* decompose_cmd = command("decompose", "decompose a member into circles");
    graph_arg(decompose_cmd);
    decompose_cmd->add_option("vector", a_path, "edge vector file")->required();
    decompose_cmd->callback([&] {
        op = "decompose";
        action = membership(true);
    });

    auto load_chain = [&](const std::string& path) { return [&, path](const Graph& g) { return parse_chain(g, detail::load(path)); }; };

    auto* admissible = command("check-admissible", "check that a chain's family of simplices is admissible");
    graph_arg(admissible);
    admissible->add_option("chain", a_path, "chain file")->required();
    admissible->callback([&] {
        op = "check-admissible";
        action = [&] {
            auto g = load_graph();
            auto a = check_admissible(g, load_chain(a_path)(g));
            if (json) {
                Json j{{"graph", g.name()}, {"admissible", a.admissible}};
                if (!a.admissible) {
                    j["reason"] = a.reason;
                    j["witness"] = a.witness ? Json(g.vertex_name(*a.witness)) : Json(nullptr);
                }
                out << j.dump(2) << "\n";
            } else if (a.admissible) {
                out << "ADMISSIBLE\n";
            } else {
                out << "NOT ADMISSIBLE\n" << a.reason << "\n";
                if (a.witness) out << "witness " << g.vertex_name(*a.witness) << "\n";
            }
            return 0;
        };
    });

    auto* boundary_cmd = command("boundary", "boundary 0-chain of a chain");
    graph_arg(boundary_cmd);
    boundary_cmd->add_option("chain", a_path, "chain file")->required();
    boundary_cmd->callback([&] {
        op = "boundary";
        action = [&] {
            auto g = load_graph();
            auto rep = load_chain(a_path)(g);
            auto z = boundary(g, rep);
            auto flux = end_flux(g, rep);
            if (json) {
                Json f = Json::object();
                for (const auto& [e, k] : flux) f[e.name()] = k;
                out << Json{{"graph", g.name()}, {"boundary", detail::zero_chain_json(g, z)}, {"end_flux", f}}.dump(2) << "\n";
            } else {
                out << detail::zero_chain_text(g, z);
                for (const auto& [e, k] : flux) out << "flux into " << e.name() << " " << k << "\n";
            }
            return 0;
        };
    });

    auto* winding = command("winding", "edge vector of a chain (signed pass counts)");
    graph_arg(winding);
    winding->add_option("chain", a_path, "chain file")->required();
    winding->callback([&] {
        op = "winding";
        action = [&] {
            auto g = load_graph();
            auto v = edge_vector_of(g, load_chain(a_path)(g));
            if (json) out << Json{{"graph", g.name()}, {"vector", detail::vector_json(g, v)}}.dump(2) << "\n";
            else out << (v.is_zero() ? std::string("0\n") : format_vector(g, v));
            return 0;
        };
    });

    auto* homologous_cmd = command("homologous", "compare the homology classes of two cycles");
    graph_arg(homologous_cmd);
    homologous_cmd->add_option("first", a_path, "chain file")->required();
    homologous_cmd->add_option("second", b_path, "chain file")->required();
    homologous_cmd->callback([&] {
        op = "homologous";
        action = [&] {
            auto g = load_graph();
            auto a = load_chain(a_path)(g), b = load_chain(b_path)(g);
            bool same = homologous(g, a, b);
            auto diff = edge_vector_of(g, a - b);
            if (json) {
                out << Json{{"graph", g.name()}, {"homologous", same}, {"difference", detail::vector_json(g, diff)}}.dump(2) << "\n";
            } else {
                out << (same ? "HOMOLOGOUS\n" : "NOT HOMOLOGOUS\ndifference of edge vectors:\n");
                if (!same) out << format_vector(g, diff);
            }
            return 0;
        };
    });

    auto* h0_cmd = command("h0", "zeroth homology group");
    graph_arg(h0_cmd);
    h0_cmd->callback([&] {
        op = "h0";
        action = [&] {
            auto g = load_graph();
            auto h = h0(g);
            if (json) {
                Json comps = Json::array();
                for (const auto& c : h.components) {
                    Json ends = Json::array();
                    for (const auto& e : c.ends) ends.push_back(e.name());
                    comps.push_back({{"unbounded", c.kind == ComponentInfo::Kind::Unbounded},
                                     {"sample", c.vertices.empty() ? Json(nullptr) : Json(g.vertex_name(c.vertices.front()))},
                                     {"ends", ends}});
                }
                out << Json{{"graph", g.name()}, {"group", h.group.str()}, {"rank", h.group.rank}, {"components", comps}}.dump(2)
                    << "\n";
            } else {
                out << "H0 = " << h.group.str() << "\n";
                for (std::size_t i = 0; i < h.components.size(); ++i) {
                    const auto& c = h.components[i];
                    out << "  component " << i << ": ";
                    out << (c.vertices.empty() ? std::string("(no vertices)") : "contains " + g.vertex_name(c.vertices.front()));
                    for (const auto& e : c.ends) out << " " << e.name();
                    out << "\n";
                }
            }
            return 0;
        };
    });

    auto* hn_cmd = command("hn", "homology in dimension n >= 2");
    graph_arg(hn_cmd);
    hn_cmd->add_option("n", dimension, "dimension")->required();
    hn_cmd->callback([&] {
        op = "hn";
        action = [&] {
            auto g = load_graph();
            auto h = h_n_trivial(g, dimension);
            if (json) out << Json{{"graph", g.name()}, {"n", dimension}, {"group", h.str()}, {"note", h.note}}.dump(2) << "\n";
            else out << "H" << dimension << " = " << h.str() << "\n" << h.note << "\n";
            return 0;
        };
    });

    auto* restrict_cmd = command("restrict", "members of a chain lying in the closure of an admissible subspace");
    graph_arg(restrict_cmd);
    restrict_cmd->add_option("pair", a_path, "pair file")->required();
    restrict_cmd->add_option("chain", b_path, "chain file")->required();
    restrict_cmd->callback([&] {
        op = "restrict";
        action = [&] {
            auto g = load_graph();
            auto pair = parse_pair(g, detail::load(a_path));
            auto r = restrict_chain(g, pair, load_chain(b_path)(g));
            bool ok = check_admissible(g, r).admissible;
            if (json) out << Json{{"graph", g.name()}, {"chain", format_chain(g, r)}, {"admissible", ok}}.dump(2) << "\n";
            else out << (r.finite.empty() && r.periodic.empty() ? std::string("# empty chain\n") : format_chain(g, r));
            return 0;
        };
    });

    auto* examples_cmd = command("examples", "list or export the built-in examples");
    examples_cmd->add_flag("--list", list, "list the built-in examples");
    examples_cmd->add_option("name", example_name, "example to print or export");
    examples_cmd->add_option("--out", out_dir, "write the example's graph, vector and chain files into this directory");
    examples_cmd->callback([&] {
        op = "examples";
        action = [&] {
            if (list || example_name.empty()) {
                for (const auto& b : examples::builtins()) out << b.name << "  " << b.summary << "\n";
                return 0;
            }
            const auto* b = examples::find_builtin(example_name);
            if (!b) throw detail::InputError("no builtin named '" + example_name + "'");
            if (out_dir.empty()) {
                out << b->graph;
                return 0;
            }
            namespace fs = std::filesystem;
            fs::create_directories(out_dir);
            auto write = [&](const std::string& file, const std::string& text) {
                std::ofstream f(fs::path(out_dir) / file, std::ios::binary);
                if (!f) throw detail::InputError("cannot write " + (fs::path(out_dir) / file).string());
                f << text;
                out << (fs::path(out_dir) / file).string() << "\n";
            };
            write(b->name + ".graph", b->graph);
            for (const auto& v : b->vectors) write(b->name + "." + v.name + ".vec", v.text);
            for (const auto& c : b->chains) write(b->name + "." + c.name + ".chain", c.text);
            return 0;
        };
    });

    auto* dot = command("export-dot", "DOT drawing of a truncation");
    graph_arg(dot);
    dot->callback([&] {
        op = "export-dot";
        action = [&] {
            auto g = load_graph();
            out << export_dot(g, radius.value_or(2));
            return 0;
        };
    });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : int(kInputError);
    }
    try {
        return action();
    } catch (const ParseError& e) {
        err << "endcycle: " << op << ": " << e.what() << "\n";
        return kInputError;
    } catch (const detail::InputError& e) {
        err << "endcycle: " << op << ": " << e.what() << "\n";
        return kInputError;
    } catch (const Error& e) {
        err << "endcycle: " << op << ": " << e.what() << "\n";
        return e.kind() == ErrorKind::Internal ? kInternalError : kInputError;
    } catch (const std::exception& e) {
        err << "endcycle: " << op << ": internal error: " << e.what() << "\n";
        return kInternalError;
    }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, out, err);
}

}  // namespace endcycle::cli

#endif
