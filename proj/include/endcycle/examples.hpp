#ifndef ENDCYCLE_EXAMPLES_HPP
#define ENDCYCLE_EXAMPLES_HPP

// Built-in corpus of graphs with sample vectors and chains.

#include <string>
#include <vector>

namespace endcycle::examples {

struct NamedText {
    std::string name;
    std::string text;
};

struct Builtin {
    std::string name;
    std::string summary;
    std::string graph;
    std::vector<NamedText> vectors;
    std::vector<NamedText> chains;
};

inline const char* kDoubleLadder = R"(graph double-ladder
kind periodic-z
vertex v
vertex v'
edge e: v -> v[+1]
edge e': v' -> v'[+1]
edge f: v -> v'
)";

inline const char* kIntroChords = R"(graph intro-chords
kind periodic-n
# o is the origin, p[k] sits at k+1 and n[k] at -(k+1)
cap-vertex o
vertex p
vertex n
edge right0: o -> p[0]
edge left0: n[0] -> o
edge right: p -> p[+1]
edge left: n[+1] -> n
edge chord: p -> n
)";

/// The intro graph without chords: a plain double ray with two ends.
inline const char* kDoubleRay = R"(graph double-ray
kind periodic-n
cap-vertex o
vertex p
vertex n
edge right0: o -> p[0]
edge left0: n[0] -> o
edge right: p -> p[+1]
edge left: n[+1] -> n
)";

inline const char* kSingleRay = R"(graph single-ray
kind periodic-n
vertex v
edge e: v -> v[+1]
)";

inline const char* kDisjointLadderTriangle = R"(graph disjoint-ladder-triangle
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
)";

inline const char* kRailVector = R"(set right0 = 1
set left0 = 1
tail+ right from 0 = 1
tail+ left from 0 = 1
)";

inline const std::vector<Builtin>& builtins() {
    static const std::vector<Builtin> all = {
        {"double-ladder", "two rails joined by rungs; two ends", kDoubleLadder,
         {{"phi", "tail+ e from 0 = 1\ntail- e from -1 = 1\n"},
          {"phi-prime", "tail+ e' from 0 = 1\ntail- e' from -1 = 1\n"},
          {"psi", "tail+ e from 0 = 1\ntail- e from -1 = 1\ntail+ e' from 0 = -1\ntail- e' from -1 = -1\n"},
          {"square", "set e[0] = 1\nset f[1] = 1\nset e'[0] = -1\nset f[0] = -1\n"}},
         {{"phi-passes", "periodic [..] { pass e[0] + }\n"},
          {"psi-squares", "periodic [..] { walk v[0] e[0] v[1] f[1] v'[1] e'[0] v'[0] f[0] v[0] }\n"},
          {"psi-passes",
           "periodic [..] { pass e[0] + }\nperiodic [..] { pass f[1] + }\nperiodic [..] { pass e'[0] - }\n"
           "periodic [..] { pass f[0] - }\n"},
          {"nested-walks",
           "periodic [..-1] { pass e[0] + }\n"
           "periodic [1..] { pass e[0] + }\n"
           "grow [0..] { walk v[0] e[0] v[1] } left ( v[-1] e[-1] v[0] ) right ( v[1] e[1] v[2] )\n"
           "coeff -1 grow [1..] { walk v[0] e[0] v[1] } left ( v[-1] e[-1] v[0] ) right ( v[1] e[1] v[2] )\n"}}},
        {"intro-chords", "the real line with chords k ~ -k; one end", kIntroChords,
         {{"rail", kRailVector}, {"chord-square", "set chord[0] = 1\nset left[0] = -1\nset chord[1] = -1\nset right[0] = -1\n"}},
         {{"rail-passes",
           "pass right0 +\npass left0 +\nperiodic [0..] { pass right[0] + }\nperiodic [0..] { pass left[0] + }\n"},
          {"rail-loop", "endjump o right0 p[0] ( right[0] p[1] ) ; o left0 n[0] ( left[0] n[1] )\n"}}},
        {"single-ray", "a one-way infinite path; one end", kSingleRay,
         {{"ray", "tail+ e from 0 = 1\n"}, {"edge", "set e[2] = 1\n"}},
         {{"passes", "pass e[0] +\npass e[1] +\n"}}},
        {"disjoint-ladder-triangle", "a double ladder beside a triangle; two components", kDisjointLadderTriangle,
         {{"triangle", "set ab = 1\nset bc = 1\nset ca = 1\n"},
          {"psi-and-triangle",
           "tail+ e from 0 = 1\ntail- e from -1 = 1\ntail+ e' from 0 = -1\ntail- e' from -1 = -1\n"
           "set ab = 2\nset bc = 2\nset ca = 2\n"}},
         {{"triangle-walk", "walk a ab b bc c ca a\n"}}},
    };
    return all;
}

inline const Builtin* find_builtin(const std::string& name) {
    for (const auto& b : builtins())
        if (b.name == name) return &b;
    return nullptr;
}

}  // namespace endcycle::examples

#endif
