#pragma once

#include <compare>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rqb/symbol.hpp"

namespace rqb {

// An edge-labelled directed graph with named vertices; edge labels are base
// letters of a declared alphabet.
struct GraphDb {
    Alphabet alphabet;
    std::set<std::string> vertices;

    struct Edge {
        std::string from;
        std::string label;
        std::string to;
        auto operator<=>(const Edge&) const = default;
    };
    std::set<Edge> edges;

    void add_vertex(std::string v) { vertices.insert(std::move(v)); }

    void add_edge(std::string from, const std::string& label, std::string to) {
        if (!alphabet.contains(label))
            throw std::runtime_error("graphdb: edge label outside alphabet: " + label);
        vertices.insert(from);
        vertices.insert(to);
        edges.insert({std::move(from), label, std::move(to)});
    }
};

// Text format: one edge per line, `u a v`; blank lines and `#` comments allowed.
inline GraphDb parse_graphdb(const std::string& text, Alphabet alphabet) {
    GraphDb g;
    g.alphabet = std::move(alphabet);
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string u, a, v, extra;
        if (!(ls >> u)) continue;
        if (!(ls >> a >> v) || (ls >> extra))
            throw std::runtime_error("graphdb parse error at line " + std::to_string(lineno) +
                                     ": expected `u a v`");
        if (!g.alphabet.contains(a))
            throw std::runtime_error("graphdb parse error at line " + std::to_string(lineno) +
                                     ": unknown letter: " + a);
        g.add_edge(u, a, v);
    }
    return g;
}

inline std::string print_graphdb(const GraphDb& g) {
    std::string out;
    for (const auto& e : g.edges) out += e.from + " " + e.label + " " + e.to + "\n";
    return out;
}

}  // namespace rqb
