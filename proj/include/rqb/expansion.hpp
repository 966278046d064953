#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rqb/graphdb.hpp"
#include "rqb/query.hpp"
#include "rqb/symbol.hpp"

namespace rqb {

// A conjunctive query in path-normal form: directed single-letter atoms plus
// equality atoms, with a canonical variable list (free variables first).
struct Cq {
    std::vector<std::string> free_vars;
    std::vector<std::string> variables;

    struct LetterAtom {
        std::string source;
        std::string label;  // base letter of A
        std::string target;
        auto operator<=>(const LetterAtom&) const = default;
    };
    std::vector<LetterAtom> atoms;
    std::vector<std::pair<std::string, std::string>> equalities;

    // the size counts letter atoms only
    size_t size() const { return atoms.size(); }
};

// An expansion of one disjunct: per-atom chosen words plus the induced CQ.
// Intermediate variables follow the canonical scheme `@<atom>.<offset>`, so
// equal choices always yield the identical CQ.
struct Expansion {
    size_t disjunct = 0;
    std::vector<Word> words;
    Cq cq;

    size_t size() const { return cq.size(); }
};

namespace detail {

// union-find keyed by variable name; representative = smallest name in class
struct VarUnionFind {
    std::map<std::string, std::string> parent;

    void add(const std::string& v) { parent.emplace(v, v); }

    std::string find(const std::string& v) {
        auto it = parent.find(v);
        if (it == parent.end()) throw std::runtime_error("unknown variable: " + v);
        if (it->second == v) return v;
        std::string r = find(it->second);
        it->second = r;
        return r;
    }

    void unite(const std::string& a, const std::string& b) {
        std::string ra = find(a), rb = find(b);
        if (ra == rb) return;
        if (rb < ra) std::swap(ra, rb);
        parent[rb] = ra;
    }
};

inline VarUnionFind equality_classes(const Cq& cq) {
    VarUnionFind uf;
    for (const auto& v : cq.variables) uf.add(v);
    for (const auto& [a, b] : cq.equalities) uf.unite(a, b);
    return uf;
}

}  // namespace detail

// Builds the expansion of disjunct `disjunct` of `q` from one chosen word per
// atom; an empty word becomes an equality atom, an inverse letter a reversed
// edge.
inline Expansion expand(const Query& q, size_t disjunct, std::vector<Word> words) {
    if (disjunct >= q.disjuncts.size()) throw std::runtime_error("expand: bad disjunct index");
    const Conjunct& c = q.disjuncts[disjunct];
    if (words.size() != c.atoms.size())
        throw std::runtime_error("expand: need one word per atom");
    Expansion e;
    e.disjunct = disjunct;
    e.cq.free_vars = q.free_vars;
    e.cq.variables = c.variables;
    for (size_t i = 0; i < words.size(); i++) {
        const Word& w = words[i];
        if (!c.atoms[i].nfa.accepts(w))
            throw std::runtime_error("expand: word not in atom language: " + word_str(w));
        if (w.empty()) {
            e.cq.equalities.push_back({c.atoms[i].source, c.atoms[i].target});
            continue;
        }
        std::string prev = c.atoms[i].source;
        for (size_t j = 0; j < w.size(); j++) {
            std::string next = j + 1 == w.size()
                                   ? c.atoms[i].target
                                   : "@" + std::to_string(i) + "." + std::to_string(j + 1);
            if (j + 1 != w.size()) e.cq.variables.push_back(next);
            if (w[j].inverse) e.cq.atoms.push_back({next, w[j].base, prev});
            else e.cq.atoms.push_back({prev, w[j].base, next});
            prev = std::move(next);
        }
    }
    e.words = std::move(words);
    return e;
}

// The canonical database of a CQ: variables quotiented by the equality closure
// become vertices, letter atoms become edges.
struct CanonicalDb {
    GraphDb db;
    std::map<std::string, std::string> var_to_vertex;
};

inline CanonicalDb canonical_db(const Cq& cq, const Alphabet& alphabet) {
    auto uf = detail::equality_classes(cq);
    CanonicalDb out;
    out.db.alphabet = alphabet;
    for (const auto& v : cq.variables) {
        std::string r = uf.find(v);
        out.var_to_vertex[v] = r;
        out.db.add_vertex(r);
    }
    for (const auto& a : cq.atoms)
        out.db.add_edge(uf.find(a.source), a.label, uf.find(a.target));
    return out;
}

// Reads a CQ back as a one-disjunct query (single-letter and `eps` atoms), so
// the generic evaluator applies to it.
inline Conjunct cq_as_conjunct(const Cq& cq, const Alphabet& alphabet) {
    Conjunct c;
    for (const auto& a : cq.atoms)
        c.atoms.push_back(detail::make_atom(a.source,
                                            a.label.size() == 1 ? a.label : "'" + a.label + "'",
                                            a.target, alphabet));
    for (const auto& [x, y] : cq.equalities)
        c.atoms.push_back(detail::make_atom(x, "eps", y, alphabet));
    c.variables = cq.variables;
    return c;
}

// ---- w_lambda encoding ------------------------------------------------------

// The encoding alphabet extends the signed letters with one symbol per query
// variable and a separator; variables are spelled `?name` to keep them apart
// from base letters.
inline Symbol dollar_symbol() { return Symbol{"$", false}; }
inline Symbol var_symbol(const std::string& name) { return Symbol{"?" + name, false}; }

struct EncodedExpansion {
    Word word;                         // $ x1 w1 y1 $ x2 w2 y2 $ ... $
    std::vector<std::string> pos_var;  // variable represented at each position; "" at separators
    std::vector<int> pos_class;        // equality class per position; -1 at separators
};

// Encodes an expansion as the word over the extended alphabet, with the
// position-to-variable table: the position holding the j-th symbol of w_i
// represents the (j+1)-th variable of the i-th path, so the last symbol of w_i
// and the following head position both represent the target variable.
inline EncodedExpansion encode_expansion(const Query& q, const Expansion& e) {
    const Conjunct& c = q.disjuncts.at(e.disjunct);
    auto uf = detail::equality_classes(e.cq);
    std::map<std::string, int> class_ids;
    auto cls = [&](const std::string& v) {
        std::string r = uf.find(v);
        return class_ids.emplace(r, static_cast<int>(class_ids.size())).first->second;
    };
    EncodedExpansion out;
    auto put = [&](Symbol s, const std::string& var) {
        out.word.push_back(std::move(s));
        out.pos_var.push_back(var);
        out.pos_class.push_back(var.empty() ? -1 : cls(var));
    };
    put(dollar_symbol(), "");
    for (size_t i = 0; i < c.atoms.size(); i++) {
        const Word& w = e.words.at(i);
        put(var_symbol(c.atoms[i].source), c.atoms[i].source);
        for (size_t j = 0; j < w.size(); j++) {
            std::string var = j + 1 == w.size()
                                  ? c.atoms[i].target
                                  : "@" + std::to_string(i) + "." + std::to_string(j + 1);
            put(w[j], var);
        }
        put(var_symbol(c.atoms[i].target), c.atoms[i].target);
        put(dollar_symbol(), "");
    }
    return out;
}

}  // namespace rqb
