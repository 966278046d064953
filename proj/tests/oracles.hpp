#pragma once

// Independent brute-force oracles used to cross-check the library.
// These deliberately avoid the library's own algorithms: the regex matcher is
// a naive recursive matcher, word enumeration is plain generate-and-test.

#include <map>
#include <random>
#include <set>
#include <vector>

#include "rqb/cost_automaton.hpp"
#include "rqb/evaluate.hpp"
#include "rqb/expansion.hpp"
#include "rqb/graphdb.hpp"
#include "rqb/nfa.hpp"
#include "rqb/query.hpp"
#include "rqb/regex.hpp"
#include "rqb/symbol.hpp"

namespace oracle {

using rqb::Nfa;
using rqb::Regex;
using rqb::RegexPtr;
using rqb::Symbol;
using rqb::Word;

// naive recursive regex matcher on a word slice [lo, hi)
inline bool rx_match(const RegexPtr& r, const Word& w, size_t lo, size_t hi);

inline bool rx_match_concat(const std::vector<RegexPtr>& cs, size_t idx, const Word& w,
                            size_t lo, size_t hi) {
    if (idx == cs.size()) return lo == hi;
    for (size_t mid = lo; mid <= hi; mid++)
        if (rx_match(cs[idx], w, lo, mid) && rx_match_concat(cs, idx + 1, w, mid, hi))
            return true;
    return false;
}

inline bool rx_match_star(const RegexPtr& child, const Word& w, size_t lo, size_t hi) {
    if (lo == hi) return true;
    for (size_t mid = lo + 1; mid <= hi; mid++)
        if (rx_match(child, w, lo, mid) && rx_match_star(child, w, mid, hi)) return true;
    return false;
}

inline bool rx_match(const RegexPtr& r, const Word& w, size_t lo, size_t hi) {
    using K = Regex::Kind;
    switch (r->kind) {
        case K::Empty: return false;
        case K::Epsilon: return lo == hi;
        case K::Sym: return hi == lo + 1 && w[lo] == r->sym;
        case K::Concat: return rx_match_concat(r->children, 0, w, lo, hi);
        case K::Union:
            for (const auto& c : r->children)
                if (rx_match(c, w, lo, hi)) return true;
            return false;
        case K::Star: return rx_match_star(r->children[0], w, lo, hi);
        case K::Plus:
            for (size_t mid = lo; mid <= hi; mid++)
                if (rx_match(r->children[0], w, lo, mid) &&
                    rx_match_star(r->children[0], w, mid, hi))
                    return true;
            return false;
        case K::Optional:
            return lo == hi || rx_match(r->children[0], w, lo, hi);
    }
    return false;
}

inline bool rx_match(const RegexPtr& r, const Word& w) { return rx_match(r, w, 0, w.size()); }

// all words over `symbols` with length <= maxlen, shortlex order
inline std::vector<Word> all_words(const std::vector<Symbol>& symbols, size_t maxlen) {
    std::vector<Word> out{{}};
    size_t lo = 0;
    for (size_t len = 1; len <= maxlen; len++) {
        size_t hi = out.size();
        for (size_t i = lo; i < hi; i++)
            for (const auto& s : symbols) {
                Word w = out[i];
                w.push_back(s);
                out.push_back(std::move(w));
            }
        lo = hi;
    }
    return out;
}

inline bool is_proper_prefix(const Word& p, const Word& w) {
    return p.size() < w.size() && std::equal(p.begin(), p.end(), w.begin());
}

inline bool is_proper_suffix(const Word& p, const Word& w) {
    return p.size() < w.size() && std::equal(p.rbegin(), p.rend(), w.rbegin());
}

inline bool is_proper_factor(const Word& p, const Word& w) {
    if (p.size() >= w.size()) return false;
    if (p.empty()) return true;
    for (size_t i = 0; i + p.size() <= w.size(); i++)
        if (std::equal(p.begin(), p.end(), w.begin() + i)) return true;
    return false;
}

// finiteness probe for an NFA with n states: infinite iff it accepts a word
// with length in [n, 2n)
inline bool finite_by_pumping_window(const Nfa& a) {
    size_t n = static_cast<size_t>(a.n_states);
    for (const auto& w : rqb::accepted_up_to(a, 2 * n))
        if (w.size() >= n) return false;
    return true;
}

// ---- random generators (deterministic per seed) -----------------------------

inline RegexPtr random_regex(std::mt19937& rng, const std::vector<Symbol>& symbols,
                             int max_nodes) {
    // grows a random AST; node budget is approximate
    std::uniform_int_distribution<int> kind_d(0, 9);
    auto pick_symbol = [&] {
        std::uniform_int_distribution<size_t> d(0, symbols.size() - 1);
        return symbols[d(rng)];
    };
    auto rec = [&](auto&& self, int budget) -> RegexPtr {
        if (budget <= 1) return Regex::symbol(pick_symbol());
        switch (kind_d(rng)) {
            case 0: return Regex::epsilon();
            case 1: case 2: case 3: {
                auto l = self(self, budget / 2);
                auto r = self(self, budget - budget / 2 - 1);
                return Regex::concat({l, r});
            }
            case 4: case 5: {
                auto l = self(self, budget / 2);
                auto r = self(self, budget - budget / 2 - 1);
                return Regex::alt({l, r});
            }
            case 6: return Regex::star(self(self, budget - 1));
            case 7: return Regex::plus(self(self, budget - 1));
            case 8: return Regex::optional(self(self, budget - 1));
            default: return Regex::symbol(pick_symbol());
        }
    };
    return rec(rec, max_nodes);
}

inline Nfa random_nfa(std::mt19937& rng, const std::vector<Symbol>& symbols, int n_states,
                      double trans_density = 0.25) {
    Nfa n;
    n.alphabet = symbols;
    n.normalize_alphabet();
    n.n_states = n_states;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> st(0, n_states - 1);
    n.initials.insert(st(rng));
    n.finals.insert(st(rng));
    if (coin(rng) < 0.3) n.finals.insert(st(rng));
    for (int p = 0; p < n_states; p++)
        for (const auto& s : n.alphabet)
            for (int q = 0; q < n_states; q++)
                if (coin(rng) < trans_density) n.transitions.push_back({p, s, q});
    return n;
}

// ---- query oracles ----------------------------------------------------------

// all words of L(r) up to maxlen, by generate-and-test with the naive matcher
inline std::vector<Word> lang_words(const RegexPtr& r, const std::vector<Symbol>& symbols,
                                    size_t maxlen) {
    std::vector<Word> out;
    for (const auto& w : all_words(symbols, maxlen))
        if (rx_match(r, w)) out.push_back(w);
    return out;
}

// oriented-path existence u ->L v: worklist saturation over (vertex, state)
// pairs, with inverse letters walking edges backwards
inline bool db_path_exists(const Nfa& nfa, const rqb::GraphDb& g, const std::string& u,
                           const std::string& v) {
    std::set<std::pair<std::string, rqb::State>> reach;
    std::vector<std::pair<std::string, rqb::State>> work;
    for (rqb::State s : nfa.initials) {
        reach.insert({u, s});
        work.push_back({u, s});
    }
    while (!work.empty()) {
        auto [at, q] = work.back();
        work.pop_back();
        for (const auto& t : nfa.transitions) {
            if (t.from != q) continue;
            for (const auto& e : g.edges) {
                if (e.label != t.sym.base) continue;
                std::string nxt;
                if (!t.sym.inverse && e.from == at) nxt = e.to;
                else if (t.sym.inverse && e.to == at) nxt = e.from;
                else continue;
                if (reach.insert({nxt, t.to}).second) work.push_back({nxt, t.to});
            }
        }
    }
    for (rqb::State f : nfa.finals)
        if (reach.count({v, f})) return true;
    return false;
}

// conjunct evaluation by enumerating every mapping of variables to vertices
inline std::set<std::vector<std::string>> eval_all_mappings(
    const rqb::Conjunct& c, const std::vector<std::string>& free_vars, const rqb::GraphDb& g) {
    std::set<std::vector<std::string>> out;
    std::vector<std::string> verts(g.vertices.begin(), g.vertices.end());
    if (verts.empty() || c.variables.empty()) return out;
    std::map<std::string, std::string> h;
    auto rec = [&](auto&& self, size_t i) -> void {
        if (i == c.variables.size()) {
            for (const auto& a : c.atoms)
                if (!db_path_exists(a.nfa, g, h.at(a.source), h.at(a.target))) return;
            std::vector<std::string> tuple;
            for (const auto& x : free_vars) tuple.push_back(h.at(x));
            out.insert(std::move(tuple));
            return;
        }
        for (const auto& v : verts) {
            h[c.variables[i]] = v;
            self(self, i + 1);
        }
    };
    rec(rec, 0);
    return out;
}

// homomorphism phi -> phi2 by enumerating every variable mapping and checking
// the defining conditions against the transitive equality closure of phi2
inline bool hom_all_mappings(const rqb::Cq& phi, const rqb::Cq& phi2) {
    if (phi.free_vars != phi2.free_vars) return false;
    auto eqstar = [&](const rqb::Cq& cq) {
        std::set<std::pair<std::string, std::string>> eq;
        for (const auto& v : cq.variables) eq.insert({v, v});
        for (const auto& [a, b] : cq.equalities) {
            eq.insert({a, b});
            eq.insert({b, a});
        }
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& [a, b] : std::set(eq))
                for (const auto& [c, d] : std::set(eq))
                    if (b == c && eq.insert({a, d}).second) changed = true;
        }
        return eq;
    };
    auto eq2 = eqstar(phi2);
    std::map<std::string, std::string> h;
    auto conditions = [&] {
        for (const auto& x : phi.free_vars)
            if (!eq2.count({h.at(x), x})) return false;
        for (const auto& [a, b] : phi.equalities)
            if (!eq2.count({h.at(a), h.at(b)})) return false;
        for (const auto& at : phi.atoms) {
            bool found = false;
            for (const auto& at2 : phi2.atoms)
                if (at2.label == at.label && eq2.count({h.at(at.source), at2.source}) &&
                    eq2.count({h.at(at.target), at2.target})) {
                    found = true;
                    break;
                }
            if (!found) return false;
        }
        return true;
    };
    if (phi2.variables.empty()) return phi.variables.empty();
    auto rec = [&](auto&& self, size_t i) -> bool {
        if (i == phi.variables.size()) return conditions();
        for (const auto& v : phi2.variables) {
            h[phi.variables[i]] = v;
            if (self(self, i + 1)) return true;
        }
        return false;
    };
    return rec(rec, 0);
}

// number of expansions with size <= budget: per-atom word counts by length via
// the naive matcher, combined by convolution
inline size_t count_expansions(const rqb::Query& q, size_t budget) {
    size_t total = 0;
    for (const auto& d : q.disjuncts) {
        std::vector<size_t> ways(budget + 1, 0);
        ways[0] = 1;
        for (const auto& a : d.atoms) {
            std::vector<size_t> per_len(budget + 1, 0);
            for (const auto& w : lang_words(a.regex, q.alphabet.signed_symbols(), budget))
                per_len[w.size()]++;
            std::vector<size_t> nxt(budget + 1, 0);
            for (size_t s = 0; s <= budget; s++)
                for (size_t l = 0; l + s <= budget; l++) nxt[s + l] += ways[s] * per_len[l];
            ways = std::move(nxt);
        }
        for (size_t s = 0; s <= budget; s++) total += ways[s];
    }
    return total;
}

// minimum size of a covering expansion found by brute force within the cutoff:
// word tuples from the naive matcher, homomorphism by exhaustive mapping
inline std::optional<size_t> min_cover_bruteforce(const rqb::Query& q, const rqb::Cq& target,
                                                  size_t cutoff) {
    std::optional<size_t> best;
    for (size_t d = 0; d < q.disjuncts.size(); d++) {
        const auto& c = q.disjuncts[d];
        std::vector<std::vector<Word>> choices;
        for (const auto& a : c.atoms)
            choices.push_back(lang_words(a.regex, q.alphabet.signed_symbols(), cutoff));
        std::vector<Word> pick(c.atoms.size());
        auto rec = [&](auto&& self, size_t i, size_t budget) -> void {
            if (i == c.atoms.size()) {
                auto e = rqb::expand(q, d, pick);
                if (best && e.size() >= *best) return;
                if (hom_all_mappings(e.cq, target)) best = e.size();
                return;
            }
            for (const auto& w : choices[i]) {
                if (w.size() > budget) continue;
                pick[i] = w;
                self(self, i + 1, budget - w.size());
            }
        };
        rec(rec, 0, cutoff);
    }
    return best;
}

// ---- cost-automaton oracles -------------------------------------------------

// Exact run-tree cost by boolean least-fixpoint over (configuration, budget):
// reachable(cfg, c) = an accepting finite tree from cfg with max branch cost
// <= c exists. Stratified by budget, iterated to fixpoint within a stratum.
// Returns the minimum achievable cost, or nullopt if no tree with cost <= cmax.
inline std::optional<rqb::Cost> tree_cost(const rqb::CostAutomaton& a, const rqb::BaseWord& w,
                                          rqb::Cost cmax) {
    rqb::ConfigGraph g(a, w);
    int nc = g.configs();
    auto is_final = [&](int cfg) {
        rqb::State q = cfg / (g.len + 1);
        return a.finals.count(q) > 0;
    };
    auto is_univ = [&](int cfg) {
        rqb::State q = cfg / (g.len + 1);
        return a.is_universal(q);
    };
    // ok[c][cfg]
    std::vector<std::vector<char>> ok(static_cast<size_t>(cmax) + 1,
                                      std::vector<char>(static_cast<size_t>(nc), 0));
    for (rqb::Cost c = 0; c <= cmax; c++) {
        auto& cur = ok[static_cast<size_t>(c)];
        for (int i = 0; i < nc; i++)
            if (!is_univ(i) && is_final(i)) cur[static_cast<size_t>(i)] = 1;
        bool changed = true;
        while (changed) {
            changed = false;
            for (int i = 0; i < nc; i++) {
                if (cur[static_cast<size_t>(i)]) continue;
                const auto& es = g.edges[static_cast<size_t>(i)];
                bool val;
                auto branch_ok = [&](const rqb::ConfigGraph::Edge& e) {
                    if (e.cost > c) return false;
                    return ok[static_cast<size_t>(c - e.cost)][static_cast<size_t>(e.target)] != 0;
                };
                if (is_univ(i)) {
                    val = !es.empty();
                    for (const auto& e : es) val = val && branch_ok(e);
                } else {
                    val = false;
                    for (const auto& e : es) val = val || branch_ok(e);
                }
                if (val) {
                    cur[static_cast<size_t>(i)] = 1;
                    changed = true;
                }
            }
        }
    }
    int start = g.idx(a.initial, 0);
    for (rqb::Cost c = 0; c <= cmax; c++)
        if (ok[static_cast<size_t>(c)][static_cast<size_t>(start)]) return c;
    return std::nullopt;
}

struct CostAutOpts {
    bool two_way = false;
    bool alternating = false;
    bool epsilon = false;
};

inline rqb::CostAutomaton random_cost_automaton(std::mt19937& rng,
                                                const std::vector<std::string>& letters,
                                                int n_states, CostAutOpts opts,
                                                double density = 0.35) {
    rqb::CostAutomaton a;
    a.alphabet = rqb::Alphabet(letters);
    a.n_states = n_states;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> st(0, n_states - 1);
    if (opts.alternating) {
        a.universal.assign(static_cast<size_t>(n_states), false);
        for (int s = 1; s < n_states; s++)
            if (coin(rng) < 0.4) a.universal[static_cast<size_t>(s)] = true;
    }
    a.initial = 0;
    if (!a.universal.empty()) a.universal[0] = false;
    for (int tries = 0; tries < 2; tries++) {
        int f = st(rng);
        if (!a.is_universal(f)) a.finals.insert(f);
    }
    std::vector<std::optional<rqb::Symbol>> labels;
    for (const auto& b : letters) {
        labels.emplace_back(rqb::fwd(b));
        if (opts.two_way) labels.emplace_back(rqb::inv(b));
    }
    if (opts.epsilon) labels.emplace_back(std::nullopt);
    for (int p = 0; p < n_states; p++)
        for (const auto& lab : labels)
            for (int q = 0; q < n_states; q++)
                if (coin(rng) < density) {
                    bool end_both = coin(rng) < 0.7;
                    int cost = coin(rng) < 0.4 ? 1 : 0;
                    if (end_both) {
                        a.transitions.push_back({p, lab, false, cost, q});
                        a.transitions.push_back({p, lab, true, cost, q});
                    } else {
                        a.transitions.push_back({p, lab, coin(rng) < 0.5, cost, q});
                    }
                }
    a.derive_flags();
    a.two_way = a.two_way || opts.two_way;
    return a;
}

}  // namespace oracle
