#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rqb/expansion.hpp"
#include "rqb/graphdb.hpp"
#include "rqb/query.hpp"

namespace rqb {

namespace detail {

struct DbIndex {
    std::vector<std::string> verts;
    std::map<std::string, int> id;

    explicit DbIndex(const GraphDb& g) {
        for (const auto& v : g.vertices) {
            id.emplace(v, static_cast<int>(verts.size()));
            verts.push_back(v);
        }
    }
};

// Shortest oriented-path length from u to v with label in L(nfa), for all
// pairs: BFS in the product of the NFA with the bidirected edge relation.
// Entry SIZE_MAX means no such path.
inline std::vector<std::vector<size_t>> atom_distances(const Nfa& nfa, const GraphDb& g,
                                                       const DbIndex& ix) {
    constexpr size_t kInf = static_cast<size_t>(-1);
    int nv = static_cast<int>(ix.verts.size());
    std::vector<std::vector<size_t>> dist(
        static_cast<size_t>(nv), std::vector<size_t>(static_cast<size_t>(nv), kInf));
    if (nv == 0) return dist;
    int nq = nfa.n_states;
    // product moves: ((u,q) -> (v,q')) for forward symbols on edges u->v, and
    // inverse symbols on edges v->u
    std::vector<std::vector<std::pair<int, State>>> succ(
        static_cast<size_t>(nv * std::max(nq, 1)));
    auto pid = [&](int v, State q) { return v * nq + q; };
    for (const auto& e : g.edges) {
        int a = ix.id.at(e.from), b = ix.id.at(e.to);
        for (const auto& t : nfa.transitions) {
            if (t.sym.base != e.label) continue;
            if (!t.sym.inverse) succ[static_cast<size_t>(pid(a, t.from))].push_back({b, t.to});
            else succ[static_cast<size_t>(pid(b, t.from))].push_back({a, t.to});
        }
    }
    for (int u = 0; u < nv; u++) {
        std::vector<size_t> d(static_cast<size_t>(nv * std::max(nq, 1)), kInf);
        std::deque<int> queue;
        for (State s : nfa.initials) {
            d[static_cast<size_t>(pid(u, s))] = 0;
            queue.push_back(pid(u, s));
        }
        while (!queue.empty()) {
            int p = queue.front();
            queue.pop_front();
            for (const auto& [v, qp] : succ[static_cast<size_t>(p)]) {
                size_t nd = d[static_cast<size_t>(p)] + 1;
                if (nd < d[static_cast<size_t>(pid(v, qp))]) {
                    d[static_cast<size_t>(pid(v, qp))] = nd;
                    queue.push_back(pid(v, qp));
                }
            }
        }
        for (int v = 0; v < nv; v++)
            for (State f : nfa.finals)
                dist[static_cast<size_t>(u)][static_cast<size_t>(v)] =
                    std::min(dist[static_cast<size_t>(u)][static_cast<size_t>(v)],
                             d[static_cast<size_t>(pid(v, f))]);
    }
    return dist;
}

// Backtracking join over the conjunct's variables.  `on_solution` receives the
// full assignment and returns true to stop the search.  Atom constraints are
// checked as soon as both endpoints are assigned; atoms are processed smallest
// relation first.
template <typename Callback>
inline void eval_conjunct(const Conjunct& c, const GraphDb& g,
                          const std::map<std::string, std::string>& frozen,
                          Callback&& on_solution) {
    DbIndex ix(g);
    int nv = static_cast<int>(ix.verts.size());
    std::map<std::string, int> varid;
    for (const auto& v : c.variables) varid.emplace(v, static_cast<int>(varid.size()));
    int nvar = static_cast<int>(varid.size());
    if (nvar == 0) return;
    if (nv == 0) return;  // variables cannot be mapped into an empty database

    struct Rel {
        int x, y;
        std::set<std::pair<int, int>> pairs;
    };
    std::vector<Rel> rels;
    for (const auto& a : c.atoms) {
        Rel r;
        r.x = varid.at(a.source);
        r.y = varid.at(a.target);
        auto dist = atom_distances(a.nfa, g, ix);
        for (int u = 0; u < nv; u++)
            for (int v = 0; v < nv; v++)
                if (dist[static_cast<size_t>(u)][static_cast<size_t>(v)] !=
                    static_cast<size_t>(-1))
                    r.pairs.insert({u, v});
        if (r.pairs.empty()) return;  // unsatisfiable atom on this database
        rels.push_back(std::move(r));
    }
    std::sort(rels.begin(), rels.end(),
              [](const Rel& a, const Rel& b) { return a.pairs.size() < b.pairs.size(); });

    std::vector<int> assign(static_cast<size_t>(nvar), -1);
    for (const auto& [var, vert] : frozen) {
        auto vit = varid.find(var);
        if (vit == varid.end()) continue;
        auto uit = ix.id.find(vert);
        if (uit == ix.id.end()) return;  // frozen to a vertex not in the database
        assign[static_cast<size_t>(vit->second)] = uit->second;
    }

    // variable order: endpoints of small relations first, then leftovers
    std::vector<int> order;
    std::vector<char> ordered(static_cast<size_t>(nvar), 0);
    auto push = [&](int v) {
        if (!ordered[static_cast<size_t>(v)]) {
            ordered[static_cast<size_t>(v)] = 1;
            order.push_back(v);
        }
    };
    for (const auto& [var, vert] : frozen)
        if (varid.count(var)) push(varid.at(var));
    for (const auto& r : rels) {
        push(r.x);
        push(r.y);
    }
    for (int v = 0; v < nvar; v++) push(v);

    // per relation, the position in `order` after which it is fully assigned
    std::vector<int> pos_of(static_cast<size_t>(nvar));
    for (size_t i = 0; i < order.size(); i++)
        pos_of[static_cast<size_t>(order[i])] = static_cast<int>(i);
    std::vector<std::vector<const Rel*>> check_at(order.size());
    for (const auto& r : rels)
        check_at[static_cast<size_t>(
                     std::max(pos_of[static_cast<size_t>(r.x)], pos_of[static_cast<size_t>(r.y)]))]
            .push_back(&r);

    auto rec = [&](auto&& self, size_t depth) -> bool {
        if (depth == order.size()) return on_solution(assign, ix);
        int var = order[depth];
        bool fixed = assign[static_cast<size_t>(var)] >= 0;
        for (int u = fixed ? assign[static_cast<size_t>(var)] : 0; u < nv; u++) {
            assign[static_cast<size_t>(var)] = u;
            bool ok = true;
            for (const Rel* r : check_at[depth])
                if (!r->pairs.count({assign[static_cast<size_t>(r->x)],
                                     assign[static_cast<size_t>(r->y)]})) {
                    ok = false;
                    break;
                }
            if (ok && self(self, depth + 1)) return true;
            if (fixed) break;
        }
        if (!fixed) assign[static_cast<size_t>(var)] = -1;
        return false;
    };
    rec(rec, 0);
}

}  // namespace detail

// Exact evaluation of one conjunct: the set of free-variable tuples (a single
// empty tuple encodes a satisfied Boolean query).
inline std::set<std::vector<std::string>> evaluate(
    const Conjunct& c, const std::vector<std::string>& free_vars, const GraphDb& g,
    const std::map<std::string, std::string>& frozen = {}) {
    std::set<std::vector<std::string>> out;
    std::map<std::string, int> varid;
    for (const auto& v : c.variables) varid.emplace(v, static_cast<int>(varid.size()));
    detail::eval_conjunct(c, g, frozen,
                          [&](const std::vector<int>& assign, const detail::DbIndex& ix) {
                              std::vector<std::string> tuple;
                              for (const auto& x : free_vars)
                                  tuple.push_back(
                                      ix.verts[static_cast<size_t>(
                                          assign[static_cast<size_t>(varid.at(x))])]);
                              out.insert(std::move(tuple));
                              return false;
                          });
    return out;
}

inline std::set<std::vector<std::string>> evaluate(const Query& q, const GraphDb& g) {
    std::set<std::vector<std::string>> out;
    for (const auto& d : q.disjuncts) {
        auto part = evaluate(d, q.free_vars, g);
        out.insert(part.begin(), part.end());
    }
    return out;
}

namespace detail {

inline bool satisfiable(const Conjunct& c, const GraphDb& g,
                        const std::map<std::string, std::string>& frozen) {
    bool found = false;
    eval_conjunct(c, g, frozen, [&](const std::vector<int>&, const DbIndex&) {
        found = true;
        return true;
    });
    return found;
}

inline Alphabet merged_alphabet(const Alphabet& a, const Cq& cq) {
    std::vector<std::string> letters = a.letters;
    for (const auto& at : cq.atoms) letters.push_back(at.label);
    return Alphabet(std::move(letters));
}

}  // namespace detail

// Homomorphism phi -> phi2: fixes free variables, respects the equality
// closure, and maps letter atoms onto letter atoms.  Returns the witness
// mapping (variables of phi to equality-class representatives of phi2).
inline std::optional<std::map<std::string, std::string>> find_hom(const Cq& phi,
                                                                  const Cq& phi2) {
    if (phi.free_vars != phi2.free_vars) return std::nullopt;
    Alphabet al = detail::merged_alphabet(detail::merged_alphabet(Alphabet{}, phi), phi2);
    CanonicalDb target = canonical_db(phi2, al);
    Conjunct c = cq_as_conjunct(phi, al);
    std::map<std::string, std::string> frozen;
    for (const auto& x : phi.free_vars) frozen[x] = target.var_to_vertex.at(x);
    std::map<std::string, int> varid;
    for (const auto& v : c.variables) varid.emplace(v, static_cast<int>(varid.size()));
    std::optional<std::map<std::string, std::string>> witness;
    detail::eval_conjunct(c, target.db, frozen,
                          [&](const std::vector<int>& assign, const detail::DbIndex& ix) {
                              std::map<std::string, std::string> h;
                              for (const auto& [v, i] : varid)
                                  h[v] = ix.verts[static_cast<size_t>(
                                      assign[static_cast<size_t>(i)])];
                              witness = std::move(h);
                              return true;
                          });
    return witness;
}

inline bool hom_exists(const Cq& phi, const Cq& phi2) { return find_hom(phi, phi2).has_value(); }

// True iff some expansion of the query maps into the CQ — equivalently, some
// disjunct is satisfied on the CQ's canonical database with the free variables
// frozen to themselves.
inline bool contains_cq(const Query& q, const Cq& phi) {
    if (q.free_vars != phi.free_vars) return false;
    Alphabet al = detail::merged_alphabet(q.alphabet, phi);
    CanonicalDb target = canonical_db(phi, al);
    std::map<std::string, std::string> frozen;
    for (const auto& x : q.free_vars) frozen[x] = target.var_to_vertex.at(x);
    for (const auto& d : q.disjuncts)
        if (detail::satisfiable(d, target.db, frozen)) return true;
    return false;
}

// All expansions of size at most max_size, each once per per-atom word choice,
// in nondecreasing size, then disjunct order, then shortlex word tuples.
inline std::vector<Expansion> enumerate_expansions(const Query& q, size_t max_size) {
    std::vector<Expansion> out;
    for (size_t d = 0; d < q.disjuncts.size(); d++) {
        const Conjunct& c = q.disjuncts[d];
        std::vector<std::vector<Word>> choices;
        for (const auto& a : c.atoms) choices.push_back(accepted_up_to(a.nfa, max_size));
        std::vector<Word> pick(c.atoms.size());
        auto rec = [&](auto&& self, size_t i, size_t budget) -> void {
            if (i == c.atoms.size()) {
                out.push_back(expand(q, d, pick));
                return;
            }
            for (const auto& w : choices[i]) {
                if (w.size() > budget) continue;
                pick[i] = w;
                self(self, i + 1, budget - w.size());
            }
        };
        rec(rec, 0, max_size);
    }
    auto tuple_less = [](const std::vector<Word>& a, const std::vector<Word>& b) {
        for (size_t i = 0; i < a.size() && i < b.size(); i++)
            if (a[i] != b[i]) return shortlex_less(a[i], b[i]);
        return a.size() < b.size();
    };
    std::stable_sort(out.begin(), out.end(), [&](const Expansion& a, const Expansion& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        if (a.disjunct != b.disjunct) return a.disjunct < b.disjunct;
        return tuple_less(a.words, b.words);
    });
    return out;
}

// Minimum size of an expansion of the query that maps into the given CQ
// (nullopt when none exists): per-atom shortest-path costs on the CQ's
// bidirected canonical database, minimized over variable assignments.
inline std::optional<size_t> min_covering_cq(const Query& q, const Cq& phi) {
    if (q.free_vars != phi.free_vars) return std::nullopt;
    Alphabet al = detail::merged_alphabet(q.alphabet, phi);
    CanonicalDb target = canonical_db(phi, al);
    detail::DbIndex ix(target.db);
    int nv = static_cast<int>(ix.verts.size());
    constexpr size_t kInf = static_cast<size_t>(-1);
    std::optional<size_t> best;
    for (const auto& c : q.disjuncts) {
        if (nv == 0) break;
        std::map<std::string, int> varid;
        for (const auto& v : c.variables) varid.emplace(v, static_cast<int>(varid.size()));
        int nvar = static_cast<int>(varid.size());
        struct CostRel {
            int x, y;
            std::vector<std::vector<size_t>> cost;
        };
        std::vector<CostRel> rels;
        for (const auto& a : c.atoms)
            rels.push_back({varid.at(a.source), varid.at(a.target),
                            detail::atom_distances(a.nfa, target.db, ix)});
        std::sort(rels.begin(), rels.end(), [](const CostRel& a, const CostRel& b) {
            size_t na = 0, nb = 0;
            for (const auto& row : a.cost)
                for (size_t v : row) na += (v != kInf);
            for (const auto& row : b.cost)
                for (size_t v : row) nb += (v != kInf);
            return na < nb;
        });
        std::vector<int> assign(static_cast<size_t>(nvar), -1);
        for (const auto& x : q.free_vars)
            assign[static_cast<size_t>(varid.at(x))] = ix.id.at(target.var_to_vertex.at(x));
        std::vector<int> order;
        {
            std::vector<char> seen(static_cast<size_t>(nvar), 0);
            auto push = [&](int v) {
                if (!seen[static_cast<size_t>(v)]) {
                    seen[static_cast<size_t>(v)] = 1;
                    order.push_back(v);
                }
            };
            for (const auto& x : q.free_vars) push(varid.at(x));
            for (const auto& r : rels) {
                push(r.x);
                push(r.y);
            }
            for (int v = 0; v < nvar; v++) push(v);
        }
        std::vector<int> pos_of(static_cast<size_t>(nvar));
        for (size_t i = 0; i < order.size(); i++)
            pos_of[static_cast<size_t>(order[i])] = static_cast<int>(i);
        std::vector<std::vector<const CostRel*>> charge_at(order.size());
        for (const auto& r : rels)
            charge_at[static_cast<size_t>(std::max(pos_of[static_cast<size_t>(r.x)],
                                                   pos_of[static_cast<size_t>(r.y)]))]
                .push_back(&r);
        // branch and bound on the total cost
        auto rec = [&](auto&& self, size_t depth, size_t sum) -> void {
            if (best && sum >= *best) return;
            if (depth == order.size()) {
                best = best ? std::min(*best, sum) : sum;
                return;
            }
            int var = order[depth];
            bool fixed = assign[static_cast<size_t>(var)] >= 0;
            for (int u = fixed ? assign[static_cast<size_t>(var)] : 0; u < nv; u++) {
                assign[static_cast<size_t>(var)] = u;
                size_t add = 0;
                for (const CostRel* r : charge_at[depth]) {
                    size_t cst = r->cost[static_cast<size_t>(
                        assign[static_cast<size_t>(r->x)])][static_cast<size_t>(
                        assign[static_cast<size_t>(r->y)])];
                    if (cst == kInf) {
                        add = kInf;
                        break;
                    }
                    add += cst;
                }
                if (add != kInf) self(self, depth + 1, sum + add);
                if (fixed) break;
            }
            if (!fixed) assign[static_cast<size_t>(var)] = -1;
        };
        rec(rec, 0, 0);
    }
    return best;
}

inline std::optional<size_t> min_covering_size(const Query& q, const Expansion& e) {
    return min_covering_cq(q, e.cq);
}

// An expansion is minimal when no strictly smaller expansion of the query maps
// into it.
inline bool is_minimal_expansion(const Query& q, const Expansion& e) {
    auto m = min_covering_size(q, e);
    return m.has_value() && *m == e.size();
}

}  // namespace rqb
