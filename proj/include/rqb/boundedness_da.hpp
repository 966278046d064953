#pragma once

// The boundedness-to-limitedness reduction: a one-way distance automaton over
// the expansion-encoding alphabet whose cost on an encoded expansion tracks
// the minimum size of a covering expansion, so the query is bounded exactly
// when the automaton is limited.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "rqb/cost_automaton.hpp"
#include "rqb/errors.hpp"
#include "rqb/evaluate.hpp"
#include "rqb/expansion.hpp"
#include "rqb/query.hpp"
#include "rqb/reductions.hpp"

namespace rqb {

// ---- encoding alphabet ------------------------------------------------------

// Letters of the encoding alphabet: base letters "a", inverse letters "a-",
// variable symbols "?x", and the separator "$".
inline std::string a1_letter(const Symbol& s) { return s.inverse ? s.base + "-" : s.base; }

inline std::vector<std::string> a1_letters(const Query& q) {
    std::set<std::string> out{"$"};
    for (const auto& b : q.alphabet.letters) {
        out.insert(b);
        out.insert(b + "-");
    }
    for (const auto& d : q.disjuncts)
        for (const auto& v : d.variables) out.insert("?" + v);
    return {out.begin(), out.end()};
}

// the encoded expansion as a plain word over the encoding alphabet
inline BaseWord encoding_word(const Query& q, const Expansion& e) {
    BaseWord w;
    for (const auto& s : encode_expansion(q, e).word) w.push_back(a1_letter(s));
    return w;
}

namespace detail {

// ---- annotated alphabet -----------------------------------------------------
// An annotated letter pairs an encoding letter with the set of query variables
// the position is chosen to represent; separators carry no annotation.

inline std::string a2_encode(const std::string& a1, const std::set<std::string>& ann) {
    std::string s = a1 + "|";
    for (const auto& v : ann) s += v + ",";
    return s;
}

struct A2Letter {
    std::string encoded;
    std::string a1;
    std::set<std::string> ann;
};

inline std::vector<A2Letter> a2_letters(const std::vector<std::string>& a1,
                                        const std::vector<std::string>& vars) {
    std::vector<std::set<std::string>> subsets{{}};
    for (const auto& v : vars) {
        size_t n = subsets.size();
        for (size_t i = 0; i < n; i++) {
            auto s = subsets[i];
            s.insert(v);
            subsets.push_back(std::move(s));
        }
    }
    std::vector<A2Letter> out;
    for (const auto& l : a1) {
        if (l == "$") {
            out.push_back({a2_encode(l, {}), l, {}});
            continue;
        }
        for (const auto& s : subsets) out.push_back({a2_encode(l, s), l, s});
    }
    return out;
}

// ---- the valid-annotation checker ------------------------------------------
// One-way NFA over the annotated alphabet: annotations must partition the
// disjunct's variables, and a free variable may only be placed on its own
// head symbol.
inline Nfa annotation_checker(const std::vector<A2Letter>& letters,
                              const std::vector<std::string>& vars,
                              const std::vector<std::string>& free_vars) {
    std::vector<Symbol> alpha;
    for (const auto& l : letters) alpha.emplace_back(l.encoded, false);
    Nfa n;
    n.alphabet = alpha;
    n.normalize_alphabet();
    std::map<std::set<std::string>, State> ids;
    std::vector<std::set<std::string>> todo;
    auto get = [&](const std::set<std::string>& s) {
        auto [it, ins] = ids.emplace(s, static_cast<State>(ids.size()));
        if (ins) todo.push_back(s);
        return it->second;
    };
    std::set<std::string> all(vars.begin(), vars.end());
    std::set<std::string> free_set(free_vars.begin(), free_vars.end());
    n.initials = {get({})};
    for (size_t k = 0; k < todo.size(); k++) {
        std::set<std::string> cur = todo[k];
        State from = ids.at(cur);
        for (const auto& l : letters) {
            bool ok = true;
            for (const auto& v : l.ann) {
                if (cur.count(v)) ok = false;  // placed twice
                if (free_set.count(v) && l.a1 != "?" + v) ok = false;
            }
            if (!ok) continue;
            auto nxt = cur;
            nxt.insert(l.ann.begin(), l.ann.end());
            n.transitions.push_back({from, Symbol{l.encoded, false}, get(nxt)});
        }
    }
    n.n_states = static_cast<int>(ids.size());
    n.finals = {ids.at(all)};
    return n;
}

// ---- the two-way matcher ----------------------------------------------------
// A two-way distance automaton over the annotated alphabet.  It walks the
// encoded word, guessing for each atom of the disjunct an oriented path in the
// encoded expansion's structure: moves that consume a database edge (a letter
// position read in either direction) cost 1, navigation between positions that
// represent the same expansion variable costs 0.  Navigation is built from
// sound primitives: acquiring the variable name at a head position, scanning
// to another head with the same name, and crossing an equality segment's two
// heads.  An atom starts at a position annotated with its source variable and
// ends, in a verification phase, by re-reading a position annotated with its
// target variable from the same equivalence class.  Scans are disciplined into
// a rewind-to-the-left-end phase followed by a forward-only phase, which keeps
// the later one-way conversion tractable.
inline CostAutomaton atom_matcher(const Conjunct& c, const std::vector<A2Letter>& letters,
                                  const std::vector<std::string>& vars) {
    CostAutomaton b;
    {
        std::vector<std::string> names;
        for (const auto& l : letters) names.push_back(l.encoded);
        b.alphabet = Alphabet(std::move(names));
    }
    std::map<std::string, State> ids;
    auto st = [&](const std::string& key) {
        auto [it, ins] = ids.emplace(key, b.n_states);
        if (ins) b.n_states++;
        return it->second;
    };
    // both-flag and single-flag transition helpers
    auto T = [&](State from, const std::string& l, bool back, int cost, State to) {
        add_transition_any_flag(b, from, back ? inv(l) : fwd(l), cost, to);
    };
    auto TF = [&](State from, const std::string& l, bool back, bool flag, int cost, State to) {
        b.transitions.push_back({from, back ? inv(l) : fwd(l), flag, cost, to});
    };
    size_t m = c.atoms.size();
    auto acc = st("acc");
    b.finals = {acc};

    auto is_var = [&](const A2Letter& l) { return l.a1.starts_with("?"); };
    auto var_of = [&](const A2Letter& l) { return l.a1.substr(1); };

    // seek phase for atom i: rewind to the left end, then scan forward and
    // enter the matcher by reading a position annotated with the atom's source
    auto seekrw = [&](size_t i) { return st("kr." + std::to_string(i)); };
    auto seekfw = [&](size_t i) { return st("kf." + std::to_string(i)); };
    b.initial = seekfw(0);  // runs start at the left end already

    for (size_t i = 0; i < m; i++) {
        const Nfa& L = c.atoms[i].nfa;
        const std::string& x = c.atoms[i].source;
        const std::string& y = c.atoms[i].target;
        std::string pi = std::to_string(i) + ".";
        auto mat = [&](State q, const std::string& name) {
            return st("m." + pi + std::to_string(q) + "." + name);
        };
        auto mscanrw = [&](State q, const std::string& v) {
            return st("mr." + pi + std::to_string(q) + "." + v);
        };
        auto mscanfw = [&](State q, const std::string& v) {
            return st("mf." + pi + std::to_string(q) + "." + v);
        };
        auto macq = [&](State q, const std::string& v) {
            return st("ml." + pi + std::to_string(q) + "." + v);
        };
        State vpeek = st("vp." + pi);

        for (const auto& l : letters) {
            TF(seekrw(i), l.encoded, true, false, 0, seekrw(i));
            TF(seekrw(i), l.encoded, true, true, 0, seekfw(i));
            T(seekfw(i), l.encoded, false, 0, seekfw(i));
            if (l.ann.count(x))
                for (State q0 : L.initials) T(seekfw(i), l.encoded, false, 0, mat(q0, ""));
        }

        // matcher states: per NFA state q and carried name ("" anonymous)
        std::vector<std::string> names{""};
        for (const auto& v : vars) names.push_back(v);
        for (State q = 0; q < L.n_states; q++) {
            for (const auto& nm : names) {
                State me = mat(q, nm);
                for (const auto& l : letters) {
                    // ---- path moves (cost 1): consume one database edge
                    if (!is_var(l) && l.a1 != "$") {
                        Symbol edge =
                            l.a1.ends_with("-")
                                ? Symbol{l.a1.substr(0, l.a1.size() - 1), true}
                                : Symbol{l.a1, false};
                        for (const auto& t : L.transitions) {
                            if (t.from != q) continue;
                            if (t.sym == edge)  // follow the edge in its own direction
                                T(me, l.encoded, false, 1, mat(t.to, ""));
                            if (t.sym == edge.inverted())  // or against it
                                T(me, l.encoded, true, 1, mat(t.to, ""));
                        }
                    }
                    // ---- navigation (cost 0)
                    if (is_var(l)) {
                        std::string w = var_of(l);
                        // acquire rightward: the following head shares our class
                        T(me, l.encoded, false, 0, mat(q, w));
                        if (nm.empty()) {
                            // acquire self: step back over our own head, return
                            T(me, l.encoded, true, 0, macq(q, w));
                        } else if (nm == w) {
                            // descend left over our head; still in class
                            T(me, l.encoded, true, 0, mat(q, ""));
                        }
                    }
                    if (!nm.empty()) {
                        // scanning for another head with the same name
                        TF(me, l.encoded, true, false, 0, mscanrw(q, nm));
                        TF(me, l.encoded, true, true, 0, mscanfw(q, nm));
                        T(me, l.encoded, false, 0, mscanfw(q, nm));
                    }
                    // ---- verification once the language accepts: the
                    // matcher's own navigation can park the head right of the
                    // target-annotated position, so a single peek suffices
                    if (L.finals.count(q)) T(me, l.encoded, true, 0, vpeek);
                }
            }
            // scan/acquire helper states per name
            for (const auto& v : vars) {
                for (const auto& l : letters) {
                    TF(mscanrw(q, v), l.encoded, true, false, 0, mscanrw(q, v));
                    TF(mscanrw(q, v), l.encoded, true, true, 0, mscanfw(q, v));
                    T(mscanfw(q, v), l.encoded, false, 0, mscanfw(q, v));
                    if (is_var(l) && var_of(l) == v) {
                        T(mscanfw(q, v), l.encoded, false, 0, mat(q, v));
                        T(macq(q, v), l.encoded, false, 0, mat(q, v));
                    }
                }
            }
        }

        for (const auto& l : letters) {
            if (l.ann.count(y)) {
                if (i + 1 == m) {
                    T(vpeek, l.encoded, false, 0, acc);
                } else {
                    T(vpeek, l.encoded, false, 0, seekrw(i + 1));
                    T(vpeek, l.encoded, false, 0, seekfw(i + 1));
                }
            }
        }
    }
    b.derive_flags();
    return b;
}

}  // namespace detail

// ---- the encoding-shape acceptor -------------------------------------------
// One-way NFA over the encoding alphabet accepting exactly the encoded
// expansions of the query: per disjunct, "$"-separated segments each holding
// the two head symbols of an atom around a word from the atom's language.
inline Nfa encoding_acceptor(const Query& q) {
    std::vector<Symbol> alpha;
    for (const auto& l : a1_letters(q)) alpha.emplace_back(l, false);
    std::optional<Nfa> all;
    for (const auto& d : q.disjuncts) {
        Nfa part = nfa_symbol(alpha, fwd("$"));
        for (const auto& a : d.atoms) {
            // the atom language with signed symbols renamed to encoding letters
            Nfa lang = a.nfa;
            lang.alphabet = alpha;
            for (auto& t : lang.transitions) t.sym = Symbol{a1_letter(t.sym), false};
            part = nfa_concat(part, nfa_symbol(alpha, fwd("?" + a.source)));
            part = nfa_concat(part, lang);
            part = nfa_concat(part, nfa_symbol(alpha, fwd("?" + a.target)));
            part = nfa_concat(part, nfa_symbol(alpha, fwd("$")));
        }
        all = all ? nfa_union(*all, part) : part;
    }
    all->trim();
    return *all;
}

namespace detail {

// graph-level trim in both directions; safe for two-way automata since
// configuration reachability implies transition-graph reachability
inline CostAutomaton trim_two_sided(const CostAutomaton& a) {
    std::vector<char> fwd_r(a.n_states, 0), bwd_r(a.n_states, 0);
    std::vector<std::vector<State>> out(a.n_states), in(a.n_states);
    for (const auto& t : a.transitions) {
        out[t.from].push_back(t.to);
        in[t.to].push_back(t.from);
    }
    auto bfs = [](std::vector<char>& mark, const std::vector<std::vector<State>>& adj,
                  std::vector<State> seed) {
        while (!seed.empty()) {
            State s = seed.back();
            seed.pop_back();
            for (State t : adj[s])
                if (!mark[t]) {
                    mark[t] = 1;
                    seed.push_back(t);
                }
        }
    };
    std::vector<State> seeds{a.initial};
    fwd_r[a.initial] = 1;
    bfs(fwd_r, out, seeds);
    seeds.clear();
    for (State f : a.finals) {
        bwd_r[f] = 1;
        seeds.push_back(f);
    }
    bfs(bwd_r, in, seeds);
    std::vector<State> remap(a.n_states, -1);
    CostAutomaton b;
    b.alphabet = a.alphabet;
    for (State s = 0; s < a.n_states; s++)
        if ((fwd_r[s] && bwd_r[s]) || s == a.initial) remap[s] = b.n_states++;
    b.initial = remap[a.initial];
    for (State f : a.finals)
        if (remap[f] >= 0) b.finals.insert(remap[f]);
    for (const auto& t : a.transitions)
        if (remap[t.from] >= 0 && remap[t.to] >= 0)
            b.transitions.push_back({remap[t.from], t.label, t.end_flag, t.cost, remap[t.to]});
    b.derive_flags();
    return b;
}

// single-initial copy of an NFA (fresh start state when needed)
inline Nfa single_initial(Nfa n) {
    if (n.initials.size() == 1) return n;
    State s0 = n.n_states++;
    std::vector<Nfa::Transition> extra;
    for (const auto& t : n.transitions)
        if (n.initials.count(t.from)) extra.push_back({s0, t.sym, t.to});
    n.transitions.insert(n.transitions.end(), extra.begin(), extra.end());
    for (State i : n.initials)
        if (n.finals.count(i)) {
            n.finals.insert(s0);
            break;
        }
    n.initials = {s0};
    return n;
}

// full-consumption product of a one-way cost automaton with an NFA over the
// same letters; costs come from the cost side, only reachable pairs are built
inline CostAutomaton classic_product(const CostAutomaton& a, const Nfa& nfa) {
    Nfa n = single_initial(nfa);
    CostAutomaton b;
    b.alphabet = a.alphabet;
    std::map<std::pair<State, State>, State> ids;
    std::vector<std::pair<State, State>> todo;
    auto get = [&](State s, State t) {
        auto [it, ins] = ids.emplace(std::make_pair(s, t), b.n_states);
        if (ins) {
            b.n_states++;
            todo.emplace_back(s, t);
        }
        return it->second;
    };
    b.initial = get(a.initial, *n.initials.begin());
    std::map<std::pair<State, std::string>, std::vector<State>> nsteps;
    for (const auto& t : n.transitions) nsteps[{t.from, t.sym.base}].push_back(t.to);
    std::map<State, std::vector<CostAutomaton::Transition>> asteps;
    for (const auto& t : a.transitions) asteps[t.from].push_back(t);
    for (size_t k = 0; k < todo.size(); k++) {
        auto [s, t] = todo[k];
        State from = ids.at({s, t});
        auto it = asteps.find(s);
        if (it == asteps.end()) continue;
        for (const auto& at : it->second) {
            if (!at.label || at.label->inverse)
                throw std::runtime_error("classic_product: input must be one-way");
            auto jt = nsteps.find({t, at.label->base});
            if (jt == nsteps.end()) continue;
            for (State t2 : jt->second)
                b.transitions.push_back({from, at.label, at.end_flag, at.cost, get(at.to, t2)});
        }
    }
    for (const auto& [pair, id] : ids)
        if (a.finals.count(pair.first) && n.finals.count(pair.second)) b.finals.insert(id);
    b.derive_flags();
    return trim_unreachable(b);
}

// rename every letter through a projection map, changing the alphabet
inline CostAutomaton project_letters(const CostAutomaton& a,
                                     const std::map<std::string, std::string>& proj,
                                     Alphabet target) {
    CostAutomaton b = a;
    b.alphabet = std::move(target);
    for (auto& t : b.transitions) {
        if (!t.label) continue;
        t.label = Symbol{proj.at(t.label->base), t.label->inverse};
    }
    std::sort(b.transitions.begin(), b.transitions.end());
    b.transitions.erase(std::unique(b.transitions.begin(), b.transitions.end()),
                        b.transitions.end());
    b.derive_flags();
    return b;
}

// union of one-way cost automata via a fresh initial state
inline CostAutomaton classic_union(const std::vector<CostAutomaton>& parts, Alphabet alpha) {
    CostAutomaton b;
    b.alphabet = std::move(alpha);
    b.n_states = 1;
    b.initial = 0;
    for (const auto& p : parts) {
        State off = b.n_states;
        b.n_states += p.n_states;
        for (const auto& t : p.transitions) {
            b.transitions.push_back({t.from + off, t.label, t.end_flag, t.cost, t.to + off});
            if (t.from == p.initial)
                b.transitions.push_back({0, t.label, t.end_flag, t.cost, t.to + off});
        }
        for (State f : p.finals) b.finals.insert(f + off);
        if (p.finals.count(p.initial)) b.finals.insert(0);
    }
    b.derive_flags();
    return b;
}

// route acceptance through a dedicated final reachable only by a move that
// lands on the word's right end, so the automaton demands full consumption
// under run-tree semantics as well as under matrix evaluation
inline CostAutomaton guard_word_end(CostAutomaton a) {
    State fin = a.n_states++;
    std::vector<CostAutomaton::Transition> extra;
    for (const auto& t : a.transitions)
        if (t.end_flag && a.finals.count(t.to)) extra.push_back({t.from, t.label, true, t.cost, fin});
    a.transitions.insert(a.transitions.end(), extra.begin(), extra.end());
    a.finals = {fin};
    a.derive_flags();
    return a;
}

}  // namespace detail

}  // namespace rqb
