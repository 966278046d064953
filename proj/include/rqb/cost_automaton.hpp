#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <vector>

#include "rqb/errors.hpp"
#include "rqb/nfa.hpp"
#include "rqb/symbol.hpp"

namespace rqb {

using Cost = long long;
constexpr Cost kInfCost = std::numeric_limits<Cost>::max();

inline Cost sat_add(Cost a, Cost b) {
    if (a == kInfCost || b == kInfCost) return kInfCost;
    return a + b;
}

// Unified record for the whole distance-automaton family: one-way or two-way,
// existential or alternating, with or without epsilon moves. Transitions carry
// an end flag (after taking the move, is the head at either end of the word?)
// and a {0,1} cost.
struct CostAutomaton {
    Alphabet alphabet;  // base letters A; labels range over A^± plus epsilon
    int n_states = 0;
    std::vector<bool> universal;  // per state; empty means all-existential
    State initial = 0;
    std::set<State> finals;

    struct Transition {
        State from;
        std::optional<Symbol> label;  // nullopt = epsilon
        bool end_flag;
        int cost;  // 0 or 1
        State to;
        auto operator<=>(const Transition&) const = default;
    };
    std::vector<Transition> transitions;

    bool two_way = false;
    bool alternating = false;
    bool has_epsilon = false;

    bool is_universal(State s) const {
        return !universal.empty() && universal[static_cast<size_t>(s)];
    }

    void derive_flags() {
        two_way = alternating = has_epsilon = false;
        for (const auto& t : transitions) {
            if (!t.label) has_epsilon = true;
            else if (t.label->inverse) two_way = true;
        }
        for (State s = 0; s < n_states; s++)
            if (is_universal(s)) alternating = true;
    }

    void validate() const {
        auto in_range = [&](State s) { return s >= 0 && s < n_states; };
        if (n_states > 0 && !in_range(initial))
            throw std::runtime_error("cost automaton: initial state out of range");
        if (is_universal(initial))
            throw std::runtime_error("cost automaton: initial state must be existential");
        for (State f : finals) {
            if (!in_range(f)) throw std::runtime_error("cost automaton: final out of range");
            if (is_universal(f))
                throw std::runtime_error("cost automaton: final states must be existential");
        }
        if (!universal.empty() && universal.size() != static_cast<size_t>(n_states))
            throw std::runtime_error("cost automaton: universal flag vector size mismatch");
        for (const auto& t : transitions) {
            if (!in_range(t.from) || !in_range(t.to))
                throw std::runtime_error("cost automaton: transition endpoint out of range");
            if (t.cost != 0 && t.cost != 1)
                throw std::runtime_error("cost automaton: cost must be 0 or 1");
            if (t.label && !alphabet.contains(t.label->base))
                throw std::runtime_error("cost automaton: label outside alphabet: " +
                                         t.label->str());
            if (t.label && t.label->inverse && !two_way)
                throw std::runtime_error("cost automaton: inverse label in one-way automaton");
            if (!t.label && !has_epsilon)
                throw std::runtime_error("cost automaton: epsilon label without epsilon flag");
        }
    }

    bool plain_one_way() const { return !two_way && !alternating && !has_epsilon; }
};

// convenience for flag-insensitive transitions: emit both the end and
// not-end variant, so the move is legal at any head position
inline void add_transition_any_flag(CostAutomaton& a, State from, std::optional<Symbol> label,
                                    int cost, State to) {
    a.transitions.push_back({from, label, false, cost, to});
    a.transitions.push_back({from, label, true, cost, to});
}

// word over the base alphabet
using BaseWord = std::vector<std::string>;

inline BaseWord base_word(const Word& w) {
    BaseWord out;
    for (const auto& s : w) {
        if (s.inverse) throw std::runtime_error("base_word: inverse symbol in input word");
        out.push_back(s.base);
    }
    return out;
}

inline std::string base_word_str(const BaseWord& w) {
    std::string s;
    for (const auto& x : w) {
        if (!s.empty()) s += ' ';
        s += x;
    }
    return s.empty() ? "eps" : s;
}

struct CostResult {
    bool accepted = false;
    Cost cost = 0;  // meaningful when accepted

    // the source convention: rejected words cost 0
    Cost value() const { return accepted ? cost : 0; }
};

// Configuration graph G_{A,w}: states x head positions 0..|w|, with edges for
// forward letters, inverse letters and epsilon moves, filtered by end flags.
struct ConfigGraph {
    int n_states;
    int len;  // |w|

    struct Edge {
        int cost;
        int target;  // config index
    };
    std::vector<std::vector<Edge>> edges;  // per config index

    int idx(State q, int i) const { return q * (len + 1) + i; }
    int configs() const { return n_states * (len + 1); }

    ConfigGraph(const CostAutomaton& a, const BaseWord& w) {
        n_states = a.n_states;
        len = static_cast<int>(w.size());
        edges.resize(static_cast<size_t>(configs()));
        auto boundary = [&](int j) { return j == 0 || j == len; };
        for (const auto& t : a.transitions) {
            if (!t.label) {  // epsilon: stay in place
                for (int i = 0; i <= len; i++) {
                    if (t.end_flag != boundary(i)) continue;
                    edges[idx(t.from, i)].push_back({t.cost, idx(t.to, i)});
                }
            } else if (!t.label->inverse) {  // read w[i+1], move right
                for (int i = 0; i < len; i++) {
                    if (w[static_cast<size_t>(i)] != t.label->base) continue;
                    if (t.end_flag != boundary(i + 1)) continue;
                    edges[idx(t.from, i)].push_back({t.cost, idx(t.to, i + 1)});
                }
            } else {  // read (w[i])^{-1}, move left
                for (int i = 1; i <= len; i++) {
                    if (w[static_cast<size_t>(i - 1)] != t.label->base) continue;
                    if (t.end_flag != boundary(i - 1)) continue;
                    edges[idx(t.from, i)].push_back({t.cost, idx(t.to, i - 1)});
                }
            }
        }
    }
};

// cost_A(w, q, i) for every configuration at once, by decreasing value
// iteration on the configuration graph; kInfCost marks "no accepting run"
inline std::vector<Cost> config_values(const CostAutomaton& a, const BaseWord& w) {
    ConfigGraph g(a, w);
    std::vector<Cost> v(static_cast<size_t>(g.configs()), kInfCost);
    for (State f : a.finals)
        for (int i = 0; i <= g.len; i++) v[static_cast<size_t>(g.idx(f, i))] = 0;
    Cost max_finite = 1;
    std::uint64_t rounds = 0;
    for (;;) {
        bool changed = false;
        for (State q = 0; q < a.n_states; q++) {
            bool fin = a.finals.count(q) > 0;
            bool uni = a.is_universal(q);
            for (int i = 0; i <= g.len; i++) {
                size_t c = static_cast<size_t>(g.idx(q, i));
                Cost nv;
                if (uni) {
                    const auto& es = g.edges[c];
                    if (es.empty()) nv = kInfCost;
                    else {
                        nv = 0;
                        for (const auto& e : es)
                            nv = std::max(nv, sat_add(e.cost, v[static_cast<size_t>(e.target)]));
                    }
                } else {
                    nv = fin ? 0 : kInfCost;
                    for (const auto& e : g.edges[c])
                        nv = std::min(nv, sat_add(e.cost, v[static_cast<size_t>(e.target)]));
                }
                if (nv != v[c]) {
                    v[c] = nv;
                    changed = true;
                    if (nv != kInfCost) max_finite = std::max(max_finite, nv);
                }
            }
        }
        if (!changed) break;
        if (++rounds > static_cast<std::uint64_t>(g.configs()) * (1 + max_finite) + 2)
            throw std::logic_error("config value iteration failed to converge");
    }
    return v;
}

inline CostResult cost_of_word(const CostAutomaton& a, const BaseWord& w) {
    if (a.n_states == 0) return {false, 0};
    auto v = config_values(a, w);
    ConfigGraph g(a, w);
    Cost c = v[static_cast<size_t>(g.idx(a.initial, 0))];
    if (c == kInfCost) return {false, 0};
    return {true, c};
}

inline bool accepts(const CostAutomaton& a, const BaseWord& w) {
    return cost_of_word(a, w).accepted;
}

// enumerate base words of length <= maxlen; max cost over accepted ones
inline Cost sup_cost_up_to_length(const CostAutomaton& a, size_t maxlen) {
    Cost sup = 0;
    BaseWord cur;
    auto rec = [&](auto&& self) -> void {
        auto r = cost_of_word(a, cur);
        if (r.accepted) sup = std::max(sup, r.cost);
        if (cur.size() == maxlen) return;
        for (const auto& b : a.alphabet.letters) {
            cur.push_back(b);
            self(self);
            cur.pop_back();
        }
    };
    rec(rec);
    return sup;
}

// In this model a run tree may stop in a final state at any head position, and
// an empty tree accepts whenever the start state is final. A classic distance
// automaton instead reads the entire word, with no end flags. to_classic_da
// rewrites a one-way non-alternating epsilon-free automaton into an equivalent
// classic one (evaluate it full-consumption, ignoring flags):
//   - not-end moves are kept; used at the last letter they land in a non-final
//     original state and die, which is exactly what the flag forbade;
//   - a not-end move into a final state may instead branch into a pre-skim
//     state that must consume one more letter and then skims the rest free of
//     charge: early acceptance is legal precisely when letters remain;
//   - an end move into a final state becomes a move into an accept sink with
//     no outgoing transitions, so it is useful only on the last letter;
//   - a final start state accepts everything at cost 0, reproduced by making
//     the start state final and letting it skim.
// Transitions are emitted with both flag variants; the flags carry no meaning
// in the output.
inline CostAutomaton to_classic_da(const CostAutomaton& a) {
    if (a.two_way || a.alternating || a.has_epsilon)
        throw FlavorError("to_classic_da: one-way non-alternating epsilon-free required");
    CostAutomaton b;
    b.alphabet = a.alphabet;
    b.n_states = a.n_states + 3;
    State preskim = a.n_states, skim = a.n_states + 1, acc = a.n_states + 2;
    b.initial = a.initial;
    b.finals = {skim, acc};
    for (const auto& t : a.transitions) {
        if (t.label && t.label->inverse)
            throw FlavorError("to_classic_da: inverse label in one-way automaton");
        if (!t.end_flag) {
            add_transition_any_flag(b, t.from, t.label, t.cost, t.to);
            if (a.finals.count(t.to))
                add_transition_any_flag(b, t.from, t.label, t.cost, preskim);
        } else if (a.finals.count(t.to)) {
            add_transition_any_flag(b, t.from, t.label, t.cost, acc);
        }
        // an end move into a non-final state is a dead end one-way
    }
    for (const auto& l : b.alphabet.letters) {
        add_transition_any_flag(b, preskim, fwd(l), 0, skim);
        add_transition_any_flag(b, skim, fwd(l), 0, skim);
        if (a.finals.count(a.initial)) add_transition_any_flag(b, a.initial, fwd(l), 0, skim);
    }
    if (a.finals.count(a.initial)) b.finals.insert(a.initial);
    return b;
}

// min-plus evaluation for plain one-way DA (cross-check path), via the classic
// full-consumption reading of the automaton
inline CostResult cost_via_matrices(const CostAutomaton& input, const BaseWord& w) {
    CostAutomaton a = to_classic_da(input);
    int n = a.n_states;
    // row vector of costs per state
    std::vector<Cost> v(static_cast<size_t>(n), kInfCost);
    v[static_cast<size_t>(a.initial)] = 0;
    for (size_t pos = 0; pos < w.size(); pos++) {
        std::vector<Cost> nv(static_cast<size_t>(n), kInfCost);
        for (const auto& t : a.transitions) {
            if (t.label->base != w[pos]) continue;
            Cost c = sat_add(v[static_cast<size_t>(t.from)], t.cost);
            nv[static_cast<size_t>(t.to)] = std::min(nv[static_cast<size_t>(t.to)], c);
        }
        v = std::move(nv);
    }
    Cost best = kInfCost;
    for (State f : a.finals) best = std::min(best, v[static_cast<size_t>(f)]);
    if (best == kInfCost) return {false, 0};
    return {true, best};
}

}  // namespace rqb
