#pragma once

// Language acceptors for members of the cost-automaton family, ignoring costs.
// Used to guard reductions whose raw output would otherwise accept words the
// original rejects: the guard restricts the output to the original language.

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rqb/cost_automaton.hpp"
#include "rqb/errors.hpp"
#include "rqb/nfa.hpp"

namespace rqb {

// ---------------------------------------------------------------------------
// One-way (possibly alternating) epsilon-free automaton -> classic NFA with
// exactly the same language. Subset construction over obligation sets: a set
// S means "each state of S must accept the remaining suffix from the current
// position". Reading a letter, every member either leaves the tree (allowed
// exactly for final states, at any position) or moves; universal members move
// along all their applicable edges at once, existential members pick one. The
// end flags of the moves must match whether the target position is the word
// end, which the NFA resolves by committing: an end-flagged step may only be
// the last letter (sink with no continuation), a mid-word step asserts a
// continuation (such states are never accepting). When every obligation has
// left the tree the rest of the word is skimmed freely.
inline Nfa one_way_language_nfa(const CostAutomaton& a,
                                std::uint64_t max_states = kDefaultMaxStates) {
    if (a.two_way || a.has_epsilon)
        throw FlavorError("one_way_language_nfa: one-way epsilon-free input required");
    Nfa n;
    n.alphabet = a.alphabet.forward_symbols();
    if (a.n_states == 0) return n;

    const State kSkim = 0, kDone = 1;
    n.n_states = 2;
    n.finals = {kSkim, kDone};
    for (const auto& s : n.alphabet) n.transitions.push_back({kSkim, s, kSkim});

    // subset states keyed by (asserted-continuation, obligations); the start
    // subset carries no assertion and is the only subset that may be final
    using Key = std::pair<bool, std::set<State>>;
    std::map<Key, State> ids;
    std::deque<Key> queue;
    auto get_id = [&](const Key& k) {
        auto it = ids.find(k);
        if (it != ids.end()) return it->second;
        State id = n.n_states++;
        ids.emplace(k, id);
        if (ids.size() > max_states)
            throw ResourceLimitError("one_way_language_nfa: subset budget exceeded");
        queue.push_back(k);
        return id;
    };
    Key start{false, {a.initial}};
    n.initials = {get_id(start)};
    if (a.finals.count(a.initial)) n.finals.insert(ids.at(start));

    // per (state, letter, end flag): applicable move targets
    auto edge_targets = [&](State q, const std::string& b, bool e) {
        std::vector<State> out;
        for (const auto& t : a.transitions)
            if (t.from == q && t.label->base == b && t.end_flag == e) out.push_back(t.to);
        return out;
    };

    while (!queue.empty()) {
        Key cur = queue.front();
        queue.pop_front();
        State cur_id = ids.at(cur);
        const std::set<State>& obs = cur.second;
        std::vector<State> members(obs.begin(), obs.end());

        bool all_droppable = true;
        for (State q : members) all_droppable = all_droppable && a.finals.count(q);
        for (const auto& sym : n.alphabet) {
            const std::string& b = sym.base;
            if (all_droppable) n.transitions.push_back({cur_id, sym, kSkim});
            for (bool e : {false, true}) {
                // enumerate the reachable successor obligation sets
                std::set<std::set<State>> results;
                std::set<State> acc;
                auto rec = [&](auto&& self, size_t i) -> void {
                    if (i == members.size()) {
                        if (!acc.empty()) results.insert(acc);
                        return;
                    }
                    State q = members[i];
                    if (a.finals.count(q)) self(self, i + 1);  // leave the tree here
                    auto ts = edge_targets(q, b, e);
                    if (a.is_universal(q)) {
                        if (ts.empty()) return;  // universal member with no move: fail
                        std::vector<State> added;
                        for (State p : ts)
                            if (acc.insert(p).second) added.push_back(p);
                        self(self, i + 1);
                        for (State p : added) acc.erase(p);
                    } else {
                        for (State p : ts) {
                            bool fresh = acc.insert(p).second;
                            self(self, i + 1);
                            if (fresh) acc.erase(p);
                        }
                    }
                };
                rec(rec, 0);
                for (const auto& r : results) {
                    if (!e) {
                        n.transitions.push_back({cur_id, sym, get_id({true, r})});
                    } else {
                        bool all_final = true;
                        for (State p : r) all_final = all_final && a.finals.count(p);
                        if (all_final) n.transitions.push_back({cur_id, sym, kDone});
                    }
                }
            }
        }
    }
    n.dedup_transitions();
    return n;
}

// ---------------------------------------------------------------------------
// Two-way (possibly alternating) epsilon-free automaton -> complete DFA with
// the same language, over the base alphabet.
//
// A DFA state summarizes a prefix u as a behavior table: for every assumption
// about how the positions to the right of the frontier resolve, the table
// gives which frontier states can force acceptance inside the prefix, plus
// whether the start configuration can. Acceptance of the run tree is the
// least fixpoint of the local win conditions over the configuration graph;
// the tables compose letter by letter via a joint fixpoint across the cut
// (plays may bounce over the cut arbitrarily often, which the alternating
// iteration captures). Assumptions are three-valued per state: the rightward
// moves from a frontier configuration lose / do not apply / all win.
//
// The table size is 3^n, so this is reserved for small state counts; beyond
// the cap a ResourceLimitError is thrown.
struct LanguageDfa {
    Alphabet alphabet;
    int n_states = 0;
    State initial = 0;
    std::vector<char> accepting;
    std::map<std::pair<State, std::string>, State> next;

    bool accepts(const BaseWord& w) const {
        State s = initial;
        for (const auto& b : w) s = next.at({s, b});
        return accepting[static_cast<size_t>(s)] != 0;
    }
};

inline LanguageDfa two_way_language_dfa(const CostAutomaton& a,
                                        std::uint64_t max_states = kDefaultMaxStates) {
    if (a.has_epsilon)
        throw FlavorError("two_way_language_dfa: epsilon-free input required");
    const int n = a.n_states;
    if (n > 10) throw ResourceLimitError("two_way_language_dfa: too many states for the tables");
    std::uint64_t pow3 = 1;
    std::vector<std::uint64_t> p3(static_cast<size_t>(n) + 1);
    for (int q = 0; q <= n; q++) {
        p3[static_cast<size_t>(q)] = pow3;
        if (q < n) pow3 *= 3;
    }
    enum { kLose = 0, kVac = 1, kFire = 2 };
    auto digit = [&](std::uint64_t y, State q) {
        return static_cast<int>(y / p3[static_cast<size_t>(q)] % 3);
    };

    std::uint32_t fmask = 0;
    for (State f : a.finals) fmask |= std::uint32_t{1} << f;
    std::uint32_t umask = 0;
    for (State q = 0; q < n; q++)
        if (a.is_universal(q)) umask |= std::uint32_t{1} << q;
    auto in = [](std::uint32_t m, State q) { return (m >> q) & 1u; };

    // per (letter, flag, direction): targets per source state
    struct LetterEdges {
        std::vector<std::vector<State>> fwd[2];  // [flag][from]
        std::vector<std::vector<State>> inv[2];
    };
    std::map<std::string, LetterEdges> edges;
    for (const auto& b : a.alphabet.letters) {
        LetterEdges le;
        for (int e = 0; e < 2; e++) {
            le.fwd[e].resize(static_cast<size_t>(n));
            le.inv[e].resize(static_cast<size_t>(n));
        }
        edges.emplace(b, std::move(le));
    }
    for (const auto& t : a.transitions) {
        auto& le = edges.at(t.label->base);
        auto& tab = t.label->inverse ? le.inv[t.end_flag ? 1 : 0] : le.fwd[t.end_flag ? 1 : 0];
        tab[static_cast<size_t>(t.from)].push_back(t.to);
    }

    struct Beh {
        std::vector<std::uint32_t> w;  // per assumption: winning frontier states
        std::vector<char> w0;          // per assumption: start configuration wins
        bool at_origin = false;        // frontier is position 0 (empty prefix)
        bool accept = false;
    };

    LanguageDfa dfa;
    dfa.alphabet = a.alphabet;
    std::map<std::tuple<std::vector<std::uint32_t>, std::vector<char>, bool, bool>, State> ids;
    std::vector<Beh> states;
    auto get_id = [&](Beh beh) {
        auto key = std::make_tuple(beh.w, beh.w0, beh.at_origin, beh.accept);
        auto it = ids.find(key);
        if (it != ids.end()) return std::make_pair(it->second, false);
        State id = static_cast<State>(states.size());
        ids.emplace(std::move(key), id);
        states.push_back(std::move(beh));
        if (states.size() > max_states)
            throw ResourceLimitError("two_way_language_dfa: behavior budget exceeded");
        return std::make_pair(id, true);
    };

    Beh origin;
    origin.at_origin = true;
    origin.w.assign(pow3, 0);
    origin.w0.assign(pow3, 0);
    for (std::uint64_t y = 0; y < pow3; y++) {
        std::uint32_t w = 0;
        for (State q = 0; q < n; q++) {
            bool win = in(umask, q) ? digit(y, q) == kFire
                                    : (in(fmask, q) || digit(y, q) == kFire);
            if (win) w |= std::uint32_t{1} << q;
        }
        origin.w[y] = w;
        origin.w0[y] = in(w, a.initial) ? 1 : 0;
    }
    origin.accept = a.finals.count(a.initial) > 0;
    dfa.initial = get_id(std::move(origin)).first;

    // joint fixpoint across the cut: assumption y_next for the new frontier
    // (or the end-of-word assumption when y_next is negative), letter between
    // the layers, left summary = the tables of `u`
    auto cross = [&](const Beh& u, const LetterEdges& le, std::int64_t y_next) {
        bool at_end = y_next < 0;
        const auto& fwd = le.fwd[at_end ? 1 : 0];
        const auto& inv = le.inv[u.at_origin ? 1 : 0];
        auto right_digit = [&](State q) -> int {
            if (at_end) return in(umask, q) ? kVac : kLose;
            return digit(static_cast<std::uint64_t>(y_next), q);
        };
        std::uint32_t w_new = 0, w_old = 0;
        std::uint64_t y_i = 0;
        for (;;) {
            // summarize the old frontier's rightward options against w_new
            y_i = 0;
            for (State q = 0; q < n; q++) {
                const auto& ts = fwd[static_cast<size_t>(q)];
                int d;
                if (in(umask, q)) {
                    if (ts.empty()) d = kVac;
                    else {
                        d = kFire;
                        for (State p : ts)
                            if (!in(w_new, p)) {
                                d = kLose;
                                break;
                            }
                    }
                } else {
                    d = kLose;
                    for (State p : ts)
                        if (in(w_new, p)) {
                            d = kFire;
                            break;
                        }
                }
                y_i += static_cast<std::uint64_t>(d) * p3[static_cast<size_t>(q)];
            }
            std::uint32_t w_old2 = u.w[y_i];
            std::uint32_t w_new2 = 0;
            for (State q = 0; q < n; q++) {
                const auto& ls = inv[static_cast<size_t>(q)];
                bool win;
                if (in(umask, q)) {
                    int v = right_digit(q);
                    win = v != kLose && (v == kFire || !ls.empty());
                    for (State p : ls)
                        if (!in(w_old2, p)) win = false;
                } else {
                    win = in(fmask, q) || right_digit(q) == kFire;
                    for (State p : ls)
                        if (!win && in(w_old2, p)) win = true;
                }
                if (win) w_new2 |= std::uint32_t{1} << q;
            }
            if (w_old2 == w_old && w_new2 == w_new) break;
            w_old = w_old2;
            w_new = w_new2;
        }
        return std::make_pair(w_new, std::make_pair(u.w0[y_i] != 0, y_i));
    };

    std::deque<State> queue{dfa.initial};
    while (!queue.empty()) {
        State cur = queue.front();
        queue.pop_front();
        for (const auto& b : a.alphabet.letters) {
            Beh u = states[static_cast<size_t>(cur)];  // copy: states may reallocate
            const auto& le = edges.at(b);
            Beh nb;
            nb.at_origin = false;
            nb.w.assign(pow3, 0);
            nb.w0.assign(pow3, 0);
            for (std::uint64_t y = 0; y < pow3; y++) {
                auto [w, rest] = cross(u, le, static_cast<std::int64_t>(y));
                nb.w[y] = w;
                nb.w0[y] = rest.first ? 1 : 0;
            }
            nb.accept = cross(u, le, -1).second.first;
            auto [id, fresh] = get_id(std::move(nb));
            dfa.next[{cur, b}] = id;
            if (fresh) queue.push_back(id);
        }
    }
    dfa.n_states = static_cast<int>(states.size());
    dfa.accepting.resize(states.size());
    for (size_t i = 0; i < states.size(); i++) dfa.accepting[i] = states[i].accept ? 1 : 0;
    return dfa;
}

}  // namespace rqb
