#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "rqb/regex.hpp"
#include "rqb/symbol.hpp"

namespace rqb {

using State = int;

// epsilon-free NFA over an explicit symbol alphabet (possibly signed)
struct Nfa {
    std::vector<Symbol> alphabet;  // sorted, unique
    int n_states = 0;
    std::set<State> initials;
    std::set<State> finals;

    struct Transition {
        State from;
        Symbol sym;
        State to;
        auto operator<=>(const Transition&) const = default;
    };
    std::vector<Transition> transitions;

    void normalize_alphabet() {
        std::sort(alphabet.begin(), alphabet.end());
        alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
    }

    void validate() const {
        auto in_range = [&](State s) { return s >= 0 && s < n_states; };
        for (State s : initials)
            if (!in_range(s)) throw std::runtime_error("nfa: initial state out of range");
        for (State s : finals)
            if (!in_range(s)) throw std::runtime_error("nfa: final state out of range");
        for (const auto& t : transitions) {
            if (!in_range(t.from) || !in_range(t.to))
                throw std::runtime_error("nfa: transition endpoint out of range");
            if (!std::binary_search(alphabet.begin(), alphabet.end(), t.sym))
                throw std::runtime_error("nfa: transition symbol not in alphabet: " + t.sym.str());
        }
    }

    void dedup_transitions() {
        std::sort(transitions.begin(), transitions.end());
        transitions.erase(std::unique(transitions.begin(), transitions.end()),
                          transitions.end());
    }

    std::set<State> step(const std::set<State>& from, const Symbol& s) const {
        std::set<State> out;
        for (const auto& t : transitions)
            if (t.sym == s && from.count(t.from)) out.insert(t.to);
        return out;
    }

    bool accepts(const Word& w) const {
        std::set<State> cur = initials;
        for (const auto& s : w) {
            cur = step(cur, s);
            if (cur.empty()) return false;
        }
        for (State q : cur)
            if (finals.count(q)) return true;
        return false;
    }

    bool language_empty() const {
        Nfa t = *this;
        t.trim();
        return t.finals.empty();
    }

    bool accepts_epsilon() const {
        for (State q : initials)
            if (finals.count(q)) return true;
        return false;
    }

    // keep only states on some initial -> final path; remap ids
    void trim() {
        std::vector<char> reach(n_states, 0), coreach(n_states, 0);
        {
            std::queue<State> q;
            for (State s : initials) {
                if (!reach[s]) reach[s] = 1, q.push(s);
            }
            while (!q.empty()) {
                State s = q.front();
                q.pop();
                for (const auto& t : transitions)
                    if (t.from == s && !reach[t.to]) reach[t.to] = 1, q.push(t.to);
            }
        }
        {
            std::queue<State> q;
            for (State s : finals) {
                if (!coreach[s]) coreach[s] = 1, q.push(s);
            }
            while (!q.empty()) {
                State s = q.front();
                q.pop();
                for (const auto& t : transitions)
                    if (t.to == s && !coreach[t.from]) coreach[t.from] = 1, q.push(t.from);
            }
        }
        std::vector<State> remap(n_states, -1);
        int next = 0;
        for (State s = 0; s < n_states; s++)
            if (reach[s] && coreach[s]) remap[s] = next++;
        std::set<State> ni, nf;
        for (State s : initials)
            if (remap[s] >= 0) ni.insert(remap[s]);
        for (State s : finals)
            if (remap[s] >= 0) nf.insert(remap[s]);
        std::vector<Transition> nt;
        for (const auto& t : transitions)
            if (remap[t.from] >= 0 && remap[t.to] >= 0)
                nt.push_back({remap[t.from], t.sym, remap[t.to]});
        n_states = next;
        initials = std::move(ni);
        finals = std::move(nf);
        transitions = std::move(nt);
        dedup_transitions();
    }

    bool has_cycle() const {
        // colors: 0 white, 1 on stack, 2 done; iterative DFS
        std::vector<int> color(n_states, 0);
        std::vector<std::vector<State>> adj(n_states);
        for (const auto& t : transitions) adj[t.from].push_back(t.to);
        for (State root = 0; root < n_states; root++) {
            if (color[root]) continue;
            std::vector<std::pair<State, size_t>> stack{{root, 0}};
            color[root] = 1;
            while (!stack.empty()) {
                auto& [s, i] = stack.back();
                if (i < adj[s].size()) {
                    State nxt = adj[s][i++];
                    if (color[nxt] == 1) return true;
                    if (color[nxt] == 0) {
                        color[nxt] = 1;
                        stack.push_back({nxt, 0});
                    }
                } else {
                    color[s] = 2;
                    stack.pop_back();
                }
            }
        }
        return false;
    }
};

inline bool shortlex_less(const Word& a, const Word& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

// ---- constructions ----------------------------------------------------------

namespace detail {
inline std::vector<Symbol> merge_alphabets(const std::vector<Symbol>& a,
                                           const std::vector<Symbol>& b) {
    std::vector<Symbol> out = a;
    out.insert(out.end(), b.begin(), b.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}
}  // namespace detail

inline Nfa nfa_empty(std::vector<Symbol> alphabet) {
    Nfa n;
    n.alphabet = std::move(alphabet);
    n.normalize_alphabet();
    return n;
}

inline Nfa nfa_epsilon(std::vector<Symbol> alphabet) {
    Nfa n = nfa_empty(std::move(alphabet));
    n.n_states = 1;
    n.initials = {0};
    n.finals = {0};
    return n;
}

inline Nfa nfa_symbol(std::vector<Symbol> alphabet, const Symbol& s) {
    Nfa n = nfa_empty(std::move(alphabet));
    n.n_states = 2;
    n.initials = {0};
    n.finals = {1};
    n.transitions = {{0, s, 1}};
    return n;
}

inline Nfa nfa_union(const Nfa& a, const Nfa& b) {
    Nfa n;
    n.alphabet = detail::merge_alphabets(a.alphabet, b.alphabet);
    n.n_states = a.n_states + b.n_states;
    n.initials = a.initials;
    n.finals = a.finals;
    n.transitions = a.transitions;
    int off = a.n_states;
    for (State s : b.initials) n.initials.insert(s + off);
    for (State s : b.finals) n.finals.insert(s + off);
    for (const auto& t : b.transitions) n.transitions.push_back({t.from + off, t.sym, t.to + off});
    return n;
}

// epsilon-free concatenation: finals of a chain into b through b's initial moves
inline Nfa nfa_concat(const Nfa& a, const Nfa& b) {
    Nfa n;
    n.alphabet = detail::merge_alphabets(a.alphabet, b.alphabet);
    n.n_states = a.n_states + b.n_states;
    int off = a.n_states;
    n.initials = a.initials;
    if (a.accepts_epsilon())
        for (State s : b.initials) n.initials.insert(s + off);
    for (State s : b.finals) n.finals.insert(s + off);
    if (b.accepts_epsilon()) n.finals.insert(a.finals.begin(), a.finals.end());
    n.transitions = a.transitions;
    for (const auto& t : b.transitions) n.transitions.push_back({t.from + off, t.sym, t.to + off});
    for (const auto& t : b.transitions) {
        if (b.initials.count(t.from))
            for (State f : a.finals) n.transitions.push_back({f, t.sym, t.to + off});
    }
    n.dedup_transitions();
    return n;
}

inline Nfa nfa_star(const Nfa& a) {
    // fresh initial-final hub; loop finals back through initial moves
    Nfa n;
    n.alphabet = a.alphabet;
    n.n_states = a.n_states + 1;
    State hub = a.n_states;
    n.initials = {hub};
    n.finals = a.finals;
    n.finals.insert(hub);
    n.transitions = a.transitions;
    for (const auto& t : a.transitions) {
        if (a.initials.count(t.from)) {
            n.transitions.push_back({hub, t.sym, t.to});
            for (State f : a.finals) n.transitions.push_back({f, t.sym, t.to});
        }
    }
    n.dedup_transitions();
    return n;
}

inline Nfa sigma_star(std::vector<Symbol> alphabet) {
    Nfa n = nfa_epsilon(std::move(alphabet));
    for (const auto& s : n.alphabet) n.transitions.push_back({0, s, 0});
    return n;
}

inline Nfa sigma_plus(std::vector<Symbol> alphabet) {
    Nfa n = nfa_empty(std::move(alphabet));
    n.n_states = 2;
    n.initials = {0};
    n.finals = {1};
    for (const auto& s : n.alphabet) {
        n.transitions.push_back({0, s, 1});
        n.transitions.push_back({1, s, 1});
    }
    return n;
}

inline Nfa compile(const RegexPtr& r, std::vector<Symbol> alphabet) {
    std::sort(alphabet.begin(), alphabet.end());
    alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
    using K = Regex::Kind;
    switch (r->kind) {
        case K::Empty: return nfa_empty(alphabet);
        case K::Epsilon: return nfa_epsilon(alphabet);
        case K::Sym: {
            if (!std::binary_search(alphabet.begin(), alphabet.end(), r->sym) )
                throw std::runtime_error("regex symbol outside declared alphabet: " +
                                         r->sym.str());
            return nfa_symbol(alphabet, r->sym);
        }
        case K::Concat: {
            Nfa acc = nfa_epsilon(alphabet);
            for (const auto& c : r->children) acc = nfa_concat(acc, compile(c, alphabet));
            acc.trim();
            return acc;
        }
        case K::Union: {
            Nfa acc = nfa_empty(alphabet);
            for (const auto& c : r->children) acc = nfa_union(acc, compile(c, alphabet));
            acc.trim();
            return acc;
        }
        case K::Star: {
            Nfa s = nfa_star(compile(r->children[0], alphabet));
            s.trim();
            return s;
        }
        case K::Plus: {
            Nfa c = compile(r->children[0], alphabet);
            Nfa s = nfa_concat(c, nfa_star(c));
            s.trim();
            return s;
        }
        case K::Optional: {
            Nfa s = nfa_union(compile(r->children[0], alphabet), nfa_epsilon(alphabet));
            s.trim();
            return s;
        }
    }
    throw std::logic_error("unreachable");
}

// compile with the alphabet taken from the regex itself (forward+inverse closure)
inline Nfa compile(const RegexPtr& r) {
    std::vector<std::string> letters;
    r->collect_letters(letters);
    Alphabet a(std::move(letters));
    return compile(r, a.signed_symbols());
}

inline Nfa product(const Nfa& a, const Nfa& b) {
    if (a.alphabet != b.alphabet) throw std::runtime_error("product: alphabet mismatch");
    Nfa n;
    n.alphabet = a.alphabet;
    n.n_states = a.n_states * b.n_states;
    auto id = [&](State x, State y) { return x * b.n_states + y; };
    for (State x : a.initials)
        for (State y : b.initials) n.initials.insert(id(x, y));
    for (State x : a.finals)
        for (State y : b.finals) n.finals.insert(id(x, y));
    for (const auto& ta : a.transitions)
        for (const auto& tb : b.transitions)
            if (ta.sym == tb.sym)
                n.transitions.push_back({id(ta.from, tb.from), ta.sym, id(ta.to, tb.to)});
    n.trim();
    return n;
}

// subset construction; returns a complete DFA-shaped NFA with complemented finals
inline Nfa complement(const Nfa& a) {
    std::map<std::set<State>, State> ids;
    std::vector<std::set<State>> subsets;
    auto get = [&](const std::set<State>& s) {
        auto it = ids.find(s);
        if (it != ids.end()) return it->second;
        State id = static_cast<State>(subsets.size());
        ids.emplace(s, id);
        subsets.push_back(s);
        return id;
    };
    Nfa n;
    n.alphabet = a.alphabet;
    State start = get(a.initials);
    n.initials = {start};
    for (State cur = 0; cur < static_cast<State>(subsets.size()); cur++) {
        std::set<State> s = subsets[cur];
        for (const auto& sym : a.alphabet) {
            State nxt = get(a.step(s, sym));
            n.transitions.push_back({cur, sym, nxt});
        }
    }
    n.n_states = static_cast<int>(subsets.size());
    for (State i = 0; i < n.n_states; i++) {
        bool acc = false;
        for (State q : subsets[i])
            if (a.finals.count(q)) acc = true;
        if (!acc) n.finals.insert(i);
    }
    return n;
}

inline Nfa reverse(const Nfa& a) {
    Nfa n;
    n.alphabet = a.alphabet;
    n.n_states = a.n_states;
    n.initials = a.finals;
    n.finals = a.initials;
    for (const auto& t : a.transitions) n.transitions.push_back({t.to, t.sym, t.from});
    return n;
}

// words with a proper prefix in L(a)
inline Nfa proper_prefix_acceptor(const Nfa& a) {
    Nfa n = a;
    State sink = n.n_states++;
    for (const auto& sym : n.alphabet) {
        for (State f : a.finals) n.transitions.push_back({f, sym, sink});
        n.transitions.push_back({sink, sym, sink});
    }
    n.finals = {sink};
    n.dedup_transitions();
    return n;
}

// words with a proper factor in L(a): Sigma+ L Sigma*  union  L Sigma+
inline Nfa proper_factor_acceptor(const Nfa& a) {
    Nfa sp = sigma_plus(a.alphabet);
    Nfa ss = sigma_star(a.alphabet);
    Nfa left = nfa_concat(nfa_concat(sp, a), ss);
    Nfa right = nfa_concat(a, sp);
    Nfa u = nfa_union(left, right);
    u.trim();
    return u;
}

enum class RestrictMode { Prefix, Suffix, Factor };

// the prefix-free / suffix-free / factor-free sublanguage of L(a)
inline Nfa restricted_language(const Nfa& a, RestrictMode mode) {
    switch (mode) {
        case RestrictMode::Prefix: return product(a, complement(proper_prefix_acceptor(a)));
        case RestrictMode::Suffix: {
            Nfa r = restricted_language(reverse(a), RestrictMode::Prefix);
            Nfa out = reverse(r);
            out.trim();
            return out;
        }
        case RestrictMode::Factor: return product(a, complement(proper_factor_acceptor(a)));
    }
    throw std::logic_error("unreachable");
}

struct FinitenessResult {
    bool finite;
    std::vector<Word> words;  // shortlex, only when finite
};

inline FinitenessResult is_finite(const Nfa& a) {
    Nfa t = a;
    t.trim();
    if (t.has_cycle()) return {false, {}};
    // acyclic: enumerate all accepted words by DFS over paths
    std::vector<std::vector<Nfa::Transition>> adj(t.n_states);
    for (const auto& tr : t.transitions) adj[tr.from].push_back(tr);
    std::vector<Word> words;
    Word cur;
    auto dfs = [&](auto&& self, State s) -> void {
        if (t.finals.count(s)) words.push_back(cur);
        for (const auto& tr : adj[s]) {
            cur.push_back(tr.sym);
            self(self, tr.to);
            cur.pop_back();
        }
    };
    for (State s : t.initials) dfs(dfs, s);
    std::sort(words.begin(), words.end(), shortlex_less);
    words.erase(std::unique(words.begin(), words.end()), words.end());
    return {true, std::move(words)};
}

// all accepted words of length <= maxlen, shortlex
inline std::vector<Word> accepted_up_to(const Nfa& a, size_t maxlen) {
    std::vector<Word> out;
    Word cur;
    auto rec = [&](auto&& self, const std::set<State>& states) -> void {
        for (State q : states)
            if (a.finals.count(q)) {
                out.push_back(cur);
                break;
            }
        if (cur.size() == maxlen) return;
        for (const auto& sym : a.alphabet) {
            auto nxt = a.step(states, sym);
            if (nxt.empty()) continue;
            cur.push_back(sym);
            self(self, nxt);
            cur.pop_back();
        }
    };
    if (!a.initials.empty()) rec(rec, a.initials);
    std::sort(out.begin(), out.end(), shortlex_less);
    return out;
}

// shortest accepted word, if any
inline std::optional<Word> shortest_word(const Nfa& a) {
    // BFS over subsets
    std::map<std::set<State>, std::pair<std::set<State>, Symbol>> parent;
    std::queue<std::set<State>> q;
    auto is_acc = [&](const std::set<State>& s) {
        for (State x : s)
            if (a.finals.count(x)) return true;
        return false;
    };
    if (a.initials.empty()) return std::nullopt;
    std::set<std::set<State>> seen{a.initials};
    q.push(a.initials);
    while (!q.empty()) {
        auto s = q.front();
        q.pop();
        if (is_acc(s)) {
            Word w;
            auto cur = s;
            while (cur != a.initials) {
                auto& [p, sym] = parent.at(cur);
                w.push_back(sym);
                cur = p;
            }
            std::reverse(w.begin(), w.end());
            return w;
        }
        for (const auto& sym : a.alphabet) {
            auto nxt = a.step(s, sym);
            if (nxt.empty() || seen.count(nxt)) continue;
            seen.insert(nxt);
            parent.emplace(nxt, std::make_pair(s, sym));
            q.push(nxt);
        }
    }
    return std::nullopt;
}

}  // namespace rqb
