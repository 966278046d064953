#pragma once

// Direct one-way construction of the per-disjunct cost automaton over the
// annotated encoding alphabet.
//
// The encoded word is a sequence of "$"-separated segments, each carrying two
// head symbols around an atom word.  A covering expansion of the disjunct
// assigns each atom an oriented path through the encoded expansion's
// structure; such a path decomposes into maximal walks inside single segments
// ("fragments"), glued at equivalence classes of named variables.  The
// automaton therefore tracks, per atom:
//   - a transitively closed relation over "nodes" (start marker, end marker,
//     and (name-block, NFA state) ports) collecting completed fragments, and
//   - a pool of active walk fronts inside the current segment.  A front
//     either walks forward with the atom's NFA, or simulates a leftward sweep
//     bottom-up with the reversed NFA; sweeps join and anchor locally, so the
//     whole construction reads the word once.
// Name blocks come from a guessed partition of the query's variables, verified
// to be exactly the closure of the equalities induced by the word's
// epsilon-segments.  Each walk step costs 1 (capped at 1 per letter);
// everything else is free.  Annotation validity (a partition of the
// disjunct's variables, free variables on their own heads) is folded in.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rqb/boundedness_da.hpp"
#include "rqb/cost_automaton.hpp"
#include "rqb/errors.hpp"
#include "rqb/query.hpp"

namespace rqb {

struct MatcherCaps {
    int pool_cap = 3;    // active walk pieces per atom inside a segment
    int create_cap = 2;  // walk pieces created per atom at one position
};

namespace detail {

// set partitions of {0..n-1} in canonical first-occurrence numbering
struct PartitionTable {
    int n;
    std::vector<std::vector<int>> parts;  // assignment vectors
    std::map<std::vector<int>, int> index;
    std::vector<int> block_counts;

    explicit PartitionTable(int n_names) : n(n_names) {
        std::vector<int> cur(static_cast<size_t>(n), 0);
        enumerate(cur, 0, 0);
    }
    void enumerate(std::vector<int>& cur, int pos, int used) {
        if (pos == n) {
            index.emplace(cur, static_cast<int>(parts.size()));
            parts.push_back(cur);
            block_counts.push_back(used);
            return;
        }
        for (int b = 0; b <= used; b++) {
            cur[static_cast<size_t>(pos)] = b;
            enumerate(cur, pos + 1, std::max(used, b + 1));
        }
    }
    int canon(std::vector<int> v) {
        std::map<int, int> ren;
        for (auto& b : v) {
            auto [it, ins] = ren.emplace(b, static_cast<int>(ren.size()));
            b = it->second;
        }
        return index.at(v);
    }
    int discrete() const {
        std::vector<int> v(static_cast<size_t>(n));
        for (int i = 0; i < n; i++) v[static_cast<size_t>(i)] = i;
        return index.at(v);
    }
    int block_of(int p, int name) const { return parts[static_cast<size_t>(p)][static_cast<size_t>(name)]; }
    int blocks(int p) const { return block_counts[static_cast<size_t>(p)]; }
    int merge(int p, int a, int b) {
        auto v = parts[static_cast<size_t>(p)];
        int ba = v[static_cast<size_t>(a)], bb = v[static_cast<size_t>(b)];
        if (ba == bb) return p;
        for (auto& x : v)
            if (x == bb) x = ba;
        return canon(std::move(v));
    }
};

// relation with pairs of small ints, kept transitively closed and sorted
using Rel = std::vector<std::pair<int, int>>;

inline Rel rel_close(Rel r) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    bool grew = true;
    while (grew) {
        grew = false;
        size_t n0 = r.size();
        for (size_t i = 0; i < n0; i++)
            for (size_t j = 0; j < n0; j++) {
                if (r[i].second != r[j].first) continue;
                std::pair<int, int> p{r[i].first, r[j].second};
                if (p.first == p.second) continue;
                if (!std::binary_search(r.begin(), r.begin() + static_cast<long>(n0), p) &&
                    std::find(r.begin() + static_cast<long>(n0), r.end(), p) == r.end()) {
                    r.push_back(p);
                    grew = true;
                }
            }
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
    }
    return r;
}

// a walk piece: two slots (start side, end side); each slot is an anchored
// node or an active front carrying an NFA state
struct Slot {
    bool front;
    int val;  // node id when anchored, NFA state when a front
    auto operator<=>(const Slot&) const = default;
};
using Item = std::pair<Slot, Slot>;
using Pool = std::vector<Item>;

struct MatcherState {
    int phase = 0;       // 0 before first $, 1 expect head1, 2 after head1,
                         // 3 in interior, 4 after head2, 5 accept
    int part = -1;       // guessed name partition
    int pobs = -1;       // partition generated by observed epsilon-segments
    int placed = 0;      // annotation bitmask over the disjunct's variables
    int cur_name = -1;   // left head name of the current segment
    std::vector<Rel> rel;
    std::vector<Pool> pool;
    auto operator<=>(const MatcherState&) const = default;
};

// per-disjunct construction context
struct SegmentMatcherCtx {
    const Conjunct& c;
    std::vector<std::string> names;          // all query variables (sorted)
    std::map<std::string, int> name_idx;
    std::map<std::string, int> gvar_bit;     // disjunct variable -> bit
    std::set<std::string> free_set;
    PartitionTable pt;
    MatcherCaps caps;

    SegmentMatcherCtx(const Query& q, const Conjunct& conj, MatcherCaps cp)
        : c(conj), pt(0), caps(cp) {
        std::set<std::string> ns;
        for (const auto& d : q.disjuncts)
            for (const auto& v : d.variables) ns.insert(v);
        names.assign(ns.begin(), ns.end());
        for (size_t i = 0; i < names.size(); i++) name_idx[names[i]] = static_cast<int>(i);
        pt = PartitionTable(static_cast<int>(names.size()));
        for (size_t i = 0; i < c.variables.size(); i++) gvar_bit[c.variables[i]] = static_cast<int>(i);
        free_set.insert(q.free_vars.begin(), q.free_vars.end());
    }

    // node ids for atom i under partition p: 0 = start, 1 = end,
    // 2 + b*|Q| + q = port (block b, state q)
    int node_port(int p, int i, int b, int q) const {
        (void)p;
        return 2 + b * c.atoms[static_cast<size_t>(i)].nfa.n_states + q;
    }
};

// apply all events available at the current position for one atom; returns
// every reachable (pool, relation) outcome
inline void atom_events(const SegmentMatcherCtx& ctx, int atom, int part, bool at_port,
                        int block, bool x_ann, bool y_ann, const Pool& pool0, const Rel& rel0,
                        std::vector<std::pair<Pool, Rel>>& out) {
    const Nfa& L = ctx.c.atoms[static_cast<size_t>(atom)].nfa;
    const int S = 0, E = 1;
    auto done = [&](const Rel& r) {
        return std::binary_search(r.begin(), r.end(), std::pair<int, int>{S, E});
    };

    // always-true facts at an annotated head: the head's class is the atom's
    // chosen source/target, reachable at initial/final states for free
    Rel base_rel = rel0;
    if (at_port && !done(base_rel)) {
        bool grew = false;
        if (x_ann)
            for (State q0 : L.initials) {
                base_rel.emplace_back(S, ctx.node_port(part, atom, block, q0));
                grew = true;
            }
        if (y_ann)
            for (State qf : L.finals) {
                base_rel.emplace_back(ctx.node_port(part, atom, block, qf), E);
                grew = true;
            }
        if (grew) base_rel = rel_close(std::move(base_rel));
    }
    if (done(base_rel)) base_rel = {{S, E}};

    struct Conf {
        Pool pool;
        Rel rel;
        int created;
        auto operator<=>(const Conf&) const = default;
    };
    std::set<std::pair<Pool, Rel>> seen;
    std::vector<Conf> stack{{pool0, base_rel, 0}};
    auto norm_pool = [](Pool p) {
        std::sort(p.begin(), p.end());
        p.erase(std::unique(p.begin(), p.end()), p.end());
        return p;
    };

    while (!stack.empty()) {
        Conf cf = stack.back();
        stack.pop_back();
        cf.pool = norm_pool(std::move(cf.pool));
        if (!seen.emplace(cf.pool, cf.rel).second) continue;

        auto push = [&](Pool p, Rel r, int created) {
            if (std::binary_search(r.begin(), r.end(), std::pair<int, int>{S, E}))
                r = {{S, E}}, p.clear();  // atom satisfied; drop bookkeeping
            stack.push_back({std::move(p), std::move(r), created});
        };

        // completions: both slots anchored -> relation fact
        bool completed = false;
        for (size_t k = 0; k < cf.pool.size(); k++) {
            const Item& it = cf.pool[k];
            if (!it.first.front && !it.second.front) {
                Pool p = cf.pool;
                p.erase(p.begin() + static_cast<long>(k));
                Rel r = cf.rel;
                if (it.first.val != it.second.val) r.push_back({it.first.val, it.second.val});
                push(std::move(p), rel_close(std::move(r)), cf.created);
                completed = true;
                break;  // completions commute; do them one at a time
            }
        }
        if (completed) continue;

        // resolutions of fronts at this position's anchors
        for (size_t k = 0; k < cf.pool.size(); k++) {
            const Item& it = cf.pool[k];
            if (it.first.front) {
                int q = it.first.val;
                std::vector<int> anchors;
                if (at_port) anchors.push_back(ctx.node_port(part, atom, block, q));
                if (x_ann && L.initials.count(q)) anchors.push_back(S);
                for (int n : anchors) {
                    Pool p = cf.pool;
                    p[k].first = {false, n};
                    push(std::move(p), cf.rel, cf.created);
                }
            }
            if (it.second.front) {
                int q = it.second.val;
                std::vector<int> anchors;
                if (at_port) anchors.push_back(ctx.node_port(part, atom, block, q));
                if (y_ann && L.finals.count(q)) anchors.push_back(E);
                for (int n : anchors) {
                    Pool p = cf.pool;
                    p[k].second = {false, n};
                    push(std::move(p), cf.rel, cf.created);
                }
            }
        }

        // joins: an end-side front meets a start-side front at equal states
        for (size_t k = 0; k < cf.pool.size(); k++)
            for (size_t k2 = 0; k2 < cf.pool.size(); k2++) {
                if (k == k2) continue;
                if (!cf.pool[k].second.front || !cf.pool[k2].first.front) continue;
                if (cf.pool[k].second.val != cf.pool[k2].first.val) continue;
                Item merged{cf.pool[k].first, cf.pool[k2].second};
                Pool p;
                for (size_t k3 = 0; k3 < cf.pool.size(); k3++)
                    if (k3 != k && k3 != k2) p.push_back(cf.pool[k3]);
                p.push_back(merged);
                push(std::move(p), cf.rel, cf.created);
            }

        // creations (capped): new walk pieces rooted at this position
        if (cf.created < ctx.caps.create_cap &&
            static_cast<int>(cf.pool.size()) < ctx.caps.pool_cap) {
            auto create = [&](Item it) {
                Pool p = cf.pool;
                p.push_back(it);
                push(std::move(p), cf.rel, cf.created + 1);
            };
            if (at_port) {
                for (State q = 0; q < L.n_states; q++) {
                    int n = ctx.node_port(part, atom, block, q);
                    create({{false, n}, {true, q}});   // enter at the port, walk right
                    create({{true, q}, {false, n}});   // walk arrives from the right
                }
            } else {
                // local direction reversal (launch of a leftward sweep)
                for (State q = 0; q < L.n_states; q++) create({{true, q}, {true, q}});
                if (x_ann)
                    for (State q0 : L.initials) create({{false, 0}, {true, q0}});
                if (y_ann)
                    for (State qf : L.finals) create({{true, qf}, {false, 1}});
            }
        }
        out.emplace_back(cf.pool, cf.rel);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
}

// step every front of one atom over an interior letter; returns all outcomes
inline void atom_steps(const SegmentMatcherCtx& ctx, int atom, const Symbol& edge,
                       const Pool& pool0, std::vector<Pool>& out) {
    const Nfa& L = ctx.c.atoms[static_cast<size_t>(atom)].nfa;
    // forward fronts consume the edge as written; backward (start-side)
    // fronts simulate the sweep bottom-up with the reversed relation
    auto fwd_succ = [&](int q) {
        std::vector<int> s;
        for (const auto& t : L.transitions)
            if (t.from == q && t.sym == edge) s.push_back(t.to);
        return s;
    };
    auto bwd_succ = [&](int q) {
        std::vector<int> s;
        for (const auto& t : L.transitions)
            if (t.to == q && t.sym == edge.inverted()) s.push_back(t.from);
        return s;
    };
    std::vector<Pool> acc{{}};
    for (const auto& it : pool0) {
        std::vector<Item> variants;
        std::vector<int> s1 = it.first.front ? bwd_succ(it.first.val) : std::vector<int>{};
        std::vector<int> s2 = it.second.front ? fwd_succ(it.second.val) : std::vector<int>{};
        if (it.first.front && it.second.front) {
            for (int a : s1)
                for (int b : s2) variants.push_back({{true, a}, {true, b}});
        } else if (it.first.front) {
            for (int a : s1) variants.push_back({{true, a}, it.second});
        } else if (it.second.front) {
            for (int b : s2) variants.push_back({it.first, {true, b}});
        } else {
            variants.push_back(it);  // fully anchored items await completion
        }
        if (variants.empty()) {
            out.clear();
            return;  // a stuck front kills the branch
        }
        std::vector<Pool> nxt;
        for (const auto& p : acc)
            for (const auto& v : variants) {
                Pool q = p;
                q.push_back(v);
                nxt.push_back(std::move(q));
            }
        acc = std::move(nxt);
    }
    out = std::move(acc);
}

// the one-way cost automaton for one disjunct, over the annotated alphabet
inline CostAutomaton segment_matcher(const Query& q, size_t disjunct,
                                     const std::vector<A2Letter>& letters,
                                     MatcherCaps caps = {}, size_t max_states = 5'000'000) {
    const Conjunct& c = q.disjuncts[disjunct];
    SegmentMatcherCtx ctx(q, c, caps);
    size_t m = c.atoms.size();
    int full_mask = (1 << c.variables.size()) - 1;

    CostAutomaton b;
    {
        std::vector<std::string> ls;
        for (const auto& l : letters) ls.push_back(l.encoded);
        b.alphabet = Alphabet(std::move(ls));
    }
    std::map<MatcherState, State> ids;
    std::vector<MatcherState> todo;
    auto get = [&](const MatcherState& s) {
        auto [it, ins] = ids.emplace(s, static_cast<State>(ids.size()));
        if (ins) {
            if (ids.size() > max_states)
                throw ResourceLimitError("segment_matcher: state budget exceeded");
            todo.push_back(s);
        }
        return it->second;
    };

    MatcherState init;
    init.rel.resize(m);
    init.pool.resize(m);
    b.initial = get(init);
    MatcherState accept;
    accept.phase = 5;
    State acc_id = get(accept);
    b.finals = {acc_id};

    auto ann_ok = [&](const MatcherState& s, const A2Letter& l, int& mask) {
        mask = 0;
        for (const auto& v : l.ann) {
            auto it = ctx.gvar_bit.find(v);
            if (it == ctx.gvar_bit.end()) return false;  // foreign variable
            mask |= 1 << it->second;
            if (ctx.free_set.count(v) && l.a1 != "?" + v) return false;
        }
        return (mask & s.placed) == 0;
    };

    for (size_t k = 0; k < todo.size(); k++) {
        MatcherState cur = todo[k];
        State cur_id = ids.at(cur);
        if (cur.phase == 5) continue;
        for (const auto& l : letters) {
            int amask = 0;
            bool is_dollar = l.a1 == "$";
            bool is_head = l.a1.starts_with("?");
            if (!is_dollar && !ann_ok(cur, l, amask)) continue;

            auto head_name = [&]() -> int {
                auto it = ctx.name_idx.find(l.a1.substr(1));
                return it == ctx.name_idx.end() ? -1 : it->second;
            };

            // helper: run per-atom events and emit successors
            auto emit_events = [&](const MatcherState& base, bool at_port, int block,
                                   int next_phase, int next_name, int cost) {
                std::vector<std::vector<std::pair<Pool, Rel>>> per_atom(m);
                for (size_t i = 0; i < m; i++) {
                    bool x_ann = (amask >> ctx.gvar_bit.at(c.atoms[i].source)) & 1;
                    bool y_ann = (amask >> ctx.gvar_bit.at(c.atoms[i].target)) & 1;
                    atom_events(ctx, static_cast<int>(i), base.part, at_port, block, x_ann,
                                y_ann, base.pool[i], base.rel[i], per_atom[i]);
                    if (per_atom[i].empty()) return;
                }
                // cartesian combination across atoms
                std::vector<MatcherState> outs{base};
                for (size_t i = 0; i < m; i++) {
                    std::vector<MatcherState> nxt;
                    for (const auto& st : outs)
                        for (const auto& [pl, rl] : per_atom[i]) {
                            MatcherState s2 = st;
                            s2.pool[i] = pl;
                            s2.rel[i] = rl;
                            nxt.push_back(std::move(s2));
                        }
                    outs = std::move(nxt);
                    if (outs.size() > max_states)
                        throw ResourceLimitError("segment_matcher: branch budget exceeded");
                }
                for (auto& s2 : outs) {
                    s2.phase = next_phase;
                    s2.cur_name = next_name;
                    s2.placed |= amask;
                    add_transition_any_flag(b, cur_id, fwd(l.encoded), cost, get(s2));
                }
            };

            switch (cur.phase) {
                case 0: {
                    if (!is_dollar) break;
                    for (int p = 0; p < static_cast<int>(ctx.pt.parts.size()); p++) {
                        MatcherState s2 = cur;
                        s2.phase = 1;
                        s2.part = p;
                        s2.pobs = ctx.pt.discrete();
                        add_transition_any_flag(b, cur_id, fwd(l.encoded), 0, get(s2));
                    }
                    break;
                }
                case 1: {  // expect the left head
                    if (!is_head) break;
                    int nm = head_name();
                    if (nm < 0) break;
                    emit_events(cur, true, ctx.pt.block_of(cur.part, nm), 2, nm, 0);
                    break;
                }
                case 2:
                case 3: {
                    if (is_head) {  // right head; epsilon-segment iff phase == 2
                        int nm = head_name();
                        if (nm < 0) break;
                        MatcherState base = cur;
                        if (cur.phase == 2) {
                            if (ctx.pt.block_of(cur.part, cur.cur_name) !=
                                ctx.pt.block_of(cur.part, nm))
                                break;  // epsilon merge outside the guessed partition
                            base.pobs = ctx.pt.merge(cur.pobs, cur.cur_name, nm);
                        }
                        emit_events(base, true, ctx.pt.block_of(cur.part, nm), 4, -1, 0);
                    } else if (!is_dollar) {  // interior letter
                        Symbol edge = l.a1.ends_with("-")
                                          ? Symbol{l.a1.substr(0, l.a1.size() - 1), true}
                                          : Symbol{l.a1, false};
                        bool any_front = false;
                        std::vector<std::vector<Pool>> stepped(m);
                        bool dead = false;
                        for (size_t i = 0; i < m && !dead; i++) {
                            for (const auto& it : cur.pool[i])
                                if (it.first.front || it.second.front) any_front = true;
                            atom_steps(ctx, static_cast<int>(i), edge, cur.pool[i], stepped[i]);
                            if (stepped[i].empty()) dead = true;
                        }
                        if (dead) break;
                        std::vector<MatcherState> bases{cur};
                        for (size_t i = 0; i < m; i++) {
                            std::vector<MatcherState> nxt;
                            for (const auto& st : bases)
                                for (const auto& pl : stepped[i]) {
                                    MatcherState s2 = st;
                                    s2.pool[i] = pl;
                                    nxt.push_back(std::move(s2));
                                }
                            bases = std::move(nxt);
                            if (bases.size() > max_states)
                                throw ResourceLimitError(
                                    "segment_matcher: branch budget exceeded");
                        }
                        int cost = any_front ? 1 : 0;
                        for (auto& base : bases)
                            emit_events(base, false, -1, 3, cur.cur_name, cost);
                    }
                    break;
                }
                case 4: {  // expect a separator
                    if (!is_dollar) break;
                    bool pools_empty = true;
                    for (const auto& p : cur.pool) pools_empty &= p.empty();
                    if (!pools_empty) break;
                    MatcherState s2 = cur;
                    s2.phase = 1;
                    s2.cur_name = -1;
                    add_transition_any_flag(b, cur_id, fwd(l.encoded), 0, get(s2));
                    // final acceptance: all atoms satisfied, the guessed
                    // partition realized, the annotation complete
                    bool all_done = cur.placed == full_mask && cur.pobs == cur.part;
                    for (const auto& r : cur.rel)
                        all_done &= std::binary_search(r.begin(), r.end(),
                                                       std::pair<int, int>{0, 1});
                    if (all_done)
                        b.transitions.push_back({cur_id, fwd(l.encoded), true, 0, acc_id});
                    break;
                }
                default: break;
            }
        }
    }
    b.n_states = static_cast<int>(ids.size());
    b.derive_flags();
    return b;
}

}  // namespace detail

// The reduction target: a one-way distance automaton over the encoding
// alphabet.  On the encoding of an expansion its cost is bounded by the
// minimum size of a covering expansion (up to a fixed factor in each
// direction), so boundedness of the query coincides with limitedness of the
// automaton.
inline CostAutomaton build_boundedness_da(const Query& q, size_t max_states = 5'000'000,
                                          MatcherCaps caps = {}) {
    std::vector<std::string> a1 = a1_letters(q);
    Alphabet a1_alpha{a1};
    std::vector<CostAutomaton> parts;
    for (size_t di = 0; di < q.disjuncts.size(); di++) {
        auto letters = detail::a2_letters(a1, q.disjuncts[di].variables);
        CostAutomaton matcher = detail::segment_matcher(q, di, letters, caps, max_states);
        std::map<std::string, std::string> proj;
        for (const auto& l : letters) proj[l.encoded] = l.a1;
        parts.push_back(
            detail::project_letters(detail::trim_two_sided(matcher), proj, a1_alpha));
    }
    CostAutomaton united = detail::classic_union(parts, a1_alpha);
    CostAutomaton shaped = detail::classic_product(united, encoding_acceptor(q));
    return detail::guard_word_end(shaped);
}

}  // namespace rqb
