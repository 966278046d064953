#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>

#include "rqb/cost_automaton.hpp"
#include "rqb/errors.hpp"
#include "rqb/tropical.hpp"

namespace rqb {

struct LimitednessResult {
    bool limited = false;
    Cost sup = 0;                 // when limited: supremum found by capped search
    std::string witness;          // when unlimited: product/stabilization expression
    std::uint64_t closure_size = 0;
};

struct CappedSearchResult {
    bool exceeded = false;
    Cost sup = 0;                  // exact supremum when !exceeded
    std::optional<BaseWord> witness;  // word with cost > cap when exceeded
};

namespace detail {

// Drops states of a classic (existential one-way) automaton that cannot occur
// on any initial-to-final path; acceptance and costs are untouched.
inline CostAutomaton trim_classic(CostAutomaton a) {
    size_t n = static_cast<size_t>(a.n_states);
    std::vector<char> fwd_reach(n, 0), bwd_reach(n, 0);
    fwd_reach[static_cast<size_t>(a.initial)] = 1;
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& t : a.transitions)
            if (fwd_reach[static_cast<size_t>(t.from)] && !fwd_reach[static_cast<size_t>(t.to)]) {
                fwd_reach[static_cast<size_t>(t.to)] = 1;
                changed = true;
            }
    }
    for (State f : a.finals) bwd_reach[static_cast<size_t>(f)] = 1;
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& t : a.transitions)
            if (bwd_reach[static_cast<size_t>(t.to)] && !bwd_reach[static_cast<size_t>(t.from)]) {
                bwd_reach[static_cast<size_t>(t.from)] = 1;
                changed = true;
            }
    }
    std::vector<State> remap(n, -1);
    CostAutomaton b;
    b.alphabet = a.alphabet;
    // keep the start state even when the language is empty
    for (State q = 0; q < a.n_states; q++)
        if (q == a.initial ||
            (fwd_reach[static_cast<size_t>(q)] && bwd_reach[static_cast<size_t>(q)]))
            remap[static_cast<size_t>(q)] = b.n_states++;
    b.initial = remap[static_cast<size_t>(a.initial)];
    for (State f : a.finals)
        if (remap[static_cast<size_t>(f)] >= 0) b.finals.insert(remap[static_cast<size_t>(f)]);
    for (const auto& t : a.transitions) {
        State f = remap[static_cast<size_t>(t.from)], to = remap[static_cast<size_t>(t.to)];
        if (f >= 0 && to >= 0) b.transitions.push_back({f, t.label, t.end_flag, t.cost, to});
    }
    b.derive_flags();
    return b;
}

}  // namespace detail

// Determinized cost-function search: macro-states map automaton states to the
// cheapest cost so far, capped at cap+1.
inline CappedSearchResult capped_cost_search(const CostAutomaton& input, Cost cap,
                                             std::uint64_t max_states = kDefaultMaxStates) {
    CostAutomaton a = detail::trim_classic(to_classic_da(input));
    using Macro = std::map<State, Cost>;
    auto accept_value = [&](const Macro& m) -> Cost {
        Cost best = kInfCost;
        for (State f : a.finals) {
            auto it = m.find(f);
            if (it != m.end()) best = std::min(best, it->second);
        }
        return best;
    };
    Macro start{{a.initial, 0}};
    std::map<Macro, std::pair<const Macro*, std::string>> parent;  // for witness rebuild
    std::deque<const Macro*> queue;
    auto [sit, inserted] = parent.emplace(start, std::make_pair(nullptr, std::string()));
    queue.push_back(&sit->first);
    CappedSearchResult res;
    auto report = [&](const Macro* m) -> bool {
        Cost v = accept_value(*m);
        if (v == kInfCost) return false;
        if (v > cap) {
            res.exceeded = true;
            BaseWord w;
            const Macro* cur = m;
            while (cur) {
                const auto& [p, letter] = parent.at(*cur);
                if (p) w.push_back(letter);
                cur = p;
            }
            std::reverse(w.begin(), w.end());
            res.witness = std::move(w);
            return true;
        }
        res.sup = std::max(res.sup, v);
        return false;
    };
    if (report(&sit->first)) return res;
    while (!queue.empty()) {
        const Macro* m = queue.front();
        queue.pop_front();
        for (const auto& b : a.alphabet.letters) {
            Macro nxt;
            for (const auto& t : a.transitions) {
                if (!t.label || t.label->inverse || t.label->base != b) continue;
                auto it = m->find(t.from);
                if (it == m->end()) continue;
                Cost c = std::min<Cost>(it->second + t.cost, cap + 1);
                auto [nit, fresh] = nxt.emplace(t.to, c);
                if (!fresh) nit->second = std::min(nit->second, c);
            }
            if (nxt.empty()) continue;
            auto [pit, fresh] = parent.emplace(std::move(nxt), std::make_pair(m, b));
            if (!fresh) continue;
            if (parent.size() > max_states)
                throw ResourceLimitError("capped_cost_search: state budget exceeded");
            if (report(&pit->first)) return res;
            queue.push_back(&pit->first);
        }
    }
    return res;
}

// Limitedness of a plain one-way DA via the stabilization-monoid closure of
// the tropical letter matrices.
inline LimitednessResult limited_da(const CostAutomaton& input,
                                    std::uint64_t max_states = kDefaultMaxStates) {
    CostAutomaton a = detail::trim_classic(to_classic_da(input));
    int n = a.n_states;

    // The closure is generated from the letter matrices by right products with
    // generators and by stabilization of idempotents; every product of two
    // closure elements is then a chain of such steps, so nothing is missed.
    // Elements record how they were derived and the witness expression is only
    // reconstructed for the element that exposes an omega.
    struct Prov {
        int left = -1;    // producing element, or -1 for a letter
        int right = -1;   // right factor; -1 with left >= 0 means stabilization
        std::string letter;
    };
    std::vector<TropicalMatrix> elems;
    std::vector<Prov> prov;
    std::map<TropicalMatrix, int> index;
    std::vector<int> generators;
    std::deque<std::pair<int, int>> pending;  // (element, generator) right products

    auto value_of = [&](const TropicalMatrix& m) -> Trop {
        Trop best = Trop::Inf;
        for (State f : a.finals) best = trop_min(best, m.at(a.initial, f));
        return best;
    };
    auto expr_of = [&](int i) {
        auto rec = [&](auto&& self, int j) -> std::string {
            const Prov& p = prov[static_cast<size_t>(j)];
            if (p.left < 0) return p.letter;
            if (p.right < 0) return "(" + self(self, p.left) + ")#";
            return "(" + self(self, p.left) + ")(" + self(self, p.right) + ")";
        };
        return rec(rec, i);
    };

    LimitednessResult res;
    // add returns the new element's id, or -1 for a duplicate; an exposed
    // omega value finishes the decision on the spot
    bool decided = false;
    auto add = [&](TropicalMatrix m, Prov p) -> int {
        auto [it, ins] = index.emplace(std::move(m), static_cast<int>(elems.size()));
        if (!ins) return -1;
        if (index.size() > max_states)
            throw ResourceLimitError("limited_da: closure budget exceeded");
        elems.push_back(it->first);
        prov.push_back(std::move(p));
        int id = it->second;
        if (value_of(elems[static_cast<size_t>(id)]) == Trop::Omega) {
            res.limited = false;
            res.witness = expr_of(id);
            decided = true;
        }
        return id;
    };
    auto add_element = [&](TropicalMatrix m, Prov p) {
        int id = add(std::move(m), std::move(p));
        if (id >= 0)
            for (int g : generators) pending.emplace_back(id, g);
        return id;
    };
    auto add_generator = [&](int id) {
        generators.push_back(id);
        for (int e = 0; e < static_cast<int>(elems.size()); e++) pending.emplace_back(e, id);
    };

    for (const auto& b : a.alphabet.letters) {
        TropicalMatrix m(n);
        for (const auto& t : a.transitions) {
            if (!t.label || t.label->base != b) continue;
            m.at(t.from, t.to) =
                trop_min(m.at(t.from, t.to), t.cost ? Trop::One : Trop::Zero);
        }
        int id = add_element(std::move(m), {-1, -1, b});
        if (decided) {
            res.closure_size = index.size();
            return res;
        }
        if (id >= 0) add_generator(id);
    }
    // saturate: right products with every generator, stabilized idempotents
    // become new generators
    size_t stab_scan = 0;
    while (!pending.empty() || stab_scan < elems.size()) {
        if (!pending.empty()) {
            auto [e, g] = pending.front();
            pending.pop_front();
            add_element(elems[static_cast<size_t>(e)] * elems[static_cast<size_t>(g)],
                        {e, g, {}});
        } else {
            int e = static_cast<int>(stab_scan++);
            const TropicalMatrix& m = elems[static_cast<size_t>(e)];
            if (m.idempotent()) {
                int id = add_element(m.stabilize(), {e, -1, {}});
                if (id >= 0 && !decided) add_generator(id);
            }
        }
        if (decided) {
            res.closure_size = index.size();
            return res;
        }
    }
    res.limited = true;
    res.closure_size = index.size();
    // report the supremum observed by the capped search; caps escalate until
    // stable through two doublings
    Cost cap = 8;
    for (;;) {
        auto s = capped_cost_search(input, cap, max_states);
        if (s.exceeded) {
            cap *= 2;
            continue;
        }
        auto s2 = capped_cost_search(input, cap * 4, max_states);
        if (!s2.exceeded && s2.sup == s.sup) {
            res.sup = s.sup;
            break;
        }
        cap *= 2;
        if (cap > (Cost{1} << 24))
            throw std::logic_error("limited_da: closure says limited but costs keep growing");
    }
    return res;
}

}  // namespace rqb
