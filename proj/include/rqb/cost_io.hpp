#pragma once

#include <istream>
#include <sstream>
#include <string>

#include "rqb/cost_automaton.hpp"
#include "rqb/nfa_io.hpp"

namespace rqb {

// Cost-automaton text format, extending the NFA format:
//   states N
//   alphabet a b ...          (base letters; optional, inferred otherwise)
//   universal u ...           (optional)
//   initial i                 (single state)
//   final f ...
//   twoway                    (optional flags)
//   epsilon
//   src sym flag cost dst     (sym may be `eps`; flag E or N; cost 0 or 1)

inline CostAutomaton parse_cost_automaton(std::istream& in) {
    CostAutomaton a;
    std::vector<std::string> letters;
    std::vector<State> universals;
    bool have_states = false, have_initial = false;
    bool flag_twoway = false, flag_epsilon = false;
    std::string line;
    int lineno = 0;
    auto err = [&](const std::string& m) {
        throw std::runtime_error("cost automaton format, line " + std::to_string(lineno) +
                                 ": " + m);
    };
    while (std::getline(in, line)) {
        lineno++;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "states") {
            if (!(ls >> a.n_states) || a.n_states < 0) err("bad state count");
            have_states = true;
        } else if (tok == "alphabet") {
            std::string b;
            while (ls >> b) letters.push_back(b);
        } else if (tok == "universal") {
            State s;
            while (ls >> s) universals.push_back(s);
        } else if (tok == "initial") {
            if (!(ls >> a.initial)) err("bad initial state");
            have_initial = true;
        } else if (tok == "final") {
            State s;
            while (ls >> s) a.finals.insert(s);
        } else if (tok == "twoway") {
            flag_twoway = true;
        } else if (tok == "epsilon") {
            flag_epsilon = true;
        } else {
            State src, dst;
            std::string sym, flag;
            int cost;
            std::istringstream tr(line);
            if (!(tr >> src >> sym >> flag >> cost >> dst))
                err("expected `src sym flag cost dst`");
            if (flag != "E" && flag != "N") err("end flag must be E or N");
            std::optional<Symbol> label;
            if (sym != "eps") label = parse_symbol_token(sym);
            a.transitions.push_back({src, label, flag == "E", cost, dst});
        }
    }
    if (!have_states) throw std::runtime_error("cost automaton format: missing `states`");
    if (!have_initial && a.n_states > 0)
        throw std::runtime_error("cost automaton format: missing `initial`");
    for (const auto& t : a.transitions)
        if (t.label) letters.push_back(t.label->base);
    a.alphabet = Alphabet(std::move(letters));
    if (!universals.empty()) {
        a.universal.assign(static_cast<size_t>(a.n_states), false);
        for (State s : universals) {
            if (s < 0 || s >= a.n_states)
                throw std::runtime_error("cost automaton format: universal state out of range");
            a.universal[static_cast<size_t>(s)] = true;
        }
    }
    a.derive_flags();
    a.two_way = a.two_way || flag_twoway;
    a.has_epsilon = a.has_epsilon || flag_epsilon;
    a.validate();
    return a;
}

inline CostAutomaton parse_cost_automaton(const std::string& text) {
    std::istringstream in(text);
    return parse_cost_automaton(in);
}

inline std::string print_cost_automaton(const CostAutomaton& a) {
    std::ostringstream out;
    out << "states " << a.n_states << "\n";
    out << "alphabet";
    for (const auto& b : a.alphabet.letters) out << ' ' << b;
    out << "\n";
    if (a.alternating) {
        out << "universal";
        for (State s = 0; s < a.n_states; s++)
            if (a.is_universal(s)) out << ' ' << s;
        out << "\n";
    }
    out << "initial " << a.initial << "\n";
    out << "final";
    for (State s : a.finals) out << ' ' << s;
    out << "\n";
    if (a.two_way) out << "twoway\n";
    if (a.has_epsilon) out << "epsilon\n";
    auto ts = a.transitions;
    std::sort(ts.begin(), ts.end());
    for (const auto& t : ts)
        out << t.from << ' ' << (t.label ? t.label->str() : "eps") << ' '
            << (t.end_flag ? 'E' : 'N') << ' ' << t.cost << ' ' << t.to << "\n";
    return out.str();
}

}  // namespace rqb
