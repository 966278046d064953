#pragma once

#include <istream>
#include <sstream>
#include <string>

#include "rqb/nfa.hpp"

namespace rqb {

// Line-based NFA format:
//   states N
//   alphabet a b ...      (optional; otherwise inferred from transitions)
//   initial i ...
//   final f ...
//   src sym dst           (one line per transition; inverse symbols end in `-`)
// Blank lines and `#` comments are skipped.

inline Symbol parse_symbol_token(std::string tok) {
    bool inverse = tok.size() > 1 && tok.back() == '-';
    if (inverse) tok.pop_back();
    if (tok.empty()) throw std::runtime_error("empty symbol token");
    return Symbol{std::move(tok), inverse};
}

inline Nfa parse_nfa(std::istream& in) {
    Nfa n;
    bool have_states = false;
    std::string line;
    int lineno = 0;
    auto err = [&](const std::string& m) {
        throw std::runtime_error("nfa format, line " + std::to_string(lineno) + ": " + m);
    };
    while (std::getline(in, line)) {
        lineno++;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "states") {
            if (!(ls >> n.n_states) || n.n_states < 0) err("bad state count");
            have_states = true;
        } else if (tok == "alphabet") {
            std::string a;
            while (ls >> a) n.alphabet.push_back(parse_symbol_token(a));
        } else if (tok == "initial") {
            State s;
            while (ls >> s) n.initials.insert(s);
        } else if (tok == "final") {
            State s;
            while (ls >> s) n.finals.insert(s);
        } else {
            State src, dst;
            std::string sym;
            std::istringstream tr(line);
            if (!(tr >> src >> sym >> dst)) err("expected `src sym dst`");
            std::string extra;
            if (tr >> extra) err("trailing tokens");
            n.transitions.push_back({src, parse_symbol_token(sym), dst});
        }
    }
    if (!have_states) throw std::runtime_error("nfa format: missing `states` line");
    for (const auto& t : n.transitions) {
        n.alphabet.push_back(t.sym);
        n.alphabet.push_back(t.sym.inverted());
    }
    n.normalize_alphabet();
    n.validate();
    return n;
}

inline Nfa parse_nfa(const std::string& text) {
    std::istringstream in(text);
    return parse_nfa(in);
}

inline std::string print_nfa(const Nfa& n) {
    std::ostringstream out;
    out << "states " << n.n_states << "\n";
    out << "alphabet";
    for (const auto& s : n.alphabet) out << ' ' << s.str();
    out << "\n";
    out << "initial";
    for (State s : n.initials) out << ' ' << s;
    out << "\n";
    out << "final";
    for (State s : n.finals) out << ' ' << s;
    out << "\n";
    auto ts = n.transitions;
    std::sort(ts.begin(), ts.end());
    for (const auto& t : ts) out << t.from << ' ' << t.sym.str() << ' ' << t.to << "\n";
    return out.str();
}

}  // namespace rqb
