#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rqb/nfa.hpp"
#include "rqb/regex.hpp"
#include "rqb/symbol.hpp"

namespace rqb {

// One atom x -[L]-> y of a conjunct; the language is kept as source text, as a
// parsed regex, and compiled to an epsilon-free NFA over the signed alphabet.
struct QueryAtom {
    std::string source;
    std::string regex_text;
    RegexPtr regex;
    Nfa nfa;
    std::string target;
};

// A conjunct (conjunctive two-way regular path query): a set of atoms over a
// variable list that starts with the free variables, then the existential ones
// in order of first appearance.
struct Conjunct {
    std::vector<QueryAtom> atoms;
    std::vector<std::string> variables;
};

// A union of conjuncts sharing one tuple of free variables; Boolean when the
// tuple is empty.
struct Query {
    std::string name;
    Alphabet alphabet;
    std::vector<std::string> free_vars;
    std::vector<Conjunct> disjuncts;

    bool boolean() const { return free_vars.empty(); }
};

namespace detail {

inline void finish_conjunct(Conjunct& c, const std::vector<std::string>& free_vars) {
    c.variables = free_vars;
    auto note = [&](const std::string& v) {
        if (std::find(c.variables.begin(), c.variables.end(), v) == c.variables.end())
            c.variables.push_back(v);
    };
    for (const auto& a : c.atoms) {
        note(a.source);
        note(a.target);
    }
}

inline QueryAtom make_atom(std::string source, const std::string& regex_text,
                           std::string target, const Alphabet& alphabet) {
    QueryAtom a;
    a.source = std::move(source);
    a.regex_text = regex_text;
    a.regex = parse_regex(regex_text);
    a.nfa = compile(a.regex, alphabet.signed_symbols());
    a.nfa.trim();
    if (a.nfa.language_empty())
        throw std::runtime_error("query: atom language is empty: " + regex_text);
    a.target = std::move(target);
    return a;
}

}  // namespace detail

// Programmatic construction: disjuncts given as lists of (source, regex, target).
inline Query make_query(std::string name, Alphabet alphabet,
                        std::vector<std::string> free_vars,
                        const std::vector<std::vector<std::array<std::string, 3>>>& disjuncts) {
    Query q;
    q.name = std::move(name);
    q.alphabet = std::move(alphabet);
    q.free_vars = std::move(free_vars);
    if (disjuncts.empty()) throw std::runtime_error("query: at least one disjunct required");
    for (const auto& d : disjuncts) {
        if (d.empty()) throw std::runtime_error("query: empty disjunct");
        Conjunct c;
        for (const auto& [x, r, y] : d) c.atoms.push_back(detail::make_atom(x, r, y, q.alphabet));
        detail::finish_conjunct(c, q.free_vars);
        q.disjuncts.push_back(std::move(c));
    }
    return q;
}

// Query file parser.  Format:
//   alphabet a b c d;
//   query NAME(x, y) := disjunct { x -[a+ b+ c]-> y ; x -[a+ (b|d) c+]-> y }
//                       disjunct { ... } ;
// Free variables live in the head; a Boolean query has an empty head.  Atom
// languages between `-[` and `]->` use the regex surface syntax.
class QueryParser {
  public:
    explicit QueryParser(std::string_view text) : s_(text) {}

    Query parse() {
        expect_word("alphabet");
        std::vector<std::string> letters;
        while (peek_ident()) letters.push_back(ident());
        if (letters.empty()) fail("expected at least one alphabet letter");
        expect(';');
        Query q;
        q.alphabet = Alphabet(letters);
        expect_word("query");
        if (!peek_ident()) fail("expected query name");
        q.name = ident();
        expect('(');
        skip_ws();
        if (!at(')')) {
            q.free_vars.push_back(ident());
            skip_ws();
            while (at(',')) {
                pos_++;
                q.free_vars.push_back(ident());
                skip_ws();
            }
        }
        expect(')');
        expect(':');
        expect('=');
        while (true) {
            skip_ws();
            if (!peek_word("disjunct")) break;
            expect_word("disjunct");
            expect('{');
            Conjunct c;
            while (true) {
                c.atoms.push_back(parse_atom(q.alphabet));
                skip_ws();
                if (at(';')) {
                    pos_++;
                    skip_ws();
                    if (at('}')) break;
                    continue;
                }
                break;
            }
            expect('}');
            if (c.atoms.empty()) fail("empty disjunct");
            detail::finish_conjunct(c, q.free_vars);
            q.disjuncts.push_back(std::move(c));
        }
        if (q.disjuncts.empty()) fail("expected at least one disjunct");
        expect(';');
        skip_ws();
        if (pos_ != s_.size()) fail("trailing input");
        return q;
    }

  private:
    std::string_view s_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) {
        int line = 1, col = 1;
        for (size_t i = 0; i < pos_ && i < s_.size(); i++) {
            if (s_[i] == '\n') line++, col = 1;
            else col++;
        }
        throw std::runtime_error("query parse error at line " + std::to_string(line) +
                                 ", column " + std::to_string(col) + ": " + msg);
    }

    void skip_ws() {
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') pos_++;
            else if (c == '#') {
                while (pos_ < s_.size() && s_[pos_] != '\n') pos_++;
            } else break;
        }
    }

    bool at(char c) { return pos_ < s_.size() && s_[pos_] == c; }

    void expect(char c) {
        skip_ws();
        if (!at(c)) fail(std::string("expected `") + c + "`");
        pos_++;
    }

    static bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    }

    bool peek_ident() {
        skip_ws();
        return pos_ < s_.size() && ident_char(s_[pos_]);
    }

    std::string ident() {
        skip_ws();
        size_t start = pos_;
        while (pos_ < s_.size() && ident_char(s_[pos_])) pos_++;
        if (pos_ == start) fail("expected identifier");
        return std::string(s_.substr(start, pos_ - start));
    }

    bool peek_word(std::string_view w) {
        skip_ws();
        if (s_.substr(pos_, w.size()) != w) return false;
        size_t after = pos_ + w.size();
        return after >= s_.size() || !ident_char(s_[after]);
    }

    void expect_word(std::string_view w) {
        if (!peek_word(w)) fail("expected `" + std::string(w) + "`");
        pos_ += w.size();
    }

    QueryAtom parse_atom(const Alphabet& alphabet) {
        std::string x = ident();
        skip_ws();
        if (s_.substr(pos_, 2) != "-[") fail("expected `-[`");
        pos_ += 2;
        size_t start = pos_;
        size_t end = s_.find("]->", pos_);
        if (end == std::string_view::npos) fail("unterminated atom language (missing `]->`)");
        std::string regex_text(s_.substr(start, end - start));
        pos_ = end + 3;
        std::string y = ident();
        try {
            return detail::make_atom(std::move(x), regex_text, std::move(y), alphabet);
        } catch (const std::runtime_error& e) {
            pos_ = start;
            fail(e.what());
        }
    }
};

inline Query parse_query(std::string_view text) { return QueryParser(text).parse(); }

inline std::string print_query(const Query& q) {
    std::string out = "alphabet";
    for (const auto& l : q.alphabet.letters) out += " " + l;
    out += ";\nquery " + q.name + "(";
    for (size_t i = 0; i < q.free_vars.size(); i++) {
        if (i) out += ", ";
        out += q.free_vars[i];
    }
    out += ") :=\n";
    for (const auto& d : q.disjuncts) {
        out += "  disjunct {\n";
        for (const auto& a : d.atoms)
            out += "    " + a.source + " -[" + a.regex_text + "]-> " + a.target + " ;\n";
        out += "  }\n";
    }
    out += ";\n";
    return out;
}

}  // namespace rqb
