#pragma once

#include <cctype>
#include <memory>
#include <string_view>
#include <stdexcept>
#include <string>
#include <vector>

#include "rqb/symbol.hpp"

namespace rqb {

struct Regex;
using RegexPtr = std::shared_ptr<const Regex>;

struct Regex {
    enum class Kind { Empty, Epsilon, Sym, Concat, Union, Star, Plus, Optional };

    Kind kind = Kind::Empty;
    Symbol sym;                     // Kind::Sym
    std::vector<RegexPtr> children; // Concat, Union (n-ary), Star/Plus/Optional (one)

    static RegexPtr empty() { return make(Kind::Empty); }
    static RegexPtr epsilon() { return make(Kind::Epsilon); }
    static RegexPtr symbol(Symbol s) {
        auto r = make(Kind::Sym);
        r->sym = std::move(s);
        return r;
    }
    static RegexPtr concat(std::vector<RegexPtr> cs) { return nary(Kind::Concat, std::move(cs)); }
    static RegexPtr alt(std::vector<RegexPtr> cs) { return nary(Kind::Union, std::move(cs)); }
    static RegexPtr star(RegexPtr c) { return unary(Kind::Star, std::move(c)); }
    static RegexPtr plus(RegexPtr c) { return unary(Kind::Plus, std::move(c)); }
    static RegexPtr optional(RegexPtr c) { return unary(Kind::Optional, std::move(c)); }

    // Letters mentioned, ignoring sign.
    void collect_letters(std::vector<std::string>& out) const {
        if (kind == Kind::Sym) out.push_back(sym.base);
        for (const auto& c : children) c->collect_letters(out);
    }

    bool uses_inverse() const {
        if (kind == Kind::Sym && sym.inverse) return true;
        for (const auto& c : children)
            if (c->uses_inverse()) return true;
        return false;
    }

    std::string str() const { return print(0); }

  private:
    static std::shared_ptr<Regex> make(Kind k) {
        auto r = std::make_shared<Regex>();
        r->kind = k;
        return r;
    }
    static RegexPtr unary(Kind k, RegexPtr c) {
        auto r = make(k);
        r->children.push_back(std::move(c));
        return r;
    }
    static RegexPtr nary(Kind k, std::vector<RegexPtr> cs) {
        if (cs.empty()) return k == Kind::Concat ? epsilon() : empty();
        if (cs.size() == 1) return cs[0];
        auto r = make(k);
        r->children = std::move(cs);
        return r;
    }

    // precedence: union 0, concat 1, postfix 2
    std::string print(int prec) const {
        auto paren = [&](int mine, std::string s) {
            return prec > mine ? "(" + std::move(s) + ")" : std::move(s);
        };
        switch (kind) {
            case Kind::Empty: return "[empty]";
            case Kind::Epsilon: return "eps";
            case Kind::Sym: {
                std::string s = sym.base;
                bool quoted = s.size() != 1;
                if (quoted) s = "'" + s + "'";
                if (sym.inverse) s += "-";
                return s;
            }
            case Kind::Concat: {
                std::string s;
                for (const auto& c : children) {
                    if (!s.empty()) s += ' ';
                    s += c->print(1);
                }
                return paren(1, std::move(s));
            }
            case Kind::Union: {
                std::string s;
                for (const auto& c : children) {
                    if (!s.empty()) s += '|';
                    s += c->print(0);
                }
                return paren(0, std::move(s));
            }
            case Kind::Star: return children[0]->print(2) + "*";
            case Kind::Plus: return children[0]->print(2) + "+";
            case Kind::Optional: return children[0]->print(2) + "?";
        }
        return "";
    }
};

// Regex surface syntax:
//   concatenation by juxtaposition, `|` union, `*`/`+`/`?` postfix, parentheses,
//   `eps` for the empty word, a trailing `-` inverts a letter.
//   An unquoted alphanumeric run is a sequence of single-character letters
//   (so `abc` means a.b.c); multi-character letters are quoted: 'foo'.
class RegexParser {
  public:
    explicit RegexParser(std::string_view text) : s_(text) {}

    RegexPtr parse() {
        auto r = parse_union();
        skip_ws();
        if (pos_ != s_.size()) fail("trailing input");
        return r;
    }

  private:
    std::string_view s_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) {
        throw std::runtime_error("regex parse error at offset " + std::to_string(pos_) + ": " + msg);
    }

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n')) pos_++;
    }

    bool peek_atom_start() {
        skip_ws();
        if (pos_ >= s_.size()) return false;
        char c = s_[pos_];
        return c == '(' || c == '\'' || std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    }

    RegexPtr parse_union() {
        std::vector<RegexPtr> alts{parse_concat()};
        skip_ws();
        while (pos_ < s_.size() && s_[pos_] == '|') {
            pos_++;
            alts.push_back(parse_concat());
            skip_ws();
        }
        return Regex::alt(std::move(alts));
    }

    RegexPtr parse_concat() {
        std::vector<RegexPtr> parts;
        while (peek_atom_start()) parts.push_back(parse_postfix());
        if (parts.empty()) fail("expected expression");
        return Regex::concat(std::move(parts));
    }

    RegexPtr parse_postfix() {
        auto r = parse_atom();
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (c == '*') r = Regex::star(std::move(r));
            else if (c == '+') r = Regex::plus(std::move(r));
            else if (c == '?') r = Regex::optional(std::move(r));
            else break;
            pos_++;
        }
        return r;
    }

    RegexPtr parse_atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end");
        char c = s_[pos_];
        if (c == '(') {
            pos_++;
            auto r = parse_union();
            skip_ws();
            if (pos_ >= s_.size() || s_[pos_] != ')') fail("expected ')'");
            pos_++;
            return r;
        }
        if (c == '\'') {
            pos_++;
            size_t start = pos_;
            while (pos_ < s_.size() && s_[pos_] != '\'') pos_++;
            if (pos_ >= s_.size()) fail("unterminated quoted letter");
            std::string base(s_.substr(start, pos_ - start));
            pos_++;
            if (base.empty()) fail("empty quoted letter");
            return Regex::symbol(Symbol{std::move(base), take_inverse_mark()});
        }
        // `eps` keyword, else a single one-character letter (runs like `abc`
        // concatenate via parse_concat, so postfix binds to one letter: ab* = a(b*))
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') fail("expected letter");
        if (s_.substr(pos_, 3) == "eps" &&
            (pos_ + 3 == s_.size() ||
             (!std::isalnum(static_cast<unsigned char>(s_[pos_ + 3])) && s_[pos_ + 3] != '_'))) {
            pos_ += 3;
            return Regex::epsilon();
        }
        pos_++;
        return Regex::symbol(Symbol{std::string(1, c), take_inverse_mark()});
    }

    bool take_inverse_mark() {
        if (pos_ < s_.size() && s_[pos_] == '-') {
            pos_++;
            return true;
        }
        return false;
    }
};

inline RegexPtr parse_regex(std::string_view text) { return RegexParser(text).parse(); }

}  // namespace rqb
