#pragma once

#include <algorithm>
#include <compare>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace rqb {

// A letter of the signed alphabet A^±: a base letter of A, possibly inverted.
struct Symbol {
    std::string base;
    bool inverse = false;

    Symbol() = default;
    Symbol(std::string b, bool inv = false) : base(std::move(b)), inverse(inv) {}

    Symbol inverted() const { return Symbol{base, !inverse}; }

    auto operator<=>(const Symbol&) const = default;

    std::string str() const { return inverse ? base + "-" : base; }
};

using Word = std::vector<Symbol>;

inline Symbol fwd(std::string b) { return Symbol{std::move(b), false}; }
inline Symbol inv(std::string b) { return Symbol{std::move(b), true}; }

inline std::string word_str(const Word& w) {
    std::string s;
    for (const auto& x : w) {
        if (!s.empty()) s += ' ';
        s += x.str();
    }
    return s.empty() ? "eps" : s;
}

// Base alphabet A, kept sorted so derived alphabets are deterministic.
struct Alphabet {
    std::vector<std::string> letters;

    Alphabet() = default;
    explicit Alphabet(std::vector<std::string> ls) : letters(std::move(ls)) {
        std::sort(letters.begin(), letters.end());
        letters.erase(std::unique(letters.begin(), letters.end()), letters.end());
    }

    bool contains(const std::string& b) const {
        return std::binary_search(letters.begin(), letters.end(), b);
    }

    // A^± in a fixed order: each letter forward then inverse.
    std::vector<Symbol> signed_symbols() const {
        std::vector<Symbol> out;
        out.reserve(letters.size() * 2);
        for (const auto& b : letters) {
            out.emplace_back(b, false);
            out.emplace_back(b, true);
        }
        return out;
    }

    std::vector<Symbol> forward_symbols() const {
        std::vector<Symbol> out;
        out.reserve(letters.size());
        for (const auto& b : letters) out.emplace_back(b, false);
        return out;
    }

    bool operator==(const Alphabet&) const = default;
};

}  // namespace rqb
