#include <catch2/catch_amalgamated.hpp>

#include "rqb/nfa.hpp"
#include "rqb/nfa_io.hpp"
#include "rqb/regex.hpp"

#include "oracles.hpp"

using namespace rqb;

namespace {

// "ab-c" -> a, b^{-1}, c (single-char letters, `-` marks an inverse)
Word W(const std::string& s) {
    Word w;
    for (size_t i = 0; i < s.size(); i++) {
        bool invm = i + 1 < s.size() && s[i + 1] == '-';
        w.push_back(Symbol{std::string(1, s[i]), invm});
        if (invm) i++;
    }
    return w;
}

std::vector<Symbol> fwd_syms(const std::string& letters) {
    std::vector<Symbol> out;
    for (char c : letters) out.push_back(Symbol{std::string(1, c), false});
    return out;
}

std::vector<Word> lang_up_to(const Nfa& n, size_t len) { return accepted_up_to(n, len); }

}  // namespace

TEST_CASE("regex compile: basic languages") {
    auto ab = fwd_syms("abc");

    SECTION("a+b+c") {
        Nfa n = compile(parse_regex("a+b+c"), ab);
        CHECK(n.accepts(W("abc")));
        CHECK(n.accepts(W("aabbc")));
        CHECK(n.accepts(W("abbbc")));
        CHECK_FALSE(n.accepts(W("ac")));
        CHECK_FALSE(n.accepts(W("abcc")));
        CHECK_FALSE(n.accepts(W("")));
        CHECK_FALSE(n.accepts(W("cba")));
    }

    SECTION("eps") {
        Nfa n = compile(parse_regex("eps"), ab);
        CHECK(n.accepts(W("")));
        CHECK_FALSE(n.accepts(W("a")));
    }

    SECTION("(a|b)c enumerates to {ac, bc}") {
        Nfa n = compile(parse_regex("(a|b)c"), ab);
        std::vector<Word> expect = {W("ac"), W("bc")};
        CHECK(lang_up_to(n, 3) == expect);
    }

    SECTION("postfix binds to a single letter in a run") {
        Nfa n = compile(parse_regex("ab*"), ab);
        CHECK(n.accepts(W("a")));
        CHECK(n.accepts(W("abbb")));
        CHECK_FALSE(n.accepts(W("abab")));
    }

    SECTION("inverse letters") {
        Nfa n = compile(parse_regex("a b- c"));
        CHECK(n.accepts(W("ab-c")));
        CHECK_FALSE(n.accepts(W("abc")));
    }

    SECTION("symbol outside declared alphabet") {
        CHECK_THROWS(compile(parse_regex("d"), ab));
    }
}

TEST_CASE("product") {
    auto a = fwd_syms("a");
    Nfa astar = compile(parse_regex("a*"), a);
    Nfa aplus = compile(parse_regex("a+"), a);

    SECTION("a* and a+ is a+") {
        Nfa p = product(astar, aplus);
        CHECK(lang_up_to(p, 4) == lang_up_to(aplus, 4));
    }

    SECTION("product with universal automaton is identity") {
        Nfa p = product(aplus, sigma_star(a));
        CHECK(lang_up_to(p, 4) == lang_up_to(aplus, 4));
    }

    SECTION("disjoint singletons") {
        auto ab = fwd_syms("ab");
        Nfa p = product(compile(parse_regex("ab"), ab), compile(parse_regex("ba"), ab));
        CHECK(p.language_empty());
    }

    SECTION("alphabet mismatch") {
        CHECK_THROWS(product(astar, compile(parse_regex("b"), fwd_syms("b"))));
    }
}

TEST_CASE("complement") {
    auto ab = fwd_syms("ab");

    SECTION("complement of empty is sigma*") {
        Nfa c = complement(nfa_empty(ab));
        for (const auto& w : oracle::all_words(ab, 3)) CHECK(c.accepts(w));
    }

    SECTION("double complement") {
        Nfa n = compile(parse_regex("a(a|b)*b"), ab);
        Nfa cc = complement(complement(n));
        for (const auto& w : oracle::all_words(ab, 4)) CHECK(cc.accepts(w) == n.accepts(w));
    }

    SECTION("complement of a+ over {a} is {eps}") {
        auto a = fwd_syms("a");
        Nfa c = complement(compile(parse_regex("a+"), a));
        std::vector<Word> expect = {W("")};
        CHECK(lang_up_to(c, 4) == expect);
    }
}

TEST_CASE("is_finite") {
    auto ab = fwd_syms("ab");

    SECTION("a*b infinite") {
        CHECK_FALSE(is_finite(compile(parse_regex("a*b"), ab)).finite);
    }

    SECTION("(a|b)c finite with word list") {
        auto r = is_finite(compile(parse_regex("(a|b)c"), fwd_syms("abc")));
        REQUIRE(r.finite);
        std::vector<Word> expect = {W("ac"), W("bc")};
        CHECK(r.words == expect);
    }

    SECTION("empty automaton") {
        auto r = is_finite(nfa_empty(ab));
        REQUIRE(r.finite);
        CHECK(r.words.empty());
    }
}

TEST_CASE("proper_prefix_acceptor") {
    auto a = fwd_syms("a");

    SECTION("{a} gives aa, aaa, ...") {
        Nfa p = proper_prefix_acceptor(compile(parse_regex("a"), a));
        std::vector<Word> expect = {W("aa"), W("aaa"), W("aaaa")};
        CHECK(lang_up_to(p, 4) == expect);
    }

    SECTION("empty language gives empty") {
        CHECK(proper_prefix_acceptor(nfa_empty(a)).language_empty());
    }

    SECTION("{eps} gives sigma+") {
        auto ab = fwd_syms("ab");
        Nfa p = proper_prefix_acceptor(nfa_epsilon(ab));
        for (const auto& w : oracle::all_words(ab, 3)) CHECK(p.accepts(w) == !w.empty());
    }
}

TEST_CASE("restricted_language") {
    auto ab = fwd_syms("ab");

    SECTION("L = a|ab") {
        Nfa n = compile(parse_regex("a|ab"), ab);
        std::vector<Word> pf = {W("a")};
        std::vector<Word> sf = {W("a"), W("ab")};
        CHECK(lang_up_to(restricted_language(n, RestrictMode::Prefix), 3) == pf);
        CHECK(lang_up_to(restricted_language(n, RestrictMode::Suffix), 3) == sf);
    }

    SECTION("L = a*b is its own prefix-free part") {
        Nfa n = compile(parse_regex("a*b"), ab);
        Nfa r = restricted_language(n, RestrictMode::Prefix);
        CHECK(lang_up_to(r, 5) == lang_up_to(n, 5));
    }

    SECTION("factor mode agrees with brute force on a*ba*") {
        Nfa n = compile(parse_regex("a*ba*"), ab);
        Nfa r = restricted_language(n, RestrictMode::Factor);
        auto words = oracle::all_words(ab, 5);
        for (const auto& w : words) {
            bool in = n.accepts(w);
            bool has_pf = false;
            for (const auto& f : words)
                if (n.accepts(f) && oracle::is_proper_factor(f, w)) has_pf = true;
            CHECK(r.accepts(w) == (in && !has_pf));
        }
    }
}

TEST_CASE("reverse") {
    auto ab = fwd_syms("ab");
    SECTION("singleton") {
        std::vector<Word> expect = {W("ba")};
        CHECK(lang_up_to(reverse(compile(parse_regex("ab"), ab)), 3) == expect);
    }
    SECTION("involution") {
        Nfa n = compile(parse_regex("a(b|a)*"), ab);
        Nfa rr = reverse(reverse(n));
        for (const auto& w : oracle::all_words(ab, 4)) CHECK(rr.accepts(w) == n.accepts(w));
    }
    SECTION("epsilon") {
        std::vector<Word> expect = {W("")};
        CHECK(lang_up_to(reverse(nfa_epsilon(ab)), 2) == expect);
    }
}

TEST_CASE("membership agrees with the recursive matcher on random regexes") {
    std::mt19937 rng(20240901);
    auto syms = fwd_syms("abc");
    auto words = oracle::all_words(syms, 6);
    for (int i = 0; i < 100; i++) {
        auto r = oracle::random_regex(rng, syms, 10);
        Nfa n = compile(r, syms);
        for (const auto& w : words) {
            bool got = n.accepts(w);
            bool want = oracle::rx_match(r, w);
            if (got != want) {
                INFO("regex " << r->str() << " word `" << word_str(w) << "`");
                REQUIRE(got == want);
            }
        }
    }
}

TEST_CASE("is_finite agrees with the pumping-window probe on random automata") {
    std::mt19937 rng(7);
    auto syms = fwd_syms("ab");
    for (int i = 0; i < 200; i++) {
        Nfa n = oracle::random_nfa(rng, syms, 1 + i % 4);
        CHECK(is_finite(n).finite == oracle::finite_by_pumping_window(n));
    }
}

TEST_CASE("prefix restriction is exact on random automata") {
    std::mt19937 rng(99);
    auto syms = fwd_syms("ab");
    auto words = oracle::all_words(syms, 5);
    for (int i = 0; i < 40; i++) {
        Nfa n = oracle::random_nfa(rng, syms, 3);
        Nfa r = restricted_language(n, RestrictMode::Prefix);
        for (const auto& w : words) {
            bool in = n.accepts(w);
            bool has_pp = false;
            for (const auto& p : words)
                if (n.accepts(p) && oracle::is_proper_prefix(p, w)) has_pp = true;
            CHECK(r.accepts(w) == (in && !has_pp));
        }
    }
}

TEST_CASE("De Morgan on random automata") {
    std::mt19937 rng(41);
    auto syms = fwd_syms("ab");
    auto words = oracle::all_words(syms, 4);
    for (int i = 0; i < 25; i++) {
        Nfa a = oracle::random_nfa(rng, syms, 3);
        Nfa b = oracle::random_nfa(rng, syms, 3);
        Nfa lhs = product(complement(a), complement(b));
        Nfa rhs = complement(nfa_union(a, b));
        for (const auto& w : words) CHECK(lhs.accepts(w) == rhs.accepts(w));
    }
}

TEST_CASE("nfa text format") {
    const std::string text =
        "states 3\n"
        "initial 0\n"
        "final 2\n"
        "0 a 1\n"
        "1 b- 2\n";
    Nfa n = parse_nfa(text);
    CHECK(n.n_states == 3);
    CHECK(n.accepts(W("ab-")));
    CHECK_FALSE(n.accepts(W("ab")));

    Nfa back = parse_nfa(print_nfa(n));
    for (const auto& w : oracle::all_words(n.alphabet, 3))
        CHECK(back.accepts(w) == n.accepts(w));

    CHECK_THROWS(parse_nfa("initial 0\n"));
    CHECK_THROWS(parse_nfa("states 1\n0 a 5\n"));
}
