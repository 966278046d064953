#include <catch2/catch_amalgamated.hpp>

#include "rqb/cost_automaton.hpp"
#include "rqb/cost_io.hpp"
#include "rqb/limitedness.hpp"

#include "oracles.hpp"

using namespace rqb;

namespace {

BaseWord BW(const std::string& s) {
    BaseWord w;
    for (char c : s) w.push_back(std::string(1, c));
    return w;
}

// the min(m,n) automaton: over {a,b}, accepts a*ba*, and nondeterministically
// charges 1 per `a` either only before or only after the b. The lone final
// state 1 is entered through end-flagged moves only, so a run must consume
// the whole word.
CostAutomaton min_mn_automaton() {
    CostAutomaton a;
    a.alphabet = Alphabet({"a", "b"});
    a.n_states = 5;
    a.initial = 0;
    a.finals = {1};
    auto mid = [&](State p, const char* l, int c, State q) {
        a.transitions.push_back({p, fwd(l), false, c, q});
    };
    auto end = [&](State p, const char* l, int c) {
        a.transitions.push_back({p, fwd(l), true, c, 1});
    };
    // charge-the-prefix branch: 0 loops on costly a, then b, then free a in 4
    mid(0, "a", 1, 0);
    mid(0, "b", 0, 4);
    mid(4, "a", 0, 4);
    end(0, "b", 0);
    end(4, "a", 0);
    // charge-the-suffix branch: free a in 2, then b, then costly a in 3
    mid(0, "a", 0, 2);
    mid(2, "a", 0, 2);
    mid(2, "b", 0, 3);
    mid(3, "a", 1, 3);
    end(2, "b", 0);
    end(3, "a", 1);
    a.derive_flags();
    a.validate();
    return a;
}

CostAutomaton all_zero_automaton() {
    CostAutomaton a;
    a.alphabet = Alphabet({"a", "b"});
    a.n_states = 1;
    a.initial = 0;
    a.finals = {0};
    add_transition_any_flag(a, 0, fwd("a"), 0, 0);
    add_transition_any_flag(a, 0, fwd("b"), 0, 0);
    a.derive_flags();
    return a;
}

}  // namespace

TEST_CASE("acceptance basics") {
    SECTION("DA for a+ with zero costs") {
        CostAutomaton a;
        a.alphabet = Alphabet({"a"});
        a.n_states = 2;
        a.initial = 0;
        a.finals = {1};
        add_transition_any_flag(a, 0, fwd("a"), 0, 1);
        add_transition_any_flag(a, 1, fwd("a"), 0, 1);
        a.derive_flags();
        CHECK(accepts(a, BW("aa")));
        CHECK(accepts(a, BW("a")));
        CHECK_FALSE(accepts(a, BW("")));
    }

    SECTION("initial in finals accepts the empty word at cost 0") {
        CostAutomaton a = all_zero_automaton();
        auto r = cost_of_word(a, BW(""));
        CHECK(r.accepted);
        CHECK(r.cost == 0);
    }

    SECTION("two-way zig-zag ab, b back, b again") {
        CostAutomaton a;
        a.alphabet = Alphabet({"a", "b"});
        a.n_states = 5;
        a.initial = 0;
        a.finals = {4};
        add_transition_any_flag(a, 0, fwd("a"), 0, 1);
        add_transition_any_flag(a, 1, fwd("b"), 0, 2);
        add_transition_any_flag(a, 2, inv("b"), 0, 3);
        add_transition_any_flag(a, 3, fwd("b"), 0, 4);
        a.derive_flags();
        CHECK(accepts(a, BW("ab")));
        CHECK_FALSE(accepts(a, BW("aa")));
        CHECK_FALSE(accepts(a, BW("a")));
    }
}

TEST_CASE("min(m,n) cost profile") {
    CostAutomaton a = min_mn_automaton();
    auto cost = [&](const std::string& s) { return cost_of_word(a, BW(s)); };
    CHECK(cost("aaba").cost == 1);
    for (int m = 0; m <= 3; m++)
        for (int n = 0; n <= 3; n++) {
            std::string w(static_cast<size_t>(m), 'a');
            w += 'b';
            w += std::string(static_cast<size_t>(n), 'a');
            auto r = cost(w);
            REQUIRE(r.accepted);
            CHECK(r.cost == std::min(m, n));
        }
    CHECK_FALSE(cost("aa").accepted);
    CHECK(cost("aa").value() == 0);
}

TEST_CASE("all-zero automaton costs 0 everywhere") {
    CostAutomaton a = all_zero_automaton();
    for (const auto& w : oracle::all_words(a.alphabet.forward_symbols(), 4)) {
        auto r = cost_of_word(a, base_word(w));
        CHECK(r.accepted);
        CHECK(r.cost == 0);
    }
}

TEST_CASE("value iteration equals exhaustive tree search on random automata") {
    std::mt19937 rng(1234);
    std::vector<std::string> letters{"a", "b"};
    int checked = 0;
    for (int i = 0; i < 60; i++) {
        oracle::CostAutOpts opts;
        opts.two_way = i % 2 == 1;
        opts.alternating = i % 3 != 0;
        opts.epsilon = i % 4 == 0;
        CostAutomaton a = oracle::random_cost_automaton(rng, letters, 2 + i % 2, opts);
        for (const auto& w : oracle::all_words(a.alphabet.forward_symbols(), 4)) {
            BaseWord bw = base_word(w);
            Cost cmax = static_cast<Cost>(a.n_states * (bw.size() + 1)) + 2;
            auto want = oracle::tree_cost(a, bw, cmax);
            auto got = cost_of_word(a, bw);
            INFO("automaton:\n" << print_cost_automaton(a) << "word " << base_word_str(bw));
            REQUIRE(got.accepted == want.has_value());
            if (want) {
                REQUIRE(got.cost == *want);
                checked++;
            }
        }
    }
    CHECK(checked > 200);  // the comparison must not be vacuous
}

TEST_CASE("cost never increases when a transition cost drops") {
    std::mt19937 rng(555);
    std::vector<std::string> letters{"a", "b"};
    for (int i = 0; i < 40; i++) {
        oracle::CostAutOpts opts;
        opts.two_way = i % 2 == 1;
        opts.alternating = i % 2 == 0;
        CostAutomaton a = oracle::random_cost_automaton(rng, letters, 3, opts);
        std::vector<size_t> costly;
        for (size_t t = 0; t < a.transitions.size(); t++)
            if (a.transitions[t].cost == 1) costly.push_back(t);
        if (costly.empty()) continue;
        CostAutomaton b = a;
        b.transitions[costly[static_cast<size_t>(i) % costly.size()]].cost = 0;
        for (const auto& w : oracle::all_words(a.alphabet.forward_symbols(), 4)) {
            auto ra = cost_of_word(a, base_word(w));
            auto rb = cost_of_word(b, base_word(w));
            CHECK(ra.accepted == rb.accepted);
            if (ra.accepted) CHECK(rb.cost <= ra.cost);
        }
    }
}

TEST_CASE("matrix evaluation matches config-graph evaluation on one-way DA") {
    std::mt19937 rng(31337);
    std::vector<std::string> letters{"a", "b"};
    for (int i = 0; i < 60; i++) {
        CostAutomaton a = oracle::random_cost_automaton(rng, letters, 1 + i % 3, {});
        for (const auto& w : oracle::all_words(a.alphabet.forward_symbols(), 5)) {
            auto r1 = cost_via_matrices(a, base_word(w));
            auto r2 = cost_of_word(a, base_word(w));
            CHECK(r1.accepted == r2.accepted);
            if (r1.accepted) CHECK(r1.cost == r2.cost);
        }
    }
}

TEST_CASE("limitedness verdicts") {
    SECTION("min(m,n) is unlimited") {
        auto r = limited_da(min_mn_automaton());
        CHECK_FALSE(r.limited);
        CHECK_FALSE(r.witness.empty());
        // brute force corroborates growth: cost of a^3 b a^3 is 3
        CHECK(cost_of_word(min_mn_automaton(), BW("aaabaaa")).cost == 3);
    }

    SECTION("all-zero automaton is limited with sup 0") {
        auto r = limited_da(all_zero_automaton());
        CHECK(r.limited);
        CHECK(r.sup == 0);
    }

    SECTION("charge only the first step: limited with sup 1") {
        // (a|b)+ with cost 1 on the first letter; final entered at the end only
        CostAutomaton a;
        a.alphabet = Alphabet({"a", "b"});
        a.n_states = 3;
        a.initial = 0;
        a.finals = {2};
        for (const char* l : {"a", "b"}) {
            a.transitions.push_back({0, fwd(l), false, 1, 1});
            a.transitions.push_back({0, fwd(l), true, 1, 2});
            a.transitions.push_back({1, fwd(l), false, 0, 1});
            a.transitions.push_back({1, fwd(l), true, 0, 2});
        }
        a.derive_flags();
        auto r = limited_da(a);
        CHECK(r.limited);
        CHECK(r.sup == 1);
    }

    SECTION("flavor preconditions") {
        CostAutomaton a = min_mn_automaton();
        a.two_way = true;
        CHECK_THROWS_AS(limited_da(a), FlavorError);
    }
}

TEST_CASE("capped search") {
    SECTION("min(m,n) with cap 2 yields a witness of cost 3") {
        auto r = capped_cost_search(min_mn_automaton(), 2);
        REQUIRE(r.exceeded);
        REQUIRE(r.witness.has_value());
        auto c = cost_of_word(min_mn_automaton(), *r.witness);
        CHECK(c.accepted);
        CHECK(c.cost > 2);
    }

    SECTION("all-zero automaton is bounded by 0 for any cap") {
        auto r = capped_cost_search(all_zero_automaton(), 5);
        CHECK_FALSE(r.exceeded);
        CHECK(r.sup == 0);
    }

    SECTION("random agreement with limited_da") {
        std::mt19937 rng(4242);
        std::vector<std::string> letters{"a", "b"};
        for (int i = 0; i < 150; i++) {
            CostAutomaton a = oracle::random_cost_automaton(rng, letters, 2, {});
            auto lim = limited_da(a);
            auto cs = capped_cost_search(a, 16);
            CHECK(lim.limited == !cs.exceeded);
            if (lim.limited) {
                CHECK(lim.sup == cs.sup);
                CHECK(sup_cost_up_to_length(a, 8) <= lim.sup);
            }
        }
    }
}

TEST_CASE("sup_cost_up_to_length") {
    CHECK(sup_cost_up_to_length(min_mn_automaton(), 5) == 2);
    CHECK(sup_cost_up_to_length(all_zero_automaton(), 4) == 0);
    CostAutomaton empty;
    empty.alphabet = Alphabet({"a"});
    empty.n_states = 1;
    empty.initial = 0;
    CHECK(sup_cost_up_to_length(empty, 3) == 0);
}

TEST_CASE("cost automaton text format") {
    const std::string text =
        "states 3\n"
        "universal 1\n"
        "initial 0\n"
        "final 2\n"
        "0 a N 1 1\n"
        "1 eps N 0 2\n"
        "1 b- E 0 0\n";
    CostAutomaton a = parse_cost_automaton(text);
    CHECK(a.n_states == 3);
    CHECK(a.alternating);
    CHECK(a.two_way);
    CHECK(a.has_epsilon);
    CostAutomaton back = parse_cost_automaton(print_cost_automaton(a));
    CHECK(back.transitions.size() == a.transitions.size());
    CHECK(back.alternating == a.alternating);

    CHECK_THROWS(parse_cost_automaton("states 1\n"));            // missing initial
    CHECK_THROWS(parse_cost_automaton("states 1\ninitial 0\n0 a X 0 0\n"));
}
