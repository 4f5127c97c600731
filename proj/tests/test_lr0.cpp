#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "fsapprox/fsapprox.hpp"
#include "support/test_support.hpp"

using namespace fsapprox;

namespace {

Grammar load(const std::string& name) {
    std::ifstream in(std::string(FSAPPROX_GRAMMAR_DIR) + "/" + name);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_cfg(ss.str());
}

// Nondeterministic shift-reduce recognition driven by the machine: a
// word is accepted iff some interleaving of shifts and reductions
// consumes it and ends in a final state. This exercises the machine
// independently of the approximation pipeline.
bool shift_reduce_accepts(const CharacteristicMachine& m,
                          const std::vector<std::string>& word) {
    std::set<std::pair<std::vector<int>, size_t>> seen;
    std::vector<std::pair<std::vector<int>, size_t>> work;
    work.push_back({{m.start_state}, 0});
    size_t depth_cap = 2 * word.size() + 8;
    while (!work.empty()) {
        auto [stack, pos] = work.back();
        work.pop_back();
        if (!seen.emplace(stack, pos).second) continue;
        int top = stack.back();
        if (pos == word.size() && m.finals.count(top)) return true;
        if (pos < word.size() && stack.size() < depth_cap) {
            int next = m.step(top, terminal(word[pos]));
            if (next >= 0) {
                auto pushed = stack;
                pushed.push_back(next);
                work.push_back({std::move(pushed), pos + 1});
            }
        }
        for (int r : m.reductions[top]) {
            const Rule& rule = m.grammar.rules[r];
            if (stack.size() <= rule.rhs.size()) continue;
            auto popped = stack;
            popped.resize(popped.size() - rule.rhs.size());
            int dst = m.step(popped.back(), nonterminal(rule.lhs));
            if (dst < 0) continue;
            popped.push_back(dst);
            work.push_back({std::move(popped), pos});
        }
    }
    return false;
}

std::vector<std::vector<std::string>> all_words(
    const std::vector<std::string>& alphabet, int max_len) {
    std::vector<std::vector<std::string>> out{{}};
    size_t lo = 0;
    for (int len = 1; len <= max_len; ++len) {
        size_t hi = out.size();
        for (size_t i = lo; i < hi; ++i)
            for (const auto& t : alphabet) {
                auto w = out[i];
                w.push_back(t);
                out.push_back(std::move(w));
            }
        lo = hi;
    }
    return out;
}

}  // namespace

TEST_CASE("the left-linear a*b machine has the five expected states") {
    Grammar g = load("g1.cfg");
    CharacteristicMachine m = build_machine(g);

    // Augmentation appends one rule and a primed start symbol.
    CHECK(m.original_start == "s");
    CHECK(m.augmented_start == "s'");
    REQUIRE(m.grammar.rules.size() == g.rules.size() + 1);
    CHECK(m.augmented_rule == static_cast<int>(g.rules.size()));
    CHECK(m.grammar.rules.back() == Rule{"s'", {nonterminal("s")}});

    REQUIRE(m.num_states() == 5);
    // Rule indices: 0 = s => x b, 1 = x => x a, 2 = x => [], 3 augmented.
    CHECK(m.states[0] ==
          Lr0State{{0, 0}, {1, 0}, {2, 0}, {3, 0}});
    CHECK(m.states[1] == Lr0State{{3, 1}});
    CHECK(m.states[2] == Lr0State{{0, 1}, {1, 1}});
    CHECK(m.states[3] == Lr0State{{1, 2}});
    CHECK(m.states[4] == Lr0State{{0, 2}});

    CHECK(m.delta[0] == std::map<Symbol, int>{{nonterminal("s"), 1},
                                              {nonterminal("x"), 2}});
    CHECK(m.delta[2] == std::map<Symbol, int>{{terminal("a"), 3},
                                              {terminal("b"), 4}});
    CHECK(m.finals == std::set<int>{1});
    CHECK(m.reductions ==
          std::vector<std::vector<int>>{{2}, {}, {}, {1}, {0}});
}

TEST_CASE("the matched-center machine shares the completed-center state") {
    Grammar g = load("g2.cfg");
    CharacteristicMachine m = build_machine(g);
    REQUIRE(m.num_states() == 9);

    // Rule indices: 0 = s => a x a, 1 = s => b x b, 2 = x => c.
    CHECK(m.states[1] == Lr0State{{0, 1}, {2, 0}});
    CHECK(m.states[2] == Lr0State{{1, 1}, {2, 0}});
    int via_a = m.walk(0, {terminal("a"), terminal("c")});
    int via_b = m.walk(0, {terminal("b"), terminal("c")});
    CHECK(via_a == 4);
    CHECK(via_b == 4);  // both center paths land in the same item set
    CHECK(m.states[4] == Lr0State{{2, 1}});

    CHECK(m.finals == std::set<int>{3});
    CHECK(m.reductions[4] == std::vector<int>{2});
    CHECK(m.reductions[7] == std::vector<int>{0});
    CHECK(m.reductions[8] == std::vector<int>{1});
}

TEST_CASE("a lone empty rule yields a two-state machine") {
    Grammar g = parse_cfg("start s. s => [].");
    CharacteristicMachine m = build_machine(g);
    REQUIRE(m.num_states() == 2);
    CHECK(m.states[0] == Lr0State{{0, 0}, {1, 0}});
    CHECK(m.states[1] == Lr0State{{1, 1}});
    CHECK(m.finals == std::set<int>{1});
    CHECK(m.reductions == std::vector<std::vector<int>>{{0}, {}});
}

TEST_CASE("the fresh start symbol avoids existing primed names") {
    Grammar g = parse_cfg("start s. s => `s'.");
    CharacteristicMachine m = build_machine(g);
    CHECK(m.augmented_start == "s''");
    CHECK(m.grammar.start == "s''");
}

TEST_CASE("walking undefined transitions yields -1") {
    CharacteristicMachine m = build_machine(load("g1.cfg"));
    CHECK(m.step(0, terminal("a")) == -1);
    CHECK(m.walk(0, {terminal("a"), terminal("a")}) == -1);
    CHECK(m.walk(0, {terminal("a"), terminal("a"), terminal("b")}) == -1);
    CHECK(m.walk(0, {}) == 0);
}

TEST_CASE("closure pulls in predicted rules and is idempotent") {
    Grammar g = load("g1.cfg");
    std::map<std::string, std::vector<int>> by_lhs;
    for (int i = 0; i < static_cast<int>(g.rules.size()); ++i)
        by_lhs[g.rules[i].lhs].push_back(i);

    // Dot before x predicts both x rules.
    Lr0State closed = closure(g, by_lhs, {{0, 0}});
    CHECK(closed == Lr0State{{0, 0}, {1, 0}, {2, 0}});
    CHECK(closure(g, by_lhs, closed) == closed);

    // Dot before a terminal or at the end predicts nothing.
    CHECK(closure(g, by_lhs, {{0, 1}}) == Lr0State{{0, 1}});
    CHECK(closure(g, by_lhs, {{2, 0}}) == Lr0State{{2, 0}});
}

TEST_CASE("construction is deterministic and structurally sound") {
    std::mt19937 rng(20260814);
    for (int trial = 0; trial < 25; ++trial) {
        Grammar g = support::random_cfg(rng);
        CharacteristicMachine m = build_machine(g);
        CharacteristicMachine m2 = build_machine(g);
        CHECK(m.states == m2.states);
        CHECK(m.delta == m2.delta);
        CHECK(m.finals == m2.finals);
        CHECK(m.reductions == m2.reductions);

        REQUIRE(m.states.size() == m.delta.size());
        REQUIRE(m.states.size() == m.reductions.size());
        for (int s = 0; s < m.num_states(); ++s) {
            for (const auto& [sym, dst] : m.delta[s]) {
                CHECK(dst >= 0);
                CHECK(dst < m.num_states());
                CHECK(dst != m.start_state);  // nothing re-enters the start
            }
            for (int r : m.reductions[s]) {
                CHECK(r != m.augmented_rule);
                CHECK(m.states[s].count(
                    {r, static_cast<int>(m.grammar.rules[r].rhs.size())}));
            }
        }
        for (int f : m.finals)
            CHECK(m.states[f].count({m.augmented_rule, 1}));
    }
}

TEST_CASE("shift-reduce over the machine recognizes exactly the language") {
    struct Case {
        std::string file;
        int max_len;
    };
    for (const Case& c : {Case{"g1.cfg", 5}, Case{"g2.cfg", 5},
                          Case{"anbn.cfg", 6}, Case{"ascb.cfg", 5},
                          Case{"np.cfg", 3}}) {
        INFO("grammar " << c.file);
        Grammar g = load(c.file);
        CharacteristicMachine m = build_machine(g);
        for (const auto& w : all_words(g.alphabet(), c.max_len)) {
            INFO("word '" << support::joined(w) << "'");
            CHECK(shift_reduce_accepts(m, w) == oracle::member(g, w));
        }
    }
}

TEST_CASE("longer grammar sentences are also recognized") {
    for (const char* file : {"g1.cfg", "anbn.cfg", "ascb.cfg", "np.cfg"}) {
        INFO("grammar " << file);
        Grammar g = load(file);
        CharacteristicMachine m = build_machine(g);
        for (const auto& w : oracle::enumerate_language(g, 7)) {
            INFO("word '" << support::joined(w) << "'");
            CHECK(shift_reduce_accepts(m, w));
        }
    }
}
