#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>
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

TEST_CASE("membership on the corpus grammars") {
    Grammar g1 = load("g1.cfg");
    CHECK(oracle::member(g1, {"b"}));
    CHECK(oracle::member(g1, {"a", "b"}));
    CHECK(oracle::member(g1, {"a", "a", "b"}));
    CHECK_FALSE(oracle::member(g1, {}));
    CHECK_FALSE(oracle::member(g1, {"a"}));
    CHECK_FALSE(oracle::member(g1, {"b", "a"}));
    CHECK_FALSE(oracle::member(g1, {"a", "q", "b"}));  // unknown token

    Grammar g2 = load("g2.cfg");
    CHECK(oracle::member(g2, {"a", "c", "a"}));
    CHECK(oracle::member(g2, {"b", "c", "b"}));
    CHECK_FALSE(oracle::member(g2, {"a", "c", "b"}));
    CHECK_FALSE(oracle::member(g2, {"b", "c", "a"}));

    Grammar np = load("np.cfg");
    CHECK(oracle::member(np, {"pn"}));
    CHECK(oracle::member(np, {"art", "n"}));
    CHECK(oracle::member(np, {"pn", "'s", "n"}));
    CHECK(oracle::member(np, {"art", "adj", "n", "p", "pn"}));
    CHECK_FALSE(oracle::member(np, {"art"}));
    CHECK_FALSE(oracle::member(np, {"n", "art"}));
}

TEST_CASE("membership counts matched nesting exactly") {
    Grammar g = load("anbn.cfg");
    CHECK(oracle::member(g, {}));
    for (int n = 1; n <= 10; ++n) {
        std::vector<std::string> good(n, "a");
        good.insert(good.end(), n, "b");
        INFO("depth " << n);
        CHECK(oracle::member(g, good));
        auto lopsided = good;
        lopsided.pop_back();
        CHECK_FALSE(oracle::member(g, lopsided));
    }
    CHECK_FALSE(oracle::member(g, {"b", "a"}));
}

TEST_CASE("membership survives long flat words") {
    Grammar g1 = load("g1.cfg");
    std::vector<std::string> w(30, "a");
    w.push_back("b");
    CHECK(oracle::member(g1, w));
    w.push_back("b");
    CHECK_FALSE(oracle::member(g1, w));
}

TEST_CASE("empty rules and nullable chains complete correctly") {
    // t is nullable, so s must finish via two empty completions.
    Grammar chain = parse_cfg("start s. s => t, u. t => []. u => `a | [].");
    CHECK(oracle::member(chain, {}));
    CHECK(oracle::member(chain, {"a"}));
    CHECK_FALSE(oracle::member(chain, {"a", "a"}));

    // A nullable left spine in front of the real content.
    Grammar spine = parse_cfg("start s. s => t, s | `a. t => [].");
    CHECK(oracle::member(spine, {"a"}));
    CHECK_FALSE(oracle::member(spine, {}));

    Grammar just_eps = parse_cfg("start s. s => [].");
    CHECK(oracle::member(just_eps, {}));
    CHECK_FALSE(oracle::member(just_eps, {"a"}));
    CHECK(oracle::enumerate_language(just_eps, 3) ==
          std::vector<std::vector<std::string>>{{}});
}

TEST_CASE("an unproductive grammar has the empty language") {
    Grammar g = parse_cfg("start s. s => s, `a.");
    CHECK_FALSE(oracle::member(g, {}));
    CHECK_FALSE(oracle::member(g, {"a"}));
    CHECK(oracle::enumerate_language(g, 4).empty());
}

TEST_CASE("enumeration lists words in length-then-lexicographic order") {
    CHECK(oracle::enumerate_language(load("g1.cfg"), 4) ==
          std::vector<std::vector<std::string>>{
              {"b"}, {"a", "b"}, {"a", "a", "b"}, {"a", "a", "a", "b"}});
    CHECK(oracle::enumerate_language(load("g2.cfg"), 4) ==
          std::vector<std::vector<std::string>>{{"a", "c", "a"},
                                                {"b", "c", "b"}});
    CHECK(oracle::enumerate_language(load("anbn.cfg"), 6) ==
          std::vector<std::vector<std::string>>{
              {},
              {"a", "b"},
              {"a", "a", "b", "b"},
              {"a", "a", "a", "b", "b", "b"}});
    CHECK(oracle::enumerate_language(load("ascb.cfg"), 3) ==
          std::vector<std::vector<std::string>>{{"c"},
                                                {"a", "c"},
                                                {"c", "b"},
                                                {"a", "a", "c"},
                                                {"a", "c", "b"},
                                                {"c", "b", "b"}});
}

TEST_CASE("enumeration and membership agree in both directions") {
    std::mt19937 rng(264574819);
    for (int trial = 0; trial < 12; ++trial) {
        Grammar g = support::random_cfg(rng);
        INFO("grammar\n" << format_cfg(g));
        auto language = oracle::enumerate_language(g, 3);
        std::set<std::vector<std::string>> in_language(language.begin(),
                                                       language.end());
        for (const auto& w : all_words(g.alphabet(), 3)) {
            INFO("word '" << support::joined(w) << "'");
            CHECK(oracle::member(g, w) == in_language.count(w));
        }
        // Longer enumerated words are still members.
        for (const auto& w : oracle::enumerate_language(g, 5))
            CHECK(oracle::member(g, w));
    }
}

TEST_CASE("the word cap aborts runaway enumerations") {
    Grammar g = parse_cfg("start s. s => t, t, t, t. t => `a | `b | `c.");
    CHECK(oracle::enumerate_language(g, 4).size() == 81);
    CHECK_THROWS_AS(oracle::enumerate_language(g, 4, 10), ResourceLimitError);
}
