#pragma once

// Shared helpers for the test suites: tokenizing, hand-built reference
// automata, random grammar generators, a brute-force shift-reduce
// configuration walker, and a harness for running the CLI binary.

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fsapprox/fsapprox.hpp"

namespace support {

inline std::vector<std::string> words(const std::string& sentence) {
    std::istringstream ss(sentence);
    std::vector<std::string> out;
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

inline std::string joined(const std::vector<std::string>& tokens) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
    }
    return out;
}

// ---------------------------------------------------------------------
// Hand-built reference automata.

// a*b: one live loop state, one final state.
inline fsapprox::Dfa dfa_astar_b() {
    fsapprox::Dfa d;
    d.alphabet = {"a", "b"};
    d.trans.resize(2);
    d.trans[0][0] = 0;
    d.trans[0][1] = 1;
    d.finals = {1};
    return d;
}

// eps | a+ b+.
inline fsapprox::Dfa dfa_eps_or_aplus_bplus() {
    fsapprox::Dfa d;
    d.alphabet = {"a", "b"};
    d.trans.resize(3);
    d.trans[0][0] = 1;
    d.trans[1][0] = 1;
    d.trans[1][1] = 2;
    d.trans[2][1] = 2;
    d.finals = {0, 2};
    return d;
}

// a* c b*.
inline fsapprox::Dfa dfa_astar_c_bstar() {
    fsapprox::Dfa d;
    d.alphabet = {"a", "b", "c"};
    d.trans.resize(2);
    d.trans[0][0] = 0;
    d.trans[0][2] = 1;
    d.trans[1][1] = 1;
    d.finals = {1};
    return d;
}

// {aca, bcb}: matching letters around the center marker.
inline fsapprox::Dfa dfa_matched_center() {
    fsapprox::Dfa d;
    d.alphabet = {"a", "b", "c"};
    d.trans.resize(6);
    d.trans[0][0] = 1;
    d.trans[0][1] = 2;
    d.trans[1][2] = 3;
    d.trans[2][2] = 4;
    d.trans[3][0] = 5;
    d.trans[4][1] = 5;
    d.finals = {5};
    return d;
}

// ---------------------------------------------------------------------
// Bounded comparison of a compiled DFA against the exact parser.

// Shortest sentence (length <= max_len) on which the DFA and the
// grammar disagree, or nullopt when they agree everywhere.
inline std::optional<fsapprox::DifferenceWitness> bounded_gap(
    const fsapprox::Grammar& g, const fsapprox::Dfa& d, int max_len) {
    auto language = fsapprox::oracle::enumerate_language(g, max_len);
    fsapprox::Dfa trie = fsapprox::dfa_from_strings(language, d.alphabet);
    return fsapprox::bounded_equivalent(d, trie, max_len);
}

// Shortest grammar sentence (length <= max_len) the DFA rejects, or
// nullopt when the DFA accepts them all (the soundness direction).
inline std::optional<std::vector<std::string>> soundness_gap(
    const fsapprox::Grammar& g, const fsapprox::Dfa& d, int max_len) {
    for (const auto& word : fsapprox::oracle::enumerate_language(g, max_len))
        if (!fsapprox::accepts(d, word)) return word;
    return std::nullopt;
}

// ---------------------------------------------------------------------
// Random grammar generators. All take the engine by reference so a test
// can fix one seed for a whole family.

inline std::string nt_name(int i) { return "n" + std::to_string(i); }

// Recomputes the symbol sets from the start symbol and the rules, so the
// grammar mentions exactly what its text rendering would mention.
inline void tighten(fsapprox::Grammar& g) {
    using namespace fsapprox;
    g.terminals.clear();
    g.nonterminals.clear();
    g.nonterminals.insert(g.start);
    for (const auto& r : g.rules) {
        g.nonterminals.insert(r.lhs);
        for (const auto& s : r.rhs) {
            if (s.kind == SymbolKind::Terminal)
                g.terminals.insert(s.name);
            else
                g.nonterminals.insert(s.name);
        }
    }
}

// A small arbitrary CFG: up to `max_nts` nonterminals, up to `max_rules`
// distinct rules, right-hand sides of length <= 3 over {a, b, c}.
inline fsapprox::Grammar random_cfg(std::mt19937& rng, int max_nts = 5,
                                    int max_rules = 10) {
    using namespace fsapprox;
    std::uniform_int_distribution<int> nts_dist(1, max_nts);
    int nts = nts_dist(rng);
    Grammar g;
    g.terminals = {"a", "b", "c"};
    for (int i = 0; i < nts; ++i) g.nonterminals.insert(nt_name(i));
    g.start = nt_name(0);

    std::uniform_int_distribution<int> rules_dist(1, max_rules);
    std::uniform_int_distribution<int> len_dist(0, 3);
    std::uniform_int_distribution<int> nt_dist(0, nts - 1);
    std::uniform_int_distribution<int> t_dist(0, 2);
    std::bernoulli_distribution pick_terminal(0.6);
    int target = rules_dist(rng);
    std::set<Rule> seen;
    for (int r = 0; r < target; ++r) {
        Rule rule;
        rule.lhs = nt_name(nt_dist(rng));
        int len = len_dist(rng);
        for (int i = 0; i < len; ++i) {
            if (pick_terminal(rng))
                rule.rhs.push_back(terminal(std::string(1, "abc"[t_dist(rng)])));
            else
                rule.rhs.push_back(nonterminal(nt_name(nt_dist(rng))));
        }
        if (seen.insert(rule).second) g.rules.push_back(std::move(rule));
    }
    // Guarantee the start symbol derives something.
    Rule base{g.start, {terminal("a")}};
    if (seen.insert(base).second) g.rules.push_back(std::move(base));
    tighten(g);
    return g;
}

// A random linear grammar: every rule is w or wB (right linear) or w or
// Bw (left linear), w a string of length <= 2 over `fillers`. `fillers`
// defaults to plain terminals; passing nonterminal symbols of another
// grammar layer yields per-component-linear grammars.
inline fsapprox::Grammar random_linear(
    std::mt19937& rng, bool right, int max_nts = 4, int max_rules = 8,
    const std::vector<fsapprox::Symbol>& extra_fillers = {},
    int name_base = 0) {
    using namespace fsapprox;
    std::uniform_int_distribution<int> nts_dist(1, max_nts);
    int nts = nts_dist(rng);
    Grammar g;
    g.terminals = {"a", "b", "c"};
    std::vector<Symbol> fillers = {terminal("a"), terminal("b"),
                                   terminal("c")};
    for (const Symbol& s : extra_fillers) {
        fillers.push_back(s);
        if (s.kind == SymbolKind::Terminal)
            g.terminals.insert(s.name);
        else
            g.nonterminals.insert(s.name);
    }
    for (int i = 0; i < nts; ++i) g.nonterminals.insert(nt_name(name_base + i));
    g.start = nt_name(name_base);

    std::uniform_int_distribution<int> rules_dist(nts, max_rules);
    std::uniform_int_distribution<int> len_dist(0, 2);
    std::uniform_int_distribution<int> nt_dist(0, nts - 1);
    std::uniform_int_distribution<int> fill_dist(
        0, static_cast<int>(fillers.size()) - 1);
    std::bernoulli_distribution chain(0.5);
    int target = rules_dist(rng);
    std::set<Rule> seen;
    for (int r = 0; r < target; ++r) {
        // Spread left-hand sides around so every nonterminal is defined.
        Rule rule;
        rule.lhs = nt_name(name_base + (r < nts ? r : nt_dist(rng)));
        int len = len_dist(rng);
        std::vector<Symbol> w;
        for (int i = 0; i < len; ++i) w.push_back(fillers[fill_dist(rng)]);
        bool linked = chain(rng);
        Symbol link = nonterminal(nt_name(name_base + nt_dist(rng)));
        if (right) {
            rule.rhs = w;
            if (linked) rule.rhs.push_back(link);
        } else {
            if (linked) rule.rhs.push_back(link);
            rule.rhs.insert(rule.rhs.end(), w.begin(), w.end());
        }
        if (seen.insert(rule).second) g.rules.push_back(std::move(rule));
    }
    Rule base{g.start, {fillers[fill_dist(rng)]}};
    if (seen.insert(base).second) g.rules.push_back(std::move(base));
    tighten(g);
    return g;
}

// Two linear layers of opposite handedness: the lower layer's start
// symbols appear inside the upper layer's rules where terminals would,
// so each strongly connected component is linear although the whole
// grammar is not.
inline fsapprox::Grammar random_mixed_linear(std::mt19937& rng) {
    using namespace fsapprox;
    std::bernoulli_distribution coin(0.5);
    bool lower_right = coin(rng);
    Grammar lower = random_linear(rng, lower_right, 3, 6, {}, 10);
    Grammar upper = random_linear(rng, !lower_right, 3, 6,
                                  {nonterminal(lower.start)}, 0);
    Grammar g = upper;
    for (const auto& r : lower.rules) g.rules.push_back(r);
    tighten(g);
    validate(g);
    return g;
}

// ---------------------------------------------------------------------
// Brute-force shift-reduce configuration walker: every path of the
// characteristic machine is a reachable recognizer stack, so walking
// paths up to a depth bound enumerates configurations independently of
// the congruence machinery.

inline std::vector<std::pair<int, fsapprox::Stack>> reachable_configurations(
    const fsapprox::CharacteristicMachine& m, int max_depth) {
    std::vector<std::pair<int, fsapprox::Stack>> out{{m.start_state, {}}};
    for (size_t i = 0; i < out.size(); ++i) {
        auto [s, sigma] = out[i];
        if (static_cast<int>(sigma.size()) >= max_depth) continue;
        for (const auto& [sym, t] : m.delta[s]) {
            fsapprox::Stack ext = sigma;
            ext.push_back({s, sym});
            out.emplace_back(t, std::move(ext));
        }
    }
    return out;
}

// ---------------------------------------------------------------------
// CLI harness (used by the cli suite and the acceptance program).

struct CliResult {
    int exit_code = -1;
    std::string output;
};

inline std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    return out + "'";
}

// Runs `argv` through the shell, capturing stdout (and stderr when
// `merge_stderr`); everything else goes to /dev/null.
inline CliResult run_cli(const std::vector<std::string>& argv,
                         bool merge_stderr = false) {
    std::string cmd;
    for (const auto& a : argv) {
        if (!cmd.empty()) cmd += ' ';
        cmd += shell_quote(a);
    }
    cmd += merge_stderr ? " 2>&1" : " 2>/dev/null";
    CliResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return res;
    std::array<char, 4096> buf;
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        res.output.append(buf.data(), got);
    int status = pclose(pipe);
    res.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status)
                                                       : -1;
    return res;
}

}  // namespace support
