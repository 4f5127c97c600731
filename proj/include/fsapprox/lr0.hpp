#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fsapprox/grammar.hpp"

namespace fsapprox {

/// An item of the characteristic machine: a rule with a dot position.
struct DottedRule {
    int rule;
    int dot;

    auto operator<=>(const DottedRule&) const = default;
};

using Lr0State = std::set<DottedRule>;

/// The LR(0) characteristic machine of a grammar: a DFA over grammar
/// symbols whose states are item sets. The grammar stored here is the
/// augmented copy (a fresh start rule is appended); `reductions` lists
/// completed rules per state, excluding the augmented rule, which is
/// represented by `finals` instead.
struct CharacteristicMachine {
    Grammar grammar;
    std::string original_start;
    std::string augmented_start;
    int augmented_rule = -1;
    std::vector<Lr0State> states;
    std::vector<std::map<Symbol, int>> delta;
    int start_state = 0;
    std::set<int> finals;
    std::vector<std::vector<int>> reductions;

    int step(int state, const Symbol& sym) const {
        auto it = delta[state].find(sym);
        return it == delta[state].end() ? -1 : it->second;
    }

    int num_states() const { return static_cast<int>(states.size()); }

    /// Walks delta over a symbol sequence; -1 when undefined.
    int walk(int state, const std::vector<Symbol>& syms) const {
        for (const Symbol& s : syms) {
            if (state < 0) return -1;
            state = step(state, s);
        }
        return state;
    }
};

/// Closes an item set under prediction: a dot before a nonterminal pulls
/// in all of that nonterminal's rules at dot 0.
inline Lr0State closure(const Grammar& g,
                        const std::map<std::string, std::vector<int>>& by_lhs,
                        Lr0State items) {
    std::vector<DottedRule> work(items.begin(), items.end());
    while (!work.empty()) {
        DottedRule it = work.back();
        work.pop_back();
        const Rule& r = g.rules[it.rule];
        if (it.dot >= static_cast<int>(r.rhs.size())) continue;
        const Symbol& sym = r.rhs[it.dot];
        if (sym.kind != SymbolKind::Nonterminal) continue;
        auto rit = by_lhs.find(sym.name);
        if (rit == by_lhs.end()) continue;
        for (int ri : rit->second) {
            DottedRule d{ri, 0};
            if (items.insert(d).second) work.push_back(d);
        }
    }
    return items;
}

/// Builds the characteristic machine by subset construction over item
/// sets. State 0 is the closure of the augmented start item; successors
/// are explored in symbol order (terminals first, then by name), so the
/// numbering is reproducible.
inline CharacteristicMachine build_machine(const Grammar& g) {
    CharacteristicMachine m;
    m.grammar = g;
    m.original_start = g.start;
    std::string aug = g.start;
    do aug += '\'';
    while (g.terminals.count(aug) || g.nonterminals.count(aug));
    m.augmented_start = aug;
    m.grammar.nonterminals.insert(aug);
    m.grammar.rules.push_back({aug, {nonterminal(g.start)}});
    m.augmented_rule = static_cast<int>(m.grammar.rules.size()) - 1;
    m.grammar.start = aug;

    std::map<std::string, std::vector<int>> by_lhs;
    for (int i = 0; i < static_cast<int>(m.grammar.rules.size()); ++i)
        by_lhs[m.grammar.rules[i].lhs].push_back(i);

    std::map<Lr0State, int> index;
    auto intern = [&](Lr0State s) {
        auto it = index.find(s);
        if (it != index.end()) return it->second;
        int id = static_cast<int>(m.states.size());
        index.emplace(s, id);
        m.states.push_back(std::move(s));
        m.delta.emplace_back();
        return id;
    };
    intern(closure(m.grammar, by_lhs, {{m.augmented_rule, 0}}));
    for (int cur = 0; cur < static_cast<int>(m.states.size()); ++cur) {
        std::map<Symbol, Lr0State> moved;
        for (const DottedRule& it : m.states[cur]) {
            const Rule& r = m.grammar.rules[it.rule];
            if (it.dot < static_cast<int>(r.rhs.size()))
                moved[r.rhs[it.dot]].insert({it.rule, it.dot + 1});
        }
        for (auto& [sym, kernel] : moved) {
            int dst = intern(closure(m.grammar, by_lhs, std::move(kernel)));
            m.delta[cur][sym] = dst;
        }
    }

    m.reductions.resize(m.states.size());
    for (int s = 0; s < static_cast<int>(m.states.size()); ++s) {
        for (const DottedRule& it : m.states[s]) {
            if (it.dot != static_cast<int>(m.grammar.rules[it.rule].rhs.size()))
                continue;
            if (it.rule == m.augmented_rule)
                m.finals.insert(s);
            else
                m.reductions[s].push_back(it.rule);
        }
    }
    return m;
}

}  // namespace fsapprox
